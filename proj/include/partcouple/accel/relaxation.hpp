#pragma once

#include <string>

#include "partcouple/core/errors.hpp"
#include "partcouple/core/interface_field.hpp"

namespace partcouple {

namespace detail {

inline void require_same_shape(const InterfaceField& a, const InterfaceField& b, const char* what)
{
    if (a.size() != b.size()) throw ContractViolation(std::string(what) + ": interface length mismatch");
    if (a.role != b.role) throw ContractViolation(std::string(what) + ": interface role mismatch");
}

} // namespace detail

/// x_next = omega * x_tilde + (1 - omega) * x
inline InterfaceField relax_constant(const InterfaceField& x, const InterfaceField& x_tilde, double omega)
{
    detail::require_same_shape(x, x_tilde, "relax_constant");
    if (omega == 1.0) return x_tilde;
    return {x.role, omega * x_tilde.values + (1.0 - omega) * x.values};
}

} // namespace partcouple
