#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>

#include "partcouple/core/errors.hpp"

namespace partcouple {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Which side of the Dirichlet-Neumann exchange a field belongs to.
enum class FieldRole { DisplacementLike, TractionLike };

inline std::string_view to_string(FieldRole role)
{
    return role == FieldRole::DisplacementLike ? "displacement" : "traction";
}

/// Interface degrees of freedom exchanged between the two sub-solvers.
struct InterfaceField {
    FieldRole role = FieldRole::DisplacementLike;
    Vector values;

    InterfaceField() = default;
    InterfaceField(FieldRole r, Vector v) : role(r), values(std::move(v)) {}

    static InterfaceField zeros(FieldRole r, Eigen::Index n) { return {r, Vector::Zero(n)}; }

    Eigen::Index size() const { return values.size(); }
    bool all_finite() const { return values.allFinite(); }
};

namespace detail {

inline void require_finite(const Eigen::Ref<const Vector>& v, const char* what)
{
    if (!v.allFinite()) {
        throw NumericError(std::string(what) + " contains non-finite entries");
    }
}

} // namespace detail

/// ||curr - prev||_2 / max(||curr||_2, floor).
inline double relative_change(const Eigen::Ref<const Vector>& prev,
                              const Eigen::Ref<const Vector>& curr,
                              double floor)
{
    if (prev.size() != curr.size()) {
        throw ContractViolation("relative_change: length mismatch (" + std::to_string(prev.size()) +
                                " vs " + std::to_string(curr.size()) + ")");
    }
    if (!(floor > 0.0)) {
        throw ContractViolation("relative_change: floor must be positive");
    }
    detail::require_finite(prev, "relative_change: previous field");
    detail::require_finite(curr, "relative_change: current field");
    const double diff = (curr - prev).norm();
    return diff / std::max(curr.norm(), floor);
}

inline double relative_change(const InterfaceField& prev, const InterfaceField& curr, double floor)
{
    return relative_change(prev.values, curr.values, floor);
}

} // namespace partcouple
