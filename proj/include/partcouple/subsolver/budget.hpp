#pragma once

#include <cstddef>
#include <string>
#include <variant>

#include "partcouple/core/errors.hpp"

namespace partcouple {

/// At most n Newton iterations in this call.
struct FiniteBudget {
    std::size_t n = 1;
    bool operator==(const FiniteBudget&) const = default;
};

/// Iterate until single-field convergence (subject to the per-call cap).
struct UntilConverged {
    bool operator==(const UntilConverged&) const = default;
};

/// Iterate until the solver's outgoing interface data changes by less than
/// eps_cid between successive Newton iterates, or single-field convergence.
struct UntilOutputStable {
    double eps_cid = 1e-4;
    bool operator==(const UntilOutputStable&) const = default;
};

using NewtonBudget = std::variant<FiniteBudget, UntilConverged, UntilOutputStable>;

inline void validate(const NewtonBudget& budget)
{
    if (const auto* f = std::get_if<FiniteBudget>(&budget); f && f->n < 1) {
        throw ContractViolation("finite Newton budget must allow at least one iteration");
    }
    if (const auto* s = std::get_if<UntilOutputStable>(&budget); s && !(s->eps_cid > 0.0)) {
        throw ContractViolation("output-stability bound must be positive");
    }
}

inline std::string to_string(const NewtonBudget& budget)
{
    struct {
        std::string operator()(const FiniteBudget& f) const { return std::to_string(f.n); }
        std::string operator()(const UntilConverged&) const { return "inf"; }
        std::string operator()(const UntilOutputStable& s) const
        {
            return "cid(" + std::to_string(s.eps_cid) + ")";
        }
    } visitor;
    return std::visit(visitor, budget);
}

} // namespace partcouple
