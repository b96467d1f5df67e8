#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "partcouple/core/tolerances.hpp"
#include "partcouple/subsolver/budget.hpp"

namespace partcouple {

/// Fixed Newton allowance per call; nullopt means "until converged".
struct FixedPerCall {
    std::optional<std::size_t> n_a;
    std::optional<std::size_t> n_b;
};

/// k Newton iterations per call until coupling convergence is seen in the
/// current step, then full single-field convergence (with switch-back).
struct NkCC {
    std::size_t k = 1;
    double strict_factor = 1.0;
};

/// Each call iterates until its outgoing interface data is stable.
struct ConvergedInterfaceData {
    double eps_cid = 1e-4;
};

using BudgetPolicy = std::variant<FixedPerCall, NkCC, ConvergedInterfaceData>;

struct PolicyState {
    bool cc_reached = false;
    bool switched_back = false;
};

struct BudgetPair {
    NewtonBudget a;
    NewtonBudget b;
};

inline void validate(const BudgetPolicy& policy)
{
    if (const auto* f = std::get_if<FixedPerCall>(&policy)) {
        if ((f->n_a && *f->n_a < 1) || (f->n_b && *f->n_b < 1)) {
            throw ContractViolation("fixed Newton budgets must be >= 1 or unbounded");
        }
    }
    else if (const auto* k = std::get_if<NkCC>(&policy)) {
        if (k->k < 1) throw ContractViolation("Nk-CC requires k >= 1");
        if (!(k->strict_factor > 0.0 && k->strict_factor <= 1.0)) {
            throw ContractViolation("Nk-CC strict_factor must lie in (0, 1]");
        }
    }
    else if (!(std::get<ConvergedInterfaceData>(policy).eps_cid > 0.0)) {
        throw ContractViolation("CID policy requires eps_cid > 0");
    }
}

/// Label used in result tables: "N1-CC", "N3-CC", "CID"; empty for fixed budgets.
inline std::string policy_name(const BudgetPolicy& policy)
{
    if (const auto* k = std::get_if<NkCC>(&policy)) {
        std::string name = "N" + std::to_string(k->k) + "-CC";
        if (k->strict_factor != 1.0) {
            std::string s = std::to_string(k->strict_factor);
            s.erase(s.find_last_not_of('0') + 1);
            if (!s.empty() && s.back() == '.') s.pop_back();
            name += "-s" + s;
        }
        return name;
    }
    if (std::holds_alternative<ConvergedInterfaceData>(policy)) return "CID";
    return {};
}

inline NewtonBudget budget_from_count(std::optional<std::size_t> n)
{
    if (n) return FiniteBudget{*n};
    return UntilConverged{};
}

inline BudgetPair budgets_for_call(const BudgetPolicy& policy,
                                   const PolicyState& state,
                                   std::pair<double, double> /*last_changes*/,
                                   const CouplingTolerances& /*tol*/)
{
    if (const auto* f = std::get_if<FixedPerCall>(&policy)) {
        return {budget_from_count(f->n_a), budget_from_count(f->n_b)};
    }
    if (const auto* k = std::get_if<NkCC>(&policy)) {
        if (state.cc_reached) return {UntilConverged{}, UntilConverged{}};
        return {FiniteBudget{k->k}, FiniteBudget{k->k}};
    }
    const double eps = std::get<ConvergedInterfaceData>(policy).eps_cid;
    return {UntilOutputStable{eps}, UntilOutputStable{eps}};
}

/// Advance the policy state after a coupling iteration's convergence check.
/// Only Nk-CC carries state; other policies return it unchanged.
inline PolicyState update_policy_state(const BudgetPolicy& policy,
                                       PolicyState state,
                                       std::pair<double, double> last_changes,
                                       const CouplingTolerances& tol)
{
    const auto* k = std::get_if<NkCC>(&policy);
    if (!k) return state;
    const auto [ca, cb] = last_changes;
    const double trigger = k->strict_factor * tol.eps_coupling;
    if (ca < trigger && cb < trigger) {
        state.cc_reached = true;
    }
    else if (state.cc_reached && (ca >= tol.eps_coupling || cb >= tol.eps_coupling)) {
        state.cc_reached = false;
        state.switched_back = true;
    }
    return state;
}

} // namespace partcouple
