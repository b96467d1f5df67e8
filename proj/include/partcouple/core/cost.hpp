#pragma once

#include "partcouple/core/errors.hpp"
#include "partcouple/core/ledger.hpp"

namespace partcouple {

/// Linear cost model: data transfer per coupling iteration plus a price per
/// Newton iteration of each subproblem.
struct CostModel {
    double cost_transfer = 0.0;
    double cost_newton_a = 1.0;
    double cost_newton_b = 1.0;

    void validate() const
    {
        if (cost_transfer < 0.0 || cost_newton_a < 0.0 || cost_newton_b < 0.0) {
            throw ContractViolation("cost model entries must be non-negative");
        }
    }
};

inline double estimate_cost(const IterationTotals& totals, const CostModel& model)
{
    return static_cast<double>(totals.n_coupling) * model.cost_transfer +
           static_cast<double>(totals.newton_a) * model.cost_newton_a +
           static_cast<double>(totals.newton_b) * model.cost_newton_b;
}

inline double estimate_cost(const IterationLedger& ledger, const CostModel& model)
{
    return estimate_cost(ledger.totals(), model);
}

} // namespace partcouple
