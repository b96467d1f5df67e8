#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "partcouple/core/errors.hpp"

namespace partcouple {

struct CouplingIterationRecord {
    std::size_t newton_a = 0;
    std::size_t newton_b = 0;
    /// Relative change of each solver's output against the previous coupling
    /// iteration; +inf on the first iteration of a step.
    double change_a = std::numeric_limits<double>::infinity();
    double change_b = std::numeric_limits<double>::infinity();
};

struct StepRecord {
    std::vector<CouplingIterationRecord> iterations;
    bool converged = false;
};

struct IterationTotals {
    std::size_t n_coupling = 0;
    std::size_t newton_a = 0;
    std::size_t newton_b = 0;

    std::size_t newton_total() const { return newton_a + newton_b; }
};

/// Per time step, per coupling iteration Newton accounting of a coupled run.
class IterationLedger {
public:
    void open_step()
    {
        if (step_open_) throw ContractViolation("ledger: previous step still open");
        steps_.emplace_back();
        step_open_ = true;
    }

    void record(const CouplingIterationRecord& rec)
    {
        if (!step_open_) throw ContractViolation("ledger: no open step");
        steps_.back().iterations.push_back(rec);
        totals_.n_coupling += 1;
        totals_.newton_a += rec.newton_a;
        totals_.newton_b += rec.newton_b;
    }

    void close_step(bool converged)
    {
        if (!step_open_) throw ContractViolation("ledger: no open step");
        steps_.back().converged = converged;
        step_open_ = false;
    }

    bool step_open() const { return step_open_; }
    const std::vector<StepRecord>& steps() const { return steps_; }
    const IterationTotals& totals() const { return totals_; }

    std::size_t n_coupling() const { return totals_.n_coupling; }
    std::size_t newton_a_total() const { return totals_.newton_a; }
    std::size_t newton_b_total() const { return totals_.newton_b; }
    std::size_t newton_total() const { return totals_.newton_total(); }

    std::size_t converged_steps() const
    {
        std::size_t n = 0;
        for (const auto& s : steps_) n += s.converged ? 1 : 0;
        return n;
    }

private:
    std::vector<StepRecord> steps_;
    IterationTotals totals_;
    bool step_open_ = false;
};

} // namespace partcouple
