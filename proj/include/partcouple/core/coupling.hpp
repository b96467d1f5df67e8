#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "partcouple/accel/accelerator.hpp"
#include "partcouple/core/errors.hpp"
#include "partcouple/core/interface_field.hpp"
#include "partcouple/core/ledger.hpp"
#include "partcouple/core/tolerances.hpp"
#include "partcouple/policy/budget_policy.hpp"
#include "partcouple/subsolver/coupled_problem.hpp"

namespace partcouple {

inline bool coupling_converged(double change_a, double change_b, const CouplingTolerances& tol)
{
    return change_a < tol.eps_coupling && change_b < tol.eps_coupling;
}

/// Coupling loop hit max_coupling_iters; carries the ledger up to that point.
class CouplingNonConvergence : public NonConvergenceError {
public:
    CouplingNonConvergence(const std::string& what, IterationLedger ledger)
        : NonConvergenceError(what), ledger_(std::move(ledger))
    {
    }
    const IterationLedger& ledger() const { return ledger_; }

private:
    IterationLedger ledger_;
};

struct StepOutcome {
    InterfaceField displacement;   ///< raw output of solver B at convergence
    InterfaceField traction;       ///< output of solver A at convergence
    std::size_t coupling_iters = 0;
    double change_a = std::numeric_limits<double>::infinity();
    double change_b = std::numeric_limits<double>::infinity();
    double residual_a = 0.0;
    double residual_b = 0.0;
    PolicyState policy_state;
};

/// One time step of Dirichlet-Neumann Gauss-Seidel coupling.
///
/// The problem must already be at the new time level (begin_step called). The
/// displacement-like input of the first coupling iteration is B's latest
/// output, i.e. the previous step's converged field. Changes are measured on
/// raw solver outputs, so the first iteration of a step never converges. On
/// success both solvers commit and the accelerator closes the step.
inline StepOutcome run_time_step(CoupledProblem& problem,
                                 const BudgetPolicy& policy,
                                 Accelerator& accel,
                                 const CouplingTolerances& tol,
                                 IterationLedger& ledger,
                                 const TimeLoopConfig& limits)
{
    if (!ledger.step_open()) throw ContractViolation("run_time_step: ledger has no open step");
    BlockSubSolver& a = problem.solver_a();
    BlockSubSolver& b = problem.solver_b();

    try {
        InterfaceField x = problem.current_displacement();
        std::optional<InterfaceField> prev_traction;
        std::optional<InterfaceField> prev_displacement;
        StepOutcome out;
        accel.begin_step();

        for (std::size_t k = 0; k < limits.max_coupling_iters; ++k) {
            const BudgetPair budgets =
                budgets_for_call(policy, out.policy_state, {out.change_a, out.change_b}, tol);

            a.set_input(x);
            SolverCallReport ra = a.solve_call(budgets.a, tol.eps_problem[0], limits.max_newton_per_call);
            b.set_input(ra.output);
            SolverCallReport rb = b.solve_call(budgets.b, tol.eps_problem[1], limits.max_newton_per_call);

            CouplingIterationRecord rec;
            rec.newton_a = ra.newton_iters;
            rec.newton_b = rb.newton_iters;
            if (prev_traction) rec.change_a = relative_change(*prev_traction, ra.output, tol.relative_floor);
            if (prev_displacement) rec.change_b = relative_change(*prev_displacement, rb.output, tol.relative_floor);
            ledger.record(rec);

            out.change_a = rec.change_a;
            out.change_b = rec.change_b;
            out.coupling_iters = k + 1;

            if (coupling_converged(rec.change_a, rec.change_b, tol) && ra.single_field_converged &&
                rb.single_field_converged) {
                out.traction = std::move(ra.output);
                out.displacement = std::move(rb.output);
                out.residual_a = ra.residual_norm;
                out.residual_b = rb.residual_norm;
                a.commit_step();
                b.commit_step();
                accel.end_step();
                ledger.close_step(true);
                return out;
            }

            out.policy_state = update_policy_state(policy, out.policy_state, {rec.change_a, rec.change_b}, tol);
            x = accel.update(x, rb.output);
            if (!x.all_finite()) throw NumericError("accelerated interface field became non-finite");
            prev_traction = std::move(ra.output);
            prev_displacement = std::move(rb.output);
        }
    }
    catch (...) {
        if (ledger.step_open()) ledger.close_step(false);
        throw;
    }
    ledger.close_step(false);
    throw CouplingNonConvergence("coupling did not converge within " + std::to_string(limits.max_coupling_iters) +
                                     " iterations",
                                 ledger);
}

struct StepFields {
    double time = 0.0;
    InterfaceField displacement;
    InterfaceField traction;
    std::size_t coupling_iters = 0;
};

struct RunResult {
    IterationLedger ledger;
    std::vector<StepFields> steps;
    bool converged = false;
    std::string error;
};

/// Time loop over config.n_steps steps. Failures (coupling cap, sub-solver
/// errors) end the run and are reported in the result, never thrown; only
/// invalid arguments throw.
inline RunResult run_coupled(CoupledProblem& problem,
                             const BudgetPolicy& policy,
                             const AcceleratorSpec& accel_spec,
                             const CouplingTolerances& tol,
                             const TimeLoopConfig& time)
{
    tol.validate();
    time.validate();
    validate(policy);
    Accelerator accel(accel_spec);

    RunResult result;
    for (std::size_t n = 0; n < time.n_steps; ++n) {
        const double t_new = static_cast<double>(n + 1) * time.dt;
        problem.begin_step(t_new, time.dt);
        result.ledger.open_step();
        try {
            StepOutcome step = run_time_step(problem, policy, accel, tol, result.ledger, time);
            result.steps.push_back({t_new, std::move(step.displacement), std::move(step.traction), step.coupling_iters});
        }
        catch (const ContractViolation&) {
            throw;
        }
        catch (const std::exception& e) {
            result.error = "step " + std::to_string(n + 1) + ": " + e.what();
            return result;
        }
    }
    result.converged = true;
    return result;
}

} // namespace partcouple
