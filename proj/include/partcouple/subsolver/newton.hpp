#pragma once

#include <Eigen/LU>

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>

#include "partcouple/core/errors.hpp"
#include "partcouple/core/interface_field.hpp"
#include "partcouple/subsolver/budget.hpp"

namespace partcouple {

/// When a solver is able to certify single-field convergence.
///
/// AfterStep: the residual is re-evaluated after every update, so a call that
/// runs out of budget still knows whether its final iterate is converged.
/// BeforeStep: only the residual assembled at the start of a Newton iteration
/// counts; a call stopped by its budget (or by output stability) reports
/// itself unconverged and the final iterate is checked on the next call.
enum class ResidualCheck { AfterStep, BeforeStep };

struct NewtonOptions {
    double eps_problem = 1e-10;
    std::size_t cap = 100;
    ResidualCheck check = ResidualCheck::AfterStep;
    bool line_search = true;
    double relative_floor = 1e-12;
};

struct NewtonResult {
    Vector x;
    std::size_t newton_iters = 0;
    double residual_norm = 0.0;
    bool converged = false;
};

inline constexpr double kDivergenceBound = 1e12;
inline constexpr double kPivotRatio = 1e-14;

namespace detail {

/// Dense LU with partial pivoting; rejects numerically singular matrices.
inline Vector lu_solve(const Matrix& jac, const Vector& rhs)
{
    if (jac.rows() != jac.cols() || jac.rows() != rhs.size()) {
        throw ContractViolation("lu_solve: dimension mismatch");
    }
    if (!jac.allFinite()) throw NumericError("Jacobian contains non-finite entries");
    Eigen::PartialPivLU<Matrix> lu(jac);
    const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
    const double max_pivot = pivots.maxCoeff();
    if (!(max_pivot > 0.0) || pivots.minCoeff() < kPivotRatio * max_pivot) {
        throw NumericError("singular or ill-conditioned Jacobian");
    }
    return lu.solve(rhs);
}

} // namespace detail

/// Central-difference Jacobian; only meant for checking analytic Jacobians.
template <class ResidualFn>
Matrix finite_difference_jacobian(ResidualFn&& residual, const Vector& x)
{
    const Vector r0 = residual(x);
    Matrix jac(r0.size(), x.size());
    Vector xp = x;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double h = 1e-7 * (1.0 + std::abs(x[j]));
        xp[j] = x[j] + h;
        const Vector rp = residual(xp);
        xp[j] = x[j] - h;
        const Vector rm = residual(xp);
        xp[j] = x[j];
        jac.col(j) = (rp - rm) / (2.0 * h);
    }
    return jac;
}

/// Budgeted Newton iteration x <- x - J(x)^{-1} r(x).
///
/// Stops on single-field convergence (any count including 0), when a finite
/// budget is used up, when the output stabilises (UntilOutputStable), or at
/// the per-call cap. Hitting the cap is an error only under UntilConverged.
/// A half-step backtracking line search engages only when a full step inflates
/// the residual norm more than tenfold.
template <class ResidualFn, class JacobianFn, class OutputFn>
NewtonResult newton_solve(ResidualFn&& residual,
                          JacobianFn&& jacobian,
                          Vector x0,
                          const NewtonBudget& budget,
                          const NewtonOptions& opts,
                          OutputFn&& output)
{
    validate(budget);
    if (opts.cap < 1) throw ContractViolation("newton_solve: cap must be >= 1");
    if (!(opts.eps_problem > 0.0)) throw ContractViolation("newton_solve: eps_problem must be positive");
    detail::require_finite(x0, "newton_solve: initial iterate");

    const auto* finite = std::get_if<FiniteBudget>(&budget);
    const auto* stable = std::get_if<UntilOutputStable>(&budget);
    const bool until_converged = std::holds_alternative<UntilConverged>(budget);

    NewtonResult res;
    res.x = std::move(x0);
    Vector r = residual(res.x);
    double norm = r.norm();
    if (!std::isfinite(norm)) throw NumericError("residual is non-finite at the initial iterate");
    if (norm > kDivergenceBound) throw DivergenceError("residual norm exceeds divergence bound at entry");

    bool output_stable = false;
    double last_start_norm = norm;

    auto stop_without_check = [&]() {
        res.converged = opts.check == ResidualCheck::AfterStep && norm < opts.eps_problem;
        res.residual_norm = opts.check == ResidualCheck::AfterStep ? norm : last_start_norm;
        return res;
    };

    while (true) {
        if ((finite && res.newton_iters >= finite->n) || output_stable) {
            return stop_without_check();
        }
        // start of a Newton iteration: the residual at the current iterate is known
        last_start_norm = norm;
        if (norm < opts.eps_problem) {
            res.converged = true;
            res.residual_norm = norm;
            return res;
        }
        if (res.newton_iters >= opts.cap) {
            if (until_converged) {
                throw NonConvergenceError("Newton cap of " + std::to_string(opts.cap) +
                                          " iterations reached, residual " + std::to_string(norm));
            }
            res.converged = false;
            res.residual_norm = norm;
            return res;
        }

        const Vector dx = detail::lu_solve(jacobian(res.x), r);
        Vector out_before;
        if (stable) out_before = output(res.x);

        Vector trial = res.x - dx;
        Vector r_trial = residual(trial);
        double n_trial = r_trial.norm();
        if (opts.line_search && !(n_trial <= 10.0 * norm)) {
            double lambda = 1.0;
            for (int halving = 0; halving < 8; ++halving) {
                lambda *= 0.5;
                trial = res.x - lambda * dx;
                r_trial = residual(trial);
                n_trial = r_trial.norm();
                if (n_trial <= (1.0 - 1e-4 * lambda) * norm) break;
            }
        }
        if (!std::isfinite(n_trial)) throw NumericError("residual became non-finite");
        if (n_trial > kDivergenceBound) {
            throw DivergenceError("Newton diverged: residual norm " + std::to_string(n_trial));
        }

        res.x = std::move(trial);
        r = std::move(r_trial);
        norm = n_trial;
        ++res.newton_iters;

        if (stable) {
            output_stable = relative_change(out_before, output(res.x), opts.relative_floor) < stable->eps_cid;
        }
    }
}

/// Overload whose outgoing data is the iterate itself.
template <class ResidualFn, class JacobianFn>
NewtonResult newton_solve(ResidualFn&& residual,
                          JacobianFn&& jacobian,
                          Vector x0,
                          const NewtonBudget& budget,
                          const NewtonOptions& opts)
{
    return newton_solve(std::forward<ResidualFn>(residual), std::forward<JacobianFn>(jacobian),
                        std::move(x0), budget, opts, [](const Vector& x) { return x; });
}

} // namespace partcouple
