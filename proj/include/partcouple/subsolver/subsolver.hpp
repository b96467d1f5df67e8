#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "partcouple/core/interface_field.hpp"
#include "partcouple/subsolver/budget.hpp"
#include "partcouple/subsolver/newton.hpp"

namespace partcouple {

struct SolverCallReport {
    std::size_t newton_iters = 0;
    double residual_norm = 0.0;
    bool single_field_converged = false;
    InterfaceField output;
};

/// Black-box sub-solver as seen by the coupling loop: only interface input and
/// output are visible. Calls within one time step are resumable; each call
/// continues Newton from the latest internal iterate.
class SubSolver {
public:
    virtual ~SubSolver() = default;

    virtual void begin_step(double time, double dt) = 0;
    virtual void set_input(const InterfaceField& input) = 0;
    virtual SolverCallReport solve_call(const NewtonBudget& budget, double eps_problem, std::size_t cap) = 0;
    /// Accept the current iterate as the new time level.
    virtual void commit_step() = 0;
    virtual InterfaceField current_output() const = 0;
    /// Residual norm of the current iterate under the current input.
    virtual double residual_norm() const = 0;
};

/// Discrete nonlinear subproblem r(state; input) = 0 with analytic derivatives.
/// Time history lives in the block; the iterate lives in whoever solves it.
class FieldBlock {
public:
    virtual ~FieldBlock() = default;

    virtual std::string name() const = 0;
    virtual Eigen::Index state_size() const = 0;
    virtual Eigen::Index input_size() const = 0;
    virtual Eigen::Index output_size() const = 0;
    virtual FieldRole input_role() const = 0;
    virtual FieldRole output_role() const = 0;
    virtual ResidualCheck residual_check() const { return ResidualCheck::AfterStep; }

    virtual Vector initial_state() const { return Vector::Zero(state_size()); }
    virtual void begin_step(double /*time*/, double /*dt*/) {}
    virtual void commit(const Vector& /*state*/, const Vector& /*input*/) {}

    virtual Vector residual(const Vector& state, const Vector& input) const = 0;
    /// d residual / d state
    virtual Matrix jacobian(const Vector& state, const Vector& input) const = 0;
    /// d residual / d input
    virtual Matrix input_jacobian(const Vector& state, const Vector& input) const = 0;

    virtual Vector output(const Vector& state, const Vector& input) const = 0;
    virtual Matrix output_state_jacobian(const Vector& state, const Vector& input) const = 0;
    virtual Matrix output_input_jacobian(const Vector& state, const Vector& input) const = 0;
};

/// SubSolver backed by a FieldBlock and the budgeted Newton kernel.
class BlockSubSolver final : public SubSolver {
public:
    explicit BlockSubSolver(std::unique_ptr<FieldBlock> block, double relative_floor = 1e-12)
        : block_(std::move(block)),
          state_(block_->initial_state()),
          input_(Vector::Zero(block_->input_size())),
          relative_floor_(relative_floor)
    {
    }

    void begin_step(double time, double dt) override { block_->begin_step(time, dt); }

    void set_input(const InterfaceField& input) override
    {
        if (input.size() != block_->input_size()) {
            throw ContractViolation(block_->name() + ": input length " + std::to_string(input.size()) +
                                    ", expected " + std::to_string(block_->input_size()));
        }
        if (input.role != block_->input_role()) {
            throw ContractViolation(block_->name() + ": input has the wrong interface role");
        }
        detail::require_finite(input.values, "sub-solver input");
        input_ = input.values;
    }

    SolverCallReport solve_call(const NewtonBudget& budget, double eps_problem, std::size_t cap) override
    {
        NewtonOptions opts;
        opts.eps_problem = eps_problem;
        opts.cap = cap;
        opts.check = block_->residual_check();
        opts.relative_floor = relative_floor_;
        const FieldBlock& blk = *block_;
        const Vector& in = input_;
        auto result = newton_solve([&](const Vector& s) { return blk.residual(s, in); },
                                   [&](const Vector& s) { return blk.jacobian(s, in); },
                                   state_, budget, opts,
                                   [&](const Vector& s) { return blk.output(s, in); });
        state_ = std::move(result.x);
        return SolverCallReport{result.newton_iters, result.residual_norm, result.converged, current_output()};
    }

    void commit_step() override { block_->commit(state_, input_); }

    InterfaceField current_output() const override
    {
        return {block_->output_role(), block_->output(state_, input_)};
    }

    double residual_norm() const override { return block_->residual(state_, input_).norm(); }

    const FieldBlock& block() const { return *block_; }
    FieldBlock& block() { return *block_; }
    const Vector& state() const { return state_; }
    const Vector& input() const { return input_; }

    /// Overwrite the iterate, e.g. with a monolithic solution.
    void set_state(const Vector& state)
    {
        if (state.size() != block_->state_size()) throw ContractViolation("set_state: size mismatch");
        state_ = state;
    }

private:
    std::unique_ptr<FieldBlock> block_;
    Vector state_;
    Vector input_;
    double relative_floor_;
};

} // namespace partcouple
