#pragma once

#include <memory>
#include <string>

#include "partcouple/subsolver/subsolver.hpp"

namespace partcouple {

/// Pair of black-box sub-solvers in Dirichlet-Neumann arrangement.
///
/// Solver A consumes the displacement-like field and produces the
/// traction-like field; solver B does the reverse.
class CoupledProblem {
public:
    CoupledProblem(std::string name,
                   std::unique_ptr<FieldBlock> a,
                   std::unique_ptr<FieldBlock> b,
                   double relative_floor = 1e-12)
        : name_(std::move(name)),
          a_(std::move(a), relative_floor),
          b_(std::move(b), relative_floor)
    {
        const FieldBlock& ba = a_.block();
        const FieldBlock& bb = b_.block();
        if (ba.input_role() != FieldRole::DisplacementLike || ba.output_role() != FieldRole::TractionLike ||
            bb.input_role() != FieldRole::TractionLike || bb.output_role() != FieldRole::DisplacementLike) {
            throw ContractViolation(name_ + ": solver roles do not form a Dirichlet-Neumann pair");
        }
        if (ba.input_size() != bb.output_size() || ba.output_size() != bb.input_size()) {
            throw ContractViolation(name_ + ": interface sizes of the two solvers disagree");
        }
    }

    const std::string& name() const { return name_; }

    BlockSubSolver& solver_a() { return a_; }
    BlockSubSolver& solver_b() { return b_; }
    const BlockSubSolver& solver_a() const { return a_; }
    const BlockSubSolver& solver_b() const { return b_; }

    Eigen::Index displacement_size() const { return a_.block().input_size(); }
    Eigen::Index traction_size() const { return a_.block().output_size(); }

    void begin_step(double time, double dt)
    {
        a_.begin_step(time, dt);
        b_.begin_step(time, dt);
    }

    /// Displacement-like field of the current B iterate (the predictor source).
    InterfaceField current_displacement() const { return b_.current_output(); }
    InterfaceField current_traction() const { return a_.current_output(); }

private:
    std::string name_;
    BlockSubSolver a_;
    BlockSubSolver b_;
};

} // namespace partcouple
