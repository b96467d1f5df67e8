#pragma once

#include <Eigen/Eigenvalues>

#include <cstddef>
#include <vector>

#include "partcouple/subsolver/coupled_problem.hpp"
#include "partcouple/subsolver/newton.hpp"

namespace partcouple {

/// Layout of the stacked unknown z = [state_A; state_B; d; t].
struct StackedLayout {
    Eigen::Index na, nb, nd, nt;

    explicit StackedLayout(const CoupledProblem& p)
        : na(p.solver_a().block().state_size()),
          nb(p.solver_b().block().state_size()),
          nd(p.displacement_size()),
          nt(p.traction_size())
    {
    }

    Eigen::Index size() const { return na + nb + nd + nt; }
    Eigen::Index off_b() const { return na; }
    Eigen::Index off_d() const { return na + nb; }
    Eigen::Index off_t() const { return na + nb + nd; }
};

struct MonolithicSolution {
    InterfaceField displacement;
    InterfaceField traction;
    Vector state_a;
    Vector state_b;
    std::size_t newton_iters = 0;
    double residual_norm = 0.0;
};

/// [r_A(s_A; d); r_B(s_B; t); d - out_B(s_B; t); t - out_A(s_A; d)], zero exactly
/// at a fixed point of the partitioned iteration.
inline Vector stacked_residual(const CoupledProblem& p, const Vector& z)
{
    const StackedLayout L(p);
    if (z.size() != L.size()) throw ContractViolation("stacked_residual: unknown vector has wrong size");
    const FieldBlock& A = p.solver_a().block();
    const FieldBlock& B = p.solver_b().block();
    const Vector sa = z.segment(0, L.na);
    const Vector sb = z.segment(L.off_b(), L.nb);
    const Vector d = z.segment(L.off_d(), L.nd);
    const Vector t = z.segment(L.off_t(), L.nt);

    Vector r(L.size());
    r.segment(0, L.na) = A.residual(sa, d);
    r.segment(L.off_b(), L.nb) = B.residual(sb, t);
    r.segment(L.off_d(), L.nd) = d - B.output(sb, t);
    r.segment(L.off_t(), L.nt) = t - A.output(sa, d);
    return r;
}

inline Matrix stacked_jacobian(const CoupledProblem& p, const Vector& z)
{
    const StackedLayout L(p);
    const FieldBlock& A = p.solver_a().block();
    const FieldBlock& B = p.solver_b().block();
    const Vector sa = z.segment(0, L.na);
    const Vector sb = z.segment(L.off_b(), L.nb);
    const Vector d = z.segment(L.off_d(), L.nd);
    const Vector t = z.segment(L.off_t(), L.nt);

    Matrix J = Matrix::Zero(L.size(), L.size());
    J.block(0, 0, L.na, L.na) = A.jacobian(sa, d);
    J.block(0, L.off_d(), L.na, L.nd) = A.input_jacobian(sa, d);

    J.block(L.off_b(), L.off_b(), L.nb, L.nb) = B.jacobian(sb, t);
    J.block(L.off_b(), L.off_t(), L.nb, L.nt) = B.input_jacobian(sb, t);

    J.block(L.off_d(), L.off_d(), L.nd, L.nd) = Matrix::Identity(L.nd, L.nd);
    J.block(L.off_d(), L.off_b(), L.nd, L.nb) = -B.output_state_jacobian(sb, t);
    J.block(L.off_d(), L.off_t(), L.nd, L.nt) = -B.output_input_jacobian(sb, t);

    J.block(L.off_t(), L.off_t(), L.nt, L.nt) = Matrix::Identity(L.nt, L.nt);
    J.block(L.off_t(), 0, L.nt, L.na) = -A.output_state_jacobian(sa, d);
    J.block(L.off_t(), L.off_d(), L.nt, L.nd) = -A.output_input_jacobian(sa, d);
    return J;
}

/// Stacked unknown assembled from the current sub-solver iterates.
inline Vector current_stacked_unknown(const CoupledProblem& p)
{
    const StackedLayout L(p);
    Vector z(L.size());
    z.segment(0, L.na) = p.solver_a().state();
    z.segment(L.off_b(), L.nb) = p.solver_b().state();
    z.segment(L.off_d(), L.nd) = p.current_displacement().values;
    z.segment(L.off_t(), L.nt) = p.current_traction().values;
    return z;
}

/// Newton on the stacked two-field system at the current time level. The
/// problem is not modified; see commit_monolithic.
inline MonolithicSolution monolithic_solve(const CoupledProblem& p, double eps, std::size_t cap = 50)
{
    NewtonOptions opts;
    opts.eps_problem = eps;
    opts.cap = cap;
    auto res = newton_solve([&](const Vector& z) { return stacked_residual(p, z); },
                            [&](const Vector& z) { return stacked_jacobian(p, z); },
                            current_stacked_unknown(p), UntilConverged{}, opts);
    const StackedLayout L(p);
    MonolithicSolution sol;
    sol.state_a = res.x.segment(0, L.na);
    sol.state_b = res.x.segment(L.off_b(), L.nb);
    sol.displacement = {FieldRole::DisplacementLike, res.x.segment(L.off_d(), L.nd)};
    sol.traction = {FieldRole::TractionLike, res.x.segment(L.off_t(), L.nt)};
    sol.newton_iters = res.newton_iters;
    sol.residual_norm = res.residual_norm;
    return sol;
}

/// Load a monolithic solution into both sub-solvers and advance the time level.
inline void commit_monolithic(CoupledProblem& p, const MonolithicSolution& sol)
{
    p.solver_a().set_input(sol.displacement);
    p.solver_a().set_state(sol.state_a);
    p.solver_b().set_input(sol.traction);
    p.solver_b().set_state(sol.state_b);
    p.solver_a().commit_step();
    p.solver_b().commit_step();
}

/// Linearised Dirichlet-Neumann interface map d -> d~ at the current iterates:
/// the product of both solvers' total input-to-output derivatives.
inline Matrix dirichlet_neumann_iteration_matrix(const CoupledProblem& p)
{
    auto total = [](const BlockSubSolver& s) {
        const FieldBlock& blk = s.block();
        const Vector& st = s.state();
        const Vector& in = s.input();
        const Matrix ds_din = -Eigen::PartialPivLU<Matrix>(blk.jacobian(st, in)).solve(blk.input_jacobian(st, in));
        return Matrix(blk.output_input_jacobian(st, in) + blk.output_state_jacobian(st, in) * ds_din);
    };
    return total(p.solver_b()) * total(p.solver_a());
}

inline double spectral_radius(const Matrix& m)
{
    Eigen::EigenSolver<Matrix> es(m, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Monolithic reference trajectory: each step solves the stacked system from
/// the previous step's solution and commits it. time_step(n) gives the new time
/// level of step n (0-based).
template <class TimeOfStep>
std::vector<MonolithicSolution> run_monolithic(CoupledProblem& p,
                                               std::size_t n_steps,
                                               double dt,
                                               TimeOfStep&& time_of_step,
                                               double eps,
                                               std::size_t cap = 50)
{
    std::vector<MonolithicSolution> out;
    out.reserve(n_steps);
    for (std::size_t n = 0; n < n_steps; ++n) {
        p.begin_step(time_of_step(n), dt);
        out.push_back(monolithic_solve(p, eps, cap));
        commit_monolithic(p, out.back());
    }
    return out;
}


} // namespace partcouple
