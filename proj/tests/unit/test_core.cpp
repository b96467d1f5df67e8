#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "partcouple/core/cost.hpp"
#include "partcouple/core/coupling.hpp"
#include "partcouple/models/problem.hpp"
#include "partcouple/subsolver/monolithic.hpp"

using namespace partcouple;

namespace {

Vector vec(std::initializer_list<double> v)
{
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

InterfaceField disp(std::initializer_list<double> v) { return {FieldRole::DisplacementLike, vec(v)}; }

} // namespace

TEST(RelativeChange, IdenticalFieldsGiveZero)
{
    EXPECT_EQ(relative_change(disp({3.0, 4.0}), disp({3.0, 4.0}), 1e-12), 0.0);
}

TEST(RelativeChange, HandComputedNorms)
{
    const double expected = 0.5 / std::sqrt(1.25);
    EXPECT_NEAR(relative_change(disp({1, 0, 0}), disp({1, 0, 0.5}), 1e-12), expected, 1e-15);
    EXPECT_NEAR(expected, 0.4472, 1e-4);
}

TEST(RelativeChange, DenominatorFloor)
{
    EXPECT_DOUBLE_EQ(relative_change(disp({0.1}), disp({0.0}), 1.0), 0.1);
}

TEST(RelativeChange, Errors)
{
    EXPECT_THROW(relative_change(disp({1, 2}), disp({1}), 1e-12), ContractViolation);
    EXPECT_THROW(relative_change(disp({1}), disp({1}), 0.0), ContractViolation);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(relative_change(disp({1}), disp({nan}), 1e-12), NumericError);
    EXPECT_THROW(relative_change(disp({std::numeric_limits<double>::infinity()}), disp({1}), 1e-12), NumericError);
}

TEST(CouplingConverged, Examples)
{
    CouplingTolerances tol;
    EXPECT_TRUE(coupling_converged(0.0, 0.0, tol));
    EXPECT_FALSE(coupling_converged(1e-6, 2e-5, tol));
    EXPECT_TRUE(coupling_converged(9.9e-6, 9.9e-6, tol));
    EXPECT_FALSE(coupling_converged(1e-5, 0.0, tol)) << "the bound is strict";
}

TEST(CostModel, PublishedCellIdentity)
{
    IterationTotals t{1083, 1083, 1026};
    EXPECT_DOUBLE_EQ(estimate_cost(t, CostModel{0.0, 1.0, 1.0}), 2109.0);
    EXPECT_EQ(t.newton_total(), 2109u);
}

TEST(CostModel, ZeroCostAndArithmetic)
{
    EXPECT_DOUBLE_EQ(estimate_cost(IterationTotals{7, 9, 11}, CostModel{0.0, 0.0, 0.0}), 0.0);
    // 10 * 1 + 20 * 10 + 15 * 5
    EXPECT_DOUBLE_EQ(estimate_cost(IterationTotals{10, 20, 15}, CostModel{1.0, 10.0, 5.0}), 285.0);
    EXPECT_THROW(CostModel({-1.0, 1.0, 1.0}).validate(), ContractViolation);
}

TEST(IterationLedger, TotalsMatchRecords)
{
    IterationLedger ledger;
    ledger.open_step();
    ledger.record({3, 4, 1.0, 1.0});
    ledger.record({1, 0, 0.0, 0.0});
    ledger.close_step(true);
    ledger.open_step();
    ledger.record({2, 5, 1.0, 1.0});
    ledger.close_step(false);

    std::size_t a = 0, b = 0, n = 0;
    for (const auto& s : ledger.steps()) {
        for (const auto& r : s.iterations) {
            a += r.newton_a;
            b += r.newton_b;
            ++n;
        }
    }
    EXPECT_EQ(ledger.newton_a_total(), a);
    EXPECT_EQ(ledger.newton_b_total(), b);
    EXPECT_EQ(ledger.n_coupling(), n);
    EXPECT_EQ(ledger.newton_total(), a + b);
    EXPECT_EQ(ledger.converged_steps(), 1u);
}

TEST(IterationLedger, Misuse)
{
    IterationLedger ledger;
    EXPECT_THROW(ledger.record({}), ContractViolation);
    EXPECT_THROW(ledger.close_step(true), ContractViolation);
    ledger.open_step();
    EXPECT_THROW(ledger.open_step(), ContractViolation);
}

TEST(Tolerances, Validation)
{
    CouplingTolerances tol;
    EXPECT_NO_THROW(tol.validate());
    tol.eps_problem[1] = 0.0;
    EXPECT_THROW(tol.validate(), ContractViolation);
    TimeLoopConfig t;
    t.dt = -1.0;
    EXPECT_THROW(t.validate(), ContractViolation);
}

TEST(RunTimeStep, DecoupledProblemNeedsOneConfirmingIteration)
{
    Mp1Params p;
    p.mu = 0.0;
    CoupledProblem problem = make_mp1_problem(p);
    const RunResult res =
        run_coupled(problem, FixedPerCall{}, ConstantRelaxation{1.0}, CouplingTolerances{}, TimeLoopConfig{});
    ASSERT_TRUE(res.converged) << res.error;
    for (const auto& step : res.ledger.steps()) {
        ASSERT_EQ(step.iterations.size(), 2u);
        EXPECT_EQ(step.iterations[1].change_a, 0.0);
        EXPECT_EQ(step.iterations[1].change_b, 0.0);
    }
}

TEST(RunTimeStep, StrongCouplingWithoutRelaxationHitsTheCap)
{
    CoupledProblem problem = make_mp1_problem(mp1_strong());
    TimeLoopConfig limits;
    problem.begin_step(limits.dt, limits.dt);

    // a coupled fixed point exists at this time level
    const MonolithicSolution oracle = monolithic_solve(problem, 1e-12);
    EXPECT_LT(oracle.residual_norm, 1e-12);

    Accelerator accel(ConstantRelaxation{1.0});
    IterationLedger ledger;
    ledger.open_step();
    try {
        run_time_step(problem, FixedPerCall{}, accel, CouplingTolerances{}, ledger, limits);
        FAIL() << "expected non-convergence";
    }
    catch (const CouplingNonConvergence& e) {
        EXPECT_EQ(e.ledger().n_coupling(), limits.max_coupling_iters);
        EXPECT_FALSE(e.ledger().steps().back().converged);
    }
    EXPECT_FALSE(ledger.step_open());
}

TEST(RunTimeStep, PreConvergedEntryCostsNoNewtonIterations)
{
    Mp1Params p;
    p.mu = 0.5;
    p.load_ramp_time = 0.0;   // stationary problem: a second step starts converged
    CoupledProblem problem = make_mp1_problem(p);
    CouplingTolerances tol;
    TimeLoopConfig limits;
    Accelerator accel(IqnIlsOptions{});
    IterationLedger ledger;

    // converge the first step far below eps_problem so the next entry is a fixed point of both solvers
    CouplingTolerances tight;
    tight.eps_coupling = 1e-14;
    tight.eps_problem = {1e-14, 1e-14};
    problem.begin_step(0.05, 0.05);
    ledger.open_step();
    run_time_step(problem, FixedPerCall{}, accel, tight, ledger, limits);

    problem.begin_step(0.1, 0.05);
    ledger.open_step();
    const IterationTotals before = ledger.totals();
    Accelerator plain(ConstantRelaxation{1.0});
    const StepOutcome out = run_time_step(problem, FixedPerCall{}, plain, tol, ledger, limits);
    EXPECT_GE(out.coupling_iters, 1u);
    EXPECT_LE(out.coupling_iters, 2u);
    EXPECT_EQ(ledger.newton_total(), before.newton_total());
}

TEST(RunTimeStep, ConvergedStepSatisfiesBothCriteria)
{
    CoupledProblem problem = make_mp1_problem(mp1_strong());
    CouplingTolerances tol;
    TimeLoopConfig limits;
    Accelerator accel(IqnIlsOptions{});
    IterationLedger ledger;
    int n = 0;
    for (BudgetPolicy pol : {BudgetPolicy(FixedPerCall{1, 1}), BudgetPolicy(NkCC{1, 1.0}),
                             BudgetPolicy(ConvergedInterfaceData{1e-4})}) {
        for (int i = 0; i < 3; ++i) {
            ++n;
            problem.begin_step(n * limits.dt, limits.dt);
            ledger.open_step();
            const StepOutcome out = run_time_step(problem, pol, accel, tol, ledger, limits);
            const auto& last = ledger.steps().back().iterations.back();
            EXPECT_LT(last.change_a, tol.eps_coupling);
            EXPECT_LT(last.change_b, tol.eps_coupling);
            EXPECT_LT(problem.solver_a().residual_norm(), tol.eps_problem[0]);
            EXPECT_LT(problem.solver_b().residual_norm(), tol.eps_problem[1]);
            EXPECT_GE(out.coupling_iters, 2u) << "the first iteration never converges";
        }
    }
}

TEST(RunCoupled, FixedPointIndependentOfAccelerator)
{
    const ProblemSpec spec = mp1_weak();
    CouplingTolerances tol;
    TimeLoopConfig time;
    std::vector<RunResult> runs;
    for (AcceleratorSpec acc : {AcceleratorSpec(ConstantRelaxation{0.8}), AcceleratorSpec(AitkenRelaxation{}),
                                AcceleratorSpec(IqnIlsOptions{})}) {
        for (BudgetPolicy pol : {BudgetPolicy(FixedPerCall{}), BudgetPolicy(NkCC{1, 1.0})}) {
            CoupledProblem p = make_problem(spec);
            runs.push_back(run_coupled(p, pol, acc, tol, time));
            ASSERT_TRUE(runs.back().converged) << runs.back().error;
        }
    }
    for (std::size_t i = 1; i < runs.size(); ++i) {
        for (std::size_t s = 0; s < time.n_steps; ++s) {
            EXPECT_LT(relative_change(runs[0].steps[s].displacement, runs[i].steps[s].displacement, tol.relative_floor),
                      100 * tol.eps_coupling);
        }
    }
}

TEST(RunCoupled, RepeatedRunsGiveIdenticalLedgers)
{
    auto once = [] {
        CoupledProblem p = make_mp1_problem(mp1_strong());
        return run_coupled(p, NkCC{1, 1.0}, IqnIlsOptions{}, CouplingTolerances{}, TimeLoopConfig{});
    };
    const RunResult a = once();
    const RunResult b = once();
    ASSERT_EQ(a.ledger.steps().size(), b.ledger.steps().size());
    for (std::size_t s = 0; s < a.ledger.steps().size(); ++s) {
        const auto& ra = a.ledger.steps()[s].iterations;
        const auto& rb = b.ledger.steps()[s].iterations;
        ASSERT_EQ(ra.size(), rb.size());
        for (std::size_t k = 0; k < ra.size(); ++k) {
            EXPECT_EQ(ra[k].newton_a, rb[k].newton_a);
            EXPECT_EQ(ra[k].newton_b, rb[k].newton_b);
            EXPECT_EQ(ra[k].change_a, rb[k].change_a);
            EXPECT_EQ(ra[k].change_b, rb[k].change_b);
        }
    }
}

TEST(RunCoupled, FailureIsReportedNotThrown)
{
    CoupledProblem p = make_mp1_problem(mp1_strong());
    TimeLoopConfig time;
    time.max_coupling_iters = 30;
    const RunResult res = run_coupled(p, FixedPerCall{}, ConstantRelaxation{1.0}, CouplingTolerances{}, time);
    EXPECT_FALSE(res.converged);
    EXPECT_FALSE(res.error.empty());
    EXPECT_EQ(res.ledger.converged_steps(), 0u);
    EXPECT_EQ(res.ledger.n_coupling(), 30u);
}
