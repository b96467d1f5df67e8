#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "partcouple/bench/config.hpp"
#include "partcouple/core/coupling.hpp"

namespace partcouple {

/// One sweep cell or policy run. Fixed-budget rows leave policy empty; policy
/// rows carry no budgets.
struct SweepResultRow {
    std::optional<std::size_t> n_f;
    std::optional<std::size_t> n_s;
    std::string policy;
    std::size_t coupling_iters = 0;
    std::size_t newton_f = 0;
    std::size_t newton_s = 0;
    std::size_t newton_total = 0;
    double cost = 0.0;
    std::size_t converged_steps = 0;
    double wall_s = 0.0;
    bool failed = false;
    std::string error;

    bool is_fixed() const { return policy.empty(); }
};

struct SweepJob {
    BudgetPolicy policy;
    std::optional<std::size_t> n_f;
    std::optional<std::size_t> n_s;
};

/// Row-major over the budget grid, then the adaptive policies.
inline std::vector<SweepJob> sweep_jobs(const SweepConfig& cfg)
{
    std::vector<SweepJob> jobs;
    for (const auto& na : cfg.grid_a) {
        for (const auto& nb : cfg.grid_b) jobs.push_back({FixedPerCall{na, nb}, na, nb});
    }
    for (const auto& p : cfg.policies) jobs.push_back({p, std::nullopt, std::nullopt});
    return jobs;
}

/// Fresh coupled run of one policy over the configured time loop.
inline SweepResultRow run_case(const SweepConfig& cfg,
                               const BudgetPolicy& policy,
                               RunResult* full_result = nullptr)
{
    SweepResultRow row;
    row.policy = policy_name(policy);
    if (const auto* f = std::get_if<FixedPerCall>(&policy)) {
        row.n_f = f->n_a;
        row.n_s = f->n_b;
    }
    const auto start = std::chrono::steady_clock::now();
    CoupledProblem problem = make_problem(cfg.problem, cfg.tolerances.relative_floor);
    RunResult res = run_coupled(problem, policy, cfg.accelerator, cfg.tolerances, cfg.time);
    const auto stop = std::chrono::steady_clock::now();

    const IterationLedger& ledger = res.ledger;
    row.coupling_iters = ledger.n_coupling();
    row.newton_f = ledger.newton_a_total();
    row.newton_s = ledger.newton_b_total();
    row.newton_total = ledger.newton_total();
    row.cost = estimate_cost(ledger, cfg.cost);
    row.converged_steps = ledger.converged_steps();
    row.failed = !res.converged;
    row.error = res.error;
    if (cfg.record_wall_time) row.wall_s = std::chrono::duration<double>(stop - start).count();
    if (full_result) *full_result = std::move(res);
    return row;
}

/// Runs every grid cell and policy on a thread pool. The result order is the
/// job order regardless of scheduling; failed runs become flagged rows.
inline std::vector<SweepResultRow> run_sweep(const SweepConfig& cfg)
{
    if (cfg.n_cells() == 0 && cfg.policies.empty()) throw ContractViolation("run_sweep: nothing to run");
    const std::vector<SweepJob> jobs = sweep_jobs(cfg);
    std::vector<SweepResultRow> rows(jobs.size());

    std::size_t n_threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min(n_threads, jobs.size());

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> has_error{false};
    auto worker = [&]() {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                rows[i] = run_case(cfg, jobs[i].policy);
            }
            catch (...) {
                // only contract violations escape run_coupled; keep the first one
                if (!has_error.exchange(true)) first_error = std::current_exception();
            }
        }
    };
    if (n_threads <= 1) {
        worker();
    }
    else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return rows;
}

inline bool any_failed(const std::vector<SweepResultRow>& rows)
{
    return std::any_of(rows.begin(), rows.end(), [](const SweepResultRow& r) { return r.failed; });
}

} // namespace partcouple
