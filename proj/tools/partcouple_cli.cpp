// Command-line front end: single runs, budget sweeps, and CSV post-processing.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "partcouple/partcouple.hpp"

namespace pc = partcouple;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNotConverged = 2;

void write_step_csv(const pc::RunResult& res, double dt, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw pc::CsvError("cannot open '" + path + "' for writing");
    out << "step,time,coupling_iters,newton_f,newton_s,converged\n";
    const auto& steps = res.ledger.steps();
    for (std::size_t i = 0; i < steps.size(); ++i) {
        std::size_t na = 0, nb = 0;
        for (const auto& rec : steps[i].iterations) {
            na += rec.newton_a;
            nb += rec.newton_b;
        }
        out << i + 1 << ',' << pc::detail::format_real(static_cast<double>(i + 1) * dt) << ','
            << steps[i].iterations.size() << ',' << na << ',' << nb << ',' << (steps[i].converged ? 1 : 0) << '\n';
    }
}

int cmd_run(const std::string& config_path, const std::string& out_path)
{
    const pc::SweepConfig cfg = pc::load_config(config_path);
    pc::RunResult res;
    const pc::SweepResultRow row = pc::run_case(cfg, cfg.single_case.policy, &res);
    std::cout << pc::to_csv({row});
    if (!out_path.empty()) write_step_csv(res, cfg.time.dt, out_path);
    if (row.failed) {
        std::cerr << "run did not converge: " << row.error << '\n';
        return kExitNotConverged;
    }
    return kExitOk;
}

int cmd_sweep(const std::string& config_path, std::string out_path, std::string heatmap_path, std::string metric)
{
    const pc::SweepConfig cfg = pc::load_config(config_path);
    if (out_path.empty()) out_path = cfg.output.csv;
    if (heatmap_path.empty()) heatmap_path = cfg.output.heatmap;
    if (metric.empty()) metric = cfg.output.metric;
    const pc::HeatmapMetric m = pc::parse_metric(metric);

    const auto rows = pc::run_sweep(cfg);
    if (out_path.empty()) std::cout << pc::to_csv(rows);
    else pc::write_csv(rows, out_path);
    if (!heatmap_path.empty()) pc::emit_heatmap(rows, m, heatmap_path);
    std::cerr << pc::format_optima(rows, pc::find_optima(rows));
    for (const auto& r : rows) {
        if (r.failed) std::cerr << "not converged " << pc::row_label(r) << ": " << r.error << '\n';
    }
    return pc::any_failed(rows) ? kExitNotConverged : kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Partitioned coupling laboratory: Newton budgets and coupling acceleration"};
    app.require_subcommand(1);

    std::string config, out, metric, csv, heatmap;

    auto* run = app.add_subcommand("run", "run the single case selected by the config");
    run->add_option("--config", config, "JSON configuration")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out, "per-step CSV output");

    auto* sweep = app.add_subcommand("sweep", "run the budget grid and the adaptive policies");
    sweep->add_option("--config", config, "JSON configuration")->required()->check(CLI::ExistingFile);
    sweep->add_option("--out", out, "result CSV (default: config output.csv, else stdout)");
    sweep->add_option("--heatmap", heatmap, "also write an SVG heatmap");
    sweep->add_option("--metric", metric, "heatmap metric")->check(CLI::IsMember({"coupling", "newton", "cost"}));

    auto* optima = app.add_subcommand("optima", "summarise optima of a result CSV");
    optima->add_option("--csv", csv, "result CSV")->required()->check(CLI::ExistingFile);

    auto* hm = app.add_subcommand("heatmap", "render an SVG heatmap from a result CSV");
    hm->add_option("--csv", csv, "result CSV")->required()->check(CLI::ExistingFile);
    hm->add_option("--out", out, "SVG output")->required();
    hm->add_option("--metric", metric, "metric to plot")
        ->check(CLI::IsMember({"coupling", "newton", "cost"}))
        ->default_val("newton");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) return cmd_run(config, out);
        if (sweep->parsed()) return cmd_sweep(config, out, heatmap, metric);
        if (optima->parsed()) {
            const auto rows = pc::read_csv(csv);
            std::cout << pc::format_optima(rows, pc::find_optima(rows));
            return kExitOk;
        }
        if (hm->parsed()) {
            pc::emit_heatmap(pc::read_csv(csv), pc::parse_metric(metric), out);
            return kExitOk;
        }
    }
    catch (const pc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}
