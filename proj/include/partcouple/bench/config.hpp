#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "partcouple/accel/accelerator.hpp"
#include "partcouple/core/cost.hpp"
#include "partcouple/core/tolerances.hpp"
#include "partcouple/models/problem.hpp"
#include "partcouple/policy/budget_policy.hpp"

namespace partcouple {

/// Unreadable or invalid experiment configuration. field() names the offending
/// key path for validation errors; line() is set for parse errors.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, std::string field = {}, std::size_t line = 0)
        : std::runtime_error(what), field_(std::move(field)), line_(line)
    {
    }
    const std::string& field() const { return field_; }
    std::size_t line() const { return line_; }

private:
    std::string field_;
    std::size_t line_;
};

/// A budget grid axis; nullopt stands for "until converged".
using BudgetAxis = std::vector<std::optional<std::size_t>>;

/// One concrete case for the `run` subcommand.
struct CaseSelection {
    BudgetPolicy policy = FixedPerCall{1, 1};
};

struct OutputPaths {
    std::string csv;
    std::string heatmap;
    std::string metric = "newton";
};

struct SweepConfig {
    ProblemSpec problem = mp1_strong();
    AcceleratorSpec accelerator = IqnIlsOptions{};
    CouplingTolerances tolerances;
    TimeLoopConfig time;
    BudgetAxis grid_a{1, 2, 3, 4, 5, std::nullopt};
    BudgetAxis grid_b{1, 2, 3, 4, 5, std::nullopt};
    std::vector<BudgetPolicy> policies{NkCC{1, 1.0}, NkCC{3, 1.0}, ConvergedInterfaceData{1e-4}};
    CaseSelection single_case;
    CostModel cost;
    /// Worker threads for sweeps; 0 picks the hardware concurrency.
    std::size_t threads = 0;
    /// Wall-clock timing makes CSV output non-reproducible, so it is opt-in.
    bool record_wall_time = false;
    OutputPaths output;

    std::size_t n_cells() const { return grid_a.size() * grid_b.size(); }
};

/// Time-loop defaults of each model problem.
inline TimeLoopConfig default_time_loop(const ProblemSpec& problem)
{
    TimeLoopConfig t;
    if (std::holds_alternative<Mp2Params>(problem)) {
        t.dt = 0.01;
        t.n_steps = 50;
    }
    return t;
}

namespace detail {

using nlohmann::json;

inline std::string join_path(const std::string& parent, const std::string& key)
{
    return parent.empty() ? key : parent + "." + key;
}

inline void require_object(const json& j, const std::string& path)
{
    if (!j.is_object()) throw ConfigError("'" + path + "' must be an object", path);
}

inline void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> known)
{
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) {
            const std::string field = join_path(path, it.key());
            throw ConfigError("unknown field '" + field + "'", field);
        }
    }
}

inline double get_real(const json& j, const std::string& path)
{
    if (!j.is_number()) throw ConfigError("'" + path + "' must be a number", path);
    return j.get<double>();
}

inline std::size_t get_count(const json& j, const std::string& path)
{
    if (!j.is_number_integer() || j.get<long long>() < 0) {
        throw ConfigError("'" + path + "' must be a non-negative integer", path);
    }
    return j.get<std::size_t>();
}

inline bool get_bool(const json& j, const std::string& path)
{
    if (!j.is_boolean()) throw ConfigError("'" + path + "' must be true or false", path);
    return j.get<bool>();
}

inline std::string get_string(const json& j, const std::string& path)
{
    if (!j.is_string()) throw ConfigError("'" + path + "' must be a string", path);
    return j.get<std::string>();
}

template <class T, class Get>
void read_opt(const json& obj, const std::string& path, const char* key, T& target, Get get)
{
    if (obj.contains(key)) target = get(obj.at(key), join_path(path, key));
}

/// A budget count >= 1 or the literal "inf".
inline std::optional<std::size_t> parse_budget(const json& j, const std::string& path)
{
    if (j.is_string() && j.get<std::string>() == "inf") return std::nullopt;
    if (!j.is_number_integer() || j.get<long long>() < 1) {
        throw ConfigError("'" + path + "' must be an integer >= 1 or \"inf\"", path);
    }
    return j.get<std::size_t>();
}

inline BudgetAxis parse_axis(const json& j, const std::string& path)
{
    if (!j.is_array() || j.empty()) throw ConfigError("'" + path + "' must be a non-empty list", path);
    BudgetAxis axis;
    for (std::size_t i = 0; i < j.size(); ++i) {
        axis.push_back(parse_budget(j[i], path + "[" + std::to_string(i) + "]"));
    }
    return axis;
}

inline ProblemSpec parse_problem(const json& j, const std::string& path)
{
    require_object(j, path);
    const std::string type = j.contains("type") ? get_string(j.at("type"), path + ".type") : "mp1";
    if (type == "mp1" || type == "mp1-weak" || type == "mp1-strong") {
        reject_unknown(j, path, {"type", "m", "mu", "alpha", "beta", "b", "load_ramp_time"});
        Mp1Params p = type == "mp1-weak" ? mp1_weak() : mp1_strong();
        if (j.contains("m")) {
            const std::size_t m = get_count(j.at("m"), path + ".m");
            p.m = static_cast<Eigen::Index>(m);
        }
        read_opt(j, path, "mu", p.mu, get_real);
        read_opt(j, path, "alpha", p.alpha, get_real);
        read_opt(j, path, "beta", p.beta, get_real);
        read_opt(j, path, "load_ramp_time", p.load_ramp_time, get_real);
        if (j.contains("b")) {
            const json& b = j.at("b");
            const std::string bp = path + ".b";
            if (b.is_number()) {
                p.b = Vector::Constant(p.m, b.get<double>());
            }
            else if (b.is_array()) {
                p.b.resize(static_cast<Eigen::Index>(b.size()));
                for (std::size_t i = 0; i < b.size(); ++i) {
                    p.b[static_cast<Eigen::Index>(i)] = get_real(b[i], bp + "[" + std::to_string(i) + "]");
                }
            }
            else {
                throw ConfigError("'" + bp + "' must be a number or a list of numbers", bp);
            }
        }
        try {
            p.validate();
        }
        catch (const ContractViolation& e) {
            throw ConfigError(e.what(), path);
        }
        return p;
    }
    if (type == "mp2" || type == "mp2-weak" || type == "mp2-strong") {
        reject_unknown(j, path,
                       {"type", "cells_a", "cells_b", "k0_a", "k0_b", "gamma", "forcing", "u_left", "u_right",
                        "transient"});
        Mp2Params p = type == "mp2-weak" ? mp2_weak() : mp2_strong();
        auto idx = [](const json& v, const std::string& f) { return static_cast<Eigen::Index>(get_count(v, f)); };
        read_opt(j, path, "cells_a", p.cells_a, idx);
        read_opt(j, path, "cells_b", p.cells_b, idx);
        read_opt(j, path, "k0_a", p.k0_a, get_real);
        read_opt(j, path, "k0_b", p.k0_b, get_real);
        read_opt(j, path, "gamma", p.gamma, get_real);
        read_opt(j, path, "forcing", p.forcing, get_real);
        read_opt(j, path, "u_left", p.u_left, get_real);
        read_opt(j, path, "u_right", p.u_right, get_real);
        read_opt(j, path, "transient", p.transient, get_bool);
        try {
            p.validate();
        }
        catch (const ContractViolation& e) {
            throw ConfigError(e.what(), path);
        }
        return p;
    }
    throw ConfigError("unknown problem type '" + type + "'", path + ".type");
}

inline AcceleratorSpec parse_accelerator(const json& j, const std::string& path)
{
    require_object(j, path);
    const std::string type = j.contains("type") ? get_string(j.at("type"), path + ".type") : "iqn-ils";
    AcceleratorSpec spec;
    if (type == "constant") {
        reject_unknown(j, path, {"type", "omega"});
        ConstantRelaxation c;
        read_opt(j, path, "omega", c.omega, get_real);
        spec = c;
    }
    else if (type == "aitken") {
        reject_unknown(j, path, {"type", "omega0", "omega_min", "omega_max"});
        AitkenRelaxation a;
        read_opt(j, path, "omega0", a.omega0, get_real);
        read_opt(j, path, "omega_min", a.omega_min, get_real);
        read_opt(j, path, "omega_max", a.omega_max, get_real);
        spec = a;
    }
    else if (type == "iqn-ils") {
        reject_unknown(j, path, {"type", "reuse_steps", "qr_filter_eps", "fallback_omega"});
        IqnIlsOptions o;
        read_opt(j, path, "reuse_steps", o.reuse_steps, get_count);
        read_opt(j, path, "qr_filter_eps", o.qr_filter_eps, get_real);
        read_opt(j, path, "fallback_omega", o.fallback_omega, get_real);
        spec = o;
    }
    else {
        throw ConfigError("unknown accelerator type '" + type + "'", path + ".type");
    }
    try {
        validate(spec);
    }
    catch (const ContractViolation& e) {
        throw ConfigError(e.what(), path);
    }
    return spec;
}

inline CouplingTolerances parse_tolerances(const json& j, const std::string& path)
{
    require_object(j, path);
    reject_unknown(j, path, {"eps_coupling", "eps_problem", "eps_cid", "relative_floor"});
    CouplingTolerances t;
    read_opt(j, path, "eps_coupling", t.eps_coupling, get_real);
    read_opt(j, path, "eps_cid", t.eps_cid, get_real);
    read_opt(j, path, "relative_floor", t.relative_floor, get_real);
    if (j.contains("eps_problem")) {
        const json& e = j.at("eps_problem");
        const std::string ep = path + ".eps_problem";
        if (e.is_array()) {
            if (e.size() != 2) throw ConfigError("'" + ep + "' must be a number or a pair [A, B]", ep);
            t.eps_problem = {get_real(e[0], ep + "[0]"), get_real(e[1], ep + "[1]")};
        }
        else {
            const double v = get_real(e, ep);
            t.eps_problem = {v, v};
        }
    }
    auto positive = [&](double v, const char* key) {
        if (!(v > 0.0)) {
            const std::string f = join_path(path, key);
            throw ConfigError("'" + f + "' must be positive", f);
        }
    };
    positive(t.eps_coupling, "eps_coupling");
    positive(t.eps_problem[0], "eps_problem");
    positive(t.eps_problem[1], "eps_problem");
    positive(t.eps_cid, "eps_cid");
    positive(t.relative_floor, "relative_floor");
    return t;
}

inline TimeLoopConfig parse_time(const json& j, const std::string& path, TimeLoopConfig t)
{
    require_object(j, path);
    reject_unknown(j, path, {"dt", "n_steps", "max_coupling_iters", "max_newton_per_call"});
    read_opt(j, path, "dt", t.dt, get_real);
    read_opt(j, path, "n_steps", t.n_steps, get_count);
    read_opt(j, path, "max_coupling_iters", t.max_coupling_iters, get_count);
    read_opt(j, path, "max_newton_per_call", t.max_newton_per_call, get_count);
    if (!(t.dt > 0.0)) throw ConfigError("'" + path + ".dt' must be positive", path + ".dt");
    for (auto [v, key] : {std::pair{t.n_steps, "n_steps"}, std::pair{t.max_coupling_iters, "max_coupling_iters"},
                          std::pair{t.max_newton_per_call, "max_newton_per_call"}}) {
        if (v < 1) throw ConfigError("'" + join_path(path, key) + "' must be >= 1", join_path(path, key));
    }
    return t;
}

/// "N<k>-CC", "CID", or an object {"type": "nk-cc"|"cid", ...}.
inline BudgetPolicy parse_policy(const json& j, const std::string& path, const CouplingTolerances& tol)
{
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        std::smatch m;
        static const std::regex nk(R"(N([0-9]+)-CC)");
        if (std::regex_match(s, m, nk)) {
            const std::size_t k = std::stoul(m[1].str());
            if (k < 1) throw ConfigError("'" + path + "': Nk-CC requires k >= 1", path);
            return NkCC{k, 1.0};
        }
        if (s == "CID") return ConvergedInterfaceData{tol.eps_cid};
        throw ConfigError("unknown policy '" + s + "'", path);
    }
    require_object(j, path);
    const std::string type = j.contains("type") ? get_string(j.at("type"), path + ".type") : "";
    BudgetPolicy pol;
    if (type == "nk-cc") {
        reject_unknown(j, path, {"type", "k", "strict_factor"});
        NkCC p;
        read_opt(j, path, "k", p.k, get_count);
        read_opt(j, path, "strict_factor", p.strict_factor, get_real);
        pol = p;
    }
    else if (type == "cid") {
        reject_unknown(j, path, {"type", "eps_cid"});
        ConvergedInterfaceData p{tol.eps_cid};
        read_opt(j, path, "eps_cid", p.eps_cid, get_real);
        pol = p;
    }
    else if (type == "fixed") {
        reject_unknown(j, path, {"type", "n_f", "n_s"});
        FixedPerCall p;
        if (j.contains("n_f")) p.n_a = parse_budget(j.at("n_f"), path + ".n_f");
        if (j.contains("n_s")) p.n_b = parse_budget(j.at("n_s"), path + ".n_s");
        pol = p;
    }
    else {
        throw ConfigError("policy type must be \"nk-cc\", \"cid\" or \"fixed\"", path + ".type");
    }
    try {
        validate(pol);
    }
    catch (const ContractViolation& e) {
        throw ConfigError(e.what(), path);
    }
    return pol;
}

inline CostModel parse_cost(const json& j, const std::string& path)
{
    require_object(j, path);
    reject_unknown(j, path, {"transfer", "newton_f", "newton_s"});
    CostModel c;
    read_opt(j, path, "transfer", c.cost_transfer, get_real);
    read_opt(j, path, "newton_f", c.cost_newton_a, get_real);
    read_opt(j, path, "newton_s", c.cost_newton_b, get_real);
    for (auto [v, key] : {std::pair{c.cost_transfer, "transfer"}, std::pair{c.cost_newton_a, "newton_f"},
                          std::pair{c.cost_newton_b, "newton_s"}}) {
        if (!(v >= 0.0)) throw ConfigError("'" + join_path(path, key) + "' must be >= 0", join_path(path, key));
    }
    return c;
}

inline std::size_t line_of_offset(const std::string& text, std::size_t offset)
{
    const std::size_t end = std::min(offset, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(end), '\n'));
}

} // namespace detail

/// Build a validated configuration from JSON text. Absent keys take defaults.
inline SweepConfig parse_config(const std::string& text)
{
    using detail::json;
    json root;
    try {
        root = json::parse(text);
    }
    catch (const json::parse_error& e) {
        // the reported byte is one past the offending character
        const std::size_t off = e.byte > 0 ? e.byte - 1 : 0;
        const std::size_t line = detail::line_of_offset(text, off);
        throw ConfigError("config parse error at line " + std::to_string(line) + ": " + e.what(), {}, line);
    }
    detail::require_object(root, "<root>");
    detail::reject_unknown(root, "",
                           {"problem", "accelerator", "tolerances", "time", "grid", "policies", "case", "cost",
                            "threads", "record_wall_time", "output"});

    SweepConfig cfg;
    if (root.contains("problem")) cfg.problem = detail::parse_problem(root.at("problem"), "problem");
    cfg.time = default_time_loop(cfg.problem);
    if (root.contains("accelerator")) cfg.accelerator = detail::parse_accelerator(root.at("accelerator"), "accelerator");
    if (root.contains("tolerances")) cfg.tolerances = detail::parse_tolerances(root.at("tolerances"), "tolerances");
    cfg.policies = {NkCC{1, 1.0}, NkCC{3, 1.0}, ConvergedInterfaceData{cfg.tolerances.eps_cid}};
    if (root.contains("time")) cfg.time = detail::parse_time(root.at("time"), "time", cfg.time);

    if (root.contains("grid")) {
        const json& g = root.at("grid");
        detail::require_object(g, "grid");
        detail::reject_unknown(g, "grid", {"n_f", "n_s"});
        if (g.contains("n_f")) cfg.grid_a = detail::parse_axis(g.at("n_f"), "grid.n_f");
        if (g.contains("n_s")) cfg.grid_b = detail::parse_axis(g.at("n_s"), "grid.n_s");
    }
    if (root.contains("policies")) {
        const json& p = root.at("policies");
        if (!p.is_array()) throw ConfigError("'policies' must be a list", "policies");
        cfg.policies.clear();
        for (std::size_t i = 0; i < p.size(); ++i) {
            cfg.policies.push_back(
                detail::parse_policy(p[i], "policies[" + std::to_string(i) + "]", cfg.tolerances));
        }
    }
    if (root.contains("case")) {
        const json& c = root.at("case");
        if (c.is_object() && !c.contains("type")) {
            detail::reject_unknown(c, "case", {"n_f", "n_s"});
            FixedPerCall f{1, 1};
            if (c.contains("n_f")) f.n_a = detail::parse_budget(c.at("n_f"), "case.n_f");
            if (c.contains("n_s")) f.n_b = detail::parse_budget(c.at("n_s"), "case.n_s");
            cfg.single_case.policy = f;
        }
        else {
            cfg.single_case.policy = detail::parse_policy(c, "case", cfg.tolerances);
        }
    }
    if (root.contains("cost")) cfg.cost = detail::parse_cost(root.at("cost"), "cost");
    detail::read_opt(root, "", "threads", cfg.threads, detail::get_count);
    detail::read_opt(root, "", "record_wall_time", cfg.record_wall_time, detail::get_bool);
    if (root.contains("output")) {
        const json& o = root.at("output");
        detail::require_object(o, "output");
        detail::reject_unknown(o, "output", {"csv", "heatmap", "metric"});
        detail::read_opt(o, "output", "csv", cfg.output.csv, detail::get_string);
        detail::read_opt(o, "output", "heatmap", cfg.output.heatmap, detail::get_string);
        detail::read_opt(o, "output", "metric", cfg.output.metric, detail::get_string);
        if (cfg.output.metric != "coupling" && cfg.output.metric != "newton" && cfg.output.metric != "cost") {
            throw ConfigError("'output.metric' must be coupling, newton or cost", "output.metric");
        }
    }
    return cfg;
}

inline SweepConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace partcouple
