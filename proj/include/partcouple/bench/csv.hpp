#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "partcouple/bench/sweep.hpp"

namespace partcouple {

inline constexpr const char* kCsvHeader =
    "n_f,n_s,policy,coupling_iters,newton_f,newton_s,newton_total,cost,converged,wall_s";

class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

/// Shortest representation that parses back to the same double.
inline std::string format_real(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string format_budget(const std::optional<std::size_t>& n) { return n ? std::to_string(*n) : "inf"; }

inline std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        }
        else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline std::size_t parse_count(const std::string& s, std::size_t line)
{
    std::size_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw CsvError("line " + std::to_string(line) + ": expected a count, got '" + s + "'");
    }
    return v;
}

inline double parse_real(const std::string& s, std::size_t line)
{
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw CsvError("line " + std::to_string(line) + ": expected a number, got '" + s + "'");
    }
    return v;
}

} // namespace detail

/// Policy rows leave n_f and n_s empty; "inf" marks an unbounded budget.
inline std::string to_csv(const std::vector<SweepResultRow>& rows)
{
    std::ostringstream out;
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
        if (r.policy.find(',') != std::string::npos) throw CsvError("policy names must not contain commas");
        if (r.is_fixed()) out << detail::format_budget(r.n_f) << ',' << detail::format_budget(r.n_s);
        else out << ',';
        out << ',' << r.policy << ',' << r.coupling_iters << ',' << r.newton_f << ',' << r.newton_s << ','
            << r.newton_total << ',' << detail::format_real(r.cost) << ',' << r.converged_steps << ','
            << detail::format_real(r.wall_s) << '\n';
    }
    return out.str();
}

inline void write_csv(const std::vector<SweepResultRow>& rows, const std::string& path)
{
    const std::string text = to_csv(rows);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CsvError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw CsvError("write to '" + path + "' failed");
}

/// Inverse of to_csv. The file does not record the step count, so a row is
/// flagged failed when it converged fewer steps than the best row in the file.
inline std::vector<SweepResultRow> parse_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw CsvError("line 1: unexpected CSV header");
    std::vector<SweepResultRow> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != 10) throw CsvError("line " + std::to_string(lineno) + ": expected 10 fields");
        SweepResultRow r;
        r.policy = f[2];
        if (r.policy.empty()) {
            r.n_f = f[0] == "inf" ? std::nullopt : std::optional(detail::parse_count(f[0], lineno));
            r.n_s = f[1] == "inf" ? std::nullopt : std::optional(detail::parse_count(f[1], lineno));
        }
        else if (!f[0].empty() || !f[1].empty()) {
            throw CsvError("line " + std::to_string(lineno) + ": policy rows carry no budgets");
        }
        r.coupling_iters = detail::parse_count(f[3], lineno);
        r.newton_f = detail::parse_count(f[4], lineno);
        r.newton_s = detail::parse_count(f[5], lineno);
        r.newton_total = detail::parse_count(f[6], lineno);
        r.cost = detail::parse_real(f[7], lineno);
        r.converged_steps = detail::parse_count(f[8], lineno);
        r.wall_s = detail::parse_real(f[9], lineno);
        rows.push_back(std::move(r));
    }
    std::size_t best = 0;
    for (const auto& r : rows) best = std::max(best, r.converged_steps);
    for (auto& r : rows) r.failed = r.converged_steps < best;
    return rows;
}

inline std::vector<SweepResultRow> read_csv(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

} // namespace partcouple
