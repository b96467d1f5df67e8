#pragma once

#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "partcouple/bench/csv.hpp"

namespace partcouple {

/// Indices refer to the input rows; failed rows never qualify.
struct OptimaSummary {
    std::vector<std::size_t> min_newton_rows;
    std::size_t min_newton = 0;
    std::vector<std::size_t> min_coupling_rows;
    std::size_t min_coupling = 0;
    /// Non-dominated rows over (coupling_iters, newton_total), in input order.
    std::vector<std::size_t> pareto_rows;
    std::size_t considered = 0;
};

inline OptimaSummary find_optima(const std::vector<SweepResultRow>& rows)
{
    OptimaSummary s;
    s.min_newton = std::numeric_limits<std::size_t>::max();
    s.min_coupling = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.failed) continue;
        ++s.considered;
        if (r.newton_total < s.min_newton) {
            s.min_newton = r.newton_total;
            s.min_newton_rows.clear();
        }
        if (r.newton_total == s.min_newton) s.min_newton_rows.push_back(i);
        if (r.coupling_iters < s.min_coupling) {
            s.min_coupling = r.coupling_iters;
            s.min_coupling_rows.clear();
        }
        if (r.coupling_iters == s.min_coupling) s.min_coupling_rows.push_back(i);
    }
    if (s.considered == 0) {
        s.min_newton = s.min_coupling = 0;
        return s;
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].failed) continue;
        bool dominated = false;
        for (std::size_t j = 0; j < rows.size() && !dominated; ++j) {
            if (j == i || rows[j].failed) continue;
            const auto& a = rows[j];
            const auto& b = rows[i];
            dominated = a.coupling_iters <= b.coupling_iters && a.newton_total <= b.newton_total &&
                        (a.coupling_iters < b.coupling_iters || a.newton_total < b.newton_total);
        }
        if (!dominated) s.pareto_rows.push_back(i);
    }
    return s;
}

/// "(1,inf)" for grid cells, the policy name otherwise.
inline std::string row_label(const SweepResultRow& r)
{
    if (!r.is_fixed()) return r.policy;
    return "(" + detail::format_budget(r.n_f) + "," + detail::format_budget(r.n_s) + ")";
}

inline std::string format_optima(const std::vector<SweepResultRow>& rows, const OptimaSummary& s)
{
    std::ostringstream out;
    auto list = [&](const std::vector<std::size_t>& idx) {
        std::string txt;
        for (std::size_t i : idx) txt += (txt.empty() ? "" : " ") + row_label(rows[i]);
        return txt;
    };
    std::size_t failed = 0;
    for (const auto& r : rows) failed += r.failed ? 1 : 0;
    out << "rows: " << rows.size() << " (" << failed << " failed)\n";
    if (s.considered == 0) {
        out << "no converged rows\n";
        return out.str();
    }
    out << "min newton_total: " << s.min_newton << " at " << list(s.min_newton_rows) << '\n';
    out << "min coupling_iters: " << s.min_coupling << " at " << list(s.min_coupling_rows) << '\n';
    out << "pareto (coupling_iters, newton_total):";
    for (std::size_t i : s.pareto_rows) {
        out << ' ' << row_label(rows[i]) << '=' << rows[i].coupling_iters << '/' << rows[i].newton_total;
    }
    out << '\n';
    return out.str();
}

} // namespace partcouple
