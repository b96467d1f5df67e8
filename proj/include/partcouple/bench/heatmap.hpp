#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "partcouple/bench/optima.hpp"

namespace partcouple {

enum class HeatmapMetric { Coupling, Newton, Cost };

inline HeatmapMetric parse_metric(const std::string& s)
{
    if (s == "coupling") return HeatmapMetric::Coupling;
    if (s == "newton") return HeatmapMetric::Newton;
    if (s == "cost") return HeatmapMetric::Cost;
    throw ContractViolation("unknown metric '" + s + "' (expected coupling, newton or cost)");
}

inline std::string metric_title(HeatmapMetric m)
{
    switch (m) {
    case HeatmapMetric::Coupling: return "coupling iterations";
    case HeatmapMetric::Newton: return "total Newton iterations";
    case HeatmapMetric::Cost: return "estimated cost";
    }
    return {};
}

inline double metric_value(const SweepResultRow& r, HeatmapMetric m)
{
    switch (m) {
    case HeatmapMetric::Coupling: return static_cast<double>(r.coupling_iters);
    case HeatmapMetric::Newton: return static_cast<double>(r.newton_total);
    case HeatmapMetric::Cost: return r.cost;
    }
    return 0.0;
}

namespace detail {

/// Finite budgets ascending, "inf" last.
struct BudgetOrder {
    bool operator()(const std::optional<std::size_t>& a, const std::optional<std::size_t>& b) const
    {
        if (!a) return false;
        if (!b) return true;
        return *a < *b;
    }
};

struct Rgb {
    double r, g, b;
};

/// Sequential ramp, dark for low values (t = 0) to light (t = 1).
inline Rgb ramp_color(double t)
{
    static const Rgb stops[] = {{8, 48, 107}, {33, 113, 181}, {107, 174, 214}, {198, 219, 239}, {247, 251, 255}};
    t = std::clamp(t, 0.0, 1.0) * 4.0;
    const int i = std::min(3, static_cast<int>(t));
    const double f = t - i;
    const Rgb& a = stops[i];
    const Rgb& b = stops[i + 1];
    return {a.r + f * (b.r - a.r), a.g + f * (b.g - a.g), a.b + f * (b.b - a.b)};
}

inline std::string hex_color(const Rgb& c)
{
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(c.r)),
                  static_cast<int>(std::lround(c.g)), static_cast<int>(std::lround(c.b)));
    return buf;
}

inline std::string format_metric(double v)
{
    if (v == std::floor(v) && std::abs(v) < 1e15) return std::to_string(static_cast<long long>(v));
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

} // namespace detail

/// SVG heatmap of the fixed-budget rows: N_f down the rows, N_s across, one
/// labelled cell each. Color is a linear ramp over the metric of converged
/// cells (dark = low); failed cells are drawn grey.
inline std::string render_heatmap_svg(const std::vector<SweepResultRow>& rows, HeatmapMetric metric)
{
    using Budget = std::optional<std::size_t>;
    std::map<Budget, std::size_t, detail::BudgetOrder> ra, rb;
    std::map<std::pair<std::size_t, std::size_t>, const SweepResultRow*> cells;
    std::vector<const SweepResultRow*> fixed;
    for (const auto& r : rows) {
        if (!r.is_fixed()) continue;
        ra.emplace(r.n_f, 0);
        rb.emplace(r.n_s, 0);
        fixed.push_back(&r);
    }
    if (fixed.empty()) throw ContractViolation("heatmap: no fixed-budget rows");
    std::size_t k = 0;
    for (auto& [key, idx] : ra) idx = k++;
    k = 0;
    for (auto& [key, idx] : rb) idx = k++;
    for (const auto* r : fixed) {
        if (!cells.emplace(std::pair{ra.at(r->n_f), rb.at(r->n_s)}, r).second) {
            throw ContractViolation("heatmap: duplicate cell " + row_label(*r));
        }
    }
    std::string missing;
    for (const auto& [a, ia] : ra) {
        for (const auto& [b, ib] : rb) {
            if (!cells.count({ia, ib})) {
                missing += (missing.empty() ? "" : ", ") + std::string("(") + detail::format_budget(a) + "," +
                           detail::format_budget(b) + ")";
            }
        }
    }
    if (!missing.empty()) throw ContractViolation("heatmap: incomplete grid, missing cells " + missing);

    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (const auto* r : fixed) {
        if (r->failed) continue;
        const double v = metric_value(*r, metric);
        lo = any ? std::min(lo, v) : v;
        hi = any ? std::max(hi, v) : v;
        any = true;
    }

    const int cell = 64, left = 70, top = 60, legend = 90;
    const int width = left + cell * static_cast<int>(rb.size()) + legend;
    const int height = top + cell * static_cast<int>(ra.size()) + 20;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"13\">\n";
    svg << "<text x=\"" << left << "\" y=\"20\" font-size=\"15\">" << metric_title(metric) << "</text>\n";
    svg << "<text x=\"" << left + cell * static_cast<int>(rb.size()) / 2 << "\" y=\"40\" text-anchor=\"middle\">N_s</text>\n";
    svg << "<text x=\"18\" y=\"" << top + cell * static_cast<int>(ra.size()) / 2 << "\" text-anchor=\"middle\">N_f</text>\n";
    for (const auto& [b, ib] : rb) {
        svg << "<text x=\"" << left + cell * static_cast<int>(ib) + cell / 2 << "\" y=\"" << top - 6
            << "\" text-anchor=\"middle\">" << (b ? std::to_string(*b) : "&#8734;") << "</text>\n";
    }
    for (const auto& [a, ia] : ra) {
        svg << "<text x=\"" << left - 8 << "\" y=\"" << top + cell * static_cast<int>(ia) + cell / 2 + 5
            << "\" text-anchor=\"end\">" << (a ? std::to_string(*a) : "&#8734;") << "</text>\n";
    }
    for (const auto& [pos, r] : cells) {
        const int x = left + cell * static_cast<int>(pos.second);
        const int y = top + cell * static_cast<int>(pos.first);
        std::string fill = "#bdbdbd";
        std::string text_color = "#000000";
        std::string label = "fail";
        if (!r->failed) {
            const double v = metric_value(*r, metric);
            const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
            fill = detail::hex_color(detail::ramp_color(t));
            text_color = t < 0.5 ? "#ffffff" : "#000000";
            label = detail::format_metric(v);
        }
        svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell
            << "\" fill=\"" << fill << "\" stroke=\"#ffffff\"/>\n";
        svg << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 5 << "\" text-anchor=\"middle\" fill=\""
            << text_color << "\">" << label << "</text>\n";
    }
    if (any) {
        const int lx = left + cell * static_cast<int>(rb.size()) + 20;
        const int lh = cell * static_cast<int>(ra.size());
        for (int i = 0; i < 10; ++i) {
            svg << "<rect x=\"" << lx << "\" y=\"" << top + lh * i / 10 << "\" width=\"16\" height=\""
                << lh / 10 + 1 << "\" fill=\"" << detail::hex_color(detail::ramp_color(i / 9.0)) << "\"/>\n";
        }
        svg << "<text x=\"" << lx + 20 << "\" y=\"" << top + 10 << "\">" << detail::format_metric(lo) << "</text>\n";
        svg << "<text x=\"" << lx + 20 << "\" y=\"" << top + lh << "\">" << detail::format_metric(hi) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

inline void emit_heatmap(const std::vector<SweepResultRow>& rows, HeatmapMetric metric, const std::string& path)
{
    const std::string svg = render_heatmap_svg(rows, metric);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CsvError("cannot open '" + path + "' for writing");
    out << svg;
    if (!out) throw CsvError("write to '" + path + "' failed");
}

} // namespace partcouple
