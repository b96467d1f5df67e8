#pragma once

#include <string>
#include <variant>

#include "partcouple/models/mp1.hpp"
#include "partcouple/models/mp2.hpp"

namespace partcouple {

using ProblemSpec = std::variant<Mp1Params, Mp2Params>;

inline CoupledProblem make_problem(const ProblemSpec& spec, double relative_floor = 1e-12)
{
    if (const auto* p1 = std::get_if<Mp1Params>(&spec)) return make_mp1_problem(*p1, relative_floor);
    return make_mp2_problem(std::get<Mp2Params>(spec), relative_floor);
}

inline std::string problem_name(const ProblemSpec& spec)
{
    return std::holds_alternative<Mp1Params>(spec) ? "mp1" : "mp2";
}

/// MP1 with mu = 1: Gauss-Seidel without acceleration diverges.
inline Mp1Params mp1_strong()
{
    return Mp1Params{};
}

inline Mp1Params mp1_weak()
{
    Mp1Params p;
    p.mu = 0.1;
    return p;
}

/// Diffusivity ratio k0_A / k0_B = 10.
inline Mp2Params mp2_strong()
{
    return Mp2Params{};
}

/// Diffusivity ratio k0_A / k0_B = 0.1.
inline Mp2Params mp2_weak()
{
    Mp2Params p;
    p.k0_a = 0.1;
    p.k0_b = 1.0;
    return p;
}

} // namespace partcouple
