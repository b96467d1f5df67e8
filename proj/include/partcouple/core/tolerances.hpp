#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "partcouple/core/errors.hpp"

namespace partcouple {

struct CouplingTolerances {
    double eps_coupling = 1e-5;
    /// Residual bound per subproblem, indexed {A, B}.
    std::array<double, 2> eps_problem{1e-10, 1e-10};
    double eps_cid = 1e-4;
    double relative_floor = 1e-12;

    void validate() const
    {
        auto positive = [](double v, const char* name) {
            if (!(v > 0.0)) {
                throw ContractViolation(std::string("tolerance '") + name + "' must be positive");
            }
        };
        positive(eps_coupling, "eps_coupling");
        positive(eps_problem[0], "eps_problem[A]");
        positive(eps_problem[1], "eps_problem[B]");
        positive(eps_cid, "eps_cid");
        positive(relative_floor, "relative_floor");
    }
};

struct TimeLoopConfig {
    double dt = 0.05;
    std::size_t n_steps = 20;
    std::size_t max_coupling_iters = 500;
    std::size_t max_newton_per_call = 100;

    void validate() const
    {
        if (!(dt > 0.0)) throw ContractViolation("time loop: dt must be positive");
        if (n_steps < 1) throw ContractViolation("time loop: n_steps must be >= 1");
        if (max_coupling_iters < 1) throw ContractViolation("time loop: max_coupling_iters must be >= 1");
        if (max_newton_per_call < 1) throw ContractViolation("time loop: max_newton_per_call must be >= 1");
    }
};

} // namespace partcouple
