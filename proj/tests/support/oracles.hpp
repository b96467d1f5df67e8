#pragma once

// Independent reference computations used by the tests.

#include <cmath>
#include <functional>
#include <stdexcept>

namespace partcouple::oracle {

/// Root of a continuous function with a sign change on [lo, hi].
inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-14)
{
    double flo = f(lo);
    if (flo * f(hi) > 0.0) throw std::invalid_argument("bisect: no sign change");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        }
        else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace partcouple::oracle
