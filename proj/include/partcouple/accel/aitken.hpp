#pragma once

#include <algorithm>

#include "partcouple/accel/relaxation.hpp"

namespace partcouple {

inline constexpr double kAitkenOmegaMin = 0.01;
inline constexpr double kAitkenOmegaMax = 2.0;

/// Aitken update of the relaxation factor from two successive interface
/// residuals r = x_tilde - x, clamped to [omega_min, omega_max]. A vanishing
/// residual difference leaves the factor unchanged.
inline double aitken_omega(double omega_prev,
                           const Vector& r_prev,
                           const Vector& r_curr,
                           double omega_min = kAitkenOmegaMin,
                           double omega_max = kAitkenOmegaMax)
{
    if (r_prev.size() != r_curr.size()) throw ContractViolation("aitken_omega: residual length mismatch");
    if (!(omega_min > 0.0) || omega_min > omega_max) throw ContractViolation("aitken_omega: invalid clamp range");
    const Vector diff = r_curr - r_prev;
    const double denom = diff.squaredNorm();
    if (denom == 0.0) return omega_prev;
    const double omega = -omega_prev * r_prev.dot(diff) / denom;
    return std::clamp(omega, omega_min, omega_max);
}

inline double aitken_omega(double omega_prev,
                           const InterfaceField& r_prev,
                           const InterfaceField& r_curr,
                           double omega_min = kAitkenOmegaMin,
                           double omega_max = kAitkenOmegaMax)
{
    detail::require_same_shape(r_prev, r_curr, "aitken_omega");
    return aitken_omega(omega_prev, r_prev.values, r_curr.values, omega_min, omega_max);
}

} // namespace partcouple
