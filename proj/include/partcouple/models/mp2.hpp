#pragma once

#include <cmath>
#include <memory>

#include "partcouple/subsolver/coupled_problem.hpp"

namespace partcouple {

/// One-dimensional nonlinear transmission problem u_t - (k(u) u')' = f on
/// [0, 1] (solver A) and [1, 2] (solver B) with k(u) = k0 (1 + gamma u^2).
/// A receives the interface value and returns the interface flux; B receives
/// the flux and returns the value. BDF1 in time, central differences in space.
struct Mp2Params {
    Eigen::Index cells_a = 40;
    Eigen::Index cells_b = 40;
    double k0_a = 1.0;
    double k0_b = 0.1;
    double gamma = 1.0;
    double forcing = 1.0;
    double u_left = 1.0;
    double u_right = 0.0;
    /// When false the time derivative is dropped and each step solves the
    /// steady problem.
    bool transient = true;

    void validate() const
    {
        if (cells_a < 2 || cells_b < 2) throw ContractViolation("mp2 cell counts must be >= 2");
        if (!(k0_a > 0.0) || !(k0_b > 0.0)) throw ContractViolation("mp2 diffusivities must be positive");
        if (!(gamma >= 0.0)) throw ContractViolation("mp2.gamma must be >= 0");
        if (!std::isfinite(forcing) || !std::isfinite(u_left) || !std::isfinite(u_right)) {
            throw ContractViolation("mp2 forcing and end values must be finite");
        }
    }
};

namespace detail {

/// Face flux k(mean) (u_r - u_l) and its partial derivatives.
struct FaceFlux {
    double value, d_left, d_right;
};

inline FaceFlux face_flux(double k0, double gamma, double ul, double ur)
{
    const double mean = 0.5 * (ul + ur);
    const double k = k0 * (1.0 + gamma * mean * mean);
    const double dk = k0 * 2.0 * gamma * mean;
    const double jump = ur - ul;
    return {k * jump, 0.5 * dk * jump - k, 0.5 * dk * jump + k};
}

} // namespace detail

class Mp2BlockA final : public FieldBlock {
public:
    explicit Mp2BlockA(Mp2Params p) : p_(p), h_(1.0 / static_cast<double>(p.cells_a))
    {
        p_.validate();
        old_ = Vector::Zero(p_.cells_a + 1);
    }

    std::string name() const override { return "mp2-A"; }
    Eigen::Index state_size() const override { return p_.cells_a - 1; }
    Eigen::Index input_size() const override { return 1; }
    Eigen::Index output_size() const override { return 1; }
    FieldRole input_role() const override { return FieldRole::DisplacementLike; }
    FieldRole output_role() const override { return FieldRole::TractionLike; }
    ResidualCheck residual_check() const override { return ResidualCheck::BeforeStep; }

    void begin_step(double /*time*/, double dt) override { inv_dt_ = p_.transient ? 1.0 / dt : 0.0; }
    void commit(const Vector& state, const Vector& input) override { old_ = full(state, input); }

    Vector residual(const Vector& state, const Vector& input) const override
    {
        const Vector u = full(state, input);
        const Eigen::Index n = p_.cells_a;
        Vector r(n - 1);
        for (Eigen::Index i = 1; i < n; ++i) {
            const auto fp = detail::face_flux(p_.k0_a, p_.gamma, u[i], u[i + 1]);
            const auto fm = detail::face_flux(p_.k0_a, p_.gamma, u[i - 1], u[i]);
            r[i - 1] = inv_dt_ * (u[i] - old_[i]) - (fp.value - fm.value) / (h_ * h_) - p_.forcing;
        }
        return r;
    }

    Matrix jacobian(const Vector& state, const Vector& input) const override
    {
        const Vector u = full(state, input);
        const Eigen::Index n = p_.cells_a;
        const double h2 = h_ * h_;
        Matrix j = Matrix::Zero(n - 1, n - 1);
        for (Eigen::Index i = 1; i < n; ++i) {
            const auto fp = detail::face_flux(p_.k0_a, p_.gamma, u[i], u[i + 1]);
            const auto fm = detail::face_flux(p_.k0_a, p_.gamma, u[i - 1], u[i]);
            j(i - 1, i - 1) = inv_dt_ - (fp.d_left - fm.d_right) / h2;
            if (i + 1 < n) j(i - 1, i) = -fp.d_right / h2;
            if (i - 1 >= 1) j(i - 1, i - 2) = fm.d_left / h2;
        }
        return j;
    }

    Matrix input_jacobian(const Vector& state, const Vector& input) const override
    {
        const Vector u = full(state, input);
        const Eigen::Index n = p_.cells_a;
        Matrix j = Matrix::Zero(n - 1, 1);
        const auto fp = detail::face_flux(p_.k0_a, p_.gamma, u[n - 1], u[n]);
        j(n - 2, 0) = -fp.d_right / (h_ * h_);
        return j;
    }

    /// -k(u) du/dx at the interface, one-sided second-order difference.
    Vector output(const Vector& state, const Vector& input) const override
    {
        const Vector u = full(state, input);
        const Eigen::Index n = p_.cells_a;
        const double slope = (3.0 * u[n] - 4.0 * u[n - 1] + u[n - 2]) / (2.0 * h_);
        return Vector::Constant(1, -conductivity(u[n]) * slope);
    }

    Matrix output_state_jacobian(const Vector& state, const Vector& input) const override
    {
        const Vector u = full(state, input);
        const Eigen::Index n = p_.cells_a;
        const double k = conductivity(u[n]);
        Matrix j = Matrix::Zero(1, n - 1);
        j(0, n - 2) = 4.0 * k / (2.0 * h_);
        if (n - 2 >= 1) j(0, n - 3) = -k / (2.0 * h_);
        return j;
    }

    Matrix output_input_jacobian(const Vector& state, const Vector& input) const override
    {
        const Vector u = full(state, input);
        const Eigen::Index n = p_.cells_a;
        const double slope = (3.0 * u[n] - 4.0 * u[n - 1] + u[n - 2]) / (2.0 * h_);
        const double dk = p_.k0_a * 2.0 * p_.gamma * u[n];
        return Matrix::Constant(1, 1, -(dk * slope + conductivity(u[n]) * 3.0 / (2.0 * h_)));
    }

    /// Nodal values u_0..u_N including both boundary values.
    Vector full(const Vector& state, const Vector& input) const
    {
        Vector u(p_.cells_a + 1);
        u[0] = p_.u_left;
        u.segment(1, p_.cells_a - 1) = state;
        u[p_.cells_a] = input[0];
        return u;
    }

private:
    double conductivity(double u) const { return p_.k0_a * (1.0 + p_.gamma * u * u); }

    Mp2Params p_;
    double h_;
    double inv_dt_ = 0.0;
    Vector old_;
};

class Mp2BlockB final : public FieldBlock {
public:
    explicit Mp2BlockB(Mp2Params p) : p_(p), h_(1.0 / static_cast<double>(p.cells_b))
    {
        p_.validate();
        old_ = Vector::Zero(p_.cells_b + 1);
    }

    std::string name() const override { return "mp2-B"; }
    Eigen::Index state_size() const override { return p_.cells_b; }
    Eigen::Index input_size() const override { return 1; }
    Eigen::Index output_size() const override { return 1; }
    FieldRole input_role() const override { return FieldRole::TractionLike; }
    FieldRole output_role() const override { return FieldRole::DisplacementLike; }

    void begin_step(double /*time*/, double dt) override { inv_dt_ = p_.transient ? 1.0 / dt : 0.0; }
    void commit(const Vector& state, const Vector& input) override { old_ = full(state, input); }

    /// The interface row is a half cell scaled by 2/h; the imposed flux enters
    /// it as a source.
    Vector residual(const Vector& state, const Vector& input) const override
    {
        const Vector u = full(state, input);
        const Eigen::Index n = p_.cells_b;
        const double h2 = h_ * h_;
        Vector r(n);
        const auto f0 = detail::face_flux(p_.k0_b, p_.gamma, u[0], u[1]);
        r[0] = inv_dt_ * (u[0] - old_[0]) - p_.forcing - 2.0 * input[0] / h_ - 2.0 * f0.value / h2;
        for (Eigen::Index i = 1; i < n; ++i) {
            const auto fp = detail::face_flux(p_.k0_b, p_.gamma, u[i], u[i + 1]);
            const auto fm = detail::face_flux(p_.k0_b, p_.gamma, u[i - 1], u[i]);
            r[i] = inv_dt_ * (u[i] - old_[i]) - (fp.value - fm.value) / h2 - p_.forcing;
        }
        return r;
    }

    Matrix jacobian(const Vector& state, const Vector& input) const override
    {
        const Vector u = full(state, input);
        const Eigen::Index n = p_.cells_b;
        const double h2 = h_ * h_;
        Matrix j = Matrix::Zero(n, n);
        const auto f0 = detail::face_flux(p_.k0_b, p_.gamma, u[0], u[1]);
        j(0, 0) = inv_dt_ - 2.0 * f0.d_left / h2;
        j(0, 1) = -2.0 * f0.d_right / h2;
        for (Eigen::Index i = 1; i < n; ++i) {
            const auto fp = detail::face_flux(p_.k0_b, p_.gamma, u[i], u[i + 1]);
            const auto fm = detail::face_flux(p_.k0_b, p_.gamma, u[i - 1], u[i]);
            j(i, i) = inv_dt_ - (fp.d_left - fm.d_right) / h2;
            if (i + 1 < n) j(i, i + 1) = -fp.d_right / h2;
            j(i, i - 1) = fm.d_left / h2;
        }
        return j;
    }

    Matrix input_jacobian(const Vector& /*state*/, const Vector& /*input*/) const override
    {
        Matrix j = Matrix::Zero(p_.cells_b, 1);
        j(0, 0) = -2.0 / h_;
        return j;
    }

    Vector output(const Vector& state, const Vector&) const override { return Vector::Constant(1, state[0]); }
    Matrix output_state_jacobian(const Vector&, const Vector&) const override
    {
        Matrix j = Matrix::Zero(1, p_.cells_b);
        j(0, 0) = 1.0;
        return j;
    }
    Matrix output_input_jacobian(const Vector&, const Vector&) const override { return Matrix::Zero(1, 1); }

    Vector full(const Vector& state, const Vector& /*input*/) const
    {
        Vector u(p_.cells_b + 1);
        u.head(p_.cells_b) = state;
        u[p_.cells_b] = p_.u_right;
        return u;
    }

private:
    Mp2Params p_;
    double h_;
    double inv_dt_ = 0.0;
    Vector old_;
};

inline CoupledProblem make_mp2_problem(const Mp2Params& p, double relative_floor = 1e-12)
{
    return CoupledProblem("mp2", std::make_unique<Mp2BlockA>(p), std::make_unique<Mp2BlockB>(p), relative_floor);
}

/// Interface value of the steady, linear (gamma = 0), source-free two-slab
/// problem on unit-length slabs: flux continuity k_a (u_l - u*) = k_b (u* - u_r).
inline double mp2_linear_steady_interface_value(const Mp2Params& p)
{
    return (p.k0_a * p.u_left + p.k0_b * p.u_right) / (p.k0_a + p.k0_b);
}

} // namespace partcouple
