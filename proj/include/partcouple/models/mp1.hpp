#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "partcouple/subsolver/coupled_problem.hpp"

namespace partcouple {

/// Nonlinear algebraic interface model. mu scales the feedback of the
/// displacement-like field into the traction producer (density-ratio analog).
struct Mp1Params {
    Eigen::Index m = 8;
    double mu = 1.0;
    double alpha = 0.5;
    double beta = 1.0;
    /// Forcing vector; empty means all ones of length m.
    Vector b;
    /// The forcing is scaled by sin(pi/2 * min(t / load_ramp_time, 1)).
    /// Zero switches the ramp off (constant full load).
    double load_ramp_time = 1.0;

    Vector forcing() const { return b.size() == 0 ? Vector(Vector::Ones(m)) : b; }

    void validate() const
    {
        if (m < 1) throw ContractViolation("mp1.m must be >= 1");
        if (!(mu >= 0.0) || !std::isfinite(mu)) throw ContractViolation("mp1.mu must be finite and >= 0");
        if (!std::isfinite(alpha)) throw ContractViolation("mp1.alpha must be finite");
        if (!std::isfinite(beta)) throw ContractViolation("mp1.beta must be finite");
        if (b.size() != 0 && b.size() != m) throw ContractViolation("mp1.b must have length m");
        if (b.size() != 0 && !b.allFinite()) throw ContractViolation("mp1.b must be finite");
        if (!(load_ramp_time >= 0.0)) throw ContractViolation("mp1.load_ramp_time must be >= 0");
    }

    double load_factor(double time) const
    {
        if (load_ramp_time == 0.0) return 1.0;
        return std::sin(0.5 * std::numbers::pi * std::min(time / load_ramp_time, 1.0));
    }
};

/// Traction producer: L t + alpha tanh(t) - load + mu (C d + d.d / 2) = 0 with
/// L the second-difference matrix and C the cyclic shift by one.
class Mp1BlockA final : public FieldBlock {
public:
    explicit Mp1BlockA(Mp1Params p) : p_(std::move(p)), b_(p_.forcing()), load_(p_.load_factor(0.0))
    {
        p_.validate();
        const Eigen::Index m = p_.m;
        lap_ = 2.0 * Matrix::Identity(m, m);
        shift_ = Matrix::Zero(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            if (i + 1 < m) {
                lap_(i, i + 1) = -1.0;
                lap_(i + 1, i) = -1.0;
            }
            shift_(i, (i + 1) % m) += 1.0;
        }
    }

    std::string name() const override { return "mp1-A"; }
    Eigen::Index state_size() const override { return p_.m; }
    Eigen::Index input_size() const override { return p_.m; }
    Eigen::Index output_size() const override { return p_.m; }
    FieldRole input_role() const override { return FieldRole::DisplacementLike; }
    FieldRole output_role() const override { return FieldRole::TractionLike; }
    ResidualCheck residual_check() const override { return ResidualCheck::BeforeStep; }

    void begin_step(double time, double /*dt*/) override { load_ = p_.load_factor(time); }

    Vector residual(const Vector& t, const Vector& d) const override
    {
        return lap_ * t + p_.alpha * t.array().tanh().matrix() - load_ * b_ +
               p_.mu * (shift_ * d + 0.5 * d.cwiseProduct(d));
    }
    Matrix jacobian(const Vector& t, const Vector& /*d*/) const override
    {
        const Vector th = t.array().tanh().matrix();
        Matrix j = lap_;
        j.diagonal() += p_.alpha * (Vector::Ones(t.size()) - th.cwiseProduct(th));
        return j;
    }
    Matrix input_jacobian(const Vector& /*t*/, const Vector& d) const override
    {
        Matrix j = p_.mu * shift_;
        j.diagonal() += p_.mu * d;
        return j;
    }

    Vector output(const Vector& t, const Vector& /*d*/) const override { return t; }
    Matrix output_state_jacobian(const Vector& t, const Vector&) const override
    {
        return Matrix::Identity(t.size(), t.size());
    }
    Matrix output_input_jacobian(const Vector& t, const Vector& d) const override
    {
        return Matrix::Zero(t.size(), d.size());
    }

    double load() const { return load_; }

private:
    Mp1Params p_;
    Vector b_;
    double load_;
    Matrix lap_;
    Matrix shift_;
};

/// Displacement producer with cubic hardening: d + beta d^3 - t = 0.
class Mp1BlockB final : public FieldBlock {
public:
    explicit Mp1BlockB(Mp1Params p) : p_(std::move(p)) { p_.validate(); }

    std::string name() const override { return "mp1-B"; }
    Eigen::Index state_size() const override { return p_.m; }
    Eigen::Index input_size() const override { return p_.m; }
    Eigen::Index output_size() const override { return p_.m; }
    FieldRole input_role() const override { return FieldRole::TractionLike; }
    FieldRole output_role() const override { return FieldRole::DisplacementLike; }

    Vector residual(const Vector& d, const Vector& t) const override
    {
        return d + p_.beta * d.array().cube().matrix() - t;
    }
    Matrix jacobian(const Vector& d, const Vector&) const override
    {
        Matrix j = Matrix::Identity(d.size(), d.size());
        j.diagonal() += 3.0 * p_.beta * d.cwiseProduct(d);
        return j;
    }
    Matrix input_jacobian(const Vector& d, const Vector& t) const override
    {
        return -Matrix::Identity(d.size(), t.size());
    }

    Vector output(const Vector& d, const Vector&) const override { return d; }
    Matrix output_state_jacobian(const Vector& d, const Vector&) const override
    {
        return Matrix::Identity(d.size(), d.size());
    }
    Matrix output_input_jacobian(const Vector& d, const Vector& t) const override
    {
        return Matrix::Zero(d.size(), t.size());
    }

private:
    Mp1Params p_;
};

inline CoupledProblem make_mp1_problem(const Mp1Params& p, double relative_floor = 1e-12)
{
    return CoupledProblem("mp1", std::make_unique<Mp1BlockA>(p), std::make_unique<Mp1BlockB>(p), relative_floor);
}

/// [r_A(t; d); r_B(d; t)] for MP1, where both states coincide with the
/// exchanged fields.
inline Vector mp1_stacked_residual(const CoupledProblem& problem, const Vector& d, const Vector& t)
{
    const FieldBlock& a = problem.solver_a().block();
    const FieldBlock& b = problem.solver_b().block();
    Vector r(a.state_size() + b.state_size());
    r << a.residual(t, d), b.residual(d, t);
    return r;
}

} // namespace partcouple
