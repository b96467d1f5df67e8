#pragma once

#include <Eigen/QR>

#include <cmath>
#include <cstddef>
#include <deque>
#include <optional>
#include <vector>

#include "partcouple/accel/relaxation.hpp"

namespace partcouple {

struct FilteredLeastSquares {
    /// One coefficient per input column; filtered columns get 0.
    Vector coefficients;
    std::vector<bool> kept;
    std::size_t n_kept = 0;
};

/// Solves min ||V a + r|| over the columns of V (newest first).
///
/// Columns are orthogonalised by modified Gram-Schmidt in the given order and
/// dropped when their remaining norm (the would-be R diagonal) falls below
/// filter_eps * ||V||_F. Exactly dependent columns, zero columns included,
/// are always dropped, so appending a duplicate never changes the fit.
inline FilteredLeastSquares filtered_least_squares(const std::vector<Vector>& columns,
                                                   const Vector& r,
                                                   double filter_eps)
{
    if (!(filter_eps > 0.0)) throw ContractViolation("filtered_least_squares: filter_eps must be positive");
    FilteredLeastSquares out;
    out.coefficients = Vector::Zero(static_cast<Eigen::Index>(columns.size()));
    out.kept.assign(columns.size(), false);

    double frob2 = 0.0;
    for (const Vector& c : columns) {
        if (c.size() != r.size()) throw ContractViolation("filtered_least_squares: column length mismatch");
        frob2 += c.squaredNorm();
    }
    const double threshold = filter_eps * std::sqrt(frob2);

    std::vector<Vector> q;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        Vector w = columns[i];
        for (const Vector& qj : q) w -= qj.dot(w) * qj;
        const double nw = w.norm();
        if (nw == 0.0 || nw < threshold) continue;
        q.push_back(w / nw);
        keep.push_back(i);
    }
    if (keep.empty()) return out;

    Matrix a(r.size(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) a.col(static_cast<Eigen::Index>(j)) = columns[keep[j]];
    const Vector alpha = a.householderQr().solve(Vector(-r));
    for (std::size_t j = 0; j < keep.size(); ++j) {
        out.coefficients[static_cast<Eigen::Index>(keep[j])] = alpha[static_cast<Eigen::Index>(j)];
        out.kept[keep[j]] = true;
    }
    out.n_kept = keep.size();
    return out;
}

struct IqnIlsOptions {
    std::size_t reuse_steps = 4;
    double qr_filter_eps = 1e-8;
    double fallback_omega = 0.5;

    void validate() const
    {
        if (!(qr_filter_eps > 0.0)) throw ContractViolation("iqn_ils.qr_filter_eps must be positive");
        if (!(fallback_omega > 0.0 && fallback_omega <= 1.0)) {
            throw ContractViolation("iqn_ils.fallback_omega must lie in (0, 1]");
        }
    }
};

enum class IqnStatus {
    Relaxation,    ///< no columns of the current step yet
    QuasiNewton,   ///< least-squares update applied
    AllFiltered,   ///< columns existed but none survived filtering
};

/// Interface quasi-Newton with an inverse least-squares Jacobian (IQN-ILS).
///
/// Columns are built from consecutive differences of the residual r = x~ - x
/// (V) and of the solver output x~ (W). Columns of up to reuse_steps previous
/// time steps are appended behind the current ones, but only once the current
/// step contributed at least one column of its own.
class IqnIls {
public:
    explicit IqnIls(IqnIlsOptions opts = {}) : opts_(opts) { opts_.validate(); }

    InterfaceField update(const InterfaceField& x, const InterfaceField& x_tilde)
    {
        detail::require_same_shape(x, x_tilde, "iqn_update");
        const Vector r = x_tilde.values - x.values;
        if (r_prev_) {
            if (r_prev_->size() != r.size()) throw ContractViolation("iqn_update: interface length changed");
            v_.insert(v_.begin(), r - *r_prev_);
            w_.insert(w_.begin(), x_tilde.values - *x_tilde_prev_);
        }
        r_prev_ = r;
        x_tilde_prev_ = x_tilde.values;

        if (v_.empty()) {
            status_ = IqnStatus::Relaxation;
            return relax_constant(x, x_tilde, opts_.fallback_omega);
        }
        std::vector<Vector> v = v_;
        std::vector<Vector> w = w_;
        for (const StepColumns& step : pool_) {
            v.insert(v.end(), step.v.begin(), step.v.end());
            w.insert(w.end(), step.w.begin(), step.w.end());
        }
        const FilteredLeastSquares ls = filtered_least_squares(v, r, opts_.qr_filter_eps);
        if (ls.n_kept == 0) {
            status_ = IqnStatus::AllFiltered;
            return relax_constant(x, x_tilde, opts_.fallback_omega);
        }
        Vector next = x_tilde.values;
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (ls.kept[i]) next += ls.coefficients[static_cast<Eigen::Index>(i)] * w[i];
        }
        status_ = IqnStatus::QuasiNewton;
        return {x.role, std::move(next)};
    }

    /// Close the time step: its columns enter the reuse pool (FIFO, at most
    /// reuse_steps steps) and the per-step history is cleared.
    void advance_step()
    {
        if (opts_.reuse_steps > 0) {
            pool_.push_front(StepColumns{std::move(v_), std::move(w_)});
            while (pool_.size() > opts_.reuse_steps) pool_.pop_back();
        }
        else {
            pool_.clear();
        }
        v_.clear();
        w_.clear();
        r_prev_.reset();
        x_tilde_prev_.reset();
    }

    IqnStatus status() const { return status_; }
    std::size_t step_columns() const { return v_.size(); }
    std::size_t pool_steps() const { return pool_.size(); }
    std::size_t pool_columns() const
    {
        std::size_t n = 0;
        for (const StepColumns& s : pool_) n += s.v.size();
        return n;
    }
    const IqnIlsOptions& options() const { return opts_; }

private:
    struct StepColumns {
        std::vector<Vector> v;
        std::vector<Vector> w;
    };

    IqnIlsOptions opts_;
    std::vector<Vector> v_;
    std::vector<Vector> w_;
    std::deque<StepColumns> pool_;
    std::optional<Vector> r_prev_;
    std::optional<Vector> x_tilde_prev_;
    IqnStatus status_ = IqnStatus::Relaxation;
};

} // namespace partcouple
