#pragma once

#include <optional>
#include <string>
#include <variant>

#include "partcouple/accel/aitken.hpp"
#include "partcouple/accel/iqn_ils.hpp"
#include "partcouple/accel/relaxation.hpp"

namespace partcouple {

struct ConstantRelaxation {
    double omega = 1.0;
};

struct AitkenRelaxation {
    double omega0 = 0.5;
    double omega_min = kAitkenOmegaMin;
    double omega_max = kAitkenOmegaMax;
};

using AcceleratorSpec = std::variant<ConstantRelaxation, AitkenRelaxation, IqnIlsOptions>;

inline void validate(const AcceleratorSpec& spec)
{
    if (const auto* c = std::get_if<ConstantRelaxation>(&spec)) {
        if (!(c->omega > 0.0 && c->omega <= 1.0)) throw ContractViolation("constant omega must lie in (0, 1]");
    }
    else if (const auto* a = std::get_if<AitkenRelaxation>(&spec)) {
        if (!(a->omega_min > 0.0) || !(a->omega_min <= a->omega_max)) {
            throw ContractViolation("aitken clamp range must satisfy 0 < omega_min <= omega_max");
        }
        if (!(a->omega0 > 0.0 && a->omega0 <= 1.0)) throw ContractViolation("aitken omega0 must lie in (0, 1]");
    }
    else {
        std::get<IqnIlsOptions>(spec).validate();
    }
}

inline std::string accelerator_name(const AcceleratorSpec& spec)
{
    if (std::holds_alternative<ConstantRelaxation>(spec)) return "constant";
    if (std::holds_alternative<AitkenRelaxation>(spec)) return "aitken";
    return "iqn-ils";
}

/// Stateful interface update for one coupled run.
class Accelerator {
public:
    explicit Accelerator(AcceleratorSpec spec) : spec_(std::move(spec))
    {
        validate(spec_);
        if (const auto* o = std::get_if<IqnIlsOptions>(&spec_)) iqn_.emplace(*o);
    }

    void begin_step()
    {
        r_prev_.reset();
        if (const auto* a = std::get_if<AitkenRelaxation>(&spec_)) omega_ = a->omega0;
    }

    /// Next displacement-like input from the current one and B's raw output.
    InterfaceField update(const InterfaceField& x, const InterfaceField& x_tilde)
    {
        if (const auto* c = std::get_if<ConstantRelaxation>(&spec_)) return relax_constant(x, x_tilde, c->omega);
        if (const auto* a = std::get_if<AitkenRelaxation>(&spec_)) {
            detail::require_same_shape(x, x_tilde, "aitken update");
            Vector r = x_tilde.values - x.values;
            if (r_prev_) omega_ = aitken_omega(omega_, *r_prev_, r, a->omega_min, a->omega_max);
            r_prev_ = std::move(r);
            return relax_constant(x, x_tilde, omega_);
        }
        return iqn_->update(x, x_tilde);
    }

    void end_step()
    {
        if (iqn_) iqn_->advance_step();
    }

    const AcceleratorSpec& spec() const { return spec_; }
    /// Current Aitken factor (meaningful for Aitken only).
    double omega() const { return omega_; }
    const IqnIls* iqn() const { return iqn_ ? &*iqn_ : nullptr; }

private:
    AcceleratorSpec spec_;
    std::optional<IqnIls> iqn_;
    std::optional<Vector> r_prev_;
    double omega_ = 1.0;
};

} // namespace partcouple
