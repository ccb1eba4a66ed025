#include "nsdyn/friction.hpp"

#include "nsdyn/error.hpp"

#include <cmath>
#include <string>

namespace nsdyn {

bool all_finite(std::span<const double> v) noexcept {
    for (double e : v) {
        if (!std::isfinite(e)) {
            return false;
        }
    }
    return true;
}

namespace {

int sign_of(double v) noexcept { return (v > 0.0) - (v < 0.0); }

void require_finite(double omega, const char* what) {
    if (!std::isfinite(omega)) {
        throw DomainError(std::string(what) + ": non-finite angular velocity");
    }
}

}  // namespace

void validate(const UpperFrictionParams& p) {
    if (!(p.T_su > 0.0)) {
        throw ConfigError("upper friction: T_su must be positive");
    }
    if (!(p.T_su + p.dT_su > 0.0) || !(p.T_su - p.dT_su > 0.0)) {
        throw ConfigError("upper friction: T_su +/- dT_su must both be positive");
    }
    if (!(p.b_u + p.db_u > 0.0) || !(p.b_u - p.db_u > 0.0)) {
        throw ConfigError("upper friction: b_u +/- db_u must both be positive");
    }
}

void validate(const LowerFrictionParams& p) {
    if (!(p.T_0 > 0.0)) {
        throw ConfigError("lower friction: T_0 must be positive");
    }
    if (!(p.T_sl > p.T_pl) || !(p.T_pl > 0.0)) {
        throw ConfigError("lower friction: require T_sl > T_pl > 0");
    }
    if (!(p.omega_sl > 0.0) || !(p.delta_sl > 0.0)) {
        throw ConfigError("lower friction: omega_sl and delta_sl must be positive");
    }
    if (!(p.b_l >= 0.0)) {
        throw ConfigError("lower friction: b_l must be non-negative");
    }
}

double upper_level(double omega, const UpperFrictionParams& p) noexcept {
    return p.T_su + p.dT_su * sign_of(omega) + p.b_u * std::fabs(omega) + p.db_u * omega;
}

double lower_level(double omega, const LowerFrictionParams& p) noexcept {
    const double stribeck = std::exp(-std::pow(std::fabs(omega / p.omega_sl), p.delta_sl));
    return p.T_0 / p.T_sl * (p.T_pl + (p.T_sl - p.T_pl) * stribeck + p.b_l * std::fabs(omega));
}

double upper_sliding_branch(double omega, int side, const UpperFrictionParams& p) noexcept {
    const double s = side >= 0 ? 1.0 : -1.0;
    return s * (p.T_su + p.dT_su * s + p.b_u * s * omega + p.db_u * omega);
}

double lower_sliding_branch(double omega, int side, const LowerFrictionParams& p) noexcept {
    const double s = side >= 0 ? 1.0 : -1.0;
    const double stribeck = std::exp(-std::pow(std::fabs(omega / p.omega_sl), p.delta_sl));
    return s * p.T_0 / p.T_sl * (p.T_pl + (p.T_sl - p.T_pl) * stribeck + p.b_l * s * omega);
}

TorqueInterval upper_stick_interval(const UpperFrictionParams& p) noexcept {
    return {-p.T_su + p.dT_su, p.T_su + p.dT_su};
}

TorqueInterval lower_stick_interval(const LowerFrictionParams& p) noexcept {
    return {-p.T_0, p.T_0};
}

TorqueInterval friction_upper(double omega, const UpperFrictionParams& p) {
    require_finite(omega, "friction_upper");
    if (omega == 0.0) {
        return upper_stick_interval(p);
    }
    return TorqueInterval::point(upper_level(omega, p) * sign_of(omega));
}

TorqueInterval friction_lower(double omega, const LowerFrictionParams& p) {
    require_finite(omega, "friction_lower");
    if (omega == 0.0) {
        return lower_stick_interval(p);
    }
    return TorqueInterval::point(lower_level(omega, p) * sign_of(omega));
}

}  // namespace nsdyn
