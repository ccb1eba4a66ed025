#pragma once

#include "nsdyn/types.hpp"

namespace nsdyn {

/// Upper-disc (rotary table) friction: asymmetric Coulomb level plus an
/// asymmetric viscous term.
struct UpperFrictionParams {
    double T_su = 0.37975;   ///< static torque level [N·m]
    double dT_su = -0.00575; ///< direction asymmetry of the static level [N·m]
    double b_u = 2.4245;     ///< viscous coefficient [N·m·s/rad]
    double db_u = -0.0084;   ///< viscous asymmetry [N·m·s/rad]
};

/// Lower-disc (bit) friction: Stribeck curve scaled so that the zero-velocity
/// limit equals the breakaway torque T_0.
struct LowerFrictionParams {
    double T_0 = 0.26;       ///< breakaway torque [N·m]
    double T_sl = 0.26;      ///< static level [N·m]
    double T_pl = 0.05;      ///< Stribeck minimum level [N·m]
    double omega_sl = 2.2;   ///< Stribeck velocity [rad/s]
    double delta_sl = 1.5;   ///< Stribeck exponent
    double b_l = 0.009;      ///< viscous coefficient [N·m·s/rad]
};

/// Throws ConfigError when the record violates its invariants.
void validate(const UpperFrictionParams& p);
void validate(const LowerFrictionParams& p);

/// Set-valued upper-disc friction. Sliding (omega != 0) yields a degenerate
/// interval; omega == 0 yields the stick interval [-T_su + dT_su, T_su + dT_su].
/// Throws DomainError for non-finite omega.
[[nodiscard]] TorqueInterval friction_upper(double omega, const UpperFrictionParams& p);

/// Set-valued lower-disc friction, [-T_0, T_0] at omega == 0.
[[nodiscard]] TorqueInterval friction_lower(double omega, const LowerFrictionParams& p);

/// Magnitude of the continuous upper branch, T_cu(omega).
[[nodiscard]] double upper_level(double omega, const UpperFrictionParams& p) noexcept;

/// Magnitude of the continuous lower branch, T_cl(omega).
[[nodiscard]] double lower_level(double omega, const LowerFrictionParams& p) noexcept;

// Sliding branches with the direction fixed to `side` (+1 or -1). They agree
// with the set-valued laws whenever sign(omega) == side and extend smoothly to
// the other side of omega = 0, which the integrator needs while it brackets a
// velocity reversal.
[[nodiscard]] double upper_sliding_branch(double omega, int side, const UpperFrictionParams& p) noexcept;
[[nodiscard]] double lower_sliding_branch(double omega, int side, const LowerFrictionParams& p) noexcept;

[[nodiscard]] TorqueInterval upper_stick_interval(const UpperFrictionParams& p) noexcept;
[[nodiscard]] TorqueInterval lower_stick_interval(const LowerFrictionParams& p) noexcept;

}  // namespace nsdyn
