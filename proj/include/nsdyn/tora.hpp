#pragma once

#include "nsdyn/model.hpp"

#include <array>

namespace nsdyn {

/// Translational oscillator with rotational actuator: a cart on a spring,
/// driven by a DC motor spinning an eccentric mass.
struct ToraParams {
    double J = 0.014;        ///< rotor inertia [kg·m²]
    double M = 10.5;         ///< cart mass [kg]
    double m = 1.5;          ///< eccentric mass [kg]
    double l = 0.04;         ///< eccentricity [m]
    double k_theta = 0.005;  ///< rotational damping [N·m·s/rad]
    double k = 5300.0;       ///< spring stiffness [N/m]
    double k1 = 5.0;         ///< translational damping [N·s/m]
    double u = 0.48;         ///< motor torque [N·m]
};

void validate(const ToraParams& p);

[[nodiscard]] ParamTable tora_param_table(const ToraParams& p = {});
[[nodiscard]] ToraParams tora_params(const ParamTable& table);

/// Determinant of the configuration-dependent mass matrix at angle theta.
[[nodiscard]] double tora_mass_determinant(double theta, const ToraParams& p) noexcept;

/// Derivative (x', x'', theta', theta'') at state (x, x', theta, theta').
/// Accelerations come from the closed-form inverse of the 2x2 mass matrix.
[[nodiscard]] std::array<double, 4> tora_rhs(const State& s, const ToraParams& p);

/// Total mechanical energy (kinetic plus spring).
[[nodiscard]] double tora_energy(std::span<const double> x, const ToraParams& p) noexcept;

class ToraModel final : public SystemModel {
public:
    explicit ToraModel(const ParamTable& table);

    [[nodiscard]] std::string_view name() const noexcept override { return "tora"; }
    [[nodiscard]] const ToraParams& tora() const noexcept { return p_; }
    [[nodiscard]] std::optional<double> no_load_velocity() const override { return p_.u / p_.k_theta; }

    [[nodiscard]] TorqueInterval holding_interval(std::size_t, std::span<const double>) const override;
    [[nodiscard]] double balance_torque(std::size_t, std::span<const double>) const override;
    [[nodiscard]] double sliding_friction(std::size_t, std::span<const double>, int) const override;
    void field(std::span<const double> x, std::span<const double> friction, std::span<double> dxdt) const override;
    [[nodiscard]] std::vector<std::vector<double>> equilibrium_seeds() const override;

private:
    ToraParams p_;
};

}  // namespace nsdyn
