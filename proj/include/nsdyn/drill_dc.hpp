#pragma once

#include "nsdyn/friction.hpp"
#include "nsdyn/model.hpp"

#include <array>

namespace nsdyn {

/// Two-disc drill string driven by a DC motor at constant input voltage.
/// State: (alpha = theta_u - theta_l, omega_u, omega_l, theta_u).
struct DrillDcParams {
    double J_u = 0.4765;    ///< upper disc inertia [kg·m²]
    double J_l = 0.035;     ///< lower disc inertia [kg·m²]
    double k_theta = 0.075; ///< torsional stiffness [N·m/rad]
    double b = 0.0;         ///< mutual rotational damping [N·m·s/rad]
    double k_m = 4.3228;    ///< motor constant [N·m/V]
    double v = 0.0;         ///< input voltage [V]; see drill_dc_param_table for the default
    UpperFrictionParams upper{};
    LowerFrictionParams lower{};
};

/// Target co-rotation speed used to calibrate the default input voltage.
inline constexpr double kDrillDcNormalSpeed = 6.1;

void validate(const DrillDcParams& p);

/// Input voltage whose steady co-rotation speed is `speed` (> 0).
[[nodiscard]] double calibrate_drill_dc_voltage(const DrillDcParams& p, double speed);

/// Default table. The voltage is calibrated so that the co-rotation
/// equilibrium sits at kDrillDcNormalSpeed.
[[nodiscard]] ParamTable drill_dc_param_table();
[[nodiscard]] DrillDcParams drill_dc_params(const ParamTable& table);

/// Concrete friction torques on the upper and lower disc.
struct DrillDcBranch {
    double upper = 0.0;
    double lower = 0.0;
};

/// Derivative of (alpha, omega_u, omega_l, theta_u). Throws ContractViolation
/// when a branch value lies outside the friction set at the current velocity.
[[nodiscard]] std::array<double, 4> drill_dc_rhs(const State& s, const DrillDcBranch& branch,
                                                 const DrillDcParams& p);

class DrillDcModel final : public SystemModel {
public:
    static constexpr std::size_t kUpper = 0;
    static constexpr std::size_t kLower = 1;

    explicit DrillDcModel(const ParamTable& table);

    [[nodiscard]] std::string_view name() const noexcept override { return "drill_dc"; }
    [[nodiscard]] const DrillDcParams& drill() const noexcept { return p_; }

    [[nodiscard]] TorqueInterval holding_interval(std::size_t surface, std::span<const double> x) const override;
    [[nodiscard]] double balance_torque(std::size_t surface, std::span<const double> x) const override;
    [[nodiscard]] double sliding_friction(std::size_t surface, std::span<const double> x, int side) const override;
    void field(std::span<const double> x, std::span<const double> friction, std::span<double> dxdt) const override;

    [[nodiscard]] std::size_t reduced_dim() const override { return 3; }
    [[nodiscard]] std::vector<std::string> reduced_labels() const override;
    void to_reduced(std::span<const double> x, std::span<double> z) const override;
    void from_reduced(std::span<const double> z, std::span<double> x) const override;
    void reduced_field(std::span<const double> z, std::span<const double> friction,
                       std::span<double> dz) const override;

    [[nodiscard]] std::vector<std::vector<double>> equilibrium_seeds() const override;
    [[nodiscard]] std::vector<std::vector<double>> scalar_equilibria() const override;
    [[nodiscard]] std::vector<StuckFamily> stuck_equilibria() const override;

private:
    DrillDcParams p_;
};

}  // namespace nsdyn
