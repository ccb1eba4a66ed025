#pragma once

#include "nsdyn/friction.hpp"
#include "nsdyn/model.hpp"

#include <array>

namespace nsdyn {

/// Two-disc drill string driven by a three-phase induction motor, written in
/// a frame co-rotating with the stator field. Circuit equations use the
/// rescaled form di_k/dt = -c i_k - a omega_u sin(theta_u + 2(k-1)pi/3).
/// State: (theta_u, omega_u, theta_l, omega_l, i_1, i_2, i_3).
struct DrillInductionParams {
    double J_u = 0.4765;      ///< upper disc (rotor) inertia [kg·m²]
    double J_l = 0.035;       ///< lower disc inertia [kg·m²]
    double k_theta = 0.075;   ///< torsional stiffness [N·m/rad]
    double b = 0.0;           ///< mutual damping [N·m·s/rad]
    double a = 2.1;           ///< electromechanical coupling nBS
    double c = 10.0;          ///< coil decay rate (R+r)/L [1/s]
    double omega_field = 8.0; ///< synchronous field speed [rad/s]
    LowerFrictionParams lower{0.25, 0.26, 0.05, 2.2, 1.5, 0.009};
};

void validate(const DrillInductionParams& p);

[[nodiscard]] ParamTable drill_induction_param_table();
[[nodiscard]] DrillInductionParams drill_induction_params(const ParamTable& table);

/// Motor torque a * sum_k i_k sin(theta_u + 2(k-1)pi/3).
[[nodiscard]] double induction_motor_torque(std::span<const double> x, const DrillInductionParams& p) noexcept;

/// Steady motor torque at constant slip velocity `omega_u` (relative to the
/// field), once the coil currents have settled.
[[nodiscard]] double induction_steady_torque(double omega_u, const DrillInductionParams& p) noexcept;

/// Derivative of the 7-dimensional state for a concrete lower-disc friction
/// torque. Throws ContractViolation when `lower_friction` is outside the
/// friction set at the ground-frame speed omega_l + omega_field.
[[nodiscard]] std::array<double, 7> drill_induction_rhs(const State& s, double lower_friction,
                                                        const DrillInductionParams& p);

/// Reduced coordinates are (theta_u - theta_l, omega_u, omega_l, i_d, i_q, i_0),
/// the currents expressed in the frame attached to theta_u. theta_u then
/// drops out, so steady slip is a fixed point.
class DrillInductionModel final : public SystemModel {
public:
    static constexpr std::size_t kLower = 0;

    explicit DrillInductionModel(const ParamTable& table);

    [[nodiscard]] std::string_view name() const noexcept override { return "drill_induction"; }
    [[nodiscard]] const DrillInductionParams& drill() const noexcept { return p_; }

    [[nodiscard]] TorqueInterval holding_interval(std::size_t surface, std::span<const double> x) const override;
    [[nodiscard]] double balance_torque(std::size_t surface, std::span<const double> x) const override;
    [[nodiscard]] double sliding_friction(std::size_t surface, std::span<const double> x, int side) const override;
    void field(std::span<const double> x, std::span<const double> friction, std::span<double> dxdt) const override;

    [[nodiscard]] std::size_t reduced_dim() const override { return 6; }
    [[nodiscard]] std::vector<std::string> reduced_labels() const override;
    void to_reduced(std::span<const double> x, std::span<double> z) const override;
    void from_reduced(std::span<const double> z, std::span<double> x) const override;
    void reduced_field(std::span<const double> z, std::span<const double> friction,
                       std::span<double> dz) const override;

    [[nodiscard]] std::vector<std::vector<double>> equilibrium_seeds() const override;
    [[nodiscard]] std::vector<std::vector<double>> scalar_equilibria() const override;
    [[nodiscard]] std::vector<StuckFamily> stuck_equilibria() const override;

private:
    [[nodiscard]] std::vector<double> steady_slip_state(double slip, double lower_friction) const;

    DrillInductionParams p_;
};

}  // namespace nsdyn
