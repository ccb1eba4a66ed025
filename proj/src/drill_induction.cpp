#include "nsdyn/drill_induction.hpp"

#include "nsdyn/error.hpp"
#include "nsdyn/roots.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace nsdyn {

namespace {

constexpr double kPhase = 2.0 * std::numbers::pi / 3.0;

void induction_field(std::span<const double> x, double lower_friction, const DrillInductionParams& p,
                     std::span<double> dxdt) noexcept {
    const double th_u = x[0];
    const double w_u = x[1];
    const double th_l = x[2];
    const double w_l = x[3];
    const double spring = p.k_theta * (th_u - th_l) + p.b * (w_u - w_l);

    double motor = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double s = std::sin(th_u + k * kPhase);
        motor += p.a * x[4 + k] * s;
        dxdt[4 + k] = -p.c * x[4 + k] - p.a * w_u * s;
    }
    dxdt[0] = w_u;
    dxdt[1] = (motor - spring) / p.J_u;
    dxdt[2] = w_l;
    dxdt[3] = (spring - lower_friction) / p.J_l;
}

}  // namespace

void validate(const DrillInductionParams& p) {
    if (!(p.J_u > 0.0 && p.J_l > 0.0 && p.k_theta > 0.0)) {
        throw ConfigError("drill_induction: J_u, J_l and k_theta must be positive");
    }
    if (!(p.b >= 0.0)) {
        throw ConfigError("drill_induction: b must be non-negative");
    }
    if (!(p.a > 0.0 && p.c > 0.0 && p.omega_field > 0.0)) {
        throw ConfigError("drill_induction: a, c and omega_field must be positive");
    }
    validate(p.lower);
}

ParamTable drill_induction_param_table() {
    DrillInductionParams p;
    return ParamTable({
        {"J_u", p.J_u, Provenance::published, "upper disc (rotor) inertia", "kg*m^2"},
        {"J_l", p.J_l, Provenance::published, "lower disc inertia", "kg*m^2"},
        {"k_theta", p.k_theta, Provenance::published, "torsional stiffness of the string", "N*m/rad"},
        {"b", p.b, Provenance::published, "mutual rotational damping", "N*m*s/rad"},
        {"a", p.a, Provenance::published, "electromechanical coupling nBS", "N*m/A"},
        {"c", p.c, Provenance::published, "coil decay rate (R+r)/L", "1/s"},
        {"omega_field", p.omega_field, Provenance::published, "synchronous field speed", "rad/s"},
        {"T_0", p.lower.T_0, Provenance::published, "lower breakaway torque", "N*m"},
        {"T_sl", p.lower.T_sl, Provenance::published, "lower static friction level", "N*m"},
        {"T_pl", p.lower.T_pl, Provenance::published, "lower Stribeck minimum level", "N*m"},
        {"omega_sl", p.lower.omega_sl, Provenance::published, "Stribeck velocity", "rad/s"},
        {"delta_sl", p.lower.delta_sl, Provenance::published, "Stribeck exponent", "1"},
        {"b_l", p.lower.b_l, Provenance::published, "lower viscous friction", "N*m*s/rad"},
    });
}

DrillInductionParams drill_induction_params(const ParamTable& t) {
    DrillInductionParams p;
    p.J_u = t.get("J_u");
    p.J_l = t.get("J_l");
    p.k_theta = t.get("k_theta");
    p.b = t.get("b");
    p.a = t.get("a");
    p.c = t.get("c");
    p.omega_field = t.get("omega_field");
    p.lower = {t.get("T_0"), t.get("T_sl"), t.get("T_pl"), t.get("omega_sl"), t.get("delta_sl"), t.get("b_l")};
    validate(p);
    return p;
}

double induction_motor_torque(std::span<const double> x, const DrillInductionParams& p) noexcept {
    double motor = 0.0;
    for (int k = 0; k < 3; ++k) {
        motor += p.a * x[4 + k] * std::sin(x[0] + k * kPhase);
    }
    return motor;
}

double induction_steady_torque(double omega_u, const DrillInductionParams& p) noexcept {
    const double i_q = -p.a * omega_u * p.c / (p.c * p.c + omega_u * omega_u);
    return 1.5 * p.a * i_q;
}

std::array<double, 7> drill_induction_rhs(const State& s, double lower_friction, const DrillInductionParams& p) {
    if (s.size() != 7) {
        throw DomainError("drill_induction_rhs: state must have 7 coordinates");
    }
    if (!all_finite(s.x)) {
        throw DomainError("drill_induction_rhs: non-finite state");
    }
    const auto set = friction_lower(s.x[3] + p.omega_field, p.lower);
    const double tol = 1e-12 * std::max(1.0, std::fabs(lower_friction));
    if (lower_friction < set.lo - tol || lower_friction > set.hi + tol) {
        throw ContractViolation("drill_induction_rhs: lower friction " + std::to_string(lower_friction) +
                                " outside the friction set");
    }
    std::array<double, 7> out{};
    induction_field(s.x, lower_friction, p, out);
    return out;
}

DrillInductionModel::DrillInductionModel(const ParamTable& table)
    : SystemModel({"theta_u", "omega_u", "theta_l", "omega_l", "i_1", "i_2", "i_3"},
                  {{"lower", 3, -table.get("omega_field"), 2}},
                  {{"omega_u", 1, table.get("omega_field")},
                   {"omega_l", 3, table.get("omega_field")}},
                  0, 3, table),
      p_(drill_induction_params(table)) {}

TorqueInterval DrillInductionModel::holding_interval(std::size_t, std::span<const double>) const {
    return lower_stick_interval(p_.lower);
}

double DrillInductionModel::balance_torque(std::size_t, std::span<const double> x) const {
    return p_.k_theta * (x[0] - x[2]) + p_.b * (x[1] - x[3]);
}

double DrillInductionModel::sliding_friction(std::size_t, std::span<const double> x, int side) const {
    return lower_sliding_branch(x[3] + p_.omega_field, side, p_.lower);
}

void DrillInductionModel::field(std::span<const double> x, std::span<const double> friction,
                                std::span<double> dxdt) const {
    induction_field(x, friction[kLower], p_, dxdt);
}

std::vector<std::string> DrillInductionModel::reduced_labels() const {
    return {"theta", "omega_u", "omega_l", "i_d", "i_q", "i_0"};
}

void DrillInductionModel::to_reduced(std::span<const double> x, std::span<double> z) const {
    double i_d = 0.0;
    double i_q = 0.0;
    double i_0 = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double phi = x[0] + k * kPhase;
        i_d += x[4 + k] * std::cos(phi);
        i_q += x[4 + k] * std::sin(phi);
        i_0 += x[4 + k];
    }
    z[0] = x[0] - x[2];
    z[1] = x[1];
    z[2] = x[3];
    z[3] = 2.0 / 3.0 * i_d;
    z[4] = 2.0 / 3.0 * i_q;
    z[5] = i_0 / 3.0;
}

void DrillInductionModel::from_reduced(std::span<const double> z, std::span<double> x) const {
    x[0] = 0.0;
    x[1] = z[1];
    x[2] = -z[0];
    x[3] = z[2];
    for (int k = 0; k < 3; ++k) {
        const double phi = k * kPhase;
        x[4 + k] = z[3] * std::cos(phi) + z[4] * std::sin(phi) + z[5];
    }
}

void DrillInductionModel::reduced_field(std::span<const double> z, std::span<const double> friction,
                                        std::span<double> dz) const {
    const double w_u = z[1];
    const double w_l = z[2];
    const double spring = p_.k_theta * z[0] + p_.b * (w_u - w_l);
    const double motor = 1.5 * p_.a * z[4];
    dz[0] = w_u - w_l;
    dz[1] = (motor - spring) / p_.J_u;
    dz[2] = (spring - friction[kLower]) / p_.J_l;
    dz[3] = -p_.c * z[3] - w_u * z[4];
    dz[4] = -p_.c * z[4] + w_u * z[3] - p_.a * w_u;
    dz[5] = -p_.c * z[5];
}

std::vector<double> DrillInductionModel::steady_slip_state(double slip, double lower_friction) const {
    const double denom = p_.c * p_.c + slip * slip;
    const double i_q = -p_.a * slip * p_.c / denom;
    const double i_d = p_.a * slip * slip / denom;
    return {lower_friction / p_.k_theta, slip, slip, i_d, i_q, 0.0};
}

std::vector<std::vector<double>> DrillInductionModel::equilibrium_seeds() const {
    std::vector<std::vector<double>> seeds;
    const double w = p_.omega_field;
    for (int i = -8; i <= 8; ++i) {
        const double slip = w * i / 4.0;
        const double ground = slip + w;
        if (ground == 0.0) {
            continue;
        }
        seeds.push_back(steady_slip_state(slip, induction_steady_torque(slip, p_)));
        seeds.push_back(steady_slip_state(slip, lower_sliding_branch(ground, ground > 0 ? 1 : -1, p_.lower)));
    }
    return seeds;
}

std::vector<std::vector<double>> DrillInductionModel::scalar_equilibria() const {
    // Steady slip s: motor torque balances the lower friction at ground speed s + omega_field.
    const double w = p_.omega_field;
    const double span = 10.0 * (w + p_.c) + 50.0;
    std::vector<std::vector<double>> out;
    for (int side : {1, -1}) {
        auto residual = [&](double g_abs) {
            const double ground = side * g_abs;
            return induction_steady_torque(ground - w, p_) - lower_sliding_branch(ground, side, p_.lower);
        };
        for (double g_abs : bracket_roots(residual, 1e-9, span, 8000)) {
            const double ground = side * g_abs;
            out.push_back(steady_slip_state(ground - w, lower_sliding_branch(ground, side, p_.lower)));
        }
    }
    return out;
}

std::vector<StuckFamily> DrillInductionModel::stuck_equilibria() const {
    // Lower disc at rest in the ground frame; the rotor must then turn at the
    // same slip, and its steady torque is held by the string.
    const double slip = -p_.omega_field;
    const double torque = induction_steady_torque(slip, p_);
    if (std::fabs(torque) > p_.lower.T_0) {
        return {};
    }
    StuckFamily family;
    family.representative = steady_slip_state(slip, torque);
    family.free_coordinate = 0;
    family.lo = family.hi = family.representative[0];
    return {family};
}

}  // namespace nsdyn
