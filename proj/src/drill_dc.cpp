#include "nsdyn/drill_dc.hpp"

#include "nsdyn/error.hpp"
#include "nsdyn/roots.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nsdyn {

void validate(const DrillDcParams& p) {
    if (!(p.J_u > 0.0 && p.J_l > 0.0 && p.k_theta > 0.0)) {
        throw ConfigError("drill_dc: J_u, J_l and k_theta must be positive");
    }
    if (!(p.b >= 0.0)) {
        throw ConfigError("drill_dc: b must be non-negative");
    }
    if (!(p.k_m > 0.0)) {
        throw ConfigError("drill_dc: k_m must be positive");
    }
    if (!std::isfinite(p.v)) {
        throw ConfigError("drill_dc: v must be finite");
    }
    validate(p.upper);
    validate(p.lower);
}

double calibrate_drill_dc_voltage(const DrillDcParams& p, double speed) {
    if (!(speed > 0.0)) {
        throw DomainError("calibrate_drill_dc_voltage: speed must be positive");
    }
    return (upper_level(speed, p.upper) + lower_level(speed, p.lower)) / p.k_m;
}

ParamTable drill_dc_param_table() {
    DrillDcParams p;
    const double v = calibrate_drill_dc_voltage(p, kDrillDcNormalSpeed);
    return ParamTable({
        {"J_u", p.J_u, Provenance::published, "upper disc inertia", "kg*m^2"},
        {"J_l", p.J_l, Provenance::published, "lower disc inertia", "kg*m^2"},
        {"k_theta", p.k_theta, Provenance::published, "torsional stiffness of the string", "N*m/rad"},
        {"b", p.b, Provenance::published, "mutual rotational damping", "N*m*s/rad"},
        {"k_m", p.k_m, Provenance::published, "motor constant", "N*m/V"},
        {"v", v, Provenance::default_calibrated, "motor input voltage", "V"},
        {"T_su", p.upper.T_su, Provenance::published, "upper static friction torque", "N*m"},
        {"dT_su", p.upper.dT_su, Provenance::published, "upper static friction asymmetry", "N*m"},
        {"b_u", p.upper.b_u, Provenance::published, "upper viscous friction", "N*m*s/rad"},
        {"db_u", p.upper.db_u, Provenance::published, "upper viscous friction asymmetry", "N*m*s/rad"},
        {"T_0", p.lower.T_0, Provenance::default_calibrated, "lower breakaway torque", "N*m"},
        {"T_sl", p.lower.T_sl, Provenance::published, "lower static friction level", "N*m"},
        {"T_pl", p.lower.T_pl, Provenance::published, "lower Stribeck minimum level", "N*m"},
        {"omega_sl", p.lower.omega_sl, Provenance::published, "Stribeck velocity", "rad/s"},
        {"delta_sl", p.lower.delta_sl, Provenance::published, "Stribeck exponent", "1"},
        {"b_l", p.lower.b_l, Provenance::default_calibrated, "lower viscous friction", "N*m*s/rad"},
    });
}

DrillDcParams drill_dc_params(const ParamTable& t) {
    DrillDcParams p;
    p.J_u = t.get("J_u");
    p.J_l = t.get("J_l");
    p.k_theta = t.get("k_theta");
    p.b = t.get("b");
    p.k_m = t.get("k_m");
    p.v = t.get("v");
    p.upper = {t.get("T_su"), t.get("dT_su"), t.get("b_u"), t.get("db_u")};
    p.lower = {t.get("T_0"), t.get("T_sl"), t.get("T_pl"), t.get("omega_sl"), t.get("delta_sl"), t.get("b_l")};
    validate(p);
    return p;
}

namespace {

void dc_field(std::span<const double> x, double fu, double fl, const DrillDcParams& p,
              std::span<double> dxdt) noexcept {
    const double alpha = x[0];
    const double wu = x[1];
    const double wl = x[2];
    const double spring = p.k_theta * alpha + p.b * (wu - wl);
    dxdt[0] = wu - wl;
    dxdt[1] = (p.k_m * p.v - spring - fu) / p.J_u;
    dxdt[2] = (spring - fl) / p.J_l;
    if (dxdt.size() > 3) {
        dxdt[3] = wu;
    }
}

bool admissible(double value, const TorqueInterval& set) noexcept {
    const double tol = 1e-12 * std::max(1.0, std::fabs(value));
    return set.lo - tol <= value && value <= set.hi + tol;
}

}  // namespace

std::array<double, 4> drill_dc_rhs(const State& s, const DrillDcBranch& branch, const DrillDcParams& p) {
    if (s.size() != 4) {
        throw DomainError("drill_dc_rhs: state must have 4 coordinates");
    }
    if (!all_finite(s.x)) {
        throw DomainError("drill_dc_rhs: non-finite state");
    }
    if (!admissible(branch.upper, friction_upper(s.x[1], p.upper))) {
        throw ContractViolation("drill_dc_rhs: upper friction " + std::to_string(branch.upper) +
                                " outside the friction set");
    }
    if (!admissible(branch.lower, friction_lower(s.x[2], p.lower))) {
        throw ContractViolation("drill_dc_rhs: lower friction " + std::to_string(branch.lower) +
                                " outside the friction set");
    }
    std::array<double, 4> out{};
    dc_field(s.x, branch.upper, branch.lower, p, out);
    return out;
}

DrillDcModel::DrillDcModel(const ParamTable& table)
    : SystemModel({"alpha", "omega_u", "omega_l", "theta_u"},
                  {{"upper", 1, 0.0, 1}, {"lower", 2, 0.0, 2}},
                  {{"omega_u", 1, 0.0}, {"omega_l", 2, 0.0}}, 0, 2, table),
      p_(drill_dc_params(table)) {}

TorqueInterval DrillDcModel::holding_interval(std::size_t surface, std::span<const double>) const {
    return surface == kUpper ? upper_stick_interval(p_.upper) : lower_stick_interval(p_.lower);
}

double DrillDcModel::balance_torque(std::size_t surface, std::span<const double> x) const {
    const double spring = p_.k_theta * x[0] + p_.b * (x[1] - x[2]);
    return surface == kUpper ? p_.k_m * p_.v - spring : spring;
}

double DrillDcModel::sliding_friction(std::size_t surface, std::span<const double> x, int side) const {
    return surface == kUpper ? upper_sliding_branch(x[1], side, p_.upper)
                             : lower_sliding_branch(x[2], side, p_.lower);
}

void DrillDcModel::field(std::span<const double> x, std::span<const double> friction,
                         std::span<double> dxdt) const {
    dc_field(x, friction[kUpper], friction[kLower], p_, dxdt);
}

std::vector<std::string> DrillDcModel::reduced_labels() const { return {"alpha", "omega_u", "omega_l"}; }

void DrillDcModel::to_reduced(std::span<const double> x, std::span<double> z) const {
    std::copy_n(x.begin(), 3, z.begin());
}

void DrillDcModel::from_reduced(std::span<const double> z, std::span<double> x) const {
    std::copy_n(z.begin(), 3, x.begin());
    x[3] = 0.0;
}

void DrillDcModel::reduced_field(std::span<const double> z, std::span<const double> friction,
                                 std::span<double> dz) const {
    dc_field(z, friction[kUpper], friction[kLower], p_, dz.first(3));
}

std::vector<std::vector<double>> DrillDcModel::equilibrium_seeds() const {
    std::vector<std::vector<double>> seeds;
    for (int i = -10; i <= 10; ++i) {
        if (i == 0) {
            continue;
        }
        const double w = i;
        const int side = i > 0 ? 1 : -1;
        seeds.push_back({0.0, w, w});
        seeds.push_back({lower_sliding_branch(w, side, p_.lower) / p_.k_theta, w, w});
    }
    return seeds;
}

std::vector<std::vector<double>> DrillDcModel::scalar_equilibria() const {
    // Co-rotation at speed w: T_fu(w) + T_fl(w) = k_m v, alpha = T_fl(w) / k_theta.
    const double drive = p_.k_m * p_.v;
    const double slope = std::min(p_.upper.b_u - std::fabs(p_.upper.db_u), p_.upper.b_u + p_.upper.db_u);
    const double w_max = (std::fabs(drive) + p_.upper.T_su + p_.lower.T_0 * 10.0) / slope + 10.0;

    std::vector<std::vector<double>> out;
    for (int side : {1, -1}) {
        auto residual = [&](double w_abs) {
            const double w = side * w_abs;
            return upper_sliding_branch(w, side, p_.upper) + lower_sliding_branch(w, side, p_.lower) - drive;
        };
        for (double w_abs : bracket_roots(residual, 1e-9, w_max, 4000)) {
            const double w = side * w_abs;
            out.push_back({lower_sliding_branch(w, side, p_.lower) / p_.k_theta, w, w});
        }
    }
    return out;
}

std::vector<StuckFamily> DrillDcModel::stuck_equilibria() const {
    // Both discs at rest: k_m v - k_theta alpha inside the upper stick set and
    // k_theta alpha inside the lower one.
    const auto up = upper_stick_interval(p_.upper);
    const auto lo = lower_stick_interval(p_.lower);
    const double drive = p_.k_m * p_.v;
    const double a_lo = std::max((drive - up.hi) / p_.k_theta, lo.lo / p_.k_theta);
    const double a_hi = std::min((drive - up.lo) / p_.k_theta, lo.hi / p_.k_theta);
    if (a_lo > a_hi) {
        return {};
    }
    StuckFamily family;
    family.representative = {0.5 * (a_lo + a_hi), 0.0, 0.0};
    family.free_coordinate = 0;
    family.lo = a_lo;
    family.hi = a_hi;
    return {family};
}

}  // namespace nsdyn
