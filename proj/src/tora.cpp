#include "nsdyn/tora.hpp"

#include "nsdyn/error.hpp"

#include <cmath>

namespace nsdyn {

void validate(const ToraParams& p) {
    if (!(p.J > 0.0 && p.M > 0.0 && p.m > 0.0 && p.l > 0.0 && p.k > 0.0)) {
        throw ConfigError("tora: J, M, m, l and k must be positive");
    }
    if (!(p.k_theta >= 0.0 && p.k1 >= 0.0)) {
        throw ConfigError("tora: damping coefficients must be non-negative");
    }
    const double ml = p.m * p.l;
    if (!((p.M + p.m) * p.J > ml * ml)) {
        throw ConfigError("tora: mass matrix not uniformly invertible, need (M+m)J > (ml)^2");
    }
}

ParamTable tora_param_table(const ToraParams& p) {
    return ParamTable({
        {"J", p.J, Provenance::published, "rotor moment of inertia", "kg*m^2"},
        {"M", p.M, Provenance::published, "cart mass", "kg"},
        {"m", p.m, Provenance::published, "eccentric mass", "kg"},
        {"l", p.l, Provenance::published, "eccentricity of the rotating mass", "m"},
        {"k_theta", p.k_theta, Provenance::published, "rotational damping", "N*m*s/rad"},
        {"k", p.k, Provenance::published, "spring stiffness", "N/m"},
        {"k1", p.k1, Provenance::published, "translational damping", "N*s/m"},
        {"u", p.u, Provenance::published, "motor torque", "N*m"},
    });
}

ToraParams tora_params(const ParamTable& t) {
    ToraParams p;
    p.J = t.get("J");
    p.M = t.get("M");
    p.m = t.get("m");
    p.l = t.get("l");
    p.k_theta = t.get("k_theta");
    p.k = t.get("k");
    p.k1 = t.get("k1");
    p.u = t.get("u");
    validate(p);
    return p;
}

double tora_mass_determinant(double theta, const ToraParams& p) noexcept {
    const double coupling = p.m * p.l * std::cos(theta);
    return (p.M + p.m) * p.J - coupling * coupling;
}

namespace {

void tora_field(std::span<const double> x, const ToraParams& p, std::span<double> dxdt) noexcept {
    const double xd = x[1];
    const double th = x[2];
    const double thd = x[3];
    const double c = std::cos(th);
    const double s = std::sin(th);
    const double ml = p.m * p.l;

    // [[M+m, ml c], [ml c, J]] [x'', th''] = [f1, f2]
    const double a11 = p.M + p.m;
    const double a12 = ml * c;
    const double det = a11 * p.J - a12 * a12;
    const double f1 = ml * thd * thd * s - p.k1 * xd - p.k * x[0];
    const double f2 = p.u - p.k_theta * thd;

    dxdt[0] = xd;
    dxdt[1] = (p.J * f1 - a12 * f2) / det;
    dxdt[2] = thd;
    dxdt[3] = (a11 * f2 - a12 * f1) / det;
}

}  // namespace

std::array<double, 4> tora_rhs(const State& s, const ToraParams& p) {
    if (s.size() != 4) {
        throw DomainError("tora_rhs: state must have 4 coordinates");
    }
    if (!all_finite(s.x)) {
        throw DomainError("tora_rhs: non-finite state");
    }
    std::array<double, 4> out{};
    tora_field(s.x, p, out);
    return out;
}

double tora_energy(std::span<const double> x, const ToraParams& p) noexcept {
    const double xd = x[1];
    const double thd = x[3];
    return 0.5 * (p.M + p.m) * xd * xd + p.m * p.l * xd * thd * std::cos(x[2]) + 0.5 * p.J * thd * thd +
           0.5 * p.k * x[0] * x[0];
}

ToraModel::ToraModel(const ParamTable& table)
    : SystemModel({"x", "x_dot", "theta", "theta_dot"}, {}, {{"theta_dot", 3, 0.0}}, 0, 0, table),
      p_(tora_params(table)) {}

TorqueInterval ToraModel::holding_interval(std::size_t, std::span<const double>) const {
    throw DomainError("tora has no switching surfaces");
}

double ToraModel::balance_torque(std::size_t, std::span<const double>) const {
    throw DomainError("tora has no switching surfaces");
}

double ToraModel::sliding_friction(std::size_t, std::span<const double>, int) const {
    throw DomainError("tora has no switching surfaces");
}

void ToraModel::field(std::span<const double> x, std::span<const double>, std::span<double> dxdt) const {
    tora_field(x, p_, dxdt);
}

std::vector<std::vector<double>> ToraModel::equilibrium_seeds() const {
    std::vector<std::vector<double>> seeds;
    for (int i = -4; i <= 4; ++i) {
        for (double th : {0.0, 1.5707963267948966, 3.141592653589793}) {
            seeds.push_back({0.0, 0.0, th, 5.0 * i});
        }
    }
    return seeds;
}

}  // namespace nsdyn
