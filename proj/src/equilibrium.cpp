#include "nsdyn/equilibrium.hpp"

#include "nsdyn/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nsdyn {

std::string_view to_string(Stability s) noexcept {
    switch (s) {
        case Stability::stable:
            return "stable";
        case Stability::unstable:
            return "unstable";
        case Stability::unresolved:
            return "unresolved";
    }
    return "unresolved";
}

Stability stability_from_string(std::string_view s) {
    if (s == "stable") return Stability::stable;
    if (s == "unstable") return Stability::unstable;
    if (s == "unresolved") return Stability::unresolved;
    throw ConfigError("unknown stability '" + std::string(s) + "'");
}

namespace {

double fd_step(double v) noexcept { return std::max(1e-7, 1e-7 * std::fabs(v)); }

double max_norm(std::span<const double> v) noexcept {
    double m = 0.0;
    for (double e : v) {
        m = std::max(m, std::fabs(e));
    }
    return m;
}

/// Modes at full-coordinate state x; a zero guard counts as stuck.
std::vector<SurfaceMode> modes_at(const SystemModel& model, std::span<const double> x) {
    std::vector<SurfaceMode> modes(model.surfaces().size());
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const double g = model.guard(i, x);
        modes[i] = g == 0.0 ? SurfaceMode::stick : slip_mode(g > 0.0 ? 1 : -1);
    }
    return modes;
}

std::vector<double> full_of(const SystemModel& model, std::span<const double> z) {
    std::vector<double> x(model.dim());
    model.from_reduced(z, x);
    return x;
}

Eigen::MatrixXd reduced_jacobian(const SystemModel& model, std::span<const double> z,
                                 std::span<const SurfaceMode> modes) {
    const std::size_t n = z.size();
    Eigen::MatrixXd j(n, n);
    std::vector<double> zp(z.begin(), z.end());
    std::vector<double> fp(n);
    std::vector<double> fm(n);
    for (std::size_t c = 0; c < n; ++c) {
        const double h = fd_step(z[c]);
        zp[c] = z[c] + h;
        model.reduced_rhs(zp, modes, fp);
        zp[c] = z[c] - h;
        model.reduced_rhs(zp, modes, fm);
        zp[c] = z[c];
        for (std::size_t r = 0; r < n; ++r) {
            j(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    return j;
}

struct NewtonResult {
    std::vector<double> z;
    double residual = 0.0;
    bool converged = false;
};

NewtonResult newton(const SystemModel& model, std::vector<double> z, const EquilibriumSearch& search) {
    const std::size_t n = z.size();
    std::vector<double> f(n);
    std::vector<double> trial(n);
    std::vector<double> f_trial(n);

    auto residual_at = [&](std::span<const double> zz, std::span<const SurfaceMode> modes, std::span<double> out) {
        model.reduced_rhs(zz, modes, out);
        return all_finite(out) ? max_norm(out) : std::numeric_limits<double>::infinity();
    };

    auto modes = modes_at(model, full_of(model, z));
    double r = residual_at(z, modes, f);
    for (int it = 0; it < search.max_iterations && r > search.residual_tol; ++it) {
        const Eigen::MatrixXd j = reduced_jacobian(model, z, modes);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(j);
        if (!lu.isInvertible()) {
            break;
        }
        const Eigen::VectorXd step = lu.solve(Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(n)));
        double lambda = 1.0;
        bool improved = false;
        for (int k = 0; k < 30; ++k, lambda *= 0.5) {
            for (std::size_t i = 0; i < n; ++i) {
                trial[i] = z[i] - lambda * step(static_cast<Eigen::Index>(i));
            }
            const auto trial_modes = modes_at(model, full_of(model, trial));
            const double rt = residual_at(trial, trial_modes, f_trial);
            if (rt < r) {
                z = trial;
                f = f_trial;
                modes = trial_modes;
                r = rt;
                improved = true;
                break;
            }
        }
        if (!improved) {
            break;
        }
    }
    return {std::move(z), r, r <= search.residual_tol};
}

bool near(std::span<const double> a, std::span<const double> b, double tol) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::fabs(a[i] - b[i]) > tol * std::max(1.0, std::fabs(a[i]))) {
            return false;
        }
    }
    return true;
}

Equilibrium sliding_equilibrium(const SystemModel& model, std::vector<double> z, double residual) {
    Equilibrium e;
    e.state = {0.0, full_of(model, z)};
    e.reduced = std::move(z);
    e.residual_norm = residual;
    const auto modes = modes_at(model, e.state.x);
    const Eigen::MatrixXd j = reduced_jacobian(model, e.reduced, modes);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(j);
    e.eigen_max_real = max_real_eigenvalue(j);
    if (!lu.isInvertible() || e.eigen_max_real == 0.0) {
        e.stability = Stability::unresolved;
    } else {
        e.stability = e.eigen_max_real < 0.0 ? Stability::stable : Stability::unstable;
    }
    return e;
}

bool on_any_surface(const SystemModel& model, std::span<const double> x, double tol) {
    for (std::size_t i = 0; i < model.surfaces().size(); ++i) {
        if (std::fabs(model.guard(i, x)) <= tol) {
            return true;
        }
    }
    return false;
}

}  // namespace

double max_real_eigenvalue(const Eigen::MatrixXd& j) {
    if (j.size() == 0) {
        return 0.0;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(j, /*computeEigenvectors=*/false);
    return solver.eigenvalues().real().maxCoeff();
}

Eigen::MatrixXd jacobian(const SystemModel& model, std::span<const double> x, JacobianMode mode) {
    if (x.size() != model.dim()) {
        throw DomainError("jacobian: state has " + std::to_string(x.size()) + " coordinates, expected " +
                          std::to_string(model.dim()));
    }
    const auto modes = modes_at(model, x);
    if (mode == JacobianMode::reduced) {
        std::vector<double> z(model.reduced_dim());
        model.to_reduced(x, z);
        return reduced_jacobian(model, z, modes);
    }
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (modes[i] == SurfaceMode::stick) {
            throw DomainError("jacobian: state lies on surface '" + model.surfaces()[i].name +
                              "'; request the reduced Jacobian");
        }
    }
    const std::size_t n = x.size();
    Eigen::MatrixXd j(n, n);
    std::vector<double> xp(x.begin(), x.end());
    std::vector<double> fp(n);
    std::vector<double> fm(n);
    for (std::size_t c = 0; c < n; ++c) {
        const double h = fd_step(x[c]);
        xp[c] = x[c] + h;
        model.rhs(xp, modes, fp);
        xp[c] = x[c] - h;
        model.rhs(xp, modes, fm);
        xp[c] = x[c];
        for (std::size_t r = 0; r < n; ++r) {
            j(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    return j;
}

std::vector<Equilibrium> find_equilibria(const SystemModel& model, const EquilibriumSearch& search) {
    std::vector<Equilibrium> found;
    auto admit = [&](std::vector<double> z, double residual) {
        for (const auto& e : found) {
            if (near(e.reduced, z, search.dedupe_tol)) {
                return;
            }
        }
        if (on_any_surface(model, full_of(model, z), search.dedupe_tol)) {
            return;  // rest states on a surface are reported as stuck families
        }
        found.push_back(sliding_equilibrium(model, std::move(z), residual));
    };

    for (auto z : model.scalar_equilibria()) {
        auto result = newton(model, std::move(z), search);
        if (result.converged) {
            admit(std::move(result.z), result.residual);
        }
    }
    for (auto z : model.equilibrium_seeds()) {
        auto result = newton(model, std::move(z), search);
        if (result.converged) {
            admit(std::move(result.z), result.residual);
        }
    }

    for (const auto& family : model.stuck_equilibria()) {
        Equilibrium e;
        e.reduced = family.representative;
        e.state = {0.0, full_of(model, e.reduced)};
        e.stuck = true;
        e.family_coordinate = family.free_coordinate;
        e.family_lo = family.lo;
        e.family_hi = family.hi;
        const auto modes = modes_at(model, e.state.x);
        std::vector<double> f(e.reduced.size());
        model.reduced_rhs(e.reduced, modes, f);
        e.residual_norm = max_norm(f);
        e.eigen_max_real = max_real_eigenvalue(reduced_jacobian(model, e.reduced, modes));
        // A rest state held strictly inside every stick interval attracts
        // small velocity perturbations: friction exceeds the balance torque.
        bool interior = true;
        for (std::size_t i = 0; i < model.surfaces().size(); ++i) {
            if (modes[i] == SurfaceMode::stick) {
                interior = interior && model.holding_interval(i, e.state.x)
                                           .strictly_contains(model.balance_torque(i, e.state.x));
            }
        }
        e.stability = interior ? Stability::stable : Stability::unresolved;
        found.push_back(std::move(e));
    }
    return found;
}

}  // namespace nsdyn
