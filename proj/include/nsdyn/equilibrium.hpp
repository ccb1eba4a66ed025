#pragma once

#include "nsdyn/model.hpp"

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace nsdyn {

enum class Stability { stable, unstable, unresolved };

[[nodiscard]] std::string_view to_string(Stability s) noexcept;
[[nodiscard]] Stability stability_from_string(std::string_view s);

/// A rest point of the reduced dynamics. Steady co-rotation of the drill
/// models is an equilibrium in reduced coordinates.
struct Equilibrium {
    State state;                  ///< full coordinates (symmetry angles set to 0)
    std::vector<double> reduced;  ///< reduced coordinates
    double residual_norm = 0.0;   ///< max-norm of the reduced field
    double eigen_max_real = 0.0;
    Stability stability = Stability::unresolved;
    bool stuck = false;
    /// Range of the free reduced coordinate for a stuck family; `reduced`
    /// holds its midpoint.
    std::optional<std::size_t> family_coordinate;
    double family_lo = 0.0;
    double family_hi = 0.0;

    friend bool operator==(const Equilibrium&, const Equilibrium&) = default;
};

struct EquilibriumSearch {
    double residual_tol = 1e-10;
    double dedupe_tol = 1e-6;
    int max_iterations = 60;
};

/// Newton multi-start over the model's seeds, the model's scalar reduced
/// equation and its stuck rest families, deduplicated. Empty when nothing
/// converges. Sliding (non-stuck) equilibria never lie on a surface.
[[nodiscard]] std::vector<Equilibrium> find_equilibria(const SystemModel& model, const EquilibriumSearch& search = {});

enum class JacobianMode { full, reduced };

/// Central finite-difference Jacobian of the active smooth branch at x (full
/// coordinates), step max(1e-7, 1e-7 |x_i|). In reduced mode the derivative is
/// taken in reduced coordinates and surfaces with a zero guard are treated as
/// stuck. Full mode throws DomainError when x lies on a surface.
[[nodiscard]] Eigen::MatrixXd jacobian(const SystemModel& model, std::span<const double> x,
                                       JacobianMode mode = JacobianMode::full);

/// Largest real part of the eigenvalues of a square matrix.
[[nodiscard]] double max_real_eigenvalue(const Eigen::MatrixXd& j);

}  // namespace nsdyn
