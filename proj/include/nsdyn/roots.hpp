#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace nsdyn {

/// Bisection on a bracket with f(lo) and f(hi) of opposite sign (or zero).
/// Returns the point where the bracket width falls below `x_tol`.
[[nodiscard]] double bisect(const std::function<double(double)>& f, double lo, double hi, double x_tol = 1e-14);

/// All sign changes of f on a uniform grid of `n` intervals over [lo, hi],
/// each refined by bisection.
[[nodiscard]] std::vector<double> bracket_roots(const std::function<double(double)>& f, double lo, double hi,
                                                std::size_t n);

}  // namespace nsdyn
