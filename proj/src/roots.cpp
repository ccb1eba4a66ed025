#include "nsdyn/roots.hpp"

#include <cmath>

namespace nsdyn {

double bisect(const std::function<double(double)>& f, double lo, double hi, double x_tol) {
    double flo = f(lo);
    if (flo == 0.0) {
        return lo;
    }
    for (int it = 0; it < 200 && hi - lo > x_tol * std::max(1.0, std::fabs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) {
            return mid;
        }
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<double> bracket_roots(const std::function<double(double)>& f, double lo, double hi, std::size_t n) {
    std::vector<double> roots;
    double a = lo;
    double fa = f(a);
    for (std::size_t i = 1; i <= n; ++i) {
        const double b = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
        const double fb = f(b);
        if (fa == 0.0) {
            roots.push_back(a);
        } else if ((fa < 0.0) != (fb < 0.0) && fb != 0.0) {
            roots.push_back(bisect(f, a, b));
        }
        a = b;
        fa = fb;
    }
    if (fa == 0.0) {
        roots.push_back(a);
    }
    return roots;
}

}  // namespace nsdyn
