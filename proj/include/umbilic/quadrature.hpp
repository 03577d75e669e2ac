#pragma once

#include "error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace umbilic {

namespace detail {
template <class F>
double gkAdaptive(F &f, double a, double b, double tol, double absFloor, unsigned depth, unsigned maxDepth, bool &ok) {
    double err = 0.0, l1 = 0.0;
    const double val = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &err, &l1);
    err *= 0.5 * std::abs(b - a); // reported on the reference interval
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * l1;
    if (err <= std::max(tol * l1, floor) + absFloor) return val;
    if (depth >= maxDepth || !std::isfinite(val)) {
        ok = false;
        return val;
    }
    const double m = 0.5 * (a + b);
    return gkAdaptive(f, a, m, tol, 0.5 * absFloor, depth + 1, maxDepth, ok) +
           gkAdaptive(f, m, b, tol, 0.5 * absFloor, depth + 1, maxDepth, ok);
}
} // namespace detail

/// Adaptive 15-point Gauss–Kronrod on [a, b] to relative tolerance `tol` (per piece,
/// floored at roundoff). Throws ToleranceNotMet when bisection depth runs out.
template <class F>
double integrate(F &&f, double a, double b, double tol, double absFloor = 1e-300, unsigned maxDepth = 24) {
    if (a == b) return 0.0;
    bool ok = true;
    const double val = detail::gkAdaptive(f, a, b, tol, absFloor, 0, maxDepth, ok);
    if (!std::isfinite(val)) throw GeometryError(ErrorKind::ToleranceNotMet, "non-finite quadrature result");
    if (!ok) throw GeometryError(ErrorKind::ToleranceNotMet, "quadrature refinement budget exhausted");
    return val;
}

/// Pairwise summation in index order.
inline double pairwiseSum(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwiseSum(xs.first(half)) + pairwiseSum(xs.subspan(half));
}

/// Order-independent sum: sorts a copy, then pairwise-sums.
inline double canonicalSum(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    return pairwiseSum(xs);
}

} // namespace umbilic
