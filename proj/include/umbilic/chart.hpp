#pragma once

// Conformal chart of the space form M^N(c).
//
//   c < 0 : Poincare ball of radius 1/sqrt(-c), metric h(x)^2 |dx|^2, h = 2 / (1 + c|x|^2)
//   c > 0 : stereographic chart, same h; bodies live in |x| < 1/sqrt(c) (open hemisphere)
//   c = 0 : identity chart, h = 1
//
// Every other module computes in these coordinates. Angles are chart-exact.

#include "error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace umbilic {

template <int N>
using Vec = Eigen::Matrix<double, N, 1>;

using Vec2 = Vec<2>;
using Vec3 = Vec<3>;

/// Sectional curvature of the ambient space form.
class Curvature {
public:
    constexpr Curvature() = default;
    explicit Curvature(double c) : m_c(c) {
        if (!std::isfinite(c)) throw GeometryError(ErrorKind::InvalidArgument, "curvature must be finite");
    }

    double value() const { return m_c; }
    /// sqrt(|c|); the inverse of the chart's model radius when c != 0.
    double scale() const { return std::sqrt(std::abs(m_c)); }
    bool flat() const { return m_c == 0.0; }
    bool hyperbolic() const { return m_c < 0.0; }
    bool spherical() const { return m_c > 0.0; }

    friend bool operator==(const Curvature &, const Curvature &) = default;

private:
    double m_c = 0.0;
};

template <int N>
struct TangentVec {
    Vec<N> base;
    Vec<N> v; // chart components
};

/// Points closer than this (chart units) to the Poincare boundary are rejected.
inline constexpr double kBoundaryMargin = 1e-12;

template <int N>
class Chart {
public:
    using Point = Vec<N>;

    explicit Chart(Curvature c) : m_c(c) {}

    Curvature curvature() const { return m_c; }
    double c() const { return m_c.value(); }

    /// Radius of the chart region (model ball or hemisphere); infinite for c = 0.
    double modelRadius() const {
        return m_c.flat() ? std::numeric_limits<double>::infinity() : 1.0 / m_c.scale();
    }

    bool isValid(const Point &x) const {
        if (!x.allFinite()) return false;
        if (m_c.hyperbolic()) return x.norm() < modelRadius() - kBoundaryMargin;
        return true;
    }

    /// Valid and, for c > 0, inside the open hemisphere |x| < 1/sqrt(c).
    bool inBodyRegion(const Point &x) const {
        if (!isValid(x)) return false;
        if (m_c.spherical()) return x.norm() < modelRadius();
        return true;
    }

    void requireValid(const Point &x) const {
        if (!isValid(x)) throw GeometryError(ErrorKind::Domain, "point outside the model region");
    }

    double conformalFactor(const Point &x) const {
        requireValid(x);
        return factorUnchecked(x.squaredNorm());
    }

    /// h as a function of |x|^2, without validation.
    double factorUnchecked(double r2) const {
        if (m_c.flat()) return 1.0;
        return 2.0 / (1.0 + c() * r2);
    }

    /// Gradient of log h.
    Point logFactorGradient(const Point &x) const {
        if (m_c.flat()) return Point::Zero();
        return (-2.0 * c() / (1.0 + c() * x.squaredNorm())) * x;
    }

    double riemannianNorm(const TangentVec<N> &u) const { return conformalFactor(u.base) * u.v.norm(); }

    double riemannianInner(const Point &base, const Point &v, const Point &w) const {
        double h = conformalFactor(base);
        return h * h * v.dot(w);
    }

    /// Riemannian angle between two tangent vectors at the same point.
    double angle(const TangentVec<N> &u, const TangentVec<N> &w) const {
        double cosv = riemannianInner(u.base, u.v, w.v) / (riemannianNorm(u) * riemannianNorm(w));
        return std::acos(std::clamp(cosv, -1.0, 1.0));
    }

    TangentVec<N> unitTangent(const Point &p, const Point &direction) const {
        double n = direction.norm();
        if (!(n > 0)) throw GeometryError(ErrorKind::InvalidArgument, "zero tangent direction");
        return {p, direction / (n * conformalFactor(p))};
    }

    /// Gyrovector (Moebius) addition for the curvature-c stereographic model.
    Point mobiusAdd(const Point &x, const Point &y) const {
        if (m_c.flat()) return x + y;
        const double k = c();
        const double xy = x.dot(y), x2 = x.squaredNorm(), y2 = y.squaredNorm();
        const double den = 1.0 - 2.0 * k * xy + k * k * x2 * y2;
        return ((1.0 - 2.0 * k * xy - k * y2) * x + (1.0 + k * x2) * y) / den;
    }

    double distance(const Point &p, const Point &q) const {
        requireValid(p);
        requireValid(q);
        const double d = (p - q).norm();
        if (m_c.flat()) return d;
        const double k = m_c.scale();
        if (m_c.hyperbolic()) {
            const double s = k * d / std::sqrt((1.0 - k * k * p.squaredNorm()) * (1.0 - k * k * q.squaredNorm()));
            return 2.0 / k * std::asinh(s);
        }
        const double s = k * d / std::sqrt((1.0 + k * k * p.squaredNorm()) * (1.0 + k * k * q.squaredNorm()));
        return 2.0 / k * std::atan2(s, std::sqrt(std::max(0.0, 1.0 - s * s)));
    }

    /// Euclidean unit direction, at p, of the geodesic from p towards q.
    Point directionTo(const Point &p, const Point &q) const {
        Point d = m_c.flat() ? Point(q - p) : mobiusAdd(-p, q);
        double n = d.norm();
        if (!(n > 0)) throw GeometryError(ErrorKind::InvalidArgument, "coincident points have no direction");
        return d / n;
    }

    /// Point at Riemannian distance t along the geodesic leaving p in Euclidean direction `dir`.
    /// For c > 0 the result is flagged when it leaves the open hemisphere unless `allowOutside`.
    Point geodesicPointDir(const Point &p, const Point &dir, double t, bool allowOutside = false) const {
        requireValid(p);
        const Point u = dir.normalized();
        if (t == 0.0) return p;
        Point step;
        if (m_c.flat()) {
            step = t * u;
        } else {
            const double k = m_c.scale();
            const double half = 0.5 * k * t;
            if (m_c.spherical() && std::abs(half) >= 0.5 * std::numbers::pi)
                throw GeometryError(ErrorKind::Domain, "geodesic reaches the antipode");
            const double r = (m_c.hyperbolic() ? std::tanh(half) : std::tan(half)) / k;
            step = r * u;
        }
        Point x = mobiusAdd(p, step);
        if (!allowOutside && !inBodyRegion(x))
            throw GeometryError(ErrorKind::Domain, "geodesic point leaves the valid chart region");
        return x;
    }

    Point geodesicPoint(const TangentVec<N> &u, double t) const {
        const double n = riemannianNorm(u);
        if (std::abs(n - 1.0) > 1e-9) throw GeometryError(ErrorKind::InvalidArgument, "tangent vector is not unit");
        return geodesicPointDir(u.base, u.v, t);
    }

private:
    Curvature m_c;
};

} // namespace umbilic
