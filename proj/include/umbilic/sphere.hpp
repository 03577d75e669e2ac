#pragma once

// λ-spheres and λ-balls of M^N(c) in the conformal chart.
//
// A chart sphere or plane is stored both as its Euclidean shape (for IO) and as
// normalized inversive coefficients (a, b, e):
//
//     σ(x) = a|x|² − 2 b·x + e,      |b|² − a e = 1,      ball = { σ ≤ 0 }.
//
// With this normalization |∇σ| = 2 on the surface, the outer unit normal is a x − b,
// the cosine of the angle between two spheres is the inversive product
// b₁·b₂ − (a₁e₂ + a₂e₁)/2, and the Riemannian normal curvature (w.r.t. the inward
// normal) is linear in the coefficients: λ = (a + c e)/2 for c ≠ 0, λ = a for c = 0.

#include "chart.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <variant>

namespace umbilic {

enum class SphereClass { GeodesicSphere, Horosphere, Equidistant, EuclideanSphereClass, SphericalGeodesicSphere };

inline const char *toString(SphereClass k) {
    switch (k) {
    case SphereClass::GeodesicSphere: return "GeodesicSphere";
    case SphereClass::Horosphere: return "Horosphere";
    case SphereClass::Equidistant: return "Equidistant";
    case SphereClass::EuclideanSphereClass: return "EuclideanSphere";
    case SphereClass::SphericalGeodesicSphere: return "SphericalGeodesicSphere";
    }
    return "?";
}

enum class Containment { Inside, Boundary, Outside };

template <int N>
struct EuclideanSphere {
    Vec<N> center;
    double radius = 1.0;
};

template <int N>
struct EuclideanPlane {
    Vec<N> normal; // unit
    double offset = 0.0;
};

/// Below this |a| a normalized sphere is reported with the plane shape variant.
inline constexpr double kPlaneThreshold = 1e-12;

/// Generalized sphere pencil point A_c: ⟨σ, A_c⟩ is the normal curvature of σ.
struct Absolute {
    double a, e;
};

inline Absolute absoluteOf(Curvature c) {
    if (c.flat()) return {0.0, -2.0};
    return {-c.value(), -1.0};
}

template <int N>
class UmbilicSphere {
public:
    using Point = Vec<N>;
    using Shape = std::variant<EuclideanSphere<N>, EuclideanPlane<N>>;

    UmbilicSphere() = default;

    /// side = +1: ball is the sphere interior / the half-space {n·x ≤ d};
    /// side = −1: the exterior / {n·x ≥ d}.
    UmbilicSphere(Curvature c, const Shape &shape, int side) : m_c(c), m_shape(shape), m_side(side >= 0 ? 1 : -1) {
        if (const auto *s = std::get_if<EuclideanSphere<N>>(&m_shape)) {
            const double r = s->radius;
            if (!(r > 0) || !std::isfinite(r) || !s->center.allFinite())
                throw GeometryError(ErrorKind::InvalidArgument, "sphere radius must be positive and finite");
            const double cn = s->center.norm();
            m_a = m_side / r;
            m_b = (m_side / r) * s->center;
            m_e = m_side * (cn - r) * (cn + r) / r;
        } else {
            auto &p = std::get<EuclideanPlane<N>>(m_shape);
            const double nn = p.normal.norm();
            if (!(nn > 0) || !std::isfinite(p.offset))
                throw GeometryError(ErrorKind::InvalidArgument, "plane normal must be nonzero");
            m_a = 0.0;
            m_b = (-m_side / nn) * p.normal;
            m_e = -2.0 * m_side * p.offset / nn;
        }
    }

    /// Builds from raw coefficients, normalizing so that |b|² − a e = 1.
    static UmbilicSphere fromCoefficients(Curvature c, double a, const Point &b, double e) {
        const double q = b.squaredNorm() - a * e;
        if (!(q > 0) || !std::isfinite(q)) throw GeometryError(ErrorKind::Degenerate, "imaginary or point sphere");
        const double s = 1.0 / std::sqrt(q);
        UmbilicSphere out;
        out.m_c = c;
        out.m_a = a * s;
        out.m_b = b * s;
        out.m_e = e * s;
        if (std::abs(out.m_a) < kPlaneThreshold) {
            const double bn = out.m_b.norm();
            out.m_shape = EuclideanPlane<N>{-out.m_b / bn, -out.m_e / (2.0 * bn)};
            out.m_side = 1;
        } else {
            out.m_shape = EuclideanSphere<N>{out.m_b / out.m_a, 1.0 / std::abs(out.m_a)};
            out.m_side = out.m_a > 0 ? 1 : -1;
        }
        return out;
    }

    Curvature curvature() const { return m_c; }
    const Shape &shape() const { return m_shape; }
    int ballSide() const { return m_side; }
    bool isPlane() const { return std::holds_alternative<EuclideanPlane<N>>(m_shape); }

    double a() const { return m_a; }
    const Point &b() const { return m_b; }
    double e() const { return m_e; }

    /// Normal curvature w.r.t. the inward normal; negative when the ball side is concave.
    double signedCurvature() const {
        const Absolute abs = absoluteOf(m_c);
        return -0.5 * (m_a * abs.e + abs.a * m_e);
    }
    double lambda() const { return std::abs(signedCurvature()); }

    double eval(const Point &x) const { return m_a * x.squaredNorm() - 2.0 * m_b.dot(x) + m_e; }

    /// Euclidean signed distance to the surface, negative inside the ball.
    double signedDistance(const Point &x) const { return eval(x) / ((m_a * x - m_b).norm() + 1.0); }

    /// Outer unit normal of the ball at a surface point (exact for points on the surface).
    Point outerNormal(const Point &x) const { return (m_a * x - m_b).normalized(); }

    /// Cosine of the angle between the outer normals of two intersecting spheres.
    double inner(const UmbilicSphere &o) const { return m_b.dot(o.m_b) - 0.5 * (m_a * o.m_e + o.m_a * m_e); }

    Containment contains(const Point &p, double eps) const {
        const double sd = signedDistance(p);
        if (sd < -eps) return Containment::Inside;
        if (sd > eps) return Containment::Outside;
        return Containment::Boundary;
    }

    /// Surface point closest to the chart origin.
    Point nearestPointToOrigin() const {
        if (std::abs(m_a) < kPlaneThreshold) {
            const double s = m_e / (2.0 * m_b.squaredNorm());
            return s * m_b;
        }
        const Point center = m_b / m_a;
        const double r = 1.0 / std::abs(m_a);
        const double cn = center.norm();
        if (cn < 1e-300) {
            Point p = center;
            p[0] += r;
            return p;
        }
        return center * (1.0 - r / cn);
    }

    SphereClass classify(double relTol = 1e-12) const {
        if (m_c.flat()) return SphereClass::EuclideanSphereClass;
        if (m_c.spherical()) return SphereClass::SphericalGeodesicSphere;
        const double k = m_c.scale();
        const double lam = signedCurvature();
        if (std::abs(lam - k) <= relTol * k) return SphereClass::Horosphere;
        return lam > k ? SphereClass::GeodesicSphere : SphereClass::Equidistant;
    }

    /// λ² + c > 0: the λ-sphere is a compact geodesic sphere.
    bool compact() const {
        const double lam = signedCurvature();
        return lam > 0 && lam * lam + m_c.value() > 0 && classify() != SphereClass::Horosphere;
    }

    friend bool operator==(const UmbilicSphere &x, const UmbilicSphere &y) {
        return x.m_c == y.m_c && x.m_a == y.m_a && x.m_b == y.m_b && x.m_e == y.m_e;
    }

private:
    Curvature m_c;
    Shape m_shape = EuclideanSphere<N>{Point::Zero(), 1.0};
    int m_side = 1;
    double m_a = 1.0;
    Point m_b = Point::Zero();
    double m_e = -1.0;
};

/// Geodesic radius of a compact λ-ball.
inline double geodesicRadius(Curvature c, double lambda) {
    if (!(lambda > 0)) throw GeometryError(ErrorKind::InvalidArgument, "lambda must be positive");
    if (c.flat()) return 1.0 / lambda;
    const double k = c.scale();
    if (c.spherical()) return std::atan(k / lambda) / k;
    if (lambda <= k) throw GeometryError(ErrorKind::NonCompactSphere, "lambda-ball is not compact");
    return std::atanh(k / lambda) / k;
}

/// Closed-form solution of λ' = λ² + c, λ(0) = λ₀. Accepts signed λ₀ and negative t.
inline double lambdaAt(Curvature c, double lambda0, double t) {
    const double cv = c.value();
    if (t == 0.0) return lambda0;
    if (c.flat()) {
        const double den = 1.0 - lambda0 * t;
        if (!(den > 0)) throw GeometryError(ErrorKind::BlowUp, "lambda(t) blows up");
        return lambda0 / den;
    }
    const double k = c.scale();
    if (cv > 0) {
        const double arg = std::atan(lambda0 / k) + k * t;
        if (arg >= 0.5 * std::numbers::pi || arg <= -0.5 * std::numbers::pi)
            throw GeometryError(ErrorKind::BlowUp, "lambda(t) blows up");
        return k * std::tan(arg);
    }
    const double ratio = lambda0 / k;
    if (ratio == 1.0 || ratio == -1.0) return lambda0;
    if (std::abs(ratio) < 1.0) return k * std::tanh(std::atanh(ratio) - k * t);
    // coth branch: λ = k coth(arcoth(ratio) − k t)
    const double arg = std::atanh(1.0 / ratio) - k * t;
    if (ratio > 0 && !(arg > 0)) throw GeometryError(ErrorKind::BlowUp, "lambda(t) blows up");
    if (ratio < 0 && !(arg < 0)) throw GeometryError(ErrorKind::BlowUp, "lambda(t) blows up");
    return k / std::tanh(arg);
}

/// Area of a compact λ-sphere in M³(c): 4π / (λ² + c).
inline double lambdaSphereArea(Curvature c, double lambda) {
    const double q = lambda * lambda + c.value();
    if (!(q > 0)) throw GeometryError(ErrorKind::NonCompactSphere, "lambda-sphere has infinite area");
    return 4.0 * std::numbers::pi / q;
}

/// Length of a compact λ-circle in M²(c): 2π / sqrt(λ² + c).
inline double lambdaCircleLength(Curvature c, double lambda) {
    const double q = lambda * lambda + c.value();
    if (!(q > 0)) throw GeometryError(ErrorKind::NonCompactSphere, "lambda-circle has infinite length");
    return 2.0 * std::numbers::pi / std::sqrt(q);
}

/// The λ-sphere through p whose inward normal at p points along `inward` (Euclidean direction).
template <int N>
UmbilicSphere<N> sphereThrough(Curvature c, double lambda, const Vec<N> &p, const Vec<N> &inward) {
    Chart<N>(c).requireValid(p);
    const double nn = inward.norm();
    if (!(nn > 0)) throw GeometryError(ErrorKind::InvalidArgument, "zero normal");
    const Vec<N> n = inward / nn;
    const double np = n.dot(p);
    const double a = c.flat() ? lambda : (2.0 * lambda - 2.0 * c.value() * np) / (1.0 + c.value() * p.squaredNorm());
    const Vec<N> b = n + a * p;
    const double e = 2.0 * np + a * p.squaredNorm();
    return UmbilicSphere<N>::fromCoefficients(c, a, b, e);
}

template <int N>
UmbilicSphere<N> sphereThrough(Curvature c, double lambda, const TangentVec<N> &inward) {
    return sphereThrough<N>(c, lambda, inward.base, inward.v);
}

/// Chart center of a compact λ-ball: the point member of the pencil spanned by S and A_c.
template <int N>
Vec<N> geodesicCenter(const UmbilicSphere<N> &s) {
    const Curvature c = s.curvature();
    if (c.flat()) return s.b() / s.a();
    const double lam = s.signedCurvature(), cv = c.value();
    const double root = std::sqrt(lam * lam + cv);
    for (double mu : {(lam + root) / cv, (lam - root) / cv}) {
        const double ap = s.a() - cv * mu;
        if (std::abs(ap) < 1e-300) continue;
        const Vec<N> p = s.b() / ap;
        if (s.eval(p) < 0 && Chart<N>(c).isValid(p)) return p;
    }
    throw GeometryError(ErrorKind::Degenerate, "lambda-ball has no chart center");
}

namespace detail {
// Geodesic ball of radius ρ − t about the same center, via its two diametral points on
// the line through the chart origin. Empty optional when the chart image is unbounded.
template <int N>
std::optional<UmbilicSphere<N>> erodeGeodesicBall(const UmbilicSphere<N> &s, double t) {
    const Curvature c = s.curvature();
    const double rho = geodesicRadius(c, s.signedCurvature());
    if (t >= rho) throw GeometryError(ErrorKind::EmptyErosion, "erosion exceeds the ball inradius");
    const double r = rho - t;
    const Vec<N> p0 = geodesicCenter(s);
    if (c.flat()) return UmbilicSphere<N>(c, EuclideanSphere<N>{p0, r}, +1);
    const double pn = p0.norm();
    Vec<N> u = Vec<N>::Zero();
    if (pn > 1e-300) u = p0 / pn; else u[0] = 1.0;
    const Chart<N> chart(c);
    Vec<N> x1, x2;
    try {
        x1 = chart.geodesicPointDir(p0, u, r, true);
        x2 = chart.geodesicPointDir(p0, -u, r, true);
    } catch (const GeometryError &) {
        return std::nullopt;
    }
    if (!x1.allFinite() || !x2.allFinite()) return std::nullopt;
    const Vec<N> mid = 0.5 * (x1 + x2);
    const double rad = 0.5 * (x1 - x2).norm();
    if (!(rad > 0) || !std::isfinite(rad) || rad > 1e8) return std::nullopt;
    const int side = (p0 - mid).norm() < rad ? 1 : -1;
    return UmbilicSphere<N>(c, EuclideanSphere<N>{mid, rad}, side);
}
} // namespace detail

/// Boundary of { x : B(x, t) ⊆ ball(S) }. Negative t dilates.
template <int N>
UmbilicSphere<N> erode(const UmbilicSphere<N> &s, double t) {
    if (t == 0.0) return s;
    const Curvature c = s.curvature();
    const double lam = s.signedCurvature();
    double lamT;
    try {
        lamT = lambdaAt(c, lam, t);
    } catch (const GeometryError &err) {
        if (err.kind() == ErrorKind::BlowUp) throw GeometryError(ErrorKind::EmptyErosion, "erosion exceeds the ball inradius");
        throw;
    }
    const Absolute A = absoluteOf(c);
    const double cv = c.value();
    const double q0 = lam * lam + cv;
    if (lam > 0 && q0 > 1e-9 * std::abs(cv)) {
        if (const auto ball = detail::erodeGeodesicBall(s, t)) return *ball;
    }
    double alpha, beta;
    if (c.flat()) {
        alpha = lamT / lam;
        beta = (1.0 - alpha * alpha) / (2.0 * alpha * lam);
    } else if (std::abs(q0) > 1e-9 * std::abs(cv)) {
        alpha = std::sqrt((lamT * lamT + cv) / q0);
        beta = (alpha * lam - lamT) / cv;
    } else {
        // Horosphere: transport a surface point along its inward normal and take the
        // pencil member through it.
        const Chart<N> chart(c);
        const Vec<N> p0 = s.nearestPointToOrigin();
        const Vec<N> inward = -(s.a() * p0 - s.b());
        const Vec<N> q = chart.geodesicPointDir(p0, inward, t, true);
        const double aq = A.a * q.squaredNorm() + A.e;
        const double gamma = -s.eval(q) / aq;
        return UmbilicSphere<N>::fromCoefficients(c, s.a() + gamma * A.a, s.b(), s.e() + gamma * A.e);
    }
    return UmbilicSphere<N>::fromCoefficients(c, alpha * s.a() + beta * A.a, alpha * s.b(), alpha * s.e() + beta * A.e);
}

} // namespace umbilic
