#pragma once

// λ-convex lenses: the two-facet bodies bounded by the λ-spheres through the apexes
// center ± w·axis with inward normals pointing at the center.

#include "flow.hpp"

#include <boost/math/tools/roots.hpp>

namespace umbilic {

struct Lens {
    Curvature c;
    double lambda = 1.0;
    Vec3 center = Vec3::Zero();
    Vec3 axis = Vec3::UnitZ();
    double halfWidth = 0.0;
    LambdaPolyhedron body;
    double ellStar = 0, betaStar = 0, area = 0, volume = 0;

    double inradius() const { return halfWidth; }
    /// ℓ* tan(β*/2)
    double edgeTerm() const { return ellStar * std::tan(0.5 * betaStar); }
};

inline std::vector<Sphere3> lensBalls(Curvature c, double lambda, double w, const Vec3 &center, const Vec3 &axis) {
    if (!(w > 0)) throw GeometryError(ErrorKind::InvalidArgument, "lens half-width must be positive");
    const Chart<3> chart(c);
    const Vec3 u = axis.normalized();
    std::vector<Sphere3> balls;
    for (double sg : {1.0, -1.0}) {
        const Vec3 apex = chart.geodesicPointDir(center, sg * u, w);
        balls.push_back(sphereThrough<3>(c, lambda, apex, chart.directionTo(apex, center)));
    }
    return balls;
}

inline Lens makeLens(Curvature c, double lambda, double w, const Vec3 &center = Vec3::Zero(),
                     const Vec3 &axis = Vec3::UnitZ(), double tol = kDefaultTol) {
    if (lambda > 0 && lambda * lambda + c.value() > 0 && !(w < geodesicRadius(c, lambda)))
        throw GeometryError(ErrorKind::EmptyBody, "half-width reaches the lambda-ball inradius");
    Lens L;
    L.c = c;
    L.lambda = lambda;
    L.center = center;
    L.axis = axis.normalized();
    L.halfWidth = w;
    L.body = buildPolyhedron(c, lambda, lensBalls(c, lambda, w, center, axis));
    if (L.body.facets.size() != 2 || L.body.edges.size() != 1 || !L.body.edges[0].fullCircle)
        throw GeometryError(ErrorKind::Degenerate, "lens does not have two facets and one edge");
    L.ellStar = edgeLength(L.body, L.body.edges[0], tol);
    L.betaStar = normalAngle(L.body, L.body.edges[0]);
    L.area = surfaceArea(L.body, tol);
    L.volume = volume(L.body, tol);
    return L;
}

/// |∂L(w)| for the centered lens, without the derived quantities.
inline double lensArea(Curvature c, double lambda, double w, double tol = kDefaultTol) {
    return surfaceArea(buildPolyhedron(c, lambda, lensBalls(c, lambda, w, Vec3::Zero(), Vec3::UnitZ())), tol);
}

/// Half-width bracket (0, wMax) of compact lenses.
inline double lensWidthLimit(Curvature c, double lambda) {
    if (lambda > 0 && lambda * lambda + c.value() > 0) return geodesicRadius(c, lambda);
    double lo = 0.05, hi = 0.05;
    auto ok = [&](double w) {
        try {
            lensArea(c, lambda, w, 1e-8);
            return true;
        } catch (const GeometryError &) {
            return false;
        }
    };
    if (!ok(lo)) throw GeometryError(ErrorKind::Unattainable, "no compact lens for this curvature");
    while (ok(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 64.0) return hi;
    }
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return lo;
}

/// The lens with |∂L| = target, by bracketing on the monotone map w ↦ |∂L(w)|.
inline Lens lensForArea(Curvature c, double lambda, double target, double tol = 1e-12) {
    if (!(target > 0)) throw GeometryError(ErrorKind::Unattainable, "target area must be positive");
    const double q = lambda * lambda + c.value();
    if (q > 0 && !(target < lambdaSphereArea(c, lambda)))
        throw GeometryError(ErrorKind::Unattainable, "target area exceeds the lambda-sphere area");
    const double wMax = lensWidthLimit(c, lambda);
    auto g = [&](double w) {
        if (w <= 0) return -target;
        try {
            return lensArea(c, lambda, w, 1e-13) - target;
        } catch (const GeometryError &err) {
            if (err.kind() == ErrorKind::EmptyBody || err.kind() == ErrorKind::Degenerate) return lambdaSphereArea(c, lambda) - target;
            throw;
        }
    };
    double hi = 0.5 * wMax, ghi = g(hi);
    for (int k = 2; ghi < 0 && k <= 40; ++k) {
        hi = wMax * (1.0 - std::ldexp(1.0, -k));
        ghi = g(hi);
    }
    if (ghi < 0) throw GeometryError(ErrorKind::Unattainable, "target area beyond the compact lens range");
    std::uintmax_t iters = 200;
    auto stop = [&](double a, double b) { return std::abs(b - a) <= 4e-16 * std::max(1.0, std::abs(b)); };
    const auto [a, b] = boost::math::tools::toms748_solve(g, 0.0, hi, -target, ghi, stop, iters);
    const double w = std::abs(g(a)) <= std::abs(g(b)) ? a : b;
    Lens L = makeLens(c, lambda, w);
    if (std::abs(L.area - target) > std::max(tol, 1e-11) * target * 1e2)
        throw GeometryError(ErrorKind::Unattainable, "lens area match failed");
    return L;
}

} // namespace umbilic
