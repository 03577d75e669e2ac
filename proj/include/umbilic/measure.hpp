#pragma once

// Riemannian measurements on λ-convex polyhedra.
//
// Facet integrals use a zonal Stokes reduction: on a chart sphere with Euclidean
// center C and radius R, |x|² depends only on u = (x − C)/R · Ĉ, so any density g(u)
// has a primitive G(u) and the facet integral becomes ∮ G dφ over the boundary arcs
// plus a pole term. Areas use g = R² h², volumes use the flux of a radial field whose
// chart divergence is h³.

#include "arrangement.hpp"

#include <boost/math/quadrature/gauss.hpp>

namespace umbilic {

inline constexpr double kDefaultTol = 1e-10;

namespace detail {

struct ZonalFrame {
    Vec3 C, ex, ey, ez;
    double R, cn;
};

inline ZonalFrame zonalFrame(const Sphere3 &s) {
    ZonalFrame z;
    z.C = s.b() / s.a();
    z.R = 1.0 / std::abs(s.a());
    z.cn = z.C.norm();
    z.ez = z.cn > 1e-14 ? Vec3(z.C / z.cn) : Vec3::UnitZ();
    orthonormalFrame(z.ez, z.ex, z.ey);
    return z;
}

// Zonal flux of a density g(u) du dφ over facet f. meanS(u) is the mean of g on
// [−1, u], meanN(u) its mean on [u, 1], total = ∫₋₁¹ g.
template <class MS, class MN>
double zonalFacetIntegral(const LambdaPolyhedron &K, int f, const ZonalFrame &z, MS &&meanS, MN &&meanN, double total,
                          double tol) {
    const auto &ball = K.balls[f];
    const auto &facet = K.facets[f];
    const double s = ball.a() > 0 ? 1.0 : -1.0;
    const Vec3 N = z.C + z.R * z.ez, S = z.C - z.R * z.ez;
    const double kc = K.c.scale();
    const double clip = K.c.flat() ? std::numeric_limits<double>::infinity() : 1.0 / kc - 1e-6;
    auto inFacet = [&](const Vec3 &p) {
        if (!(p.norm() < clip)) return false;
        for (std::size_t l = 0; l < K.balls.size(); ++l)
            if (int(l) != f && K.balls[l].signedDistance(p) > 0) return false;
        return true;
    };
    if (facet.full()) return total;
    double uMin = 1.0, uMax = -1.0;
    for (const auto &loop : facet.loops)
        for (const auto &he : loop) {
            const Edge &e = K.edges[he.edge];
            for (int i = 0; i <= 16; ++i) {
                const double u = (e.circle.point(e.phi0 + (e.phi1 - e.phi0) * i / 16.0) - z.C).dot(z.ez) / z.R;
                uMin = std::min(uMin, u);
                uMax = std::max(uMax, u);
            }
        }
    bool northSingular = 1.0 - uMax >= 1.0 + uMin;
    if (K.c.hyperbolic() && (z.cn + z.R) * kc >= 1.0 - 1e-6) northSingular = true;
    const bool poleIn = inFacet(northSingular ? N : S);

    double sum = 0.0;
    std::vector<double> parts;
    for (const auto &loop : facet.loops)
        for (const auto &he : loop) {
            const Edge &e = K.edges[he.edge];
            auto integrand = [&](double psi) {
                const Vec3 w = (e.circle.point(psi) - z.C) / z.R;
                const Vec3 dw = e.circle.derivative(psi) / z.R;
                const double u = std::clamp(w.dot(z.ez), -1.0, 1.0);
                const double wx = w.dot(z.ex), wy = w.dot(z.ey);
                const double cross = wx * dw.dot(z.ey) - wy * dw.dot(z.ex);
                return northSingular ? meanS(u) * cross / (1.0 - u) : -meanN(u) * cross / (1.0 + u);
            };
            const double v = integrate(integrand, e.phi0, e.phi1, tol, tol * std::abs(total) * 1e-3);
            parts.push_back(he.forward ? v : -v);
        }
    sum = -s * pairwiseSum(parts);
    if (poleIn) sum += 2.0 * std::numbers::pi * total;
    return sum;
}

// Flux of a density g(ρ) ρ dρ dθ over a plane facet, polar about the foot point F.
// meanR(ρ) = ρ⁻² ∫₀^ρ g(r) r dr.
template <class MR>
double planarFacetIntegral(const LambdaPolyhedron &K, int f, MR &&meanR, double scale, double tol) {
    const auto &ball = K.balls[f];
    const Vec3 F = (ball.e() / (2.0 * ball.b().squaredNorm())) * ball.b();
    const Vec3 out = -ball.b().normalized();
    Vec3 eX, eY;
    orthonormalFrame(out, eX, eY);
    std::vector<double> parts;
    for (const auto &loop : K.facets[f].loops)
        for (const auto &he : loop) {
            const Edge &e = K.edges[he.edge];
            auto integrand = [&](double psi) {
                const Vec3 d = e.circle.point(psi) - F;
                const Vec3 dd = e.circle.derivative(psi);
                const double X = d.dot(eX), Y = d.dot(eY);
                const double rho2 = X * X + Y * Y;
                return meanR(rho2) * (X * dd.dot(eY) - Y * dd.dot(eX));
            };
            const double v = integrate(integrand, e.phi0, e.phi1, tol, tol * scale * 1e-3);
            parts.push_back(he.forward ? v : -v);
        }
    return pairwiseSum(parts);
}

template <class G>
double gaussMean(G &&g, double lo, double hi) {
    if (hi - lo <= 0) return g(lo);
    return boost::math::quadrature::gauss<double, 30>::integrate(g, lo, hi) / (hi - lo);
}

} // namespace detail

/// r⁻³ ∫₀^r s² h(s)³ ds; the radial field x·q(|x|) has chart divergence h³.
inline double radialFluxFactor(Curvature c, double r) {
    if (c.flat()) return 1.0 / 3.0;
    const double x = c.value() * r * r;
    if (std::abs(x) < 0.05) {
        double sum = 0.0, p = 1.0;
        for (int n = 0; n < 24; ++n) {
            sum += (n % 2 ? -1.0 : 1.0) * 0.5 * (n + 1) * (n + 2) * p / (2 * n + 3);
            p *= x;
        }
        return 8.0 * sum;
    }
    const double k = c.scale(), kr = k * r, k3 = k * k * k;
    double H;
    if (c.hyperbolic()) {
        const double q = 1.0 - kr * kr;
        H = (kr * (1.0 + kr * kr) / (q * q) - std::atanh(kr)) / k3;
    } else {
        const double q = 1.0 + kr * kr;
        H = (kr * (kr * kr - 1.0) / (q * q) + std::atan(kr)) / k3;
    }
    return H / (r * r * r);
}

inline double facetArea(const LambdaPolyhedron &K, int f, double tol = kDefaultTol) {
    const auto &ball = K.balls[f];
    const double cv = K.c.value();
    if (ball.isPlane()) {
        const Vec3 F = (ball.e() / (2.0 * ball.b().squaredNorm())) * ball.b();
        const double p0 = 1.0 + cv * F.squaredNorm();
        auto mean = [&](double rho2) { return K.c.flat() ? 0.5 : 2.0 / (p0 * (p0 + cv * rho2)); };
        return detail::planarFacetIntegral(K, f, mean, 1.0, tol);
    }
    const auto z = detail::zonalFrame(ball);
    const double R2 = z.R * z.R;
    const double P = 1.0 + cv * (z.cn * z.cn + R2), Q = 2.0 * cv * z.R * z.cn;
    if (K.facets[f].full()) {
        const Chart<3> chart(K.c);
        auto g = [&](double u) {
            const double h = chart.factorUnchecked(z.cn * z.cn + R2 + 2.0 * z.R * z.cn * u);
            return 2.0 * std::numbers::pi * R2 * h * h;
        };
        return integrate(g, -1.0, 1.0, tol);
    }
    auto meanS = [&](double u) { return K.c.flat() ? R2 : 4.0 * R2 / ((P - Q) * (P + Q * u)); };
    auto meanN = [&](double u) { return K.c.flat() ? R2 : 4.0 * R2 / ((P + Q) * (P + Q * u)); };
    const double total = K.c.flat() ? 2.0 * R2 : 8.0 * R2 / ((P - Q) * (P + Q));
    return detail::zonalFacetIntegral(K, f, z, meanS, meanN, total, tol);
}

inline double surfaceArea(const LambdaPolyhedron &K, double tol = kDefaultTol) {
    std::vector<double> a(K.facets.size());
    for (std::size_t f = 0; f < K.facets.size(); ++f) a[f] = facetArea(K, int(f), tol);
    return pairwiseSum(a);
}

inline double edgeLength(const LambdaPolyhedron &K, const Edge &e, double tol = kDefaultTol) {
    const Chart<3> chart(K.c);
    auto g = [&](double psi) { return chart.factorUnchecked(e.circle.point(psi).squaredNorm()) * e.circle.radius; };
    return integrate(g, e.phi0, e.phi1, tol);
}

/// Angle between the outer normals of the two facets along an edge.
inline double normalAngle(const LambdaPolyhedron &K, const Edge &e, double eps = 1e-9) {
    const double cosb = K.balls[e.facets[0]].inner(K.balls[e.facets[1]]);
    const double beta = std::acos(std::clamp(cosb, -1.0, 1.0));
    if (!(beta > eps && beta < std::numbers::pi - eps)) throw GeometryError(ErrorKind::Degenerate, "edge angle at 0 or pi");
    return beta;
}

/// 2λ ℓ tan(β/2): the edge band of the normal cycle.
inline double edgeBandArea(double lambda, double length, double beta) { return 2.0 * lambda * length * std::tan(0.5 * beta); }

/// Area of the spherical polygon spanned by the outer normals (Girard excess).
inline double sphericalPolygonArea(const std::vector<Vec3> &normals) {
    const std::size_t k = normals.size();
    if (k < 3) throw GeometryError(ErrorKind::InvalidArgument, "normal polygon needs three corners");
    double angles = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const Vec3 &p = normals[i], &prev = normals[(i + k - 1) % k], &next = normals[(i + 1) % k];
        const Vec3 t1 = prev - prev.dot(p) * p, t2 = next - next.dot(p) * p;
        const double n1 = t1.norm(), n2 = t2.norm();
        if (!(n1 > 0 && n2 > 0)) throw GeometryError(ErrorKind::Degenerate, "coincident normals");
        angles += std::atan2(t1.cross(t2).norm(), t1.dot(t2));
    }
    const double area = angles - double(k - 2) * std::numbers::pi;
    if (!(area >= 0 && area < 2.0 * std::numbers::pi))
        throw GeometryError(ErrorKind::Degenerate, "non-convex normal polygon");
    return area;
}

inline double vertexNormalArea(const Vertex &v) {
    return sphericalPolygonArea({v.outerNormals[0], v.outerNormals[1], v.outerNormals[2]});
}

struct EdgeMeasure {
    double length, beta;
};

inline std::vector<EdgeMeasure> edgeMeasures(const LambdaPolyhedron &K, double tol = kDefaultTol) {
    std::vector<EdgeMeasure> out;
    out.reserve(K.edges.size());
    for (const auto &e : K.edges) out.push_back({edgeLength(K, e, tol), normalAngle(K, e)});
    return out;
}

/// Σ ℓ_E tan(β_E / 2).
inline double edgeSum(const LambdaPolyhedron &K, double tol = kDefaultTol) {
    std::vector<double> t;
    for (const auto &m : edgeMeasures(K, tol)) t.push_back(m.length * std::tan(0.5 * m.beta));
    return pairwiseSum(t);
}

struct GBReport {
    double termArea = 0, termEdges = 0, termVertices = 0, total = 0, residual = 0;
    double area = 0;
};

inline GBReport gaussBonnetReport(const LambdaPolyhedron &K, double tol = kDefaultTol) {
    GBReport r;
    const double lam = K.lambda;
    r.area = surfaceArea(K, tol);
    r.termArea = (lam * lam + K.c.value()) * r.area;
    std::vector<double> band, verts;
    for (const auto &m : edgeMeasures(K, tol)) band.push_back(edgeBandArea(lam, m.length, m.beta));
    for (const auto &v : K.vertices) verts.push_back(vertexNormalArea(v));
    r.termEdges = pairwiseSum(band);
    r.termVertices = pairwiseSum(verts);
    r.total = r.termArea + r.termEdges + r.termVertices;
    r.residual = r.total - 4.0 * std::numbers::pi;
    return r;
}

/// Total curvature 4π − c|∂K|.
inline double totalCurvature(const LambdaPolyhedron &K, double tol = kDefaultTol) {
    return 4.0 * std::numbers::pi - K.c.value() * surfaceArea(K, tol);
}

/// Riemannian volume by the divergence theorem.
inline double volume(const LambdaPolyhedron &K, double tol = kDefaultTol) {
    const Curvature c = K.c;
    std::vector<double> parts;
    for (std::size_t fi = 0; fi < K.facets.size(); ++fi) {
        const int f = int(fi);
        const auto &ball = K.balls[f];
        if (ball.isPlane()) {
            const Vec3 F = (ball.e() / (2.0 * ball.b().squaredNorm())) * ball.b();
            const double f2 = F.squaredNorm(), dn = -0.5 * ball.e() / ball.b().norm();
            auto mean = [&](double rho2) {
                auto g = [&](double tau) { return radialFluxFactor(c, std::sqrt(f2 + rho2 * tau * tau)) * tau; };
                return dn * boost::math::quadrature::gauss<double, 30>::integrate(g, 0.0, 1.0);
            };
            parts.push_back(detail::planarFacetIntegral(K, f, mean, 1.0, tol));
            continue;
        }
        const auto z = detail::zonalFrame(ball);
        const double s = ball.a() > 0 ? 1.0 : -1.0;
        auto g = [&](double u) {
            const double r2 = std::max(0.0, z.cn * z.cn + z.R * z.R + 2.0 * z.R * z.cn * u);
            return z.R * z.R * s * radialFluxFactor(c, std::sqrt(r2)) * (z.R + z.cn * u);
        };
        if (K.facets[fi].full()) {
            parts.push_back(2.0 * std::numbers::pi * integrate(g, -1.0, 1.0, tol));
            continue;
        }
        auto meanS = [&](double u) { return detail::gaussMean(g, -1.0, u); };
        auto meanN = [&](double u) { return detail::gaussMean(g, u, 1.0); };
        double total = 0.0;
        const bool northOutside = c.hyperbolic() && (z.cn + z.R) * c.scale() >= 1.0 - 1e-6;
        if (!northOutside) total = integrate(g, -1.0, 1.0, tol);
        parts.push_back(detail::zonalFacetIntegral(K, f, z, meanS, meanN, total, tol));
    }
    return pairwiseSum(parts);
}

struct Box3 {
    Vec3 lo, hi;
    double volume() const { return (hi - lo).prod(); }
};

/// Tight chart bounding box: extremes lie at vertices, on edge arcs, or at facet poles.
inline Box3 boundingBox(const LambdaPolyhedron &K) {
    Box3 b{Vec3::Constant(std::numeric_limits<double>::infinity()), Vec3::Constant(-std::numeric_limits<double>::infinity())};
    auto add = [&](const Vec3 &x) {
        b.lo = b.lo.cwiseMin(x);
        b.hi = b.hi.cwiseMax(x);
    };
    for (const auto &v : K.vertices) add(v.point);
    for (const auto &e : K.edges) {
        add(e.circle.point(e.phi0));
        for (int i = 0; i < 3; ++i) {
            const double phi = std::atan2(e.circle.e2[i], e.circle.e1[i]);
            for (double cand : {phi, phi + std::numbers::pi}) {
                double t = cand;
                while (t < e.phi0) t += 2.0 * std::numbers::pi;
                while (t > e.phi0 + 2.0 * std::numbers::pi) t -= 2.0 * std::numbers::pi;
                if (e.fullCircle || t <= e.phi1) add(e.circle.point(t));
            }
        }
    }
    for (std::size_t f = 0; f < K.facets.size(); ++f) {
        const auto &s = K.balls[f];
        if (s.isPlane()) continue;
        const Vec3 C = s.b() / s.a();
        const double R = 1.0 / std::abs(s.a());
        for (int i = 0; i < 3; ++i)
            for (double sg : {-1.0, 1.0}) {
                Vec3 p = C;
                p[i] += sg * R;
                bool in = true;
                for (std::size_t l = 0; l < K.balls.size() && in; ++l)
                    if (l != f && K.balls[l].signedDistance(p) > 0) in = false;
                if (in) add(p);
            }
    }
    const Vec3 pad = 1e-9 * (Vec3::Ones() + (b.hi - b.lo));
    b.lo -= pad;
    b.hi += pad;
    return b;
}

struct MCEstimate {
    double value = 0, standardError = 0;
};

/// Monte Carlo volume over the chart bounding box with weight h³.
inline MCEstimate volumeMC(const LambdaPolyhedron &K, std::size_t n, std::uint64_t seed) {
    const Box3 box = boundingBox(K);
    const Chart<3> chart(K.c);
    CounterRng rng(seed, 0x564f4c554d45ull);
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        Vec3 x;
        for (int k = 0; k < 3; ++k) x[k] = rng.uniform(box.lo[k], box.hi[k]);
        if (!K.contains(x)) continue;
        const double h = chart.factorUnchecked(x.squaredNorm());
        const double w = h * h * h;
        sum += w;
        sum2 += w * w;
    }
    const double V = box.volume(), nn = double(n);
    const double mean = sum / nn;
    const double var = std::max(0.0, sum2 / nn - mean * mean);
    return {V * mean, V * std::sqrt(var / nn)};
}

} // namespace umbilic
