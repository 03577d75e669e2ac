#pragma once

// λ-convex polygons in the hyperbolic plane (c < 0; c = 0 is accepted for checks).
// A polygon is the intersection of λ-discs, bounded by circular arcs in the chart.

#include "flow.hpp"

#include <boost/math/tools/roots.hpp>

namespace umbilic {

using Disc = UmbilicSphere<2>;

namespace detail2d {

inline Vec2 rot90(const Vec2 &v) { return Vec2(-v.y(), v.x()); }
inline double cross(const Vec2 &a, const Vec2 &b) { return a.x() * b.y() - a.y() * b.x(); }

// Boundary of a disc traversed with the ball on the left.
struct Track {
    bool line = false;
    Vec2 center = Vec2::Zero(), base = Vec2::Zero(), dir = Vec2::UnitX();
    double radius = 0, sg = 1;

    explicit Track(const Disc &d) {
        if (std::abs(d.a()) < kPlaneThreshold) {
            line = true;
            const double bn = d.b().norm();
            const Vec2 nu = -d.b() / bn;
            base = (-d.e() / (2.0 * bn)) * nu;
            dir = rot90(nu);
        } else {
            center = d.b() / d.a();
            radius = 1.0 / std::abs(d.a());
            sg = d.a() > 0 ? 1.0 : -1.0;
        }
    }
    Vec2 point(double s) const {
        if (line) return base + s * dir;
        return center + radius * Vec2(std::cos(sg * s), std::sin(sg * s));
    }
    Vec2 deriv(double s) const {
        if (line) return dir;
        return radius * sg * Vec2(-std::sin(sg * s), std::cos(sg * s));
    }
    double param(const Vec2 &x) const {
        if (line) return dir.dot(x - base);
        double th = sg * std::atan2(x.y() - center.y(), x.x() - center.x());
        if (th < 0) th += 2.0 * std::numbers::pi;
        return th;
    }
    double speed() const { return line ? 1.0 : radius; }
};

inline std::vector<Vec2> lineCircle(const Vec2 &u, double w, const Vec2 &C, double R) {
    const double un = u.norm();
    if (!(un > 0)) return {};
    const Vec2 uh = u / un;
    const double dist = w / un - uh.dot(C);
    if (std::abs(dist) >= R) return {};
    const Vec2 foot = C + dist * uh;
    const double h = std::sqrt((R - dist) * (R + dist));
    return {foot + h * rot90(uh), foot - h * rot90(uh)};
}

inline std::vector<Vec2> intersect(const Disc &p, const Disc &q) {
    const bool pl = std::abs(p.a()) < kPlaneThreshold, ql = std::abs(q.a()) < kPlaneThreshold;
    if (pl && ql) {
        Eigen::Matrix2d A;
        A.row(0) = p.b().transpose();
        A.row(1) = q.b().transpose();
        const double det = A.determinant();
        if (std::abs(det) < 1e-14) return {};
        return {A.inverse() * Vec2(0.5 * p.e(), 0.5 * q.e())};
    }
    const Disc &k = std::abs(p.a()) >= std::abs(q.a()) ? p : q;
    const Disc &o = &k == &p ? q : p;
    const Vec2 u = k.a() * o.b() - o.a() * k.b();
    const double w = 0.5 * (k.a() * o.e() - o.a() * k.e());
    return lineCircle(u, w, k.b() / k.a(), 1.0 / std::abs(k.a()));
}

inline double areaDensity(Curvature c, const Vec2 &x) {
    return c.flat() ? 0.5 : 2.0 / (1.0 + c.value() * x.squaredNorm());
}

} // namespace detail2d

struct Side {
    std::size_t disc = 0; // index into LambdaPolygon::discs
    double s0 = 0, s1 = 0;
    Vec2 start = Vec2::Zero(), end = Vec2::Zero();
    double length = 0;
    bool fullCircle = false;
};

struct LambdaPolygon {
    Curvature c{-1.0};
    double lambda = 1.0;
    std::vector<Disc> discs;
    std::vector<std::size_t> sourceIndex, pruned;
    std::vector<Side> sides;        // counterclockwise
    std::vector<Vec2> vertices;     // vertices[i] joins sides[i] and sides[i+1]
    std::vector<double> angles;     // β_i at vertices[i]
    double perimeter = 0, area = 0;

    std::size_t m() const { return vertices.size(); }
    bool contains(const Vec2 &x, double eps = 1e-12) const {
        for (const auto &d : discs)
            if (d.signedDistance(x) > eps) return false;
        return true;
    }
};

struct Build2dOptions {
    double epsGeom = 1e-9;
    double tol = kDefaultTol;
    bool checkLambda = true;
};

/// Arc length of a side: ∫ h ds.
inline double sideLength(Curvature c, const Disc &d, double s0, double s1, double tol = kDefaultTol) {
    const detail2d::Track tr(d);
    const Chart<2> chart(c);
    auto f = [&](double s) { return chart.factorUnchecked(tr.point(s).squaredNorm()) * tr.speed(); };
    return integrate(f, s0, s1, tol, 1e-300, 30);
}

inline double sideAreaFlux(Curvature c, const Disc &d, double s0, double s1, double tol = kDefaultTol) {
    const detail2d::Track tr(d);
    auto f = [&](double s) {
        const Vec2 p = tr.point(s);
        return detail2d::areaDensity(c, p) * detail2d::cross(p, tr.deriv(s));
    };
    return integrate(f, s0, s1, tol, 1e-14 * std::max(1.0, (s1 - s0) * tr.speed()), 30);
}

/// Intersection of the λ-discs. Throws EmptyBody, NonCompact or Degenerate.
inline LambdaPolygon buildPolygon(Curvature c, double lambda, const std::vector<Disc> &discs,
                                  const Build2dOptions &opt = {}) {
    if (c.spherical()) throw GeometryError(ErrorKind::Domain, "polygons are supported for c <= 0 only");
    if (discs.empty()) throw GeometryError(ErrorKind::InvalidArgument, "need at least one disc");
    for (const auto &d : discs) {
        if (d.curvature() != c) throw GeometryError(ErrorKind::InvalidArgument, "disc curvature mismatch");
        if (opt.checkLambda && std::abs(d.signedCurvature() - lambda) > 1e-8 * std::max(1.0, lambda))
            throw GeometryError(ErrorKind::InvalidArgument, "discs must share lambda");
    }
    // clip: the chart absolute for c < 0, a far circle for c = 0
    const double clipR = c.flat() ? 1e6 : 1.0 / c.scale();
    const Disc clip(c, EuclideanSphere<2>{Vec2::Zero(), clipR}, +1);

    std::vector<std::size_t> uniq;
    for (std::size_t i = 0; i < discs.size(); ++i) {
        bool dup = false;
        for (auto j : uniq) {
            const auto &x = discs[i], &y = discs[j];
            if (std::abs(x.a() - y.a()) < 1e-13 && (x.b() - y.b()).norm() < 1e-13 && std::abs(x.e() - y.e()) < 1e-13) dup = true;
        }
        if (!dup) uniq.push_back(i);
    }
    std::vector<Disc> all;
    for (auto i : uniq) all.push_back(discs[i]);
    all.push_back(clip);
    const std::size_t n = all.size(), clipIdx = n - 1;

    auto inside = [&](const Vec2 &x, std::size_t skip) {
        for (std::size_t j = 0; j < n; ++j)
            if (j != skip && all[j].signedDistance(x) > opt.epsGeom * 1e-3) return false;
        return true;
    };

    struct Arc {
        std::size_t disc;
        double s0, s1;
        bool full;
    };
    std::vector<Arc> arcs;
    const double twoPi = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < n; ++i) {
        const detail2d::Track tr(all[i]);
        std::vector<double> ps;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            for (const auto &x : detail2d::intersect(all[i], all[j])) ps.push_back(tr.param(x));
        }
        std::sort(ps.begin(), ps.end());
        if (tr.line) {
            if (ps.empty()) {
                if (inside(tr.point(0.0), i)) throw GeometryError(ErrorKind::NonCompact, "unbounded side");
                continue;
            }
            if (inside(tr.point(ps.front() - 1.0), i) || inside(tr.point(ps.back() + 1.0), i))
                throw GeometryError(ErrorKind::NonCompact, "unbounded side");
            for (std::size_t k = 0; k + 1 < ps.size(); ++k)
                if (ps[k + 1] > ps[k] && inside(tr.point(0.5 * (ps[k] + ps[k + 1])), i)) arcs.push_back({i, ps[k], ps[k + 1], false});
            continue;
        }
        if (ps.empty()) {
            if (inside(tr.point(std::numbers::pi), i)) arcs.push_back({i, 0.0, twoPi, true});
            continue;
        }
        for (std::size_t k = 0; k < ps.size(); ++k) {
            const double a = ps[k], b = k + 1 < ps.size() ? ps[k + 1] : ps.front() + twoPi;
            if (!(b > a)) continue;
            if (inside(tr.point(0.5 * (a + b)), i)) arcs.push_back({i, a, b, false});
        }
    }
    if (arcs.empty()) throw GeometryError(ErrorKind::EmptyBody, "empty intersection");
    for (const auto &a : arcs)
        if (a.disc == clipIdx) throw GeometryError(ErrorKind::NonCompact, "body reaches the ideal boundary");

    // merge arcs of one disc split at points where another disc only touches
    std::sort(arcs.begin(), arcs.end(), [](const Arc &x, const Arc &y) { return std::tie(x.disc, x.s0) < std::tie(y.disc, y.s0); });
    std::vector<Arc> merged;
    for (const auto &a : arcs) {
        if (!merged.empty() && merged.back().disc == a.disc && std::abs(merged.back().s1 - a.s0) < 1e-12) {
            merged.back().s1 = a.s1;
            continue;
        }
        merged.push_back(a);
    }
    for (std::size_t k = 0; k + 1 < merged.size(); ++k) {
        // wrap-around on a circle
        const auto &f = merged[k];
        for (std::size_t l = k + 1; l < merged.size() && merged[l].disc == f.disc; ++l) {
            if (std::abs(merged[l].s1 - (f.s0 + twoPi)) < 1e-12 && !merged[l].full) {
                merged[l].s1 = f.s1 + twoPi;
                merged.erase(merged.begin() + k);
                --k;
                break;
            }
        }
    }

    LambdaPolygon P;
    P.c = c;
    P.lambda = lambda;
    std::vector<std::size_t> used;
    for (const auto &a : merged)
        if (std::find(used.begin(), used.end(), a.disc) == used.end()) used.push_back(a.disc);
    std::sort(used.begin(), used.end());
    for (auto u : used) {
        P.discs.push_back(all[u]);
        P.sourceIndex.push_back(uniq[u]);
    }
    for (std::size_t i = 0; i < discs.size(); ++i)
        if (std::find(P.sourceIndex.begin(), P.sourceIndex.end(), i) == P.sourceIndex.end()) P.pruned.push_back(i);
    auto localIdx = [&](std::size_t d) { return std::size_t(std::find(used.begin(), used.end(), d) - used.begin()); };

    if (merged.size() == 1 && merged[0].full) {
        Side s;
        s.disc = 0;
        s.s0 = 0;
        s.s1 = twoPi;
        s.fullCircle = true;
        s.start = s.end = detail2d::Track(P.discs[0]).point(0.0);
        P.sides.push_back(s);
    } else {
        for (const auto &a : merged)
            if (a.full) throw GeometryError(ErrorKind::Degenerate, "full circle alongside other sides");
        std::vector<Side> pending;
        for (const auto &a : merged) {
            Side s;
            s.disc = localIdx(a.disc);
            s.s0 = a.s0;
            s.s1 = a.s1;
            const detail2d::Track tr(P.discs[s.disc]);
            s.start = tr.point(a.s0);
            s.end = tr.point(a.s1);
            pending.push_back(s);
        }
        // chain from the side with the lowest disc index
        std::vector<bool> taken(pending.size(), false);
        P.sides.push_back(pending[0]);
        taken[0] = true;
        const double joinTol = 1e-7 * std::max(1.0, clipR < 1e5 ? clipR : 1.0);
        for (std::size_t step = 1; step < pending.size(); ++step) {
            const Vec2 e = P.sides.back().end;
            std::size_t best = pending.size();
            double bd = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < pending.size(); ++k) {
                if (taken[k]) continue;
                const double d = (pending[k].start - e).norm();
                if (d < bd) {
                    bd = d;
                    best = k;
                }
            }
            if (bd > joinTol) throw GeometryError(ErrorKind::Degenerate, "boundary does not form one loop");
            taken[best] = true;
            P.sides.push_back(pending[best]);
        }
        if ((P.sides.back().end - P.sides.front().start).norm() > joinTol)
            throw GeometryError(ErrorKind::Degenerate, "boundary loop does not close");
        const std::size_t m = P.sides.size();
        if (m < 2) throw GeometryError(ErrorKind::Degenerate, "single open side");
        for (std::size_t i = 0; i < m; ++i) {
            const auto &s = P.sides[i], &t = P.sides[(i + 1) % m];
            const Vec2 v = 0.5 * (s.end + t.start);
            const Vec2 n0 = P.discs[s.disc].outerNormal(v), n1 = P.discs[t.disc].outerNormal(v);
            const double beta = std::atan2(detail2d::cross(n0, n1), n0.dot(n1));
            if (!(beta > 1e-12) || !(beta < std::numbers::pi - 1e-12))
                throw GeometryError(ErrorKind::Degenerate, "vertex angle out of (0, pi)");
            P.vertices.push_back(v);
            P.angles.push_back(beta);
        }
    }
    std::vector<double> lens, flux;
    for (auto &s : P.sides) {
        s.length = sideLength(c, P.discs[s.disc], s.s0, s.s1, opt.tol);
        lens.push_back(s.length);
        flux.push_back(sideAreaFlux(c, P.discs[s.disc], s.s0, s.s1, opt.tol));
    }
    P.perimeter = pairwiseSum(lens);
    P.area = pairwiseSum(flux);
    if (!(P.area > 0)) throw GeometryError(ErrorKind::NonCompact, "boundary loop is not positively oriented");
    return P;
}

inline LambdaPolygon buildPolygon(double lambda, const std::vector<Disc> &discs) {
    return buildPolygon(Curvature(-1.0), lambda, discs);
}

/// Area by direct quadrature of h² over the body in polar coordinates about an interior point.
inline double polygonAreaDirect(const LambdaPolygon &P, double tol = 1e-10) {
    Vec2 o = Vec2::Zero();
    for (const auto &s : P.sides) o += detail2d::Track(P.discs[s.disc]).point(0.5 * (s.s0 + s.s1));
    o /= double(P.sides.size());
    if (P.sides.size() == 1) o = detail2d::Track(P.discs[0]).center;
    if (!P.contains(o)) throw GeometryError(ErrorKind::Degenerate, "centroid outside the polygon");
    const Chart<2> chart(P.c);
    auto radial = [&](double th) {
        const Vec2 u(std::cos(th), std::sin(th));
        double rmax = std::numeric_limits<double>::infinity();
        for (const auto &d : P.discs) {
            // smallest positive root of σ(o + r u) = 0
            const double A = d.a(), B = 2.0 * (A * o.dot(u) - d.b().dot(u)), C = d.eval(o);
            double r;
            if (std::abs(A) < 1e-300) r = -C / B;
            else {
                const double disc = B * B - 4 * A * C;
                const double sq = std::sqrt(std::max(0.0, disc));
                const double r1 = (-B - sq) / (2 * A), r2 = (-B + sq) / (2 * A);
                r = std::numeric_limits<double>::infinity();
                for (double x : {r1, r2})
                    if (x > 0) r = std::min(r, x);
            }
            if (r > 0) rmax = std::min(rmax, r);
        }
        if (!std::isfinite(rmax)) throw GeometryError(ErrorKind::Degenerate, "ray leaves every disc");
        auto g = [&](double r) {
            const double h = chart.factorUnchecked((o + r * u).squaredNorm());
            return h * h * r;
        };
        return integrate(g, 0.0, rmax, tol * 1e-2, 1e-300, 30);
    };
    // the radial limit has kinks in the vertex directions
    std::vector<double> cuts;
    for (const auto &v : P.vertices) {
        double th = std::atan2(v.y() - o.y(), v.x() - o.x());
        if (th < 0) th += 2.0 * std::numbers::pi;
        cuts.push_back(th);
    }
    std::sort(cuts.begin(), cuts.end());
    if (cuts.empty()) cuts.push_back(0.0);
    std::vector<double> parts;
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        const double a = cuts[i], b = i + 1 < cuts.size() ? cuts[i + 1] : cuts[0] + 2.0 * std::numbers::pi;
        parts.push_back(integrate(radial, a, b, tol, 1e-300, 30));
    }
    return pairwiseSum(parts);
}

struct GB2Report {
    double lhs = 2.0 * std::numbers::pi, rhs = 0, residual = 0;
    double termArea = 0, termPerimeter = 0, termAngles = 0;
};

/// 2π against c|K| + λ|∂K| + Σβ_i.
inline GB2Report gb2Report(const LambdaPolygon &P) {
    GB2Report r;
    r.termArea = P.c.value() * P.area;
    r.termPerimeter = P.lambda * P.perimeter;
    r.termAngles = pairwiseSum(P.angles);
    r.rhs = r.termArea + r.termPerimeter + r.termAngles;
    r.residual = r.rhs - r.lhs;
    return r;
}

/// Σ tan(β_i/2)
inline double tanSum(const LambdaPolygon &P) {
    std::vector<double> t;
    for (double b : P.angles) t.push_back(std::tan(0.5 * b));
    return pairwiseSum(t);
}

// ---------------------------------------------------------------- random polygons

/// Supporting λ-discs of B(o, rho[i]) at the given angles.
inline std::vector<Disc> supportingDiscs(Curvature c, double lambda, const std::vector<double> &angles,
                                         const std::vector<double> &rho) {
    const Chart<2> chart(c);
    std::vector<Disc> out;
    for (std::size_t i = 0; i < angles.size(); ++i) {
        const Vec2 u(std::cos(angles[i]), std::sin(angles[i]));
        const Vec2 p = chart.geodesicPointDir(Vec2::Zero(), u, rho[i]);
        out.push_back(sphereThrough<2>(c, lambda, p, -u));
    }
    return out;
}

inline std::vector<double> jitteredAngles(CounterRng &rng, int m) {
    const double twoPi = 2.0 * std::numbers::pi;
    const double phase = twoPi * rng.uniform();
    std::vector<double> out;
    for (int k = 0; k < m; ++k) out.push_back(phase + twoPi * (k + 0.3 * rng.normal() * (m > 2 ? 1.0 : 0.0)) / m);
    return out;
}

/// m supporting λ-discs of B(o, rho0·(1 + spread·U_i)) at jittered equispaced angles.
inline LambdaPolygon randomPolygon(std::uint64_t seed, Curvature c, double lambda, int m, double rho0,
                                   double spread = 0.0, int maxRetries = 5) {
    if (m < 1) throw GeometryError(ErrorKind::InvalidArgument, "need at least one disc");
    if (!(rho0 > 0)) throw GeometryError(ErrorKind::InvalidArgument, "rho0 must be positive");
    const bool compactDiscs = c.value() >= 0 || lambda > c.scale();
    if (compactDiscs && !(rho0 * (1.0 + std::max(0.0, spread)) < geodesicRadius(c, lambda)))
        throw GeometryError(ErrorKind::InvalidArgument, "rho0 exceeds the lambda-disc radius");
    for (int attempt = 0;; ++attempt) {
        CounterRng rng(seed, 0x3244ull + std::uint64_t(attempt));
        const auto ang = jitteredAngles(rng, m);
        std::vector<double> rho(ang.size(), rho0);
        if (spread > 0)
            for (auto &r : rho) r = rho0 * (1.0 + spread * rng.uniform());
        try {
            return buildPolygon(c, lambda, supportingDiscs(c, lambda, ang, rho));
        } catch (const GeometryError &err) {
            if (err.kind() != ErrorKind::Degenerate || attempt >= maxRetries) throw;
        }
    }
}

// ---------------------------------------------------------------- flow

inline LambdaPolygon innerParallel2d(const LambdaPolygon &P, double t) {
    if (t < 0) throw GeometryError(ErrorKind::InvalidArgument, "negative erosion depth");
    if (t == 0) return P;
    double lamT;
    try {
        lamT = lambdaAt(P.c, P.lambda, t);
    } catch (const GeometryError &err) {
        if (err.kind() == ErrorKind::BlowUp) throw GeometryError(ErrorKind::EmptyBody, "body vanished");
        throw;
    }
    std::vector<Disc> eroded;
    for (const auto &d : P.discs) {
        try {
            eroded.push_back(erode(d, t));
        } catch (const GeometryError &err) {
            if (err.kind() == ErrorKind::EmptyErosion || err.kind() == ErrorKind::Degenerate)
                throw GeometryError(ErrorKind::EmptyBody, "body vanished");
            throw;
        }
    }
    LambdaPolygon Pt;
    try {
        Pt = buildPolygon(P.c, lamT, eroded, Build2dOptions{1e-9, kDefaultTol, false});
    } catch (const GeometryError &err) {
        if (err.kind() == ErrorKind::NonCompact) throw GeometryError(ErrorKind::EmptyBody, "body vanished");
        throw;
    }
    for (auto &s : Pt.sourceIndex) s = P.sourceIndex[s];
    for (auto &s : Pt.pruned) s = P.sourceIndex[s];
    Pt.pruned.insert(Pt.pruned.end(), P.pruned.begin(), P.pruned.end());
    std::sort(Pt.pruned.begin(), Pt.pruned.end());
    return Pt;
}

struct Signature2d {
    std::vector<std::size_t> sides; // source disc per side, sorted
    bool empty = false;
    friend bool operator==(const Signature2d &, const Signature2d &) = default;
};

inline Signature2d signatureOf(const LambdaPolygon &P) {
    Signature2d s;
    for (const auto &side : P.sides) s.sides.push_back(P.sourceIndex[side.disc]);
    std::sort(s.sides.begin(), s.sides.end());
    return s;
}

inline std::optional<LambdaPolygon> tryInnerParallel2d(const LambdaPolygon &P, double t) {
    try {
        return innerParallel2d(P, t);
    } catch (const GeometryError &err) {
        if (err.kind() == ErrorKind::EmptyBody) return std::nullopt;
        throw;
    }
}

inline Signature2d signatureAt(const LambdaPolygon &P, double t) {
    try {
        const auto Pt = tryInnerParallel2d(P, t);
        if (!Pt) return Signature2d{{}, true};
        return signatureOf(*Pt);
    } catch (const GeometryError &err) {
        if (err.kind() != ErrorKind::Degenerate) throw;
        // tangency exactly at t: nudge
        const auto Pt = tryInnerParallel2d(P, t + 1e-12);
        if (!Pt) return Signature2d{{}, true};
        return signatureOf(*Pt);
    }
}

inline bool emptyAt(const LambdaPolygon &P, double t) {
    try {
        return !tryInnerParallel2d(P, t).has_value();
    } catch (const GeometryError &err) {
        if (err.kind() == ErrorKind::Degenerate) return false;
        throw;
    }
}

inline double inradius(const LambdaPolygon &P, double tol = 1e-10) {
    double lo = 0.0, hi;
    const double lam = P.lambda, cv = P.c.value();
    if (lam > 0 && lam * lam + cv > 0) {
        hi = geodesicRadius(P.c, lam);
    } else {
        hi = 1.0;
        while (!emptyAt(P, hi)) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e3) throw GeometryError(ErrorKind::NonCompact, "inner parallel flow does not vanish");
        }
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (emptyAt(P, mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

inline std::string describeChange(const Signature2d &a, const Signature2d &b) {
    if (b.empty) return "body vanishes";
    std::vector<std::size_t> gone, added;
    std::set_difference(a.sides.begin(), a.sides.end(), b.sides.begin(), b.sides.end(), std::back_inserter(gone));
    std::set_difference(b.sides.begin(), b.sides.end(), a.sides.begin(), a.sides.end(), std::back_inserter(added));
    std::string out;
    for (auto f : gone) out += (out.empty() ? "" : "; ") + std::string("side ") + std::to_string(f) + " disappears";
    for (auto f : added) out += (out.empty() ? "" : "; ") + std::string("side ") + std::to_string(f) + " appears";
    return out.empty() ? "side multiplicity change" : out;
}

namespace detail2d {
inline void bisectEvents(const LambdaPolygon &P, double t0, const Signature2d &s0, double t1, const Signature2d &s1,
                         std::vector<FlowEvent> &out) {
    if (s0 == s1) return;
    if (t1 - t0 <= kEventResolution) {
        out.push_back({0.5 * (t0 + t1), describeChange(s0, s1)});
        return;
    }
    const double tm = 0.5 * (t0 + t1);
    const Signature2d sm = signatureAt(P, tm);
    bisectEvents(P, t0, s0, tm, sm, out);
    bisectEvents(P, tm, sm, t1, s1, out);
}
} // namespace detail2d

inline std::vector<FlowEvent> locateEvents(const LambdaPolygon &P, const std::vector<double> &grid) {
    std::vector<FlowEvent> events;
    if (grid.empty()) return events;
    Signature2d prev = signatureAt(P, grid.front());
    for (std::size_t i = 1; i < grid.size(); ++i) {
        Signature2d cur = signatureAt(P, grid[i]);
        detail2d::bisectEvents(P, grid[i - 1], prev, grid[i], cur, events);
        prev = std::move(cur);
    }
    return events;
}

/// Flow sample with the 2D reading of the columns: area holds the perimeter, edgeSum
/// holds Σ tan(β_i/2), nFacets = 1, nEdges = sides, nVertices = vertices.
inline FlowSample sampleAt(const LambdaPolygon &P, double t) {
    FlowSample s;
    s.t = t;
    s.lambdaT = lambdaAt(P.c, P.lambda, t);
    const auto Pt = tryInnerParallel2d(P, t);
    if (!Pt) return s;
    s.area = Pt->perimeter;
    s.edgeSum = tanSum(*Pt);
    s.nFacets = 1;
    s.nEdges = Pt->sides.size();
    s.nVertices = Pt->vertices.size();
    return s;
}

inline FlowCurve flow2d(const LambdaPolygon &P, int nGrid = 64) {
    FlowCurve curve;
    curve.inradius = inradius(P);
    const double r = curve.inradius;
    std::vector<double> grid = uniformGrid(r, nGrid);
    std::vector<double> probe = grid;
    probe.push_back(r * (1.0 - 1e-6));
    curve.events = locateEvents(P, probe);
    std::vector<double> times = grid;
    const double delta = std::min(1e-4 * r, 0.25 * r / nGrid);
    for (const auto &ev : curve.events) {
        if (ev.description == "body vanishes") continue;
        for (double t : {ev.t - delta, ev.t + delta})
            if (t > 0 && t < r) times.push_back(t);
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    for (double t : times) {
        FlowSample s = sampleAt(P, t);
        if (s.nFacets == 0) break;
        curve.samples.push_back(s);
    }
    return curve;
}

inline FlowCurve sampleCurve(const LambdaPolygon &P, const std::vector<double> &times) {
    FlowCurve curve;
    for (double t : times) curve.samples.push_back(sampleAt(P, t));
    return curve;
}

/// |K| = ∫₀^{r} |∂K_t| dt.
inline double coareaArea(const LambdaPolygon &P, double tol = 1e-9, int nGrid = 64) {
    const double r = inradius(P);
    std::vector<double> probe = uniformGrid(r, nGrid);
    probe.push_back(r * (1.0 - 1e-6));
    std::vector<double> cuts{0.0};
    for (const auto &ev : locateEvents(P, probe))
        if (ev.description != "body vanishes") cuts.push_back(ev.t);
    cuts.push_back(r);
    auto f = [&](double t) {
        const auto Pt = tryInnerParallel2d(P, t);
        return Pt ? Pt->perimeter : 0.0;
    };
    std::vector<double> parts;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        parts.push_back(integrate(f, cuts[i], cuts[i + 1], tol, tol * P.perimeter * r, 30));
    return pairwiseSum(parts);
}

/// Finite difference of |∂K_t| against −λ(t)|∂K_t| − 2Σ tan(β_i/2).
inline VariationRecord variationCheck2d(const LambdaPolygon &P, double t0, double h) {
    if (!(h > 0) || t0 < 0) throw GeometryError(ErrorKind::InvalidArgument, "bad variation stencil");
    const bool oneSided = t0 < h;
    const std::vector<double> ts = oneSided ? std::vector<double>{t0, t0 + h, t0 + 2 * h} : std::vector<double>{t0 - h, t0, t0 + h};
    std::vector<LambdaPolygon> bodies;
    for (double t : ts) bodies.push_back(innerParallel2d(P, t));
    const auto s0 = signatureOf(bodies[0]);
    if (!(s0 == signatureOf(bodies[1]) && s0 == signatureOf(bodies[2])))
        throw GeometryError(ErrorKind::EventNearby, "combinatorial event inside the stencil");
    VariationRecord rec;
    const double f0 = bodies[0].perimeter, f1 = bodies[1].perimeter, f2 = bodies[2].perimeter;
    rec.fd = oneSided ? (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h) : (f2 - f0) / (2.0 * h);
    const auto &B = bodies[oneSided ? 0 : 1];
    rec.formula = -B.lambda * B.perimeter - 2.0 * tanSum(B);
    rec.residual = rec.fd - rec.formula;
    return rec;
}

// ---------------------------------------------------------------- 2-gons

struct Lens2d {
    Curvature c{-1.0};
    double lambda = 1.0, halfWidth = 0;
    LambdaPolygon polygon;
    double betaStar = 0, perimeter = 0, area = 0;
    double inradius() const { return halfWidth; }
};

inline std::vector<Disc> lens2dDiscs(Curvature c, double lambda, double w, const Vec2 &center = Vec2::Zero(),
                                     const Vec2 &axis = Vec2::UnitY()) {
    if (!(w > 0)) throw GeometryError(ErrorKind::InvalidArgument, "lens half-width must be positive");
    const Chart<2> chart(c);
    const Vec2 u = axis.normalized();
    std::vector<Disc> out;
    for (double sg : {1.0, -1.0}) {
        const Vec2 apex = chart.geodesicPointDir(center, sg * u, w);
        out.push_back(sphereThrough<2>(c, lambda, apex, chart.directionTo(apex, center)));
    }
    return out;
}

inline Lens2d makeLens2d(Curvature c, double lambda, double w, const Vec2 &center = Vec2::Zero(),
                         const Vec2 &axis = Vec2::UnitY()) {
    if (lambda > 0 && lambda * lambda + c.value() > 0 && !(w < geodesicRadius(c, lambda)))
        throw GeometryError(ErrorKind::EmptyBody, "half-width reaches the lambda-disc inradius");
    Lens2d L;
    L.c = c;
    L.lambda = lambda;
    L.halfWidth = w;
    L.polygon = buildPolygon(c, lambda, lens2dDiscs(c, lambda, w, center, axis));
    if (L.polygon.m() != 2) throw GeometryError(ErrorKind::Degenerate, "lens is not a 2-gon");
    L.betaStar = 0.5 * (L.polygon.angles[0] + L.polygon.angles[1]);
    L.perimeter = L.polygon.perimeter;
    L.area = L.polygon.area;
    return L;
}

inline double lens2dWidthLimit(Curvature c, double lambda) {
    if (lambda > 0 && lambda * lambda + c.value() > 0) return geodesicRadius(c, lambda);
    auto ok = [&](double w) {
        try {
            buildPolygon(c, lambda, lens2dDiscs(c, lambda, w));
            return true;
        } catch (const GeometryError &) {
            return false;
        }
    };
    double lo = 0.05, hi = 0.05;
    if (!ok(lo)) throw GeometryError(ErrorKind::Unattainable, "no compact 2-gon for this curvature");
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

/// The 2-gon with |∂L| = target.
inline Lens2d lens2dForPerimeter(Curvature c, double lambda, double target) {
    if (!(target > 0)) throw GeometryError(ErrorKind::Unattainable, "target perimeter must be positive");
    const double q = lambda * lambda + c.value();
    if (q > 0 && !(target < lambdaCircleLength(c, lambda)))
        throw GeometryError(ErrorKind::Unattainable, "target perimeter exceeds the lambda-circle length");
    const double wMax = lens2dWidthLimit(c, lambda) * (1.0 - 1e-12);
    auto g = [&](double w) {
        if (w <= 0) return -target;
        try {
            return buildPolygon(c, lambda, lens2dDiscs(c, lambda, w), Build2dOptions{1e-9, 1e-13, true}).perimeter - target;
        } catch (const GeometryError &err) {
            if ((err.kind() == ErrorKind::EmptyBody || err.kind() == ErrorKind::Degenerate) && q > 0)
                return lambdaCircleLength(c, lambda) - target;
            throw;
        }
    };
    // approach the limit geometrically: near it the sides run along the ideal boundary
    double hi = 0.5 * wMax, ghi = g(hi);
    for (int k = 2; ghi < 0 && k <= 40; ++k) {
        hi = wMax * (1.0 - std::ldexp(1.0, -k));
        ghi = g(hi);
    }
    if (ghi < 0) throw GeometryError(ErrorKind::Unattainable, "target perimeter beyond the compact 2-gon range");
    std::uintmax_t iters = 200;
    auto stop = [](double a, double b) { return std::abs(b - a) <= 4e-16 * std::max(1.0, std::abs(b)); };
    const auto [a, b] = boost::math::tools::toms748_solve(g, 0.0, hi, -target, ghi, stop, iters);
    const double w = std::abs(g(a)) <= std::abs(g(b)) ? a : b;
    return makeLens2d(c, lambda, w);
}

// ---------------------------------------------------------------- checks

struct AngleBoundReport {
    double betaStar = 0, maxExcess = 0; // max_i β_i − β*
    bool condHypothesis = false;        // |K| ≤ |L| at matched perimeter
    std::optional<bool> condHolds;      // Σβ_i ≤ 2β*, only evaluated under the hypothesis
};

inline AngleBoundReport angleBoundCheck(const LambdaPolygon &P, const Lens2d &L, double tol = 1e-8) {
    if (std::abs(P.perimeter - L.perimeter) > 1e-8 * std::max(1.0, L.perimeter))
        throw GeometryError(ErrorKind::InvalidArgument, "perimeters are not matched");
    AngleBoundReport r;
    r.betaStar = L.betaStar;
    r.maxExcess = -std::numeric_limits<double>::infinity();
    for (double b : P.angles) r.maxExcess = std::max(r.maxExcess, b - L.betaStar);
    r.condHypothesis = P.area <= L.area;
    if (r.condHypothesis) r.condHolds = pairwiseSum(P.angles) <= 2.0 * L.betaStar + tol;
    return r;
}

struct ReverseIso2dReport {
    double gap = 0; // |K| − |L|
    double tanSumK = 0, tanBound = 0;
    bool certificateHypothesis = false;
    std::optional<bool> certificateHolds;
    double inradiusK = 0, inradiusL = 0;
    Lens2d lens;
    AngleBoundReport angles;
};

inline ReverseIso2dReport reverseIsoCheck2d(const LambdaPolygon &P, bool withInradius = true, double tol = 1e-8) {
    ReverseIso2dReport r;
    r.lens = lens2dForPerimeter(P.c, P.lambda, P.perimeter);
    r.gap = P.area - r.lens.area;
    r.tanSumK = tanSum(P);
    r.tanBound = 2.0 * std::tan(0.5 * r.lens.betaStar);
    r.angles = angleBoundCheck(P, r.lens, tol);
    r.certificateHypothesis = r.angles.condHypothesis;
    if (r.certificateHypothesis) r.certificateHolds = r.tanSumK <= r.tanBound + tol;
    if (withInradius) {
        r.inradiusK = inradius(P);
        r.inradiusL = r.lens.inradius();
    }
    return r;
}

} // namespace umbilic
