#pragma once

// λ-convex polyhedra in M³(c): intersections of finitely many λ-balls, with their
// facet / edge / vertex combinatorics.
//
// Arrangement: pairwise intersection circles -> triple points -> arc classification
// by membership -> loop assembly by angular order around each circle. For c != 0 the
// chart boundary (model sphere, or the hemisphere sphere for c > 0) is added as an
// extra constraint; if it contributes a facet the body is reported NonCompact.

#include "quadrature.hpp"
#include "rng.hpp"
#include "sphere.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace umbilic {

using Sphere3 = UmbilicSphere<3>;

struct Circle {
    Vec3 center = Vec3::Zero();
    double radius = 0.0;
    Vec3 axis = Vec3::UnitZ(), e1 = Vec3::UnitX(), e2 = Vec3::UnitY();

    Vec3 point(double phi) const { return center + radius * (std::cos(phi) * e1 + std::sin(phi) * e2); }
    Vec3 derivative(double phi) const { return radius * (-std::sin(phi) * e1 + std::cos(phi) * e2); }
    double angleOf(const Vec3 &x) const {
        const Vec3 d = x - center;
        return std::atan2(d.dot(e2), d.dot(e1));
    }
};

struct Vertex {
    Vec3 point;
    std::array<int, 3> facets;          // counterclockwise seen from outside
    std::array<Vec3, 3> outerNormals;   // chart-Euclidean unit normals (Riemannian directions)
};

/// Arc of the circle between facets[0] and facets[1], traversed by increasing angle from
/// phi0 to phi1 with facets[0] on the left (seen from outside the body).
struct Edge {
    std::array<int, 2> facets;
    Circle circle;
    bool fullCircle = false;
    std::array<int, 2> vertices{-1, -1};
    double phi0 = 0.0, phi1 = 2.0 * std::numbers::pi;

    Vec3 midpoint() const { return circle.point(0.5 * (phi0 + phi1)); }
};

struct HalfEdge {
    int edge;
    bool forward; // true: facet is edges[edge].facets[0]
};

struct Facet {
    int ball;
    std::vector<std::vector<HalfEdge>> loops; // empty: the whole λ-sphere
    bool full() const { return loops.empty(); }
};

struct LambdaPolyhedron {
    Curvature c;
    double lambda = 1.0; // nominal (signed) curvature of the defining balls
    std::vector<Sphere3> balls;           // canonical order, redundant balls removed
    std::vector<std::size_t> sourceIndex; // balls[i] came from input position sourceIndex[i]
    std::vector<std::size_t> pruned;      // input positions of redundant balls
    std::vector<Facet> facets;            // facets[i] lies on balls[i]
    std::vector<Edge> edges;
    std::vector<Vertex> vertices;
    Vec3 witness = Vec3::Zero(); // strictly interior point

    std::size_t facetCount() const { return facets.size(); }

    bool contains(const Vec3 &x, double eps = 0.0) const {
        for (const auto &b : balls)
            if (b.signedDistance(x) > eps) return false;
        return true;
    }

    bool allFacetsDisks() const {
        return std::all_of(facets.begin(), facets.end(), [](const Facet &f) { return f.loops.size() == 1; });
    }

    /// F − E + V, counting a vertexless full-circle edge as one vertex plus one edge.
    int eulerCharacteristic() const {
        int full = 0;
        for (const auto &e : edges) full += e.fullCircle ? 1 : 0;
        return int(facets.size()) - int(edges.size()) + int(vertices.size()) + full;
    }
};

struct BuildOptions {
    double epsGeom = 1e-9; // degeneracy band, chart units
    bool strict = true;    // throw Degenerate inside the band; otherwise classify by sign
};

namespace detail {

inline Sphere3 clipSphere(Curvature c) {
    const double r = 1.0 / c.scale() - 1e-6;
    return Sphere3(c, EuclideanSphere<3>{Vec3::Zero(), r}, +1);
}

inline void orthonormalFrame(const Vec3 &axis, Vec3 &e1, Vec3 &e2) {
    int k = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(axis[i]) < std::abs(axis[k])) k = i;
    Vec3 ref = Vec3::Zero();
    ref[k] = 1.0;
    e1 = (ref - ref.dot(axis) * axis).normalized();
    e2 = axis.cross(e1);
}

/// Intersection circle of two chart spheres, oriented so that si's facet is on the left.
inline std::optional<Circle> intersectionCircle(const Sphere3 &si, const Sphere3 &sj) {
    const double cosb = si.inner(sj);
    if (!(std::abs(cosb) < 1.0)) return std::nullopt;
    const Sphere3 &s = std::abs(si.a()) >= std::abs(sj.a()) ? si : sj;
    if (std::abs(s.a()) < kPlaneThreshold) throw GeometryError(ErrorKind::Degenerate, "edge between two planes");
    const Vec3 C = s.b() / s.a();
    const double R = 1.0 / std::abs(s.a());
    const Vec3 w = sj.a() * si.b() - si.a() * sj.b();
    const double wn = w.norm();
    if (!(wn > 0)) return std::nullopt;
    const Vec3 n = w / wn;
    const double delta = 0.5 * (sj.a() * si.e() - si.a() * sj.e()) / wn;
    const double dist = n.dot(C) - delta;
    const double r2 = (R - std::abs(dist)) * (R + std::abs(dist));
    if (!(r2 > 0)) return std::nullopt;
    Circle circ;
    circ.center = C - dist * n;
    circ.radius = std::sqrt(r2);
    circ.axis = n;
    orthonormalFrame(n, circ.e1, circ.e2);
    const Vec3 x = circ.point(0.0);
    const Vec3 ni = si.outerNormal(x), nj = sj.outerNormal(x);
    if (ni.cross(circ.e2).dot(nj) > 0) {
        circ.axis = -circ.axis;
        circ.e2 = -circ.e2;
    }
    return circ;
}

/// Common points of three chart spheres (0, 1 or 2), Newton-polished.
inline std::vector<Vec3> triplePoints(const Sphere3 &s0, const Sphere3 &s1, const Sphere3 &s2) {
    std::array<const Sphere3 *, 3> s{&s0, &s1, &s2};
    int p = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(s[i]->a()) > std::abs(s[p]->a())) p = i;
    const Sphere3 &piv = *s[p];
    if (std::abs(piv.a()) < kPlaneThreshold) throw GeometryError(ErrorKind::Degenerate, "vertex of three planes");
    std::array<Vec3, 2> n;
    std::array<double, 2> d;
    int q = 0;
    for (int i = 0; i < 3; ++i) {
        if (i == p) continue;
        n[q] = piv.a() * s[i]->b() - s[i]->a() * piv.b();
        d[q] = 0.5 * (piv.a() * s[i]->e() - s[i]->a() * piv.e());
        ++q;
    }
    const Vec3 dir = n[0].cross(n[1]);
    const double dd = dir.squaredNorm();
    if (!(dd > 1e-28 * n[0].squaredNorm() * n[1].squaredNorm())) return {};
    const double n01 = n[0].dot(n[1]);
    const Vec3 x0 = ((d[0] * n[1].squaredNorm() - d[1] * n01) * n[0] + (d[1] * n[0].squaredNorm() - d[0] * n01) * n[1]) / dd;
    const double A = piv.a() * dd;
    const double B = piv.a() * x0.dot(dir) - piv.b().dot(dir);
    const double C0 = piv.eval(x0);
    const double disc = B * B - A * C0;
    if (disc < 0) return {};
    const double sq = std::sqrt(disc);
    const double qq = -(B + (B >= 0 ? sq : -sq));
    std::vector<Vec3> out;
    std::array<double, 2> roots{qq / A, qq != 0 ? C0 / qq : qq / A};
    for (double t : roots) {
        Vec3 x = x0 + t * dir;
        for (int it = 0; it < 2; ++it) {
            Eigen::Matrix3d J;
            Vec3 F;
            for (int i = 0; i < 3; ++i) {
                F[i] = s[i]->eval(x);
                J.row(i) = 2.0 * (s[i]->a() * x - s[i]->b()).transpose();
            }
            const Vec3 dx = J.fullPivLu().solve(F);
            if (dx.allFinite()) x -= dx;
        }
        out.push_back(x);
    }
    return out;
}

/// Combinatorial arrangement over a constraint list (indices are constraint positions).
struct Arrangement {
    std::vector<Vertex> vertices;
    std::vector<Edge> edges;
    std::vector<std::vector<HalfEdge>> halfEdges; // per constraint
    std::vector<bool> fullFacet;                  // per constraint: whole sphere is a facet
    bool degenerate = false;
    std::string degeneracy;

    bool hasFacet(std::size_t i) const { return fullFacet[i] || !halfEdges[i].empty(); }
};

inline Arrangement arrange(const std::vector<Sphere3> &cons, const BuildOptions &opt) {
    const int M = int(cons.size());
    const double eps = opt.strict ? opt.epsGeom : 0.0;
    Arrangement out;
    out.halfEdges.assign(M, {});
    out.fullFacet.assign(M, false);

    auto flag = [&](const std::string &why) {
        if (opt.strict) throw GeometryError(ErrorKind::Degenerate, why);
        out.degenerate = true;
        if (out.degeneracy.empty()) out.degeneracy = why;
    };

    std::vector<std::optional<Circle>> circles(M * M);
    for (int i = 0; i < M; ++i)
        for (int j = i + 1; j < M; ++j) circles[i * M + j] = intersectionCircle(cons[i], cons[j]);

    // membership of x in all constraints except those listed; returns max signed distance
    auto maxOutside = [&](const Vec3 &x, std::initializer_list<int> skip, double stopAbove, double &minAbs) {
        double worst = -std::numeric_limits<double>::infinity();
        minAbs = std::numeric_limits<double>::infinity();
        for (int l = 0; l < M; ++l) {
            if (std::find(skip.begin(), skip.end(), l) != skip.end()) continue;
            const double sd = cons[l].signedDistance(x);
            worst = std::max(worst, sd);
            minAbs = std::min(minAbs, std::abs(sd));
            if (worst > stopAbove) break;
        }
        return worst;
    };

    // vertices
    std::map<std::pair<int, int>, std::vector<std::pair<double, int>>> onCircle;
    for (int i = 0; i < M; ++i)
        for (int j = i + 1; j < M; ++j) {
            if (!circles[i * M + j]) continue;
            for (int k = j + 1; k < M; ++k) {
                if (!circles[i * M + k] || !circles[j * M + k]) continue;
                const auto pts = triplePoints(cons[i], cons[j], cons[k]);
                std::vector<Vec3> accepted;
                for (const auto &x : pts) {
                    double minAbs;
                    const double worst = maxOutside(x, {i, j, k}, eps, minAbs);
                    if (worst > eps) continue;
                    if (eps > 0 && minAbs <= eps) {
                        flag("quadruple point");
                        if (worst > 0) continue;
                    }
                    accepted.push_back(x);
                }
                if (pts.size() == 2 && accepted.size() >= 1 && (pts[0] - pts[1]).norm() <= std::max(eps, 1e-13)) {
                    flag("three spheres nearly tangent at a vertex");
                    if (accepted.size() == 2) accepted.pop_back();
                }
                for (const auto &x : accepted) {
                    Vertex v;
                    v.point = x;
                    v.facets = {i, j, k};
                    for (int q = 0; q < 3; ++q) v.outerNormals[q] = cons[v.facets[q]].outerNormal(x);
                    if (v.outerNormals[0].dot(v.outerNormals[1].cross(v.outerNormals[2])) < 0) {
                        std::swap(v.facets[1], v.facets[2]);
                        std::swap(v.outerNormals[1], v.outerNormals[2]);
                    }
                    const int id = int(out.vertices.size());
                    out.vertices.push_back(v);
                    onCircle[{i, j}].push_back({circles[i * M + j]->angleOf(x), id});
                    onCircle[{i, k}].push_back({circles[i * M + k]->angleOf(x), id});
                    onCircle[{j, k}].push_back({circles[j * M + k]->angleOf(x), id});
                }
            }
        }

    // edges
    for (int i = 0; i < M; ++i)
        for (int j = i + 1; j < M; ++j) {
            const auto &circ = circles[i * M + j];
            if (!circ) continue;
            auto it = onCircle.find({i, j});
            const double cosb = cons[i].inner(cons[j]);
            auto checkAngle = [&]() {
                if (eps > 0 && (1.0 - std::abs(cosb)) < eps) flag("tangent spheres along an edge");
            };
            if (it == onCircle.end()) {
                double minAbs;
                const double worst = maxOutside(circ->point(0.0), {i, j}, 0.0, minAbs);
                if (worst <= 0.0) {
                    checkAngle();
                    Edge e;
                    e.facets = {i, j};
                    e.circle = *circ;
                    e.fullCircle = true;
                    const int id = int(out.edges.size());
                    out.edges.push_back(e);
                    out.halfEdges[i].push_back({id, true});
                    out.halfEdges[j].push_back({id, false});
                }
                continue;
            }
            auto verts = it->second;
            std::sort(verts.begin(), verts.end());
            if (verts.size() % 2 != 0) flag("odd number of vertices on an edge circle");
            const std::size_t q = verts.size();
            for (std::size_t s = 0; s < q; ++s) {
                const double p0 = verts[s].first;
                double p1 = verts[(s + 1) % q].first;
                if (s + 1 == q) p1 += 2.0 * std::numbers::pi;
                if (q == 1) p1 = p0 + 2.0 * std::numbers::pi;
                double minAbs;
                const double worst = maxOutside(circ->point(0.5 * (p0 + p1)), {i, j}, 0.0, minAbs);
                if (worst > 0.0) continue;
                checkAngle();
                Edge e;
                e.facets = {i, j};
                e.circle = *circ;
                e.vertices = {verts[s].second, verts[(s + 1) % q].second};
                e.phi0 = p0;
                e.phi1 = p1;
                const int id = int(out.edges.size());
                out.edges.push_back(e);
                out.halfEdges[i].push_back({id, true});
                out.halfEdges[j].push_back({id, false});
            }
        }

    // full facets
    for (int i = 0; i < M; ++i) {
        if (!out.halfEdges[i].empty()) continue;
        double minAbs;
        const double worst = maxOutside(cons[i].nearestPointToOrigin(), {i}, 0.0, minAbs);
        if (worst <= 0.0) out.fullFacet[i] = true;
    }
    return out;
}

/// Canonical ordering of balls (lexicographic on inversive coefficients).
inline std::vector<std::size_t> canonicalOrder(const std::vector<Sphere3> &balls) {
    std::vector<std::size_t> idx(balls.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    auto key = [&](std::size_t i) {
        const auto &b = balls[i];
        return std::make_tuple(b.a(), b.b()[0], b.b()[1], b.b()[2], b.e(), i);
    };
    std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return key(x) < key(y); });
    return idx;
}

inline std::vector<std::vector<HalfEdge>> assembleLoops(const std::vector<HalfEdge> &hes, const std::vector<Edge> &edges,
                                                        bool strict) {
    std::vector<std::vector<HalfEdge>> loops;
    std::map<int, std::size_t> byStart;
    std::vector<bool> used(hes.size(), false);
    auto startOf = [&](const HalfEdge &h) {
        const auto &e = edges[h.edge];
        return h.forward ? e.vertices[0] : e.vertices[1];
    };
    auto endOf = [&](const HalfEdge &h) {
        const auto &e = edges[h.edge];
        return h.forward ? e.vertices[1] : e.vertices[0];
    };
    for (std::size_t i = 0; i < hes.size(); ++i) {
        if (edges[hes[i].edge].fullCircle) {
            loops.push_back({hes[i]});
            used[i] = true;
        } else {
            byStart[startOf(hes[i])] = i;
        }
    }
    for (std::size_t i = 0; i < hes.size(); ++i) {
        if (used[i]) continue;
        std::vector<HalfEdge> loop;
        std::size_t cur = i;
        while (!used[cur]) {
            used[cur] = true;
            loop.push_back(hes[cur]);
            auto it = byStart.find(endOf(hes[cur]));
            if (it == byStart.end()) {
                if (strict) throw GeometryError(ErrorKind::Degenerate, "open facet boundary");
                break;
            }
            cur = it->second;
        }
        loops.push_back(std::move(loop));
    }
    return loops;
}

} // namespace detail

/// Intersection of the given λ-balls with full combinatorics. Throws EmptyBody,
/// NonCompact or Degenerate (see BuildOptions).
inline LambdaPolyhedron buildPolyhedron(Curvature c, double lambda, const std::vector<Sphere3> &input,
                                        const BuildOptions &opt = {}) {
    if (input.empty()) throw GeometryError(ErrorKind::InvalidArgument, "no balls");
    for (const auto &b : input) {
        if (!(b.curvature() == c)) throw GeometryError(ErrorKind::InvalidArgument, "ball curvature differs from body");
        if (c.flat() && !(b.a() > 0)) throw GeometryError(ErrorKind::NonCompact, "unbounded ball in flat space");
    }
    const auto order = detail::canonicalOrder(input);
    std::vector<Sphere3> cons;
    std::vector<std::size_t> src;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto &b = input[order[k]];
        if (!cons.empty() && cons.back() == b) continue; // exact duplicate
        cons.push_back(b);
        src.push_back(order[k]);
    }
    const std::size_t nBalls = cons.size();
    if (!c.flat()) cons.push_back(detail::clipSphere(c));

    const auto arr = detail::arrange(cons, opt);
    if (!c.flat() && arr.hasFacet(nBalls))
        throw GeometryError(ErrorKind::NonCompact, "body reaches the boundary of the chart region");

    LambdaPolyhedron K;
    K.c = c;
    K.lambda = lambda;
    std::vector<int> newIndex(cons.size(), -1);
    for (std::size_t i = 0; i < nBalls; ++i) {
        if (arr.hasFacet(i)) {
            newIndex[i] = int(K.balls.size());
            K.balls.push_back(cons[i]);
            K.sourceIndex.push_back(src[i]);
        } else {
            K.pruned.push_back(src[i]);
        }
    }
    std::sort(K.pruned.begin(), K.pruned.end());
    if (K.balls.empty()) throw GeometryError(ErrorKind::EmptyBody, "intersection of balls is empty");

    K.vertices = arr.vertices;
    for (auto &v : K.vertices)
        for (auto &f : v.facets) f = newIndex[f];
    K.edges = arr.edges;
    for (auto &e : K.edges)
        for (auto &f : e.facets) f = newIndex[f];
    for (std::size_t i = 0; i < nBalls; ++i) {
        if (newIndex[i] < 0) continue;
        Facet f;
        f.ball = newIndex[i];
        if (!arr.fullFacet[i]) f.loops = detail::assembleLoops(arr.halfEdges[i], K.edges, opt.strict);
        K.facets.push_back(std::move(f));
    }

    // witness interior point
    std::vector<Vec3> pts;
    for (const auto &v : K.vertices) pts.push_back(v.point);
    for (const auto &e : K.edges) {
        pts.push_back(e.midpoint());
        if (e.fullCircle) pts.push_back(e.circle.center);
    }
    if (pts.empty()) {
        const auto &b = K.balls.front();
        if (!b.isPlane()) pts.push_back(b.b() / b.a());
    }
    auto depth = [&](const Vec3 &x) {
        double d = std::numeric_limits<double>::infinity();
        for (const auto &b : K.balls) d = std::min(d, -b.signedDistance(x));
        if (!c.flat()) d = std::min(d, -cons.back().signedDistance(x));
        return d;
    };
    Vec3 best = Vec3::Zero();
    double bestDepth = -std::numeric_limits<double>::infinity();
    if (!pts.empty()) {
        Vec3 avg = Vec3::Zero();
        for (const auto &p : pts) avg += p;
        avg /= double(pts.size());
        bestDepth = depth(avg);
        best = avg;
        if (!(bestDepth > 0))
            for (std::size_t i = 0; i < pts.size(); ++i)
                for (std::size_t j = i + 1; j < pts.size(); ++j) {
                    const Vec3 m = 0.5 * (pts[i] + pts[j]);
                    const double d = depth(m);
                    if (d > bestDepth) {
                        bestDepth = d;
                        best = m;
                    }
                }
    }
    if (!(bestDepth > 0)) {
        if (opt.strict) throw GeometryError(ErrorKind::Degenerate, "body has no interior witness");
    }
    K.witness = best;
    return K;
}

/// Retries buildPolyhedron with λ-preserving jitter of size `jitter` on Degenerate.
inline LambdaPolyhedron buildPolyhedronPerturbed(Curvature c, double lambda, std::vector<Sphere3> balls,
                                                 std::uint64_t seed, int maxRetries = 5, double jitter = 1e-7,
                                                 const BuildOptions &opt = {}) {
    CounterRng rng(seed, 0x5045525455524245ull);
    for (int attempt = 0;; ++attempt) {
        try {
            return buildPolyhedron(c, lambda, balls, opt);
        } catch (const GeometryError &err) {
            if (err.kind() != ErrorKind::Degenerate || attempt >= maxRetries) throw;
        }
        for (auto &b : balls) {
            Vec3 p = b.nearestPointToOrigin();
            Vec3 n = -(b.a() * p - b.b());
            for (int i = 0; i < 3; ++i) {
                p[i] += jitter * rng.normal();
                n[i] += jitter * rng.normal();
            }
            b = sphereThrough<3>(c, b.signedCurvature(), p, n);
        }
    }
}

/// Quasi-uniform unit directions: Fibonacci lattice, randomly rotated and jittered.
inline std::vector<Vec3> jitteredDirections(CounterRng &rng, int m) {
    std::vector<Vec3> dirs;
    Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    q.normalize();
    const Eigen::Matrix3d rot = q.toRotationMatrix();
    if (m == 2) {
        const Vec3 u = rot.col(2);
        return {u, -u};
    }
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    const double jit = 0.15 / std::sqrt(double(m));
    for (int k = 0; k < m; ++k) {
        const double z = 1.0 - (2.0 * k + 1.0) / m;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        Vec3 u(r * std::cos(k * golden), r * std::sin(k * golden), z);
        for (int i = 0; i < 3; ++i) u[i] += jit * rng.normal();
        dirs.push_back(rot * u.normalized());
    }
    return dirs;
}

/// Supporting λ-balls of the geodesic balls B(o, rho[i]) in the given directions.
inline std::vector<Sphere3> supportingBalls(Curvature c, double lambda, const std::vector<Vec3> &dirs,
                                            const std::vector<double> &rho) {
    const Chart<3> chart(c);
    std::vector<Sphere3> balls;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        const Vec3 p = chart.geodesicPointDir(Vec3::Zero(), dirs[i], rho[i]);
        balls.push_back(sphereThrough<3>(c, lambda, p, -dirs[i]));
    }
    return balls;
}

/// Intersection of m supporting λ-balls of B(o, rho0). With spread > 0 the i-th ball
/// supports B(o, rho0·(1 + spread·U_i)) instead, so the inscribed ball is not shared
/// by every facet; the body still contains B(o, rho0).
inline LambdaPolyhedron randomPolyhedron(std::uint64_t seed, Curvature c, double lambda, int m, double rho0,
                                         double spread = 0.0, int maxRetries = 5) {
    if (m < 1) throw GeometryError(ErrorKind::InvalidArgument, "need at least one ball");
    if (!(rho0 > 0)) throw GeometryError(ErrorKind::InvalidArgument, "rho0 must be positive");
    const double kc = c.scale();
    const bool compactBalls = c.value() >= 0 || lambda > kc;
    const double rhoMax = rho0 * (1.0 + std::max(0.0, spread));
    if (compactBalls && !(rhoMax < geodesicRadius(c, lambda)))
        throw GeometryError(ErrorKind::InvalidArgument, "rho0 exceeds the lambda-ball radius");
    for (int attempt = 0;; ++attempt) {
        CounterRng rng(seed, std::uint64_t(attempt));
        const auto dirs = jitteredDirections(rng, m);
        std::vector<double> rho(dirs.size(), rho0);
        if (spread > 0)
            for (auto &r : rho) r = rho0 * (1.0 + spread * rng.uniform());
        const auto balls = supportingBalls(c, lambda, dirs, rho);
        try {
            return buildPolyhedron(c, lambda, balls);
        } catch (const GeometryError &err) {
            if (err.kind() != ErrorKind::Degenerate || attempt >= maxRetries) throw;
        }
    }
}

struct ConvexityReport {
    std::size_t samples = 0;
    std::size_t violations = 0;
    double maxViolation = 0.0; // largest Euclidean depth outside a supporting λ-ball
};

/// Samples boundary points (facets and edges), erects the supporting λ-sphere of curvature
/// K.lambda at each, and checks that vertices and boundary samples lie in its ball.
inline ConvexityReport validateLambdaConvexity(const LambdaPolyhedron &K, int nSamples, std::uint64_t seed = 1,
                                               double tol = 1e-9) {
    CounterRng rng(seed, 0x434f4e564558ull);
    const double lam = K.lambda;
    std::vector<std::pair<Vec3, Vec3>> probes; // point, inward direction
    std::vector<Vec3> checkPts;
    for (const auto &v : K.vertices) checkPts.push_back(v.point);

    // facet samples: rejection on each facet's sphere
    auto facetSamples = [&](std::size_t f, int count) {
        const auto &b = K.balls[f];
        std::vector<Vec3> out;
        if (b.isPlane()) return out;
        const Vec3 C = b.b() / b.a();
        const double R = 1.0 / std::abs(b.a());
        for (int tries = 0; tries < 200 * count && int(out.size()) < count; ++tries) {
            Vec3 u(rng.normal(), rng.normal(), rng.normal());
            const Vec3 x = C + R * u.normalized();
            bool in = true;
            for (std::size_t l = 0; l < K.balls.size() && in; ++l)
                if (l != f && K.balls[l].signedDistance(x) > 0) in = false;
            if (in) out.push_back(x);
        }
        return out;
    };
    const int perFacet = std::max(1, nSamples / (2 * int(std::max<std::size_t>(1, K.facets.size()))));
    for (std::size_t f = 0; f < K.facets.size(); ++f)
        for (const auto &x : facetSamples(f, perFacet)) {
            probes.push_back({x, -K.balls[f].outerNormal(x)});
            checkPts.push_back(x);
        }
    const int perEdge = K.edges.empty() ? 0 : std::max(1, nSamples / (2 * int(K.edges.size())));
    for (const auto &e : K.edges)
        for (int s = 0; s < perEdge; ++s) {
            const double phi = e.phi0 + (e.phi1 - e.phi0) * (s + 0.5) / perEdge;
            const Vec3 x = e.circle.point(phi);
            const Vec3 n0 = K.balls[e.facets[0]].outerNormal(x), n1 = K.balls[e.facets[1]].outerNormal(x);
            const double w = rng.uniform();
            probes.push_back({x, -(w * n0 + (1 - w) * n1)});
            checkPts.push_back(x);
        }

    ConvexityReport rep;
    for (const auto &[p, inward] : probes) {
        const Sphere3 S = sphereThrough<3>(K.c, lam, p, inward);
        ++rep.samples;
        double worst = 0.0;
        for (const auto &x : checkPts) worst = std::max(worst, S.signedDistance(x));
        if (worst > tol) ++rep.violations;
        rep.maxViolation = std::max(rep.maxViolation, worst);
    }
    return rep;
}

} // namespace umbilic
