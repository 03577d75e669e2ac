#pragma once

// Inner parallel bodies K_t = { x : B(x, t) ⊆ K }, built ball by ball: K_t is the
// intersection of the eroded balls, a λ(t)-convex polyhedron.

#include "measure.hpp"

#include <functional>

namespace umbilic {

inline constexpr double kEventResolution = 1e-9;

/// Erosion of K at depth t (strict build; falls back to tolerant classification when
/// the eroded arrangement is degenerate). Throws EmptyBody past the inradius.
inline LambdaPolyhedron innerParallel(const LambdaPolyhedron &K, double t, bool strict = true) {
    if (t < 0) throw GeometryError(ErrorKind::InvalidArgument, "negative erosion depth");
    if (t == 0) return K;
    double lamT;
    try {
        lamT = lambdaAt(K.c, K.lambda, t);
    } catch (const GeometryError &err) {
        if (err.kind() == ErrorKind::BlowUp) throw GeometryError(ErrorKind::EmptyBody, "body vanished");
        throw;
    }
    std::vector<Sphere3> eroded;
    eroded.reserve(K.balls.size());
    for (const auto &b : K.balls) {
        try {
            eroded.push_back(erode(b, t));
        } catch (const GeometryError &err) {
            if (err.kind() == ErrorKind::EmptyErosion || err.kind() == ErrorKind::Degenerate)
                throw GeometryError(ErrorKind::EmptyBody, "body vanished");
            throw;
        }
    }
    auto build = [&](const BuildOptions &opt) {
        try {
            return buildPolyhedron(K.c, lamT, eroded, opt);
        } catch (const GeometryError &err) {
            // the chart clip is part of K, so a facet on it past t > 0 means the body is gone there
            if (err.kind() == ErrorKind::NonCompact) throw GeometryError(ErrorKind::EmptyBody, "body vanished");
            throw;
        }
    };
    LambdaPolyhedron Kt;
    if (strict) {
        try {
            Kt = build(BuildOptions{});
        } catch (const GeometryError &err) {
            if (err.kind() != ErrorKind::Degenerate) throw;
            Kt = build(BuildOptions{1e-9, false});
        }
    } else {
        Kt = build(BuildOptions{1e-9, false});
    }
    for (auto &s : Kt.sourceIndex) s = K.sourceIndex[s];
    for (auto &s : Kt.pruned) s = K.sourceIndex[s];
    Kt.pruned.insert(Kt.pruned.end(), K.pruned.begin(), K.pruned.end());
    std::sort(Kt.pruned.begin(), Kt.pruned.end());
    return Kt;
}

/// Combinatorial type: surviving source balls, edges by source pair, vertex count.
struct Signature {
    std::vector<std::size_t> facets;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::size_t vertices = 0;
    bool empty = false;
    friend bool operator==(const Signature &, const Signature &) = default;
};

inline Signature signatureOf(const LambdaPolyhedron &K) {
    Signature s;
    s.facets = K.sourceIndex;
    std::sort(s.facets.begin(), s.facets.end());
    for (const auto &e : K.edges) {
        auto p = std::minmax(K.sourceIndex[e.facets[0]], K.sourceIndex[e.facets[1]]);
        s.edges.emplace_back(p.first, p.second);
    }
    std::sort(s.edges.begin(), s.edges.end());
    s.vertices = K.vertices.size();
    return s;
}

inline Signature signatureAt(const LambdaPolyhedron &K, double t) {
    try {
        return signatureOf(innerParallel(K, t, false));
    } catch (const GeometryError &err) {
        if (err.kind() != ErrorKind::EmptyBody) throw;
        Signature s;
        s.empty = true;
        return s;
    }
}

inline bool emptyAt(const LambdaPolyhedron &K, double t) {
    try {
        innerParallel(K, t, false);
        return false;
    } catch (const GeometryError &err) {
        if (err.kind() == ErrorKind::EmptyBody) return true;
        if (err.kind() == ErrorKind::Degenerate) return false;
        throw;
    }
}

/// Vanishing time of the inner parallel flow, by bisection on emptiness.
inline double inradius(const LambdaPolyhedron &K, double tol = 1e-10) {
    double lo = 0.0, hi = 0.0;
    const double cv = K.c.value(), lam = K.lambda;
    if (lam > 0 && lam * lam + cv > 0) {
        hi = geodesicRadius(K.c, lam);
    } else {
        hi = 1.0;
        while (!emptyAt(K, hi)) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e3) throw GeometryError(ErrorKind::NonCompact, "inner parallel flow does not vanish");
        }
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (emptyAt(K, mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

struct FlowSample {
    double t = 0, lambdaT = 0, area = 0, edgeSum = 0;
    std::size_t nFacets = 0, nEdges = 0, nVertices = 0;
};

struct FlowEvent {
    double t;
    std::string description;
};

struct FlowCurve {
    std::vector<FlowSample> samples;
    std::vector<FlowEvent> events;
    double inradius = 0;
};

inline FlowSample sampleAt(const LambdaPolyhedron &K, double t, double tol = kDefaultTol) {
    FlowSample s;
    s.t = t;
    s.lambdaT = lambdaAt(K.c, K.lambda, t);
    LambdaPolyhedron Kt;
    try {
        Kt = innerParallel(K, t);
    } catch (const GeometryError &err) {
        if (err.kind() != ErrorKind::EmptyBody) throw;
        return s;
    }
    s.area = surfaceArea(Kt, tol);
    s.edgeSum = edgeSum(Kt, tol);
    s.nFacets = Kt.facets.size();
    s.nEdges = Kt.edges.size();
    s.nVertices = Kt.vertices.size();
    return s;
}

inline std::string describeChange(const Signature &a, const Signature &b) {
    if (b.empty) return "body vanishes";
    std::string out;
    std::vector<std::size_t> gone;
    std::set_difference(a.facets.begin(), a.facets.end(), b.facets.begin(), b.facets.end(), std::back_inserter(gone));
    for (auto f : gone) out += (out.empty() ? "" : "; ") + std::string("facet ") + std::to_string(f) + " disappears";
    std::vector<std::pair<std::size_t, std::size_t>> edgesGone, edgesNew;
    std::set_difference(a.edges.begin(), a.edges.end(), b.edges.begin(), b.edges.end(), std::back_inserter(edgesGone));
    std::set_difference(b.edges.begin(), b.edges.end(), a.edges.begin(), a.edges.end(), std::back_inserter(edgesNew));
    for (auto [i, j] : edgesGone)
        out += (out.empty() ? "" : "; ") + std::string("edge ") + std::to_string(i) + "-" + std::to_string(j) + " disappears";
    for (auto [i, j] : edgesNew)
        out += (out.empty() ? "" : "; ") + std::string("edge ") + std::to_string(i) + "-" + std::to_string(j) + " appears";
    if (out.empty()) out = "vertex count " + std::to_string(a.vertices) + " -> " + std::to_string(b.vertices);
    return out;
}

namespace detail {
inline void bisectEvents(const LambdaPolyhedron &K, double t0, const Signature &s0, double t1, const Signature &s1,
                         std::vector<FlowEvent> &out) {
    if (s0 == s1) return;
    if (t1 - t0 <= kEventResolution) {
        out.push_back({0.5 * (t0 + t1), describeChange(s0, s1)});
        return;
    }
    const double tm = 0.5 * (t0 + t1);
    const Signature sm = signatureAt(K, tm);
    bisectEvents(K, t0, s0, tm, sm, out);
    bisectEvents(K, tm, sm, t1, s1, out);
}
} // namespace detail

/// Combinatorial events on [0, r), located between grid points of `grid` (ascending).
inline std::vector<FlowEvent> locateEvents(const LambdaPolyhedron &K, const std::vector<double> &grid) {
    std::vector<FlowEvent> events;
    if (grid.empty()) return events;
    Signature prev = signatureAt(K, grid.front());
    for (std::size_t i = 1; i < grid.size(); ++i) {
        Signature cur = signatureAt(K, grid[i]);
        detail::bisectEvents(K, grid[i - 1], prev, grid[i], cur, events);
        prev = std::move(cur);
    }
    return events;
}

inline std::vector<double> uniformGrid(double r, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = r * double(i) / double(n);
    return g;
}

/// f_K on a uniform grid of [0, r(K)) plus refinements around events.
inline FlowCurve surfaceAreaCurve(const LambdaPolyhedron &K, int nGrid = 64, double tol = kDefaultTol) {
    FlowCurve curve;
    curve.inradius = inradius(K);
    const double r = curve.inradius;
    std::vector<double> grid = uniformGrid(r, nGrid);
    std::vector<double> probe = grid;
    probe.push_back(r * (1.0 - 1e-6));
    curve.events = locateEvents(K, probe);
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
        FlowSample s = sampleAt(K, t, tol);
        if (s.nFacets == 0) break;
        curve.samples.push_back(s);
    }
    return curve;
}

/// f_L sampled at the given times (zero area past the vanishing time).
inline FlowCurve sampleCurve(const LambdaPolyhedron &K, const std::vector<double> &times, double tol = kDefaultTol) {
    FlowCurve curve;
    for (double t : times) curve.samples.push_back(sampleAt(K, t, tol));
    return curve;
}

/// |K| = ∫₀^{r(K)} |∂K_t| dt, integrated piecewise between events.
inline double coareaVolume(const LambdaPolyhedron &K, double tol = 1e-8, int nGrid = 64) {
    const double r = inradius(K);
    std::vector<double> probe = uniformGrid(r, nGrid);
    probe.push_back(r * (1.0 - 1e-6));
    std::vector<double> cuts{0.0};
    for (const auto &ev : locateEvents(K, probe))
        if (ev.description != "body vanishes") cuts.push_back(ev.t);
    cuts.push_back(r);
    auto f = [&](double t) {
        try {
            return surfaceArea(innerParallel(K, t), 1e-12);
        } catch (const GeometryError &err) {
            if (err.kind() == ErrorKind::EmptyBody) return 0.0;
            throw;
        }
    };
    std::vector<double> parts;
    const double scale = surfaceArea(K) * r;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        parts.push_back(integrate(f, cuts[i], cuts[i + 1], tol, tol * scale * 1e-2, 12));
    return pairwiseSum(parts);
}

struct VariationRecord {
    double fd = 0, formula = 0, residual = 0;
};

/// Central difference of f_K at t0 (second-order one-sided at t0 = 0) against
/// −2λ(t₀)|∂K_{t₀}| − 2 Σ ℓ_E tan(β_E/2).
inline VariationRecord variationCheck(const LambdaPolyhedron &K, double t0, double h) {
    if (!(h > 0) || t0 < 0) throw GeometryError(ErrorKind::InvalidArgument, "bad variation stencil");
    const bool oneSided = t0 < h;
    std::vector<double> ts = oneSided ? std::vector<double>{t0, t0 + h, t0 + 2 * h} : std::vector<double>{t0 - h, t0, t0 + h};
    std::vector<LambdaPolyhedron> bodies;
    std::vector<Signature> sigs;
    for (double t : ts) {
        bodies.push_back(innerParallel(K, t));
        sigs.push_back(signatureOf(bodies.back()));
    }
    if (!(sigs[0] == sigs[1] && sigs[1] == sigs[2]))
        throw GeometryError(ErrorKind::EventNearby, "combinatorial event inside the stencil");
    std::vector<double> f;
    for (const auto &B : bodies) f.push_back(surfaceArea(B, 1e-13));
    VariationRecord rec;
    rec.fd = oneSided ? (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h) : (f[2] - f[0]) / (2.0 * h);
    const auto &B0 = bodies[oneSided ? 0 : 1];
    const double a0 = f[oneSided ? 0 : 1];
    rec.formula = -2.0 * B0.lambda * a0 - 2.0 * edgeSum(B0, 1e-13);
    rec.residual = rec.fd - rec.formula;
    return rec;
}

struct DominanceReport {
    double minDifference = std::numeric_limits<double>::infinity();
    double minRelative = std::numeric_limits<double>::infinity();
    std::size_t points = 0;
    std::optional<double> firstViolation; // time of the first certified violation
};

/// min over the common grid of f_K − f_L; a violation is f_K < f_L − relTol·f_L.
inline DominanceReport curveDominanceCheck(const FlowCurve &Kc, const FlowCurve &Lc, double relTol = 1e-6) {
    DominanceReport rep;
    std::size_t j = 0;
    for (const auto &s : Kc.samples) {
        while (j < Lc.samples.size() && Lc.samples[j].t < s.t) ++j;
        if (j >= Lc.samples.size() || Lc.samples[j].t != s.t) continue;
        const double fk = s.area, fl = Lc.samples[j].area;
        ++rep.points;
        rep.minDifference = std::min(rep.minDifference, fk - fl);
        if (fl > 0) rep.minRelative = std::min(rep.minRelative, (fk - fl) / fl);
        if (!rep.firstViolation && fk < fl - relTol * fl) rep.firstViolation = s.t;
    }
    return rep;
}

} // namespace umbilic
