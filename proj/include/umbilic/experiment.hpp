#pragma once

// Batch experiments: random bodies against area-matched lenses (3D) and random polygons
// against perimeter-matched 2-gons (2D). Records and tallies are pure functions of the
// configuration; timings are kept apart so the summary is reproducible byte for byte.

#include "report.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <map>
#include <mutex>
#include <thread>

namespace umbilic {

// ---------------------------------------------------------------- configuration

struct ExperimentConfig {
    std::vector<double> curvatures{-1.0, 0.0, 1.0};
    std::vector<double> lambdas{1.5};
    int bodies = 10;      // random bodies per (c, λ)
    int lensInputs = 0;   // exact lenses per (c, λ)
    int facetsMin = 4, facetsMax = 16;
    double rho0 = 0.4;    // fraction of the λ-ball radius; absolute when λ-balls are not compact
    double spread = 0.5;
    std::uint64_t seed = 1;
    double tolQuad = 1e-10, tolFlow = 1e-10, tolRoot = 1e-12;
    long mcSamples = 0;
    bool coarea = false;
    int flowGrid = 64;    // 0 skips the f_K ≥ f_L comparison
    int threads = 0;      // 0: hardware concurrency
    std::string out, records, timing;

    friend bool operator==(const ExperimentConfig &, const ExperimentConfig &) = default;
};

namespace detail {

inline std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<double> parseList(const std::string &v, const std::string &key) {
    std::vector<double> out;
    std::stringstream ss(v);
    for (std::string item; std::getline(ss, item, ',');) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(parseNumber(item, 0));
        } catch (const GeometryError &) {
            throw GeometryError(ErrorKind::Parse, "bad value for " + key + ": " + v);
        }
    }
    if (out.empty()) throw GeometryError(ErrorKind::Parse, "empty list for " + key);
    return out;
}

inline std::string joinList(const std::vector<double> &xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + fmt17(xs[i]);
    return s;
}

inline long long parseInt(const std::string &v, const std::string &key) {
    long long x = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) throw GeometryError(ErrorKind::Parse, "bad integer for " + key + ": " + v);
    return x;
}

inline double parseReal(const std::string &v, const std::string &key) {
    try {
        return parseNumber(v, 0);
    } catch (const GeometryError &) {
        throw GeometryError(ErrorKind::Parse, "bad number for " + key + ": " + v);
    }
}

inline bool parseBool(const std::string &v, const std::string &key) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw GeometryError(ErrorKind::Parse, "bad boolean for " + key + ": " + v);
}

} // namespace detail

/// Sets one key. Keys use underscores; dashes are accepted too.
inline void applyConfigKey(ExperimentConfig &cfg, std::string key, const std::string &rawValue) {
    using namespace detail;
    std::replace(key.begin(), key.end(), '-', '_');
    const std::string v = trim(rawValue);
    if (key == "curvatures" || key == "c") cfg.curvatures = parseList(v, key);
    else if (key == "lambdas" || key == "lambda") cfg.lambdas = parseList(v, key);
    else if (key == "bodies") cfg.bodies = int(parseInt(v, key));
    else if (key == "lens_inputs") cfg.lensInputs = int(parseInt(v, key));
    else if (key == "facets_min") cfg.facetsMin = int(parseInt(v, key));
    else if (key == "facets_max") cfg.facetsMax = int(parseInt(v, key));
    else if (key == "rho0") cfg.rho0 = parseReal(v, key);
    else if (key == "spread") cfg.spread = parseReal(v, key);
    else if (key == "seed") cfg.seed = std::uint64_t(parseInt(v, key));
    else if (key == "tol_quad") cfg.tolQuad = parseReal(v, key);
    else if (key == "tol_flow") cfg.tolFlow = parseReal(v, key);
    else if (key == "tol_root") cfg.tolRoot = parseReal(v, key);
    else if (key == "mc_samples") cfg.mcSamples = long(parseInt(v, key));
    else if (key == "coarea") cfg.coarea = parseBool(v, key);
    else if (key == "flow_grid") cfg.flowGrid = int(parseInt(v, key));
    else if (key == "threads") cfg.threads = int(parseInt(v, key));
    else if (key == "out") cfg.out = v;
    else if (key == "records") cfg.records = v;
    else if (key == "timing") cfg.timing = v;
    else throw GeometryError(ErrorKind::Parse, "unknown config key: " + key);
}

inline void validateConfig(const ExperimentConfig &cfg) {
    auto bad = [](const std::string &m) { throw GeometryError(ErrorKind::InvalidArgument, m); };
    if (cfg.bodies < 0 || cfg.lensInputs < 0 || cfg.bodies + cfg.lensInputs < 1) bad("need at least one body");
    if (cfg.facetsMin < 1 || cfg.facetsMax < cfg.facetsMin) bad("bad facet range");
    if (!(cfg.rho0 > 0) || cfg.spread < 0) bad("rho0 must be positive and spread non-negative");
    if (!(cfg.tolQuad > 0) || !(cfg.tolFlow > 0) || !(cfg.tolRoot > 0)) bad("tolerances must be positive");
    if (cfg.mcSamples < 0 || cfg.flowGrid < 0 || cfg.threads < 0) bad("counts must be non-negative");
    for (double l : cfg.lambdas)
        if (!(l > 0)) bad("lambda must be positive");
}

inline ExperimentConfig parseConfig(std::istream &in, ExperimentConfig cfg = {}) {
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw GeometryError(ErrorKind::Parse, "line " + std::to_string(lineNo) + ": expected key=value");
        applyConfigKey(cfg, detail::trim(t.substr(0, eq)), t.substr(eq + 1));
    }
    return cfg;
}

inline ExperimentConfig readConfig(const std::string &path, ExperimentConfig cfg = {}) {
    std::ifstream in(path);
    if (!in) throw GeometryError(ErrorKind::Parse, "cannot open " + path);
    return parseConfig(in, std::move(cfg));
}

inline std::string configString(const ExperimentConfig &cfg) {
    using detail::fmt17;
    std::ostringstream os;
    os << "curvatures=" << detail::joinList(cfg.curvatures) << '\n'
       << "lambdas=" << detail::joinList(cfg.lambdas) << '\n'
       << "bodies=" << cfg.bodies << '\n'
       << "lens_inputs=" << cfg.lensInputs << '\n'
       << "facets_min=" << cfg.facetsMin << '\n'
       << "facets_max=" << cfg.facetsMax << '\n'
       << "rho0=" << fmt17(cfg.rho0) << '\n'
       << "spread=" << fmt17(cfg.spread) << '\n'
       << "seed=" << cfg.seed << '\n'
       << "tol_quad=" << fmt17(cfg.tolQuad) << '\n'
       << "tol_flow=" << fmt17(cfg.tolFlow) << '\n'
       << "tol_root=" << fmt17(cfg.tolRoot) << '\n'
       << "mc_samples=" << cfg.mcSamples << '\n'
       << "coarea=" << (cfg.coarea ? 1 : 0) << '\n'
       << "flow_grid=" << cfg.flowGrid << '\n'
       << "threads=" << cfg.threads << '\n'
       << "out=" << cfg.out << '\n'
       << "records=" << cfg.records << '\n'
       << "timing=" << cfg.timing << '\n';
    return os.str();
}

/// Settings that determine results; paths and thread count are left out.
inline Json configJson(const ExperimentConfig &cfg) {
    return Json{{"curvatures", cfg.curvatures}, {"lambdas", cfg.lambdas},   {"bodies", cfg.bodies},
                {"lens_inputs", cfg.lensInputs}, {"facets_min", cfg.facetsMin}, {"facets_max", cfg.facetsMax},
                {"rho0", cfg.rho0},             {"spread", cfg.spread},     {"seed", cfg.seed},
                {"tol_quad", cfg.tolQuad},      {"tol_flow", cfg.tolFlow},  {"tol_root", cfg.tolRoot},
                {"mc_samples", cfg.mcSamples},  {"coarea", cfg.coarea},     {"flow_grid", cfg.flowGrid}};
}

// ---------------------------------------------------------------- workers

inline unsigned workerCount(int requested) {
    unsigned n = requested > 0 ? unsigned(requested) : std::max(1u, std::thread::hardware_concurrency());
    if (const char *env = std::getenv("UMBILIC_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap > 0) n = std::min<unsigned>(n, unsigned(cap));
    }
    return std::max(1u, n);
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Exceptions escaping fn abort the run.
template <class F>
void parallelFor(std::size_t n, unsigned workers, F &&fn) {
    workers = std::max(1u, std::min<unsigned>(workers, unsigned(std::max<std::size_t>(n, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto &t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------- thresholds

namespace thresholds {
inline constexpr double gbRel = 1e-6;        // × 4π (3D), × 2π (2D)
inline constexpr double volumeRel = 1e-6;    // |K| ≥ |L| − tol·|L|; lens equality
inline constexpr double inradiusAbs = 1e-8;
inline constexpr double dominanceRel = 1e-6;
inline constexpr double edgeSumAbs = 1e-6;
inline constexpr double mcRel = 0.01;        // or 3 standard errors
inline constexpr double angleAbs = 1e-8;
inline constexpr double area2dAbs = 1e-8;
inline constexpr double equality2dAbs = 1e-6;
} // namespace thresholds

inline std::uint64_t bodySeed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x9E3779B97F4A7C15ull));
}

inline std::string statusOf(const std::string &stage, const GeometryError &err) {
    return stage + ":" + toString(err.kind());
}

// ---------------------------------------------------------------- 3D

struct BodyRecord {
    std::size_t index = 0;
    double c = 0, lambda = 0;
    bool lensInput = false;
    int mInput = 0;
    std::string status = "ok";
    std::size_t nFacets = 0, nEdges = 0, nVertices = 0;
    static constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    double area = nan, volume = nan, volumeMC = nan, volumeSE = nan, volumeCoarea = nan, gbResidual = nan;
    double lensW = nan, lensArea = nan, lensVolume = nan, gap = nan, gapRel = nan;
    double rK = nan, rL = nan, edgeSum = nan, lensEdgeTerm = nan;
    double domMinRel = nan;
    std::size_t domPoints = 0;
    bool domViolation = false;
    double seconds = 0;
};

struct Tally3 {
    std::size_t bodies = 0, ok = 0, failed = 0;
    std::size_t gb = 0, volume = 0, lensEquality = 0, inradius = 0, inradiusEqualityNonLens = 0, lensInradius = 0,
                dominance = 0, edgeSum = 0, coarea = 0;
    double maxGbResidual = 0, minGapRel = std::numeric_limits<double>::infinity(),
           minInradiusGap = std::numeric_limits<double>::infinity(), minDominanceRel = std::numeric_limits<double>::infinity(),
           maxEdgeExcess = -std::numeric_limits<double>::infinity(), maxLensGapRel = 0;
    std::size_t violations() const {
        return gb + volume + lensEquality + inradius + inradiusEqualityNonLens + lensInradius + dominance + edgeSum + coarea;
    }
};

struct ExperimentSummary {
    ExperimentConfig config;
    std::vector<BodyRecord> records;
    Tally3 total;
    std::map<double, Tally3> byCurvature;
    double seconds = 0;
};

inline std::size_t recordCount(const ExperimentConfig &cfg) {
    return cfg.curvatures.size() * cfg.lambdas.size() * std::size_t(cfg.bodies + cfg.lensInputs);
}

inline BodyRecord runBody(const ExperimentConfig &cfg, std::size_t index) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t perPair = std::size_t(cfg.bodies + cfg.lensInputs);
    const std::size_t pair = index / perPair, local = index % perPair;
    BodyRecord r;
    r.index = index;
    r.c = cfg.curvatures[pair / cfg.lambdas.size()];
    r.lambda = cfg.lambdas[pair % cfg.lambdas.size()];
    r.lensInput = local >= std::size_t(cfg.bodies);
    const Curvature c(r.c);
    const double lam = r.lambda;
    const std::uint64_t seed = bodySeed(cfg.seed, index);
    CounterRng rng(seed, 0x424f4459ull);
    const bool compact = lam * lam + c.value() > 0;
    std::string stage = "build";
    try {
        LambdaPolyhedron K;
        if (r.lensInput) {
            r.mInput = 2;
            const double wLim = compact ? geodesicRadius(c, lam) : std::min(2.0, lensWidthLimit(c, lam));
            const double w = wLim * rng.uniform(0.1, 0.9);
            Vec3 axis(rng.normal(), rng.normal(), rng.normal());
            Vec3 dir(rng.normal(), rng.normal(), rng.normal());
            const Vec3 center = Chart<3>(c).geodesicPointDir(Vec3::Zero(), dir, rng.uniform(0.0, 0.3) * wLim);
            K = buildPolyhedron(c, lam, lensBalls(c, lam, w, center, axis));
        } else {
            r.mInput = int(rng.integer(cfg.facetsMin, cfg.facetsMax));
            const double rho = compact ? cfg.rho0 * geodesicRadius(c, lam) : cfg.rho0;
            K = randomPolyhedron(seed, c, lam, r.mInput, rho, cfg.spread);
        }
        r.nFacets = K.facets.size();
        r.nEdges = K.edges.size();
        r.nVertices = K.vertices.size();
        stage = "measure";
        const GBReport gb = gaussBonnetReport(K, cfg.tolQuad);
        r.area = gb.area;
        r.gbResidual = gb.residual;
        r.volume = volume(K, cfg.tolQuad);
        r.edgeSum = edgeSum(K, cfg.tolQuad);
        if (cfg.mcSamples > 0) {
            const auto mc = volumeMC(K, std::size_t(cfg.mcSamples), seed);
            r.volumeMC = mc.value;
            r.volumeSE = mc.standardError;
        }
        stage = "inradius";
        r.rK = inradius(K, cfg.tolFlow);
        if (cfg.coarea) {
            stage = "coarea";
            r.volumeCoarea = coareaVolume(K);
        }
        stage = "lens";
        const Lens L = lensForArea(c, lam, r.area, cfg.tolRoot);
        r.lensW = L.halfWidth;
        r.lensArea = L.area;
        r.lensVolume = L.volume;
        r.lensEdgeTerm = L.edgeTerm();
        r.rL = L.inradius();
        r.gap = r.volume - L.volume;
        r.gapRel = r.gap / L.volume;
        if (cfg.flowGrid > 0) {
            stage = "flow";
            const FlowCurve Kc = surfaceAreaCurve(K, cfg.flowGrid, cfg.tolQuad);
            std::vector<double> times;
            for (const auto &s : Kc.samples) times.push_back(s.t);
            const FlowCurve Lc = sampleCurve(L.body, times, cfg.tolQuad);
            const auto dom = curveDominanceCheck(Kc, Lc, thresholds::dominanceRel);
            r.domMinRel = dom.minRelative;
            r.domPoints = dom.points;
            r.domViolation = dom.firstViolation.has_value();
        }
    } catch (const GeometryError &err) {
        r.status = statusOf(stage, err);
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

inline void tally(Tally3 &t, const BodyRecord &r) {
    using namespace thresholds;
    ++t.bodies;
    if (r.status != "ok") {
        ++t.failed;
        return;
    }
    ++t.ok;
    const double fourPi = 4.0 * std::numbers::pi;
    t.maxGbResidual = std::max(t.maxGbResidual, std::abs(r.gbResidual));
    if (!(std::abs(r.gbResidual) < gbRel * fourPi)) ++t.gb;
    t.minGapRel = std::min(t.minGapRel, r.gapRel);
    if (r.gap < -volumeRel * r.lensVolume) ++t.volume;
    const double rGap = r.rK - r.rL;
    t.minInradiusGap = std::min(t.minInradiusGap, rGap);
    if (rGap < -inradiusAbs) ++t.inradius;
    if (r.lensInput) {
        t.maxLensGapRel = std::max(t.maxLensGapRel, std::abs(r.gapRel));
        if (!(std::abs(r.gap) < volumeRel * r.lensVolume)) ++t.lensEquality;
        if (!(std::abs(rGap) < inradiusAbs)) ++t.lensInradius;
    } else if (rGap < inradiusAbs) {
        ++t.inradiusEqualityNonLens;
    }
    if (r.domViolation) ++t.dominance;
    if (!std::isnan(r.domMinRel)) t.minDominanceRel = std::min(t.minDominanceRel, r.domMinRel);
    t.maxEdgeExcess = std::max(t.maxEdgeExcess, r.edgeSum - r.lensEdgeTerm);
    if (r.edgeSum > r.lensEdgeTerm + edgeSumAbs) ++t.edgeSum;
    if (!std::isnan(r.volumeCoarea) && !std::isnan(r.volumeMC)) {
        if (std::abs(r.volumeCoarea - r.volumeMC) > std::max(3.0 * r.volumeSE, mcRel * r.volumeMC)) ++t.coarea;
    }
}

inline ExperimentSummary runExperiment(const ExperimentConfig &cfg) {
    validateConfig(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentSummary s;
    s.config = cfg;
    s.records.resize(recordCount(cfg));
    parallelFor(s.records.size(), workerCount(cfg.threads), [&](std::size_t i) { s.records[i] = runBody(cfg, i); });
    for (const auto &r : s.records) {
        tally(s.total, r);
        tally(s.byCurvature[r.c], r);
    }
    s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return s;
}

namespace detail {
inline Json finiteOrNull(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }
} // namespace detail

inline Json tallyJson(const Tally3 &t) {
    using detail::finiteOrNull;
    return Json{{"bodies", t.bodies},
                {"ok", t.ok},
                {"failed", t.failed},
                {"violations",
                 Json{{"gauss_bonnet", t.gb},
                      {"volume", t.volume},
                      {"lens_equality", t.lensEquality},
                      {"inradius", t.inradius},
                      {"inradius_equality_non_lens", t.inradiusEqualityNonLens},
                      {"lens_inradius", t.lensInradius},
                      {"dominance", t.dominance},
                      {"edge_sum", t.edgeSum},
                      {"coarea_mc", t.coarea},
                      {"total", t.violations()}}},
                {"max_gb_residual", t.maxGbResidual},
                {"min_volume_gap_rel", finiteOrNull(t.minGapRel)},
                {"max_lens_gap_rel", t.maxLensGapRel},
                {"min_inradius_gap", finiteOrNull(t.minInradiusGap)},
                {"min_dominance_rel", finiteOrNull(t.minDominanceRel)},
                {"max_edge_sum_excess", finiteOrNull(t.maxEdgeExcess)}};
}

inline Json summaryJson(const ExperimentSummary &s) {
    Json j;
    j["config"] = configJson(s.config);
    j["total"] = tallyJson(s.total);
    Json by = Json::array();
    for (const auto &[c, t] : s.byCurvature) {
        Json e = tallyJson(t);
        e["c"] = c;
        by.push_back(e);
    }
    j["by_curvature"] = by;
    Json failures = Json::array();
    for (const auto &r : s.records)
        if (r.status != "ok") failures.push_back(Json{{"index", r.index}, {"c", r.c}, {"lambda", r.lambda}, {"status", r.status}});
    j["failures"] = failures;
    return j;
}

inline void writeRecordsCsv(std::ostream &out, const std::vector<BodyRecord> &recs) {
    auto f = [](double x) { return std::isnan(x) ? std::string() : detail::fmt17(x); };
    out << "index,c,lambda,lens_input,m_input,status,n_facets,n_edges,n_vertices,area,volume,volume_mc,volume_se,"
           "volume_coarea,gb_residual,lens_w,lens_area,lens_volume,volume_gap,volume_gap_rel,r_K,r_L,edge_sum,"
           "lens_edge_term,dominance_min_rel,dominance_points,dominance_violation\n";
    for (const auto &r : recs)
        out << r.index << ',' << f(r.c) << ',' << f(r.lambda) << ',' << int(r.lensInput) << ',' << r.mInput << ',' << r.status
            << ',' << r.nFacets << ',' << r.nEdges << ',' << r.nVertices << ',' << f(r.area) << ',' << f(r.volume) << ','
            << f(r.volumeMC) << ',' << f(r.volumeSE) << ',' << f(r.volumeCoarea) << ',' << f(r.gbResidual) << ',' << f(r.lensW)
            << ',' << f(r.lensArea) << ',' << f(r.lensVolume) << ',' << f(r.gap) << ',' << f(r.gapRel) << ',' << f(r.rK) << ','
            << f(r.rL) << ',' << f(r.edgeSum) << ',' << f(r.lensEdgeTerm) << ',' << f(r.domMinRel) << ',' << r.domPoints << ','
            << int(r.domViolation) << '\n';
}

template <class Rec>
inline void writeTimingCsv(std::ostream &out, const std::vector<Rec> &recs, double total) {
    out << "index,seconds\n";
    for (const auto &r : recs) out << r.index << ',' << r.seconds << '\n';
    out << "total," << total << '\n';
}

// ---------------------------------------------------------------- 2D

struct PolygonRecord {
    std::size_t index = 0;
    double lambda = 0;
    bool lensInput = false;
    int mInput = 0;
    std::string status = "ok";
    std::size_t m = 0;
    static constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    double perimeter = nan, area = nan, gb2Residual = nan, lensW = nan, lensArea = nan, betaStar = nan, gap = nan;
    double maxAngleExcess = nan, tanSum = nan, tanBound = nan, rK = nan, rL = nan;
    std::string cond = "", certificate = "";
    double seconds = 0;
};

struct Tally2 {
    std::size_t bodies = 0, ok = 0, failed = 0;
    std::size_t gb2 = 0, angles = 0, area = 0, lensEquality = 0, equalityNonLens = 0, inradius = 0, cond = 0, certificate = 0;
    std::size_t condEvaluated = 0;
    double maxGb2Residual = 0, minGap = std::numeric_limits<double>::infinity(),
           maxAngleExcess = -std::numeric_limits<double>::infinity(), minInradiusGap = std::numeric_limits<double>::infinity();
    std::size_t violations() const { return gb2 + angles + area + lensEquality + equalityNonLens + inradius + cond + certificate; }
};

struct PolygonSummary {
    ExperimentConfig config;
    std::vector<PolygonRecord> records;
    Tally2 total;
    double seconds = 0;
};

inline PolygonRecord runPolygon(const ExperimentConfig &cfg, std::size_t index) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t perLambda = std::size_t(cfg.bodies + cfg.lensInputs);
    PolygonRecord r;
    r.index = index;
    r.lambda = cfg.lambdas[index / perLambda];
    r.lensInput = index % perLambda >= std::size_t(cfg.bodies);
    const Curvature c(-1.0);
    const double lam = r.lambda;
    const std::uint64_t seed = bodySeed(cfg.seed ^ 0x3244ull, index);
    CounterRng rng(seed, 0x504f4c59ull);
    const bool compact = lam > 1.0;
    std::string stage = "build";
    try {
        LambdaPolygon P;
        if (r.lensInput) {
            r.mInput = 2;
            const double wLim = compact ? geodesicRadius(c, lam) : std::min(2.0, lens2dWidthLimit(c, lam));
            const double w = wLim * rng.uniform(0.1, 0.9);
            const double phi = 2.0 * std::numbers::pi * rng.uniform();
            const Vec2 center = Chart<2>(c).geodesicPointDir(Vec2::Zero(), Vec2(rng.normal(), rng.normal()), rng.uniform(0.0, 0.3) * wLim);
            P = buildPolygon(c, lam, lens2dDiscs(c, lam, w, center, Vec2(std::cos(phi), std::sin(phi))));
        } else {
            r.mInput = int(rng.integer(std::max(2, cfg.facetsMin), std::max(2, cfg.facetsMax)));
            const double rho = compact ? cfg.rho0 * geodesicRadius(c, lam) : cfg.rho0;
            P = randomPolygon(seed, c, lam, r.mInput, rho, cfg.spread);
        }
        r.m = P.m();
        r.perimeter = P.perimeter;
        r.area = P.area;
        r.gb2Residual = gb2Report(P).residual;
        stage = "lens";
        const auto rep = reverseIsoCheck2d(P, false);
        r.lensW = rep.lens.halfWidth;
        r.lensArea = rep.lens.area;
        r.betaStar = rep.lens.betaStar;
        r.gap = rep.gap;
        r.maxAngleExcess = rep.angles.maxExcess;
        r.tanSum = rep.tanSumK;
        r.tanBound = rep.tanBound;
        r.rL = rep.lens.inradius();
        r.cond = rep.angles.condHolds ? (*rep.angles.condHolds ? "holds" : "fails") : "hypothesis not met";
        r.certificate = rep.certificateHolds ? (*rep.certificateHolds ? "holds" : "fails") : "hypothesis not met";
        stage = "inradius";
        r.rK = inradius(P, cfg.tolFlow);
    } catch (const GeometryError &err) {
        r.status = statusOf(stage, err);
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

inline void tally(Tally2 &t, const PolygonRecord &r) {
    using namespace thresholds;
    ++t.bodies;
    if (r.status != "ok") {
        ++t.failed;
        return;
    }
    ++t.ok;
    t.maxGb2Residual = std::max(t.maxGb2Residual, std::abs(r.gb2Residual));
    if (!(std::abs(r.gb2Residual) < gbRel * 2.0 * std::numbers::pi)) ++t.gb2;
    t.maxAngleExcess = std::max(t.maxAngleExcess, r.maxAngleExcess);
    if (r.maxAngleExcess > angleAbs) ++t.angles;
    t.minGap = std::min(t.minGap, r.gap);
    if (r.gap < -area2dAbs) ++t.area;
    if (r.m == 2) {
        if (!(std::abs(r.gap) < equality2dAbs)) ++t.lensEquality;
    } else if (r.gap < equality2dAbs) {
        ++t.equalityNonLens;
    }
    t.minInradiusGap = std::min(t.minInradiusGap, r.rK - r.rL);
    if (r.rK < r.rL - inradiusAbs) ++t.inradius;
    if (r.cond != "hypothesis not met") ++t.condEvaluated;
    if (r.cond == "fails") ++t.cond;
    if (r.certificate == "fails") ++t.certificate;
}

inline PolygonSummary runPolygonExperiment(const ExperimentConfig &cfg) {
    validateConfig(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    PolygonSummary s;
    s.config = cfg;
    s.records.resize(cfg.lambdas.size() * std::size_t(cfg.bodies + cfg.lensInputs));
    parallelFor(s.records.size(), workerCount(cfg.threads), [&](std::size_t i) { s.records[i] = runPolygon(cfg, i); });
    for (const auto &r : s.records) tally(s.total, r);
    s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return s;
}

inline Json summaryJson(const PolygonSummary &s) {
    using detail::finiteOrNull;
    const Tally2 &t = s.total;
    Json j;
    Json cfg = configJson(s.config);
    cfg.erase("curvatures");
    cfg["c"] = -1.0;
    j["config"] = cfg;
    j["total"] = Json{{"polygons", t.bodies},
                      {"ok", t.ok},
                      {"failed", t.failed},
                      {"violations",
                       Json{{"gauss_bonnet", t.gb2},
                            {"angles", t.angles},
                            {"area", t.area},
                            {"lens_equality", t.lensEquality},
                            {"equality_non_lens", t.equalityNonLens},
                            {"inradius", t.inradius},
                            {"cond", t.cond},
                            {"tan_certificate", t.certificate},
                            {"total", t.violations()}}},
                      {"cond_evaluated", t.condEvaluated},
                      {"max_gb2_residual", t.maxGb2Residual},
                      {"min_area_gap", finiteOrNull(t.minGap)},
                      {"max_angle_excess", finiteOrNull(t.maxAngleExcess)},
                      {"min_inradius_gap", finiteOrNull(t.minInradiusGap)}};
    Json failures = Json::array();
    for (const auto &r : s.records)
        if (r.status != "ok") failures.push_back(Json{{"index", r.index}, {"lambda", r.lambda}, {"status", r.status}});
    j["failures"] = failures;
    return j;
}

inline void writePolygonCsv(std::ostream &out, const std::vector<PolygonRecord> &recs) {
    auto f = [](double x) { return std::isnan(x) ? std::string() : detail::fmt17(x); };
    out << "index,lambda,lens_input,m_input,status,m,perimeter,area,gb2_residual,lens_w,lens_area,beta_star,area_gap,"
           "max_angle_excess,tan_sum,tan_bound,r_K,r_L,cond,tan_certificate\n";
    for (const auto &r : recs)
        out << r.index << ',' << f(r.lambda) << ',' << int(r.lensInput) << ',' << r.mInput << ',' << r.status << ',' << r.m << ','
            << f(r.perimeter) << ',' << f(r.area) << ',' << f(r.gb2Residual) << ',' << f(r.lensW) << ',' << f(r.lensArea) << ','
            << f(r.betaStar) << ',' << f(r.gap) << ',' << f(r.maxAngleExcess) << ',' << f(r.tanSum) << ',' << f(r.tanBound) << ','
            << f(r.rK) << ',' << f(r.rL) << ',' << r.cond << ',' << r.certificate << '\n';
}

} // namespace umbilic
