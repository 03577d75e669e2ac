#pragma once

// The `umbilic` command line. runCli returns the process exit code:
// 0 success, 2 build or parse failure, 3 invariant violated.

#include <umbilic/umbilic.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace umbilic::cli {

inline constexpr int kOk = 0, kBuildFailure = 2, kViolation = 3;

struct Io {
    std::ostream &out;
    std::ostream &err;
};

namespace detail {

// Writes to `path`, or to the fallback stream when the path is empty.
template <class F>
void emit(const std::string &path, std::ostream &fallback, F &&write) {
    if (path.empty()) {
        write(fallback);
        return;
    }
    std::ofstream f(path);
    if (!f) throw GeometryError(ErrorKind::Parse, "cannot write " + path);
    write(f);
}

struct BodyArgs {
    std::string spec;
    double c = 0.0, lambda = 1.5, rho0 = 0.4, spread = 0.5;
    std::uint64_t seed = 1;
    int facetsMin = 4, facetsMax = 16;

    void attach(CLI::App *app) {
        app->add_option("--spec", spec, "body-spec file");
        app->add_option("--c", c, "curvature");
        app->add_option("--lambda", lambda, "lambda");
        app->add_option("--seed", seed, "seed for a random body");
        app->add_option("--facets-min", facetsMin);
        app->add_option("--facets-max", facetsMax);
        app->add_option("--rho0", rho0, "inscribed radius as a fraction of the lambda-ball radius");
        app->add_option("--spread", spread, "relative spread of the supporting radii");
    }

    int randomCount() const {
        CounterRng rng(seed, 0x434c49ull);
        return int(rng.integer(facetsMin, std::max(facetsMin, facetsMax)));
    }

    double rho(Curvature cc) const {
        return lambda * lambda + cc.value() > 0 ? rho0 * geodesicRadius(cc, lambda) : rho0;
    }

    LambdaPolyhedron body3() const {
        if (!spec.empty()) {
            const auto s = readBodySpec<3>(spec);
            return buildPolyhedron(s.c, s.lambda, s.balls);
        }
        const Curvature cc(c);
        return randomPolyhedron(seed, cc, lambda, randomCount(), rho(cc), spread);
    }

    LambdaPolygon body2() const {
        if (!spec.empty()) {
            const auto s = readBodySpec<2>(spec);
            return buildPolygon(s.c, s.lambda, s.balls);
        }
        const Curvature cc(-1.0);
        return randomPolygon(seed, cc, lambda, std::max(2, randomCount()), rho(cc), spread);
    }
};

// Experiment flags; only those given on the command line override the config file.
struct ExperimentArgs {
    std::string config;
    std::map<std::string, std::string> values;
    std::vector<std::pair<std::string, CLI::Option *>> options;

    void attach(CLI::App *app) {
        app->add_option("--config", config, "key=value config file");
        for (const char *key : {"c", "lambda", "seed", "bodies", "facets-min", "facets-max", "rho0", "spread", "tol-quad",
                                "tol-flow", "tol-root", "lens-inputs", "mc-samples", "coarea", "flow-grid", "threads", "out",
                                "records", "timing"}) {
            auto *opt = app->add_option(std::string("--") + key, values[key]);
            options.emplace_back(key, opt);
        }
    }

    ExperimentConfig resolve(ExperimentConfig base) const {
        ExperimentConfig cfg = config.empty() ? base : readConfig(config, base);
        for (const auto &[key, opt] : options)
            if (opt->count() > 0) applyConfigKey(cfg, key, values.at(key));
        return cfg;
    }
};

} // namespace detail

inline int runCli(const std::vector<std::string> &args, Io io) {
    CLI::App app{"Gauss-Bonnet, inner parallel flow and reverse isoperimetric checks for lambda-convex bodies", "umbilic"};
    app.require_subcommand(1);

    // gb-check
    auto *gb = app.add_subcommand("gb-check", "Gauss-Bonnet report for one body");
    detail::BodyArgs gbBody;
    gbBody.attach(gb);
    long gbMc = 100000;
    double gbTol = kDefaultTol;
    std::string gbOut, gbSpecOut;
    gb->add_option("--mc-samples", gbMc, "Monte Carlo samples for volume_mc (0 to skip)");
    gb->add_option("--tol-quad", gbTol);
    gb->add_option("--out", gbOut, "JSON report path (default stdout)");
    gb->add_option("--spec-out", gbSpecOut, "write the body-spec of the built body");

    // flow
    auto *fl = app.add_subcommand("flow", "surface-area curve of the inner parallel flow");
    detail::BodyArgs flBody;
    flBody.attach(fl);
    int flGrid = 64;
    double flTolQuad = kDefaultTol, flTolFlow = 1e-10;
    std::string flOut, flEvents;
    fl->add_option("--grid", flGrid, "uniform grid points on [0, r)");
    fl->add_option("--tol-quad", flTolQuad);
    fl->add_option("--tol-flow", flTolFlow, "inradius bisection tolerance");
    fl->add_option("--out", flOut, "CSV path (default stdout)");
    fl->add_option("--events", flEvents, "events JSON path (default <out>.events.json)");
    bool flPlanar = false;
    fl->add_flag("--2d", flPlanar, "treat the body as a polygon");

    // lens-solve
    auto *ls = app.add_subcommand("lens-solve", "lens of given half-width or surface area");
    double lsC = 0.0, lsLambda = 1.5, lsArea = 0.0, lsWidth = 0.0, lsTol = 1e-12;
    std::string lsOut, lsSpecOut;
    ls->add_option("--c", lsC);
    ls->add_option("--lambda", lsLambda);
    auto *lsAreaOpt = ls->add_option("--area", lsArea, "target surface area");
    auto *lsWidthOpt = ls->add_option("--width", lsWidth, "half-width");
    lsAreaOpt->excludes(lsWidthOpt);
    ls->add_option("--tol-root", lsTol);
    ls->add_option("--out", lsOut);
    ls->add_option("--spec-out", lsSpecOut);

    // experiment
    auto *ex = app.add_subcommand("experiment", "batch of random bodies against area-matched lenses");
    detail::ExperimentArgs exArgs;
    exArgs.attach(ex);

    // polygon2d
    auto *pg = app.add_subcommand("polygon2d", "hyperbolic polygons against perimeter-matched 2-gons");
    detail::ExperimentArgs pgArgs;
    pgArgs.attach(pg);
    std::string pgSpec;
    pg->add_option("--spec", pgSpec, "check a single polygon from a 2D body-spec file");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp &) {
        io.out << app.help();
        return kOk;
    } catch (const CLI::ParseError &e) {
        io.err << "umbilic: " << e.what() << '\n';
        return kBuildFailure;
    }

    try {
        if (*gb) {
            LambdaPolyhedron K;
            try {
                K = gbBody.body3();
            } catch (const GeometryError &e) {
                io.err << "umbilic gb-check: " << e.what() << '\n';
                return kBuildFailure;
            }
            const auto rep = gaussBonnetReport(K, gbTol);
            std::optional<MCEstimate> mc;
            if (gbMc > 0) mc = volumeMC(K, std::size_t(gbMc), gbBody.seed);
            detail::emit(gbOut, io.out, [&](std::ostream &o) { o << bodyReportJson(K, rep, mc).dump(2) << '\n'; });
            if (!gbSpecOut.empty()) detail::emit(gbSpecOut, io.out, [&](std::ostream &o) { o << bodySpecString(K); });
            if (!(std::abs(rep.residual) < thresholds::gbRel * 4.0 * std::numbers::pi)) {
                io.err << "umbilic gb-check: residual " << rep.residual << " exceeds tolerance\n";
                return kViolation;
            }
            return kOk;
        }
        if (*fl) {
            FlowCurve curve;
            try {
                if (flPlanar) {
                    const auto P = flBody.body2();
                    curve = flow2d(P, flGrid);
                } else {
                    const auto K = flBody.body3();
                    curve = surfaceAreaCurve(K, flGrid, flTolQuad);
                }
            } catch (const GeometryError &e) {
                io.err << "umbilic flow: " << e.what() << '\n';
                return kBuildFailure;
            }
            detail::emit(flOut, io.out, [&](std::ostream &o) { writeFlowCsv(o, curve); });
            const std::string evPath = !flEvents.empty() ? flEvents : (flOut.empty() ? std::string() : flOut + ".events.json");
            if (!evPath.empty()) detail::emit(evPath, io.out, [&](std::ostream &o) { o << eventsJson(curve).dump(2) << '\n'; });
            return kOk;
        }
        if (*ls) {
            Lens L;
            const Curvature cc(lsC);
            try {
                if (lsWidthOpt->count() > 0) L = makeLens(cc, lsLambda, lsWidth);
                else if (lsAreaOpt->count() > 0) L = lensForArea(cc, lsLambda, lsArea, lsTol);
                else throw GeometryError(ErrorKind::InvalidArgument, "give --area or --width");
            } catch (const GeometryError &e) {
                io.err << "umbilic lens-solve: " << e.what() << '\n';
                return kBuildFailure;
            }
            detail::emit(lsOut, io.out, [&](std::ostream &o) { o << lensJson(L).dump(2) << '\n'; });
            if (!lsSpecOut.empty()) detail::emit(lsSpecOut, io.out, [&](std::ostream &o) { o << bodySpecString(L.body); });
            return kOk;
        }
        if (*ex) {
            ExperimentConfig cfg;
            try {
                cfg = exArgs.resolve(ExperimentConfig{});
                validateConfig(cfg);
            } catch (const GeometryError &e) {
                io.err << "umbilic experiment: " << e.what() << '\n';
                return kBuildFailure;
            }
            const auto s = runExperiment(cfg);
            detail::emit(cfg.out, io.out, [&](std::ostream &o) { o << summaryJson(s).dump(2) << '\n'; });
            const std::string recPath = !cfg.records.empty() ? cfg.records : (cfg.out.empty() ? std::string() : cfg.out + ".bodies.csv");
            if (!recPath.empty()) detail::emit(recPath, io.out, [&](std::ostream &o) { writeRecordsCsv(o, s.records); });
            if (!cfg.timing.empty()) detail::emit(cfg.timing, io.out, [&](std::ostream &o) { writeTimingCsv(o, s.records, s.seconds); });
            return s.total.violations() > 0 ? kViolation : kOk;
        }
        if (*pg) {
            if (!pgSpec.empty()) {
                LambdaPolygon P;
                try {
                    const auto spec = readBodySpec<2>(pgSpec);
                    P = buildPolygon(spec.c, spec.lambda, spec.balls);
                } catch (const GeometryError &e) {
                    io.err << "umbilic polygon2d: " << e.what() << '\n';
                    return kBuildFailure;
                }
                const auto rep = reverseIsoCheck2d(P);
                Json j = polygonJson(P);
                j["lens"] = Json{{"half_width", rep.lens.halfWidth}, {"beta_star", rep.lens.betaStar}, {"perimeter", rep.lens.perimeter},
                                 {"area", rep.lens.area}};
                j["area_gap"] = rep.gap;
                j["max_angle_excess"] = rep.angles.maxExcess;
                j["inradius"] = rep.inradiusK;
                j["lens_inradius"] = rep.inradiusL;
                std::string out;
                for (const auto &[k, o] : pgArgs.options)
                    if (k == "out" && o->count() > 0) out = pgArgs.values.at("out");
                detail::emit(out, io.out, [&](std::ostream &o) { o << j.dump(2) << '\n'; });
                const bool bad = !(std::abs(gb2Report(P).residual) < thresholds::gbRel * 2.0 * std::numbers::pi) ||
                                 rep.gap < -thresholds::area2dAbs || rep.angles.maxExcess > thresholds::angleAbs ||
                                 rep.inradiusK < rep.inradiusL - thresholds::inradiusAbs;
                return bad ? kViolation : kOk;
            }
            ExperimentConfig cfg;
            cfg.lambdas = {1.5};
            cfg.facetsMin = 3;
            cfg.facetsMax = 12;
            try {
                cfg = pgArgs.resolve(cfg);
                validateConfig(cfg);
            } catch (const GeometryError &e) {
                io.err << "umbilic polygon2d: " << e.what() << '\n';
                return kBuildFailure;
            }
            const auto s = runPolygonExperiment(cfg);
            detail::emit(cfg.out, io.out, [&](std::ostream &o) { o << summaryJson(s).dump(2) << '\n'; });
            const std::string recPath = !cfg.records.empty() ? cfg.records : (cfg.out.empty() ? std::string() : cfg.out + ".polygons.csv");
            if (!recPath.empty()) detail::emit(recPath, io.out, [&](std::ostream &o) { writePolygonCsv(o, s.records); });
            if (!cfg.timing.empty()) detail::emit(cfg.timing, io.out, [&](std::ostream &o) { writeTimingCsv(o, s.records, s.seconds); });
            return s.total.violations() > 0 ? kViolation : kOk;
        }
    } catch (const GeometryError &e) {
        io.err << "umbilic: " << e.what() << '\n';
        return kBuildFailure;
    }
    return kOk;
}

inline int runCli(int argc, char **argv, Io io) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return runCli(args, io);
}

} // namespace umbilic::cli
