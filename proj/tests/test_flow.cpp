#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace umbilic;

namespace {

LambdaPolyhedron body(double c, std::uint64_t seed, double lam = 1.5, int m = 8) {
    return randomPolyhedron(seed, Curvature(c), lam, m, 0.4 * geodesicRadius(Curvature(c), lam), 0.5);
}

} // namespace

TEST(Flow, BallAreaCurve) {
    for (double c : {-1.0, 0.0, 1.0}) {
        const Curvature cc(c);
        const double lam = 2.0, rho = geodesicRadius(cc, lam);
        const auto K = buildPolyhedron(cc, lam, {sphereThrough<3>(cc, lam, Vec3(0.1, 0, 0.1), Vec3(1, 1, 1))});
        for (double f : {0.1, 0.5, 0.9}) {
            const auto s = sampleAt(K, f * rho);
            EXPECT_NEAR(s.area, oracle::sphereArea(c, (1 - f) * rho), 1e-8 * s.area) << c << ' ' << f;
            EXPECT_NEAR(s.lambdaT, oracle::sphereLambda(c, (1 - f) * rho), 1e-9 * s.lambdaT);
        }
        EXPECT_NEAR(inradius(K), rho, 1e-9);
    }
}

TEST(Flow, ErosionMatchesDistanceToBoundary) {
    CounterRng rng(31);
    for (double c : {-1.0, 0.0, 1.0}) {
        const auto K = body(c, 2);
        const Chart<3> chart{Curvature(c)};
        const double r = inradius(K), t = 0.4 * r;
        const auto Kt = innerParallel(K, t);
        const auto box = boundingBox(K);
        int tested = 0;
        while (tested < 15) {
            Vec3 x;
            for (int k = 0; k < 3; ++k) x[k] = rng.uniform(box.lo[k], box.hi[k]);
            if (!K.contains(x)) continue;
            double d = std::numeric_limits<double>::infinity();
            for (const auto &b : K.balls) d = std::min(d, oracle::distanceToSphere(chart, b, x, rng));
            if (std::abs(d - t) < 1e-5) continue;
            EXPECT_EQ(Kt.contains(x), d > t) << c << ' ' << d << ' ' << t;
            ++tested;
        }
    }
}

TEST(Flow, InnerParallelTracksSources) {
    const auto K = body(-1.0, 3, 1.5, 12);
    const auto Kt = innerParallel(K, 0.3 * inradius(K));
    for (auto s : Kt.sourceIndex) EXPECT_LT(s, 12u);
    EXPECT_NEAR(Kt.lambda, lambdaAt(K.c, K.lambda, 0.3 * inradius(K)), 1e-12);
    EXPECT_THROW(innerParallel(K, 2 * inradius(K)), GeometryError);
}

TEST(Flow, CoareaMatchesDivergenceVolume) {
    for (double c : {-1.0, 0.0, 1.0}) {
        const auto K = body(c, 4, 1.5, 6);
        const double v = volume(K);
        EXPECT_NEAR(coareaVolume(K), v, 1e-6 * v) << c;
    }
}

TEST(Flow, VariationFormula) {
    for (double c : {-1.0, 0.0, 1.0}) {
        const auto K = body(c, 5, 1.5, 9);
        const double r = inradius(K);
        int checked = 0;
        for (double f : {0.05, 0.2, 0.35, 0.5, 0.65, 0.8}) {
            try {
                const auto rec = variationCheck(K, f * r, 1e-4);
                EXPECT_LT(std::abs(rec.residual), 1e-3 * std::abs(rec.formula)) << c << ' ' << f;
                ++checked;
            } catch (const GeometryError &e) {
                EXPECT_EQ(e.kind(), ErrorKind::EventNearby);
            }
        }
        EXPECT_GE(checked, 4);
        EXPECT_NO_THROW(variationCheck(K, 0.0, 1e-4));
    }
}

TEST(Flow, EventsChangeTheSignature) {
    const auto K = body(0.0, 6, 1.0, 14);
    const auto curve = surfaceAreaCurve(K, 32);
    ASSERT_FALSE(curve.events.empty());
    for (const auto &ev : curve.events) {
        if (ev.description == "body vanishes") continue;
        EXPECT_FALSE(signatureAt(K, ev.t - 1e-8) == signatureAt(K, ev.t + 1e-8)) << ev.t << ' ' << ev.description;
    }
    for (std::size_t i = 1; i < curve.samples.size(); ++i) {
        EXPECT_LT(curve.samples[i].t, curve.inradius);
        EXPECT_LE(curve.samples[i].area, curve.samples[i - 1].area); // the flow shrinks the surface
    }
}

TEST(Flow, LensStaysALens) {
    for (double c : {-1.0, 0.0, 1.0}) {
        const auto L = makeLens(Curvature(c), 1.5, 0.4, Vec3(0.05, 0, 0), Vec3(0, 1, 1));
        for (double t : {0.1, 0.25}) {
            const auto Lt = innerParallel(L.body, t);
            EXPECT_EQ(Lt.facets.size(), 2u);
            ASSERT_EQ(Lt.edges.size(), 1u);
            EXPECT_TRUE(Lt.edges[0].fullCircle);
            EXPECT_NEAR(inradius(Lt), 0.4 - t, 1e-8) << c << ' ' << t;
        }
        EXPECT_NEAR(inradius(L.body), 0.4, 1e-9);
    }
}

TEST(Flow, DominanceOverMatchedLens) {
    for (double c : {-1.0, 0.0, 1.0}) {
        const auto K = body(c, 7, 1.5, 10);
        const auto Kc = surfaceAreaCurve(K, 32);
        const auto L = lensForArea(Curvature(c), 1.5, Kc.samples.front().area);
        std::vector<double> times;
        for (const auto &s : Kc.samples) times.push_back(s.t);
        const auto rep = curveDominanceCheck(Kc, sampleCurve(L.body, times));
        EXPECT_FALSE(rep.firstViolation.has_value());
        EXPECT_GT(rep.points, 30u);
        EXPECT_GE(rep.minRelative, -1e-9);
    }
}
