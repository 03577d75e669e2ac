#include "oracles.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace umbilic;

namespace {

const Curvature H(-1.0);
constexpr double kPi = std::numbers::pi;

LambdaPolygon polygon(std::uint64_t seed, double lam = 1.5, int m = 7) {
    return randomPolygon(seed, H, lam, m, 0.4 * geodesicRadius(H, lam), 0.5);
}

} // namespace

TEST(Iso2d, CircleClosedForms) {
    for (double R : {0.3, 1.0, 2.0}) {
        const double lam = 1.0 / std::tanh(R);
        const auto P = buildPolygon(H, lam, {sphereThrough<2>(H, lam, Vec2(0.2, -0.1), Vec2(1, 1))});
        EXPECT_EQ(P.m(), 0u);
        EXPECT_NEAR(P.perimeter, 2 * kPi * std::sinh(R), 1e-9 * P.perimeter);
        EXPECT_NEAR(P.area, 2 * kPi * (std::cosh(R) - 1), 1e-9 * P.area);
        EXPECT_NEAR(inradius(P), R, 1e-9);
    }
}

TEST(Iso2d, FlatChartUsesClipCircle) {
    const Curvature E(0.0);
    const auto P = buildPolygon(E, 1.0, {UmbilicSphere<2>(E, EuclideanSphere<2>{Vec2(0.5, 0), 1.0}, +1)});
    EXPECT_NEAR(P.perimeter, 2 * kPi, 1e-10);
    EXPECT_NEAR(P.area, kPi, 1e-10);
    EXPECT_THROW(buildPolygon(Curvature(1.0), 1.0, P.discs), GeometryError);
}

TEST(Iso2d, GaussBonnet) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto P = polygon(seed, 1.2 + 0.1 * double(seed % 5), 3 + int(seed % 9));
        const auto r = gb2Report(P);
        EXPECT_LT(std::abs(r.residual), 1e-10) << seed;
        EXPECT_NEAR(r.lhs, 2 * kPi, 1e-12);
        for (double b : P.angles) {
            EXPECT_GT(b, 0.0);
            EXPECT_LT(b, kPi);
        }
    }
}

TEST(Iso2d, StokesAreaMatchesPolarQuadrature) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto P = polygon(seed, 2.0, 3 + int(seed));
        EXPECT_NEAR(P.area, polygonAreaDirect(P), 1e-10 * P.area);
    }
}

TEST(Iso2d, SideLengthsByArcQuadrature) {
    const auto P = polygon(4, 1.5, 6);
    for (const auto &s : P.sides) {
        const auto &d = P.discs[s.disc];
        const Vec2 C = d.b() / d.a();
        const double R = 1.0 / std::abs(d.a());
        const double a0 = std::atan2((s.start - C).y(), (s.start - C).x());
        double a1 = std::atan2((s.end - C).y(), (s.end - C).x());
        while (a1 <= a0) a1 += 2 * kPi;
        const int n = 20000;
        double sum = 0;
        for (int i = 0; i <= n; ++i) {
            const double a = a0 + (a1 - a0) * i / n;
            const Vec2 x = C + R * Vec2(std::cos(a), std::sin(a));
            sum += (i == 0 || i == n ? 1 : i % 2 ? 4 : 2) * 2.0 / (1.0 - x.squaredNorm()) * R;
        }
        EXPECT_NEAR(s.length, sum * (a1 - a0) / n / 3, 1e-9);
    }
}

TEST(Iso2d, TwoGonIsSymmetric) {
    const auto L = makeLens2d(H, 1.5, 0.4, Vec2(0.1, 0.2), Vec2(1, 1));
    ASSERT_EQ(L.polygon.m(), 2u);
    EXPECT_NEAR(L.polygon.angles[0], L.polygon.angles[1], 1e-12);
    EXPECT_NEAR(L.polygon.sides[0].length, L.polygon.sides[1].length, 1e-10);
    EXPECT_NEAR(inradius(L.polygon), 0.4, 1e-9);
    const auto M = lens2dForPerimeter(H, 1.5, L.perimeter);
    EXPECT_NEAR(M.halfWidth, 0.4, 1e-9);
}

TEST(Iso2d, TwoGonAngleDecreasesWithPerimeter) {
    double prevP = 0, prevB = kPi;
    const double R = geodesicRadius(H, 2.0);
    for (double f = 0.05; f < 0.96; f += 0.1) {
        const auto L = makeLens2d(H, 2.0, f * R);
        EXPECT_GT(L.perimeter, prevP);
        EXPECT_LT(L.betaStar, prevB);
        prevP = L.perimeter, prevB = L.betaStar;
    }
}

TEST(Iso2d, RegularPolygonAnglesVanish) {
    // many equally spaced discs supporting one circle: the corners flatten out
    double prev = kPi;
    for (int m : {4, 8, 16, 32, 64}) {
        std::vector<double> ang(m);
        for (int i = 0; i < m; ++i) ang[i] = 2 * kPi * i / m;
        const auto P = buildPolygon(H, 2.0, supportingDiscs(H, 2.0, ang, std::vector<double>(m, 0.3)));
        ASSERT_EQ(P.m(), std::size_t(m));
        const double b = *std::max_element(P.angles.begin(), P.angles.end());
        EXPECT_LT(b, prev);
        prev = b;
    }
    EXPECT_LT(prev, 0.05);
}

TEST(Iso2d, FlowOfCircle) {
    const double R = 1.0, lam = 1.0 / std::tanh(R);
    const auto P = buildPolygon(H, lam, {sphereThrough<2>(H, lam, Vec2(0.1, 0.1), Vec2(0, 1))});
    const auto curve = flow2d(P, 16);
    for (const auto &s : curve.samples) EXPECT_NEAR(s.area, 2 * kPi * std::sinh(R - s.t), 1e-8);
    EXPECT_NEAR(coareaArea(P), 2 * kPi * (std::cosh(R) - 1), 1e-7);
}

TEST(Iso2d, CoareaMatchesStokes) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto P = polygon(seed, 1.5, 4 + int(seed));
        EXPECT_NEAR(coareaArea(P), P.area, 1e-7 * P.area) << seed;
    }
}

TEST(Iso2d, VariationFormula) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto P = polygon(seed, 1.5, 8);
        const double r = inradius(P);
        int checked = 0;
        for (double f : {0.1, 0.3, 0.5, 0.7, 0.85}) {
            try {
                const auto rec = variationCheck2d(P, f * r, 1e-4);
                EXPECT_LT(std::abs(rec.residual), 1e-3 * std::abs(rec.formula));
                ++checked;
            } catch (const GeometryError &e) {
                EXPECT_EQ(e.kind(), ErrorKind::EventNearby);
            }
        }
        EXPECT_GE(checked, 3);
    }
}

TEST(Iso2d, ReverseInequalityAndAngleBound) {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const auto P = polygon(seed, 1.3 + 0.05 * double(seed % 7), 3 + int(seed % 8));
        const auto rep = reverseIsoCheck2d(P);
        EXPECT_GT(rep.gap, 1e-6) << seed;
        EXPECT_LE(rep.angles.maxExcess, 1e-8);
        EXPECT_GE(rep.inradiusK, rep.inradiusL - 1e-8);
        if (rep.certificateHolds) EXPECT_TRUE(*rep.certificateHolds);
    }
}

TEST(Iso2d, GapShrinksTowardsTwoGon) {
    // a 2-gon with a shallow third side cut off: the gap tends to zero with the cut
    const auto L = makeLens2d(H, 1.5, 0.5);
    const Chart<2> chart(H);
    const Vec2 v = L.polygon.vertices[0];
    const double dv = chart.distance(Vec2::Zero(), v);
    double prev = std::numeric_limits<double>::infinity();
    for (double depth : {0.2, 0.1, 0.05, 0.02}) {
        auto discs = L.polygon.discs;
        discs.push_back(sphereThrough<2>(H, 1.5, chart.geodesicPointDir(Vec2::Zero(), v, dv - depth), -v));
        LambdaPolygon P;
        try {
            P = buildPolygon(H, 1.5, discs);
        } catch (const GeometryError &) {
            continue;
        }
        const auto rep = reverseIsoCheck2d(P, false);
        EXPECT_GT(rep.gap, 0.0);
        EXPECT_LT(rep.gap, prev);
        prev = rep.gap;
    }
}

TEST(Iso2d, SpecRoundTrip) {
    const auto P = polygon(9, 1.5, 6);
    const std::string text = bodySpecString(P);
    std::istringstream in(text);
    const auto spec = parseBodySpec<2>(in);
    const auto Q = buildPolygon(spec.c, spec.lambda, spec.balls);
    EXPECT_EQ(bodySpecString(Q), text);
    EXPECT_DOUBLE_EQ(Q.perimeter, P.perimeter);
}
