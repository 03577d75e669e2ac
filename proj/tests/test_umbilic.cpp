#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace umbilic;

TEST(UmbilicSphere, CoefficientsAreNormalized) {
    const Curvature c(-1.0);
    const UmbilicSphere<3> s(c, EuclideanSphere<3>{Vec3(0.1, 0.2, 0.3), 0.4}, +1);
    EXPECT_NEAR(s.b().squaredNorm() - s.a() * s.e(), 1.0, 1e-15);
    const UmbilicSphere<3> p(c, EuclideanPlane<3>{Vec3(0, 0, 2), 0.2}, -1);
    EXPECT_NEAR(p.b().squaredNorm() - p.a() * p.e(), 1.0, 1e-15);
    const auto f = UmbilicSphere<3>::fromCoefficients(c, 2.0, Vec3(1, 0, 0), -3.0);
    EXPECT_NEAR(f.b().squaredNorm() - f.a() * f.e(), 1.0, 1e-15);
    EXPECT_THROW(UmbilicSphere<3>::fromCoefficients(c, 1.0, Vec3::Zero(), 1.0), GeometryError);
}

TEST(UmbilicSphere, BallSideSign) {
    const Curvature c(0.0);
    const UmbilicSphere<3> in(c, EuclideanSphere<3>{Vec3::Zero(), 1.0}, +1), out(c, EuclideanSphere<3>{Vec3::Zero(), 1.0}, -1);
    EXPECT_LT(in.eval(Vec3::Zero()), 0);
    EXPECT_GT(out.eval(Vec3::Zero()), 0);
    EXPECT_EQ(in.contains(Vec3(1, 0, 0), 1e-12), Containment::Boundary);
    EXPECT_DOUBLE_EQ(in.signedCurvature(), 1.0);
    EXPECT_DOUBLE_EQ(out.signedCurvature(), -1.0);
}

TEST(UmbilicSphere, GeodesicSphereCurvature) {
    // a chart-centered sphere of Euclidean radius r is a geodesic sphere of radius ρ(r)
    for (double c : {-1.0, 0.0, 1.0}) {
        for (double r : {0.2, 0.5, 0.8}) {
            const double rho = Chart<3>(Curvature(c)).distance(Vec3::Zero(), Vec3(r, 0, 0));
            const UmbilicSphere<3> s(Curvature(c), EuclideanSphere<3>{Vec3::Zero(), r}, +1);
            EXPECT_NEAR(s.signedCurvature(), oracle::sphereLambda(c, rho), 1e-12) << c << ' ' << r;
            EXPECT_NEAR(geodesicRadius(Curvature(c), s.signedCurvature()), rho, 1e-12);
        }
    }
}

TEST(UmbilicSphere, Classification) {
    const Curvature h(-1.0);
    EXPECT_EQ(sphereThrough<3>(h, 1.5, Vec3(0.1, 0, 0), Vec3(1, 0, 0)).classify(), SphereClass::GeodesicSphere);
    EXPECT_EQ(sphereThrough<3>(h, 1.0, Vec3(0.1, 0, 0), Vec3(1, 0, 0)).classify(1e-9), SphereClass::Horosphere);
    EXPECT_EQ(sphereThrough<3>(h, 0.5, Vec3(0.1, 0, 0), Vec3(1, 0, 0)).classify(), SphereClass::Equidistant);
    EXPECT_EQ(sphereThrough<3>(Curvature(0.0), 0.5, Vec3::Zero(), Vec3(1, 0, 0)).classify(), SphereClass::EuclideanSphereClass);
    EXPECT_EQ(sphereThrough<3>(Curvature(1.0), 0.5, Vec3::Zero(), Vec3(1, 0, 0)).classify(), SphereClass::SphericalGeodesicSphere);
    EXPECT_FALSE(sphereThrough<3>(h, 0.5, Vec3::Zero(), Vec3(1, 0, 0)).compact());
    // totally geodesic plane through the origin
    EXPECT_NEAR(sphereThrough<3>(h, 0.0, Vec3::Zero(), Vec3(0, 0, 1)).signedCurvature(), 0.0, 1e-15);
}

TEST(UmbilicSphere, SphereThroughHasRequestedData) {
    CounterRng rng(11);
    for (double c : {-1.0, 0.0, 1.0}) {
        for (int i = 0; i < 40; ++i) {
            const Vec3 p = rng.uniform(0.0, 0.6) * Vec3(rng.normal(), rng.normal(), rng.normal()).normalized();
            const Vec3 n = Vec3(rng.normal(), rng.normal(), rng.normal()).normalized();
            const double lam = rng.uniform(0.2, 3.0);
            const auto s = sphereThrough<3>(Curvature(c), lam, p, n);
            EXPECT_NEAR(s.eval(p), 0.0, 1e-13);
            EXPECT_NEAR(s.signedCurvature(), lam, 1e-12);
            EXPECT_NEAR(s.outerNormal(p).dot(-n), 1.0, 1e-12);
        }
    }
}

TEST(UmbilicSphere, GeodesicCenterIsEquidistant) {
    CounterRng rng(12);
    for (double c : {-1.0, 0.0, 1.0}) {
        const Chart<3> chart{Curvature(c)};
        for (int i = 0; i < 20; ++i) {
            const Vec3 p = rng.uniform(0.0, 0.5) * Vec3(rng.normal(), rng.normal(), rng.normal()).normalized();
            const double lam = rng.uniform(1.2, 3.0);
            const auto s = sphereThrough<3>(Curvature(c), lam, p, Vec3(rng.normal(), rng.normal(), rng.normal()));
            const Vec3 o = geodesicCenter(s);
            const double rho = geodesicRadius(Curvature(c), lam);
            const Vec3 C = s.b() / s.a();
            const double R = 1.0 / s.a();
            for (int k = 0; k < 5; ++k) {
                const Vec3 q = C + R * Vec3(rng.normal(), rng.normal(), rng.normal()).normalized();
                if (!chart.isValid(q)) continue;
                EXPECT_NEAR(chart.distance(o, q), rho, 1e-9);
            }
        }
    }
}

TEST(LambdaFlow, ClosedFormMatchesRiccati) {
    for (double c : {-1.0, 0.0, 1.0})
        for (double lam0 : {-0.5, 0.3, 1.0, 1.5, 3.0})
            for (double t : {0.05, 0.2, 0.35}) {
                double exact;
                try {
                    exact = lambdaAt(Curvature(c), lam0, t);
                } catch (const GeometryError &) {
                    continue;
                }
                EXPECT_NEAR(exact, oracle::riccati(c, lam0, t), 1e-9 * std::max(1.0, std::abs(exact))) << c << ' ' << lam0 << ' ' << t;
            }
    EXPECT_THROW(lambdaAt(Curvature(0.0), 2.0, 0.5), GeometryError);
    EXPECT_DOUBLE_EQ(lambdaAt(Curvature(-1.0), 1.0, 3.0), 1.0);
}

TEST(LambdaFlow, ClosedFormAreas) {
    EXPECT_NEAR(lambdaSphereArea(Curvature(0.0), 2.0), std::numbers::pi, 1e-15);
    EXPECT_NEAR(lambdaSphereArea(Curvature(1.0), 1.0), 2.0 * std::numbers::pi, 1e-15);
    EXPECT_THROW(lambdaSphereArea(Curvature(-1.0), 0.8), GeometryError);
    EXPECT_NEAR(lambdaCircleLength(Curvature(-1.0), std::cosh(1.0) / std::sinh(1.0)), 2.0 * std::numbers::pi * std::sinh(1.0), 1e-12);
}

TEST(Erosion, ErodedSphereIsAtDistanceT) {
    CounterRng rng(13);
    struct Case {
        double c, lam, t;
    };
    for (const Case k : {Case{-1.0, 2.0, 0.2}, Case{-1.0, 0.6, 0.3}, Case{-1.0, 1.0, 0.25}, Case{0.0, 1.5, 0.3}, Case{1.0, 1.5, 0.3},
                         Case{1.0, 0.3, 0.5}}) {
        const Curvature c(k.c);
        const Chart<3> chart(c);
        const auto S = sphereThrough<3>(c, k.lam, Vec3(0.05, -0.1, 0.02), Vec3(0.3, 0.2, 1.0));
        const auto St = erode(S, k.t);
        EXPECT_NEAR(St.signedCurvature(), lambdaAt(c, k.lam, k.t), 1e-9);
        // points of the eroded sphere along the inward normal of S's nearest point to the origin
        const Vec3 p = S.nearestPointToOrigin();
        const Vec3 inward = -(S.a() * p - S.b());
        const Vec3 q = chart.geodesicPointDir(p, inward, k.t);
        EXPECT_NEAR(St.eval(q) / (St.a() * q - St.b()).norm(), 0.0, 1e-9) << k.c << ' ' << k.lam;
        // and their distance to S is t
        const Vec3 x = St.nearestPointToOrigin();
        EXPECT_NEAR(oracle::distanceToSphere(chart, S, x, rng), k.t, 1e-7);
        EXPECT_LT(S.eval(x), 0.0);
    }
}

TEST(Erosion, PastInradiusIsEmpty) {
    const Curvature c(0.0);
    const UmbilicSphere<3> s(c, EuclideanSphere<3>{Vec3(0.1, 0, 0), 0.5}, +1);
    EXPECT_THROW(erode(s, 0.5), GeometryError);
    EXPECT_NEAR(erode(s, 0.2).signedCurvature(), 1.0 / 0.3, 1e-12);
    EXPECT_NEAR(erode(s, -0.2).signedCurvature(), 1.0 / 0.7, 1e-12);
}

TEST(Erosion, WorksInThePlane) {
    const Curvature c(-1.0);
    const auto d = sphereThrough<2>(c, 2.0, Vec2(0.1, 0.2), Vec2(1, -1));
    const auto dt = erode(d, 0.1);
    EXPECT_NEAR(dt.signedCurvature(), lambdaAt(c, 2.0, 0.1), 1e-10);
    EXPECT_NEAR((geodesicCenter(dt) - geodesicCenter(d)).norm(), 0.0, 1e-10);
}
