#include "oracles.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace umbilic;

TEST(Arrangement, SingleBallIsOneFullFacet) {
    const Curvature c(-1.0);
    const auto s = sphereThrough<3>(c, 2.0, Vec3(0.1, 0.1, 0), Vec3(0, 0, 1));
    const auto K = buildPolyhedron(c, 2.0, {s});
    ASSERT_EQ(K.facets.size(), 1u);
    EXPECT_TRUE(K.facets[0].full());
    EXPECT_TRUE(K.edges.empty());
    EXPECT_TRUE(K.vertices.empty());
    EXPECT_TRUE(K.contains(K.witness, -1e-9));
}

TEST(Arrangement, LensHasTwoFacetsAndOneCircle) {
    for (double c : {-1.0, 0.0, 1.0}) {
        const auto K = buildPolyhedron(Curvature(c), 1.5, lensBalls(Curvature(c), 1.5, 0.3, Vec3(0.1, 0, 0), Vec3(1, 1, 0)));
        ASSERT_EQ(K.facets.size(), 2u);
        ASSERT_EQ(K.edges.size(), 1u);
        EXPECT_TRUE(K.edges[0].fullCircle);
        EXPECT_EQ(K.eulerCharacteristic(), 2);
    }
}

TEST(Arrangement, RandomBodiesAreSpheres) {
    for (double c : {-1.0, 0.0, 1.0})
        for (std::uint64_t seed = 1; seed <= 15; ++seed) {
            const double lam = 1.5;
            const int m = 4 + int(seed % 12);
            const auto K = randomPolyhedron(seed, Curvature(c), lam, m, 0.4 * geodesicRadius(Curvature(c), lam), 0.5);
            EXPECT_EQ(K.eulerCharacteristic(), 2) << c << ' ' << seed;
            EXPECT_TRUE(K.allFacetsDisks());
            EXPECT_LE(K.facets.size(), std::size_t(m));
            EXPECT_EQ(2 * K.edges.size(), 3 * K.vertices.size()); // simple vertices
            EXPECT_TRUE(K.contains(Vec3::Zero(), -1e-12));
            for (const auto &v : K.vertices)
                for (int f : v.facets) EXPECT_NEAR(K.balls[f].signedDistance(v.point), 0.0, 1e-10);
        }
}

TEST(Arrangement, RedundantBallIsPruned) {
    const Curvature c(0.0);
    auto balls = lensBalls(c, 1.0, 0.4, Vec3::Zero(), Vec3::UnitZ());
    balls.push_back(UmbilicSphere<3>(c, EuclideanSphere<3>{Vec3::Zero(), 1.0}, +1)); // contains the lens
    const auto K = buildPolyhedron(c, 1.0, balls);
    EXPECT_EQ(K.facets.size(), 2u);
    ASSERT_EQ(K.pruned.size(), 1u);
    EXPECT_EQ(K.pruned[0], 2u);
}

TEST(Arrangement, EmptyIntersectionThrows) {
    const Curvature c(0.0);
    const std::vector<Sphere3> balls{UmbilicSphere<3>(c, EuclideanSphere<3>{Vec3(-2, 0, 0), 1.0}, +1),
                                     UmbilicSphere<3>(c, EuclideanSphere<3>{Vec3(2, 0, 0), 1.0}, +1)};
    try {
        buildPolyhedron(c, 1.0, balls);
        FAIL();
    } catch (const GeometryError &e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptyBody);
    }
}

TEST(Arrangement, HorosphereBodyIsNonCompact) {
    const Curvature c(-1.0);
    try {
        buildPolyhedron(c, 1.0, {sphereThrough<3>(c, 1.0, Vec3::Zero(), Vec3(0, 0, 1))});
        FAIL();
    } catch (const GeometryError &e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonCompact);
    }
}

TEST(Arrangement, SmallLambdaHyperbolicBodiesCloseUp) {
    // λ ≤ 1: enough equidistant balls bound a compact body
    int built = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        try {
            const auto K = randomPolyhedron(seed, Curvature(-1.0), 0.7, 12, 0.5, 0.3);
            EXPECT_EQ(K.eulerCharacteristic(), 2);
            ++built;
        } catch (const GeometryError &e) {
            EXPECT_EQ(e.kind(), ErrorKind::NonCompact);
        }
    }
    EXPECT_GT(built, 5);
}

TEST(Arrangement, CanonicalOrderIgnoresInputOrder) {
    const Curvature c(1.0);
    auto K = randomPolyhedron(7, c, 1.5, 9, 0.3);
    auto balls = K.balls;
    std::reverse(balls.begin(), balls.end());
    const auto K2 = buildPolyhedron(c, 1.5, balls);
    EXPECT_EQ(bodySpecString(K), bodySpecString(K2));
}

TEST(Arrangement, LambdaConvexity) {
    for (double c : {-1.0, 0.0, 1.0}) {
        const auto K = randomPolyhedron(21, Curvature(c), 2.0, 10, 0.4 * geodesicRadius(Curvature(c), 2.0), 0.5);
        const auto rep = validateLambdaConvexity(K, 200);
        EXPECT_GT(rep.samples, 100u);
        EXPECT_EQ(rep.violations, 0u) << rep.maxViolation;
    }
}

TEST(BodySpec, RoundTrip) {
    const auto K = randomPolyhedron(5, Curvature(-1.0), 1.5, 8, 0.3, 0.5);
    const std::string text = bodySpecString(K);
    std::istringstream in(text);
    const auto spec = parseBodySpec<3>(in);
    const auto K2 = buildPolyhedron(spec.c, spec.lambda, spec.balls);
    EXPECT_EQ(bodySpecString(K2), text);
    EXPECT_EQ(K2.facets.size(), K.facets.size());
}

TEST(BodySpec, ParsesCommentsPlanesAndSides) {
    std::istringstream in("# a body\n-1 0.5\nP 0 0 1 +0.1 1\nS 0 0 0 0.5 -1\n");
    const auto spec = parseBodySpec<3>(in);
    EXPECT_EQ(spec.c.value(), -1.0);
    ASSERT_EQ(spec.balls.size(), 2u);
    EXPECT_TRUE(spec.balls[0].isPlane());
    EXPECT_EQ(spec.balls[1].ballSide(), -1);
}

TEST(BodySpec, RejectsMalformedInput) {
    for (const char *bad : {"", "0\n", "0 -1\nS 0 0 0 1 1\n", "0 1\nS 0 0 1 1\n", "0 1\nQ 0 0 0 1 1\n", "0 1\nS 0 0 0 x 1\n",
                            "0 1\nS 0 0 0 1 2\n", "0 1\nS 0 0 0 -1 1\n", "0 1\n"}) {
        std::istringstream in(bad);
        try {
            parseBodySpec<3>(in);
            ADD_FAILURE() << bad;
        } catch (const GeometryError &e) {
            EXPECT_EQ(e.kind(), ErrorKind::Parse) << bad;
        }
    }
    std::istringstream in2("0 1\nC 0 0 1 1\n");
    EXPECT_THROW(parseBodySpec<3>(in2), GeometryError);
    std::istringstream in3("0 1\nC 0 0 1 1\n");
    EXPECT_NO_THROW(parseBodySpec<2>(in3));
}
