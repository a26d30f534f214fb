#include "kakeya/geometry.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace kakeya;

namespace {

Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

Vec v3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

}  // namespace

TEST(Geometry, AngleToSubspace) {
    auto V = Subspace::span({v2(1, 0)});
    EXPECT_NEAR(angle_to_subspace(v2(1, 0), V), 0, 1e-12);
    EXPECT_NEAR(angle_to_subspace(v2(0, 1), V), kPi / 2, 1e-12);
    EXPECT_NEAR(angle_to_subspace(v2(1, 1).normalized(), V), kPi / 4, 1e-12);
}

TEST(Geometry, LineAngleIgnoresOrientation) {
    EXPECT_NEAR(line_angle(v2(1, 0), v2(-1, 0)), 0, 1e-12);
    EXPECT_NEAR(vector_angle(v2(1, 0), v2(-1, 0)), kPi, 1e-12);
}

TEST(Geometry, TubeMembershipAndVolume) {
    auto t = make_tube(v2(1, 0), v2(0, 0), 0.1);
    EXPECT_TRUE(t.contains(v2(0.5, 0.1)));
    EXPECT_FALSE(t.contains(v2(0.51, 0)));
    EXPECT_FALSE(t.contains(v2(0, 0.11)));
    EXPECT_NEAR(t.volume(), 0.2, 1e-12);
    auto t3 = make_tube(v3(0, 0, 1), v3(0, 0, 0), 0.1);
    EXPECT_NEAR(t3.volume(), kPi * 0.01, 1e-12);
}

TEST(Geometry, DirectionSeparatedFamily2d) {
    auto fam = make_direction_separated_family(2, 1.0 / 16, 7);
    EXPECT_GE(fam.size(), 16u);
    EXPECT_LE(fam.size(), 16u * 8);
    for (std::size_t i = 0; i < fam.size(); ++i)
        for (std::size_t j = i + 1; j < fam.size(); ++j)
            EXPECT_GE(line_angle(fam.tubes[i].direction, fam.tubes[j].direction), 1.0 / 16 - 1e-12);
}

TEST(Geometry, DirectionSeparatedFamily3dCount) {
    auto fam = make_direction_separated_family(3, 1.0 / 8, 1);
    // Half the sphere over a cap of angular radius delta/2 bounds the count.
    double upper = 2 * kPi / (kPi * std::pow(1.0 / 16, 2));
    EXPECT_GE(fam.size(), 16u);
    EXPECT_LE(static_cast<double>(fam.size()), upper);
    EXPECT_GE(fam.min_pairwise_angle(), 1.0 / 8 - 1e-12);
}

TEST(Geometry, FamilyRejectsCoarseDelta) {
    EXPECT_THROW(make_direction_separated_family(2, 0.5, 1), PreconditionError);
}

TEST(Geometry, CapDecompositionCoversCircle) {
    auto caps = cap_decomposition(2, 1.0 / 8);
    EXPECT_GE(caps.size(), 16u);
    EXPECT_LE(caps.size(), 16u * 8);
    for (int i = 0; i < 10000; ++i) {
        double a = 2 * kPi * i / 10000;
        EXPECT_GE(cap_multiplicity(caps, v2(std::cos(a), std::sin(a))), 1) << a;
    }
}

TEST(Geometry, BucketsPartitionTheFamily) {
    auto fam = make_direction_separated_family(2, 1.0 / 64, 3);
    auto caps = cap_decomposition(2, 1.0 / 8);
    auto buckets = bucket_by_cap(fam, caps);
    ASSERT_EQ(buckets.size(), caps.size());
    std::size_t total = 0;
    for (const auto& b : buckets) total += b.size();
    EXPECT_EQ(total, fam.size());
}

TEST(Geometry, NarrowBundleFillsOneBucket) {
    TubeFamily fam;
    fam.dim = 2;
    fam.delta = 1.0 / 64;
    for (int i = 0; i < 5; ++i)
        fam.tubes.push_back(make_tube(v2(1, 0.005 * i).normalized(), v2(0, 0.05 * i), fam.delta));
    auto caps = cap_decomposition(2, 1.0 / 8);
    int nonempty = 0;
    for (const auto& b : bucket_by_cap(fam, caps)) nonempty += b.size() > 0;
    EXPECT_EQ(nonempty, 1);
}

TEST(Geometry, RescaleFixesCapAxis) {
    Cap cap{v2(0, 1), 0.25};
    auto L = rescale_cap_map(cap);
    Vec e2 = L.apply(v2(0, 1)) - L.apply(v2(0, 0));
    Vec e1 = L.apply(v2(1, 0)) - L.apply(v2(0, 0));
    EXPECT_NEAR((e2 - v2(0, 1)).norm(), 0, 1e-12);
    EXPECT_NEAR(e1.norm(), 4, 1e-12);
    Cap unit{v2(0, 1), 1.0};
    auto I = rescale_cap_map(unit);
    EXPECT_NEAR((I.linear - Mat::Identity(2, 2)).norm(), 0, 1e-12);
}

TEST(Geometry, MappedTubeIsCovered) {
    double delta = 1.0 / 64, beta = 0.25, theta = std::asin(0.2);
    auto t = make_tube(v2(std::sin(theta), std::cos(theta)), v2(0.1, 0.2), delta);
    Cap cap{v2(0, 1), beta};
    auto L = rescale_cap_map(cap);
    auto cover = cover_mapped_tube(t, L, beta);
    EXPECT_GE(cover.size(), 1u);
    EXPECT_LE(cover.size(), 8u);
    for (const auto& c : cover) EXPECT_NEAR(c.delta, delta / beta, 1e-12);
    // Boundary samples of T land in the union of the cover.
    for (int i = 0; i < 1000; ++i) {
        double s = -0.5 + i / 999.0, side = (i % 2) ? delta : -delta;
        Vec normal = v2(std::cos(theta), -std::sin(theta));
        Vec x = t.center + s * t.direction + side * normal;
        Vec y = L.apply(x);
        bool in = false;
        for (const auto& c : cover) in = in || c.contains(y);
        EXPECT_TRUE(in) << i;
    }
}

TEST(Geometry, RescaledBucketIsSeparated) {
    double delta = 1.0 / 64, beta = 0.25;
    auto fam = make_direction_separated_family(2, delta, 11);
    auto caps = cap_decomposition(2, beta);
    auto buckets = bucket_by_cap(fam, caps);
    std::size_t k = 0;
    while (k < buckets.size() && buckets[k].size() < 3) ++k;
    ASSERT_LT(k, buckets.size());
    auto img = rescale_bucket(buckets[k], caps[k]);
    EXPECT_GE(img.size(), buckets[k].size());
    EXPECT_NEAR(img.delta, delta / beta, 1e-12);
}

TEST(Geometry, FamilyRoundTrip) {
    auto fam = make_direction_separated_family(3, 1.0 / 4, 2);
    std::stringstream ss;
    write_family(ss, fam);
    auto back = read_family(ss);
    ASSERT_EQ(back.size(), fam.size());
    for (std::size_t i = 0; i < fam.size(); ++i) {
        EXPECT_EQ(back.tubes[i].direction, fam.tubes[i].direction);
        EXPECT_EQ(back.tubes[i].center, fam.tubes[i].center);
    }
}
