#include "kakeya/partition.hpp"
#include "kakeya/rng.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace kakeya;

namespace {

Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

GridField uniform_field(double lo, double hi, double h) {
    GridField f;
    f.grid = GridSpec::covering(v2(lo, lo), v2(hi, hi), h);
    f.values.assign(f.grid.size(), 1.0);
    return f;
}

std::vector<Vec> cloud(std::size_t count, std::uint64_t seed) {
    Rng rng(seed, "test-cloud");
    std::vector<Vec> pts;
    for (std::size_t i = 0; i < count; ++i) pts.push_back(v2(rng.uniform(0.02, 0.98), rng.uniform(0.02, 0.98)));
    return pts;
}

}  // namespace

TEST(Partition, BisectionDegrees) {
    auto d = bisection_degrees(2, 4);
    int total = 0;
    for (int x : d) total += x;
    EXPECT_LE(total, 4);
    EXPECT_GE(d.size(), 1u);
}

TEST(Partition, UniformSquareLineSplitsInHalf) {
    auto f = uniform_field(-1, 1, 1.0 / 32);
    auto P = partition_mass(f, 1, 0.1, 1);
    EXPECT_EQ(P.degree(), 1);
    ASSERT_EQ(P.cells.size(), 2u);
    for (const auto& c : P.cells) EXPECT_NEAR(c.mass / P.total_mass, 0.5, 0.1);
}

TEST(Partition, PointCloudEqualMass) {
    auto pts = cloud(100, 3);
    auto g = GridSpec::covering(v2(0, 0), v2(1, 1), 1.0 / 64);
    try {
        auto P = partition_points(pts, g, 4, 0.25, 3);
        EXPECT_LE(P.cells.size(), 16u * 4);
        double cap = 100.0 / P.class_count() * 1.25;
        for (const auto& c : P.cells) EXPECT_LE(c.mass, cap + 1e-9);
    } catch (const PartitionFailure& e) {
        FAIL() << e.what() << " deviation " << e.best->deviation;
    }
}

TEST(Partition, ShrunkenCellsDropTheStrip) {
    double h = 1.0 / 32, delta = 1.0 / 8;
    auto f = uniform_field(-1, 1, h);
    auto P = partition_mass(f, 1, 0.1, 2);
    ASSERT_EQ(P.factors.size(), 1u);
    auto shrunk = shrunken_cells(P, delta);
    ASSERT_EQ(shrunk.size(), 2u);
    const auto& L = P.factors[0];
    auto grad = L.gradient(v2(0, 0));
    std::size_t kept = 0;
    for (const auto& c : shrunk) {
        EXPECT_FALSE(c.members.empty());
        for (std::size_t idx : c.members) {
            Vec x = P.grid.center(idx);
            EXPECT_GT(std::abs(L.eval(x)) / grad.norm(), delta - h);
        }
        kept += c.members.size();
    }
    EXPECT_LT(kept, P.domain.size());
}

TEST(Partition, HugeDeltaEmptiesEveryCell) {
    auto f = uniform_field(-1, 1, 1.0 / 16);
    auto P = partition_mass(f, 1, 0.1, 2);
    for (const auto& c : shrunken_cells(P, 4.0)) EXPECT_TRUE(c.members.empty());
}

TEST(Partition, LineMeetsAtMostTwoCells) {
    auto f = uniform_field(-1, 1, 1.0 / 32);
    auto P = partition_mass(f, 1, 0.1, 4);
    shrunken_cells(P, 1.0 / 16);
    Rng rng(9, "tubes");
    for (int i = 0; i < 200; ++i) {
        auto t = make_tube(rng.unit_vector(2), v2(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)), 1.0 / 16);
        EXPECT_LE(tube_cell_crossings(t, P).size(), 2u);
    }
}

TEST(Partition, TubeInsideOneCell) {
    auto f = uniform_field(-1, 1, 1.0 / 32);
    auto P = partition_mass(f, 1, 0.1, 4);
    shrunken_cells(P, 1.0 / 16);
    // A short-range tube far from the wall: pick a kept cell center and a direction along the wall.
    const auto& L = P.factors[0];
    Vec n = L.gradient(v2(0, 0)).normalized();
    Vec along = v2(-n[1], n[0]);
    Vec x = v2(0, 0);
    x -= (L.eval(x) / L.gradient(x).norm()) * n;  // onto the wall
    x += 0.5 * n;
    auto t = make_tube(along, x, 1.0 / 32);
    EXPECT_EQ(tube_cell_crossings(t, P).size(), 1u);
}

TEST(Partition, UniformMassIsCellular) {
    auto f = uniform_field(0, 1, 1.0 / 64);
    auto r = cellular_or_algebraic(f, 2, 4, 1.0 / 64, 1);
    EXPECT_EQ(r.kind, CaseResult::Kind::Cellular);
    EXPECT_GE(r.refined_mass_ratio, 0.5);
}

TEST(Partition, LineMassIsAlgebraic) {
    auto f = uniform_field(0, 1, 1.0 / 64);
    for (std::size_t i = 0; i < f.grid.size(); ++i) {
        Vec x = f.grid.center(i);
        f.values[i] = std::abs(x[1] - 0.3 - 0.2 * x[0]) < 1.0 / 64 ? 1.0 : 0.0;
    }
    auto r = cellular_or_algebraic(f, 2, 1, 1.0 / 32, 1);
    ASSERT_EQ(r.kind, CaseResult::Kind::Algebraic);
    EXPECT_GE(r.wall_mass_ratio, 0.9);
    // The wall is the line up to grid tolerance.
    auto g = r.wall.gradient(v2(0.5, 0.4));
    for (double x : {0.1, 0.5, 0.9}) EXPECT_LT(std::abs(r.wall.eval(v2(x, 0.3 + 0.2 * x))) / g.norm(), 1.0 / 32);
}

TEST(Partition, MixedMassStaysCellular) {
    auto f = uniform_field(0, 1, 1.0 / 64);
    double line = 0;
    for (std::size_t i = 0; i < f.grid.size(); ++i)
        if (std::abs(f.grid.center(i)[1] - 0.5) < 1.0 / 64) line += 1;
    // 70% spread evenly, 30% on the line.
    double each_line = 0.3 / line, each_flat = 0.7 / f.grid.size();
    for (std::size_t i = 0; i < f.grid.size(); ++i)
        f.values[i] = each_flat + (std::abs(f.grid.center(i)[1] - 0.5) < 1.0 / 64 ? each_line : 0.0);
    auto r = cellular_or_algebraic(f, 2, 4, 1.0 / 64, 1);
    EXPECT_EQ(r.kind, CaseResult::Kind::Cellular);
    EXPECT_GE(r.refined_mass_ratio, 0.35);
}

TEST(Partition, FitWallRecoversLine) {
    std::vector<Vec> pts;
    std::vector<double> w;
    for (int i = 0; i <= 20; ++i) {
        double x = i / 20.0;
        pts.push_back(v2(x, 1 - x));
        w.push_back(1);
    }
    auto P = fit_wall(pts, w, 1);
    for (const auto& p : pts) EXPECT_NEAR(P.eval(p) / P.gradient(p).norm(), 0, 1e-9);
}
