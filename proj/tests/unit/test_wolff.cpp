#include "kakeya/rng.hpp"
#include "kakeya/wolff.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace kakeya;

namespace {

Vec v3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

}  // namespace

TEST(PolyBound, LinearExample) {
    auto r = poly_average_bound({0, 1}, -1, 1, 2);
    EXPECT_NEAR(r.lhs, 2, 1e-12);
    EXPECT_NEAR(r.integral, 1, 1e-12);
    EXPECT_NEAR(r.rhs, 4, 1e-12);
    EXPECT_TRUE(r.holds);
}

TEST(PolyBound, RootCase) {
    auto r = poly_average_bound({-1, 1}, -1, 1, 1);
    EXPECT_NEAR(r.lhs, 0, 1e-15);
    EXPECT_TRUE(r.holds);
}

TEST(PolyBound, RandomSweep) {
    Rng rng(5, "poly-sweep");
    for (int i = 0; i < 2000; ++i) {
        int deg = 1 + static_cast<int>(rng.below(8));
        std::vector<double> c(deg + 1);
        for (auto& x : c) x = rng.uniform(-5, 5);
        double a = rng.uniform(-5, 5), len = std::exp(rng.uniform(std::log(0.01), std::log(10.0)));
        double t = rng.uniform(-10, 10);
        EXPECT_TRUE(poly_average_bound(c, a, a + len, t).holds) << i;
    }
}

TEST(Multiscale, SingleScaleBound) {
    double delta = 1.0 / 32, rho = 1.0 / 8, lambda = 0.5;
    auto cfg = nested_plane_config(3, 2, 2, delta, rho, {lambda}, v3(0.5, 0.5, 0.5));
    EXPECT_NEAR(cfg.bound(), std::pow(rho / lambda, 1) * std::pow(delta, -2), 1e-9);
}

TEST(Multiscale, TwoScaleBound) {
    double delta = 1.0 / 32, rho = 1.0 / 16;
    auto cfg = nested_plane_config(3, 1, 2, delta, rho, {0.25, 1}, v3(0, 0, 0));
    EXPECT_NEAR(cfg.bound(), (rho / 0.25) * (rho / 1) * std::pow(delta, -2), 1e-9);
}

TEST(Multiscale, ExtremalTubesOccupyEveryScale) {
    double delta = 1.0 / 32, rho = 1.0 / 16;
    auto cfg = nested_plane_config(3, 1, 2, delta, rho, {0.25, 1}, v3(0.5, 0.5, 0.5));
    auto fam = nested_plane_extremal_family(cfg, 1);
    ASSERT_GT(fam.size(), 0u);
    for (const auto& t : fam.tubes) EXPECT_TRUE(occupies_all(t, cfg));
    auto c = count_multiscale_tubes(fam, cfg);
    EXPECT_EQ(c.count, fam.size());
    EXPECT_GT(c.ratio, 0.5);
}

TEST(Multiscale, ValidChainsHaveBoundAtLeastOne) {
    // delta <= rho <= lambda_j <= 1 makes every factor of the bound at least 1, so the
    // empty-family guard is never reached from a validated chain.
    for (double rho : {1.0 / 32, 1.0 / 8, 1.0 / 4})
        for (double l1 : {0.25, 0.5, 1.0}) {
            auto cfg = nested_plane_config(3, 1, 2, 1.0 / 32, rho, {l1, 1}, v3(0, 0, 0));
            EXPECT_GE(cfg.bound(), 1);
        }
    auto tight = nested_plane_config(3, 1, 2, 1.0 / 4, 1.0 / 4, {1, 1}, v3(0, 0, 0));
    EXPECT_DOUBLE_EQ(tight.bound(), 1);
    EXPECT_THROW(nested_plane_config(3, 1, 2, 1.0 / 8, 1.0 / 16, {0.5, 1}, v3(0, 0, 0)), PreconditionError);
}

TEST(Multiscale, RandomFamilyUnderBound) {
    double delta = 1.0 / 32, rho = 1.0 / 16;
    auto cfg = nested_plane_config(3, 1, 2, delta, rho, {0.25, 1}, v3(0.5, 0.5, 0.5));
    auto fam = make_direction_separated_family(3, delta, 4);
    auto c = count_multiscale_tubes(fam, cfg);
    EXPECT_LE(c.ratio, 1.0);
}

TEST(SmVolume, SingleScaleUnderNeighborhoodVolume) {
    auto cfg = nested_sm_config(3, 1, 1, 1.0 / 16, {0.5}, 100000);
    auto est = sm_volume(cfg, 1);
    EXPECT_FALSE(est.inconclusive);
    // |N_rho(line) cap B_lambda| <= pi rho^2 (2 lambda) + (4/3) pi rho^3.
    double rho = 1.0 / 16, lambda = 0.5;
    double nb = kPi * rho * rho * 2 * lambda + 4.0 / 3 * kPi * rho * rho * rho;
    EXPECT_LE(est.volume, nb + 3 * est.stderr_);
}

TEST(SmVolume, RejectsLargeRho) {
    EXPECT_THROW(nested_sm_config(3, 1, 2, 1.0, {0.2, 1}, 1000).validate(), PreconditionError);
}
