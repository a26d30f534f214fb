#include "kakeya/algebraic.hpp"

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

Polynomial circle() {
    return Polynomial::from_terms(2, {{{2, 0}, 1}, {{0, 2}, 1}, {{0, 0}, -1}});
}

Polynomial paraboloid() {
    return Polynomial::from_terms(3, {{{0, 0, 1}, 1}, {{2, 0, 0}, -1}, {{0, 2, 0}, -1}});
}

}  // namespace

TEST(Polynomial, EvalAndGradient) {
    auto P = circle();
    EXPECT_EQ(P.degree(), 2);
    EXPECT_DOUBLE_EQ(P.eval(v2(2, 0)), 3);
    auto g = P.gradient(v2(1, 2));
    EXPECT_DOUBLE_EQ(g[0], 2);
    EXPECT_DOUBLE_EQ(g[1], 4);
    auto Q = P * Polynomial::linear(v2(1, 0), 0);
    EXPECT_EQ(Q.degree(), 3);
    EXPECT_DOUBLE_EQ(Q.eval(v2(2, 0)), 6);
    EXPECT_EQ(Polynomial::monomial_basis(2, 2).size(), 6u);
}

TEST(Variety, PlaneDistances) {
    auto axis = Variety::plane(v2(0, 0), {v2(1, 0)});
    EXPECT_DOUBLE_EQ(axis.distance_to(v2(0, 3)), 3);
    EXPECT_DOUBLE_EQ(axis.distance_to(v2(0.7, 0)), 0);
    auto xy = Variety::plane(v3(0, 0, 0), {v3(1, 0, 0), v3(0, 1, 0)});
    EXPECT_DOUBLE_EQ(xy.distance_to(v3(1, 1, 2)), 2);
}

TEST(Variety, CircleDistance) {
    auto V = Variety::polynomial(2, {circle()}, 2);
    auto d = V.distance(v2(2, 0));
    EXPECT_NEAR(d.value, 1, 1e-6);
    EXPECT_TRUE(d.approximate);
}

TEST(Variety, ParaboloidDistanceMatchesBruteForce) {
    auto V = Variety::polynomial(3, {paraboloid()}, 2);
    // Radial brute force: points (s, 0, s^2).
    double best = 1e9;
    for (int i = 0; i <= 100000; ++i) {
        double s = 2.0 * i / 100000;
        best = std::min(best, std::hypot(s, s * s - 1));
    }
    EXPECT_NEAR(best, 0.5 * std::sqrt(3.0), 1e-6);
    EXPECT_NEAR(V.distance_to(v3(0, 0, 1)), best, 1e-6);
}

TEST(Variety, TangentSpaces) {
    auto axis = Variety::plane(v2(0, 0), {v2(1, 0)});
    EXPECT_NEAR(angle_to_subspace(v2(1, 0), axis.tangent_space(v2(3, 0))), 0, 1e-12);
    auto C = Variety::polynomial(2, {circle()}, 2);
    auto Tc = C.tangent_space(v2(1, 0));
    ASSERT_EQ(Tc.dim(), 1);
    EXPECT_NEAR(angle_to_subspace(v2(0, 1), Tc), 0, 1e-9);
    auto P = Variety::polynomial(3, {paraboloid()}, 2);
    auto Tp = P.tangent_space(v3(0, 0, 0));
    ASSERT_EQ(Tp.dim(), 2);
    EXPECT_NEAR(angle_to_subspace(v3(1, 0, 0), Tp), 0, 1e-6);
    EXPECT_NEAR(angle_to_subspace(v3(0, 1, 0), Tp), 0, 1e-6);
}

TEST(Tangency, AlongTheLineIsTangent) {
    auto V = Variety::plane(v2(0, 0), {v2(1, 0)});
    auto T = make_tube(v2(1, 0), v2(0, 0), 1.0 / 64);
    auto rep = is_tangent_tube(T, V, v2(0, 0), 1.0);
    EXPECT_TRUE(rep.is_tangent());
    EXPECT_NEAR(rep.worst_angle, 0, 1e-12);
}

TEST(Tangency, CrossingTubeFailsAngleCondition) {
    auto V = Variety::plane(v2(0, 0), {v2(1, 0)});
    auto T = make_tube(v2(0, 1), v2(0, 0), 1.0 / 64);
    auto rep = is_tangent_tube(T, V, v2(0, 0), 0.25);
    EXPECT_FALSE(rep.condition_ii);
    EXPECT_FALSE(rep.is_tangent());
}

TEST(Tangency, SlightlyTiltedTubeIsTangent) {
    double delta = 1.0 / 64, r = 0.25;
    auto V = Variety::plane(v2(0, 0), {v2(1, 0)});
    auto T = make_tube(v2(1, delta / (2 * r)).normalized(), v2(0, delta / 2), delta);
    EXPECT_TRUE(is_tangent_tube(T, V, v2(0, 0), r).is_tangent());
}

TEST(Wongkew, LineSlabInDisk) {
    auto V = Variety::plane(v2(0, 0), {v2(1, 0)});
    double lambda = 0.5, rho = 0.125;
    auto est = wongkew_volume(V, lambda, rho, v2(0, 0), 200000, 1);
    double oracle = 2 * lambda * 2 * rho + kPi * rho * rho;  // N_rho of the diameter
    EXPECT_NEAR(est.volume, oracle, 4 * est.stderr_ + 1e-3);
    EXPECT_NEAR(est.ratio, est.volume / (lambda * rho), 1e-12);
}

TEST(Wongkew, FullSpaceIsTheBall) {
    auto V = Variety::whole_space(2);
    auto est = wongkew_volume(V, 0.5, 0.1, v2(0, 0), 20000, 2, WongkewMode::PieceOfNeighborhood);
    EXPECT_NEAR(est.volume, kPi * 0.25, 1e-12);
    // The neighborhood of the piece is the fattened ball.
    auto fat = wongkew_volume(V, 0.5, 0.1, v2(0, 0), 20000, 2);
    EXPECT_NEAR(fat.volume, kPi * 0.36, 1e-12);
}

TEST(Wongkew, CircleAnnulus) {
    auto V = Variety::polynomial(2, {circle()}, 2);
    double rho = 1.0 / 16;
    auto est = wongkew_volume(V, 1.0, rho, v2(0, 0), 200000, 3, WongkewMode::PieceOfNeighborhood);
    // Inside B_1 only the inner half of the annulus counts.
    double oracle = kPi * (1 - (1 - rho) * (1 - rho));
    EXPECT_NEAR(est.volume, oracle, 3 * est.stderr_ + 2e-3);
}

TEST(Occupancy, InsideDisjointAndSlab) {
    auto V = Variety::plane(v2(0, 0), {v2(1, 0)});
    auto inside = make_tube(v2(1, 0), v2(0, 0), 1.0 / 64);
    EXPECT_NEAR(tube_occupancy(inside, v2(0, 0), 1.0, V, 0.1), 1, 1e-9);
    auto far = make_tube(v2(1, 0), v2(0, 5), 1.0 / 64);
    EXPECT_NEAR(tube_occupancy(far, v2(0, 0), 1.0, V, 0.1), 0, 1e-12);
    double theta = 0.6, rho = 0.05;
    auto slant = make_tube(v2(std::cos(theta), std::sin(theta)), v2(0, 0), 1.0 / 64);
    EXPECT_NEAR(tube_occupancy(slant, v2(0, 0), 1.0, V, rho), std::min(1.0, 2 * rho / std::sin(theta)), 1e-3);
}

TEST(Variety, TextRoundTrip) {
    auto V = Variety::polynomial(2, {circle()}, 2);
    std::stringstream ss;
    write_variety(ss, V);
    auto W = read_variety(ss);
    EXPECT_EQ(W.dim(), 1);
    EXPECT_NEAR(W.distance_to(v2(2, 0)), 1, 1e-6);
}
