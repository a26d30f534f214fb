#include "kakeya/exponents.hpp"
#include "kakeya/structure.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace kakeya;

namespace {

Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

}  // namespace

TEST(Structure, SigmaStep) {
    EXPECT_DOUBLE_EQ(sigma_step(0.25, 'c', 0.1), 0.125);
    EXPECT_NEAR(sigma_step(0.25, 'a', 0.1), std::pow(4.0, -1.1), 1e-15);
    EXPECT_NEAR(sigma_step(0.25, 'a', 0.1), 0.2176, 1e-4);
    EXPECT_THROW(sigma_step(0.25, 'x', 0.1), PreconditionError);
}

TEST(Structure, HistoryQuantities) {
    auto h = History::of("cac");
    EXPECT_EQ(h.count_c, 2);
    EXPECT_EQ(h.count_a, 1);
    double r = sigma_step(sigma_step(sigma_step(0.5, 'c', 0.1), 'a', 0.1), 'c', 0.1);
    EXPECT_NEAR(h.scale(0.5, 0.1), r, 1e-15);
    EXPECT_EQ(h.A(4), 2);
    EXPECT_EQ(History::of("aaaa").A(4), 1);
    EXPECT_NEAR(h.coefficient(4, 2, 0.1), std::pow(4.0, 2 * 0.1) * std::pow(4.0, 2.1), 1e-12);
}

TEST(Structure, SecondKeyEstimateTrivialCases) {
    double delta = 1.0 / 32;
    int n = 4, m = 2;
    std::vector<double> g{1.0 / 3, 1.0 / 3, 1.0 / 3};
    std::vector<double> D(n - m + 1, 1.0), deltas(n - m + 1, delta);
    EXPECT_NEAR(second_key_estimate(g, D, deltas, delta, n, m), std::pow(delta, -(n - 1)), 1e-6);
    EXPECT_NEAR(second_key_estimate({1.0}, {1.0}, {delta}, delta, 3, 3), std::pow(delta, -2), 1e-9);
}

TEST(Structure, SecondKeyEstimateMatchesExactProduct) {
    int n = 5, m = 3;
    auto gam = exponents::gamma_weights(n, m);
    std::vector<double> g;
    for (const auto& x : gam) g.push_back(x.to_double());
    double delta = 1.0 / 64;
    std::vector<double> D{2, 3, 5}, deltas{1.0 / 8, 1.0 / 16, 1.0 / 32};
    double expect = std::pow(delta, -(n - 1));
    for (int i = m - 1; i <= n - 1; ++i) {
        double s = 0;
        for (int j = m; j <= i; ++j) s += gam[j - m].to_double();
        expect *= std::pow(deltas[i - (m - 1)] / delta, -s) * std::pow(D[i - (m - 1)], -i * (1 - s));
    }
    EXPECT_NEAR(second_key_estimate(g, D, deltas, delta, n, m) / expect, 1, 1e-12);
}

TEST(Structure, ThetaValue) {
    EXPECT_NEAR(theta_value(2, 2), 1, 1e-15);
    EXPECT_NEAR(theta_value(1.5, 2), 1.5, 1e-15);
}

TEST(Structure, Alg1ImmediateTiny) {
    AlgConfig cfg;
    cfg.delta = 1.0 / 32;
    cfg.eps0 = 0.1;
    cfg.r0 = std::pow(cfg.delta, 1 - cfg.eps0);
    // A bush through x0 keeps the broad norm positive on the small ball.
    TubeFamily fam;
    fam.dim = 2;
    fam.delta = cfg.delta;
    fam.separated = true;
    for (const auto& d : direction_net(2, cfg.delta, 1)) fam.tubes.push_back(make_tube(d, v2(0.5, 0.5), cfg.delta));
    auto res = run_alg1(fam, Variety::whole_space(2), v2(0.5, 0.5), cfg);
    EXPECT_EQ(res.report.stop, StopReason::Tiny);
    EXPECT_EQ(res.report.steps.size(), 1u);
}

TEST(Structure, Alg1RejectsBadScale) {
    AlgConfig cfg;
    cfg.delta = 1.0 / 32;
    cfg.r0 = 0.9;
    auto fam = make_direction_separated_family(2, cfg.delta, 1);
    EXPECT_THROW(run_alg1(fam, Variety::whole_space(2), v2(0, 0), cfg), PreconditionError);
}

TEST(Structure, Alg1ParallelBallStartsCellular) {
    AlgConfig cfg;
    cfg.delta = 1.0 / 32;
    cfg.A = 1;  // two directions; a larger A would let the candidates absorb both
    TubeFamily fam;
    fam.dim = 2;
    fam.delta = cfg.delta;
    for (int i = -12; i <= 12; ++i) fam.tubes.push_back(make_tube(v2(1, 0), v2(0, i * cfg.delta * 1.5), cfg.delta));
    // A second parallel direction makes the broad norm positive.
    for (int i = -12; i <= 12; ++i) fam.tubes.push_back(make_tube(v2(0, 1), v2(i * cfg.delta * 1.5, 0), cfg.delta));
    auto res = run_alg1(fam, Variety::whole_space(2), v2(0, 0), cfg);
    ASSERT_GE(res.report.steps.size(), 2u);
    EXPECT_EQ(res.report.steps[0].next, 'c');
    EXPECT_GT(res.report.steps[1].cellular_cells + res.report.steps[1].algebraic_cells + res.report.steps[1].cells, 0u);
    EXPECT_TRUE(std::isfinite(res.report.fitted_III));
}

TEST(Structure, Alg2RejectsEmptyFamily) {
    TubeFamily fam;
    fam.dim = 2;
    fam.delta = 1.0 / 32;
    Alg2Config cfg;
    cfg.alg.delta = fam.delta;
    EXPECT_THROW(run_alg2(fam, cfg), PreconditionError);
}

TEST(Structure, Alg2LineFamilyIsDegenerate) {
    Alg2Config cfg;
    cfg.alg.delta = 1.0 / 32;
    TubeFamily fam;
    fam.dim = 2;
    fam.delta = cfg.alg.delta;
    for (int i = 0; i < 8; ++i) fam.tubes.push_back(make_tube(v2(1, 0), v2(0.05 * i, 0.5), fam.delta));
    auto rep = run_alg2(fam, cfg);
    EXPECT_EQ(rep.outcome, Alg2Outcome::Degenerate);
    EXPECT_EQ(rep.total_broad, 0);
}

TEST(Structure, ReportJsonIsStable) {
    RunReport r;
    r.delta = 0.25;
    r.steps.push_back(StepRecord{});
    auto a = report_json(r);
    EXPECT_EQ(a, report_json(r));
    EXPECT_NE(a.find("\"stop\""), std::string::npos);
}
