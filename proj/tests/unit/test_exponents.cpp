#include "kakeya/common.hpp"
#include "kakeya/exponents.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

using namespace kakeya;
using namespace kakeya::exponents;

TEST(Exponents, LinearExponentRows) {
    std::map<int, Rational> expect{{5, Rational(18, 13)}, {7, Rational(34, 27)}, {8, Rational(21, 17)},
                                   {9, Rational(6, 5)},   {10, Rational(13, 11)}, {11, Rational(7, 6)},
                                   {12, Rational(31, 27)}, {13, Rational(106, 93)}, {14, Rational(9, 8)},
                                   {15, Rational(47, 42)}};
    for (const auto& [n, p] : expect) EXPECT_EQ(linear_exponent(n).p, p) << n;
    EXPECT_EQ(linear_exponent(5).argmin_k, 3);
    EXPECT_EQ(linear_exponent(7).argmin_k, 4);
}

TEST(Exponents, EasyExponent) {
    EXPECT_NEAR(easy_exponent(2), 1 + 1 / (2 - std::sqrt(2.0)), 1e-12);
    EXPECT_NEAR(easy_exponent(5), 1.4268, 1e-4);
    for (int n = 2; n <= 50; ++n) EXPECT_GE(easy_exponent(n), linear_exponent(n).p_float - 1e-12) << n;
}

TEST(Exponents, BroadAndThreshold) {
    EXPECT_EQ(broad_exponent(5, 3), Rational(18, 13));
    EXPECT_EQ(broad_exponent(2, 2), Rational(2));
    for (int n = 2; n <= 10; ++n) {
        EXPECT_EQ(broad_exponent(n, n), Rational(n, n - 1));
        EXPECT_EQ(bg_threshold(n, 2), Rational(n, n - 1));
    }
    EXPECT_EQ(bg_threshold(5, 3), Rational(4, 3));
}

TEST(Exponents, GammaWeights) {
    auto g = gamma_weights(6, 2);
    EXPECT_EQ(g[0], Rational(1, 3));
    EXPECT_EQ(g[1], Rational(1, 12));
    for (int n = 3; n <= 30; ++n)
        for (int m = 2; m <= n - 1; ++m) {
            auto w = gamma_weights(n, m);
            Rational sum;
            for (const auto& x : w) sum += x;
            EXPECT_EQ(sum, Rational(1));
            for (int j = m + 1; j <= n - 1; ++j)
                EXPECT_EQ(w[j - m], Rational(j - 2, j + 1) * w[j - m - 1]) << n << ' ' << m << ' ' << j;
        }
}

TEST(Exponents, Ladder) {
    auto l = p_ladder(5, 3);
    EXPECT_EQ(l.back(), Rational(18, 13));
    EXPECT_EQ(final_conjugate(5, 3), Rational(18, 5));
    auto single = p_ladder(6, 6);
    ASSERT_EQ(single.size(), 1u);
    EXPECT_EQ(single[0], Rational(6, 5));
    for (int n = 2; n <= 20; ++n)
        for (int m = 2; m <= n; ++m) {
            auto q = p_ladder(n, m).back();
            EXPECT_EQ(Rational(1) / (Rational(1) - q.inverse()), final_conjugate(n, m)) << n << ' ' << m;
        }
}

TEST(Exponents, XYSystem) {
    EXPECT_TRUE(verify_xy_zero(5, 3));
    for (int n = 3; n <= 20; ++n) EXPECT_TRUE(verify_xy_zero(n, n - 1)) << n;
    auto g = gamma_weights(5, 3);
    g[0] += Rational(1, 1000);
    EXPECT_FALSE(verify_xy_zero_with(5, 3, g));
}

TEST(Exponents, Hausdorff) {
    EXPECT_EQ(hausdorff_bound(5), Rational(18, 5));
    EXPECT_EQ(hausdorff_bound(7), Rational(34, 7));
    EXPECT_EQ(hausdorff_bound(9), Rational(6));
    EXPECT_EQ(hausdorff_bound(12), Rational(31, 4));
    EXPECT_EQ(hausdorff_bound(14), Rational(9));
}

TEST(Exponents, K1Threshold) {
    auto t = k1_threshold(10);
    EXPECT_LE(t.root, (std::sqrt(2.0) - 1) * 10 + 0.5 + 0.7071 + 0.00884);
    EXPECT_NEAR(t.residual, 0, 1e-9);
    auto t2 = k1_threshold(2);
    EXPECT_GE(t2.root, 1);
    EXPECT_LE(t2.root, 2);
}

TEST(Exponents, DimensionCorollary) {
    auto c = dimension_corollary(10, 0);
    EXPECT_NEAR(c.best, (2 - std::sqrt(2.0)) * 10 + 1.5 - 1 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(c.best, 6.65076, 1e-5);
    double prev = 0;
    for (int n = 2; n <= 30; ++n) {
        double b = dimension_corollary(n, 0).best;
        EXPECT_GT(b, prev);
        prev = b;
    }
}

TEST(Exponents, PolynomialWolffRows) {
    auto pow = [](long a, int e) { return Rational(a).pow(e); };
    EXPECT_EQ(pwa_exponent(5).p, Rational(1) + pow(5, 2) / pow(4, 3));
    EXPECT_EQ(pwa_exponent(5).p, Rational(89, 64));
    EXPECT_EQ(pwa_exponent(5).argmin_k, 3);
    EXPECT_EQ(pwa_exponent(7).p, Rational(1) + pow(7, 3) / pow(6, 4));
    EXPECT_EQ(pwa_exponent(11).p, Rational(7, 6));
    EXPECT_EQ(pwa_exponent(13).p, Rational(8, 7));
}

TEST(Exponents, OmegaConstant) {
    double w = omega_constant();
    EXPECT_NEAR(std::exp(w), 1 / w, 1e-13);
    EXPECT_NEAR(w, 0.5671432904097838, 1e-13);
}

TEST(Exponents, TableRowsAndFormats) {
    auto rows = table_rows(1, 8, 8);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].value, "21/17");
    auto r3 = table_rows(3, 7, 7);
    EXPECT_EQ(r3[0].value, "34/7");
    auto r4 = table_rows(4, 13, 13);
    EXPECT_EQ(r4[0].value, "8/7");
    auto md = emit_table(1, 5, 6, TableFormat::Markdown);
    EXPECT_NE(md.find('|'), std::string::npos);
    EXPECT_THROW(emit_table(1, 1, 70, TableFormat::Csv), PreconditionError);
}
