#include "kakeya/config.hpp"
#include "kakeya/parallel.hpp"
#include "kakeya/rational.hpp"
#include "kakeya/rng.hpp"
#include "kakeya/svg.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <numeric>

using namespace kakeya;

TEST(Rational, ReducesAndPrints) {
    EXPECT_EQ(Rational(6, 8).str(), "3/4");
    EXPECT_EQ(Rational(-4, 2).str(), "-2");
    EXPECT_EQ(Rational::parse("18/13"), Rational(36, 26));
    EXPECT_EQ((Rational(1, 3) + Rational(1, 6)).str(), "1/2");
    EXPECT_EQ(Rational(2, 3).pow(3), Rational(8, 27));
    EXPECT_LT(Rational(1, 3), Rational(1, 2));
}

TEST(Rational, RejectsZeroDenominator) {
    EXPECT_THROW(Rational(1, 0), PreconditionError);
    EXPECT_THROW(Rational(0).inverse(), PreconditionError);
}

TEST(Rng, StreamsDependOnlyOnSeedAndTag) {
    Rng a(7, "x", 3), b(7, "x", 3), c(7, "y", 3);
    auto va = a.bits(), vb = b.bits(), vc = c.bits();
    EXPECT_EQ(va, vb);
    EXPECT_NE(va, vc);
    Rng u(1, "unit");
    EXPECT_NEAR(u.unit_vector(5).norm(), 1.0, 1e-12);
}

TEST(Parallel, ChunkResultsIndependentOfWorkers) {
    auto sum_with = [](int w) {
        set_workers(w);
        auto parts = map_chunks<double>(1000, 37, [](std::size_t b, std::size_t e) {
            double s = 0;
            for (std::size_t i = b; i < e; ++i) s += 1.0 / (1.0 + i);
            return s;
        });
        return std::accumulate(parts.begin(), parts.end(), 0.0);
    };
    double one = sum_with(1), four = sum_with(4);
    set_workers(1);
    EXPECT_EQ(one, four);
}

TEST(Config, ParsesNumbersAndRanges) {
    EXPECT_DOUBLE_EQ(parse_number("d", "1/64"), 1.0 / 64);
    EXPECT_DOUBLE_EQ(parse_number("d", "0.5"), 0.5);
    EXPECT_THROW(parse_number("d", "abc"), ConfigError);
    EXPECT_THROW(parse_number("d", "1/0"), ConfigError);
    EXPECT_EQ(parse_range("r", "2..15"), std::make_pair(2, 15));
    EXPECT_THROW(parse_range("r", "5..2"), ConfigError);
}

TEST(Config, RoundTripsText) {
    auto cfg = ExperimentConfig::parse("command = wolff sharpness\n# note\ndelta=1/32\nseed=4\n");
    EXPECT_EQ(cfg.command, "wolff sharpness");
    EXPECT_DOUBLE_EQ(cfg.get_double("delta", 0), 1.0 / 32);
    auto again = ExperimentConfig::parse(cfg.to_text());
    EXPECT_EQ(again.params, cfg.params);
    EXPECT_EQ(again.command, cfg.command);
    EXPECT_THROW(cfg.check_keys({"delta"}), ConfigError);
    EXPECT_THROW(ExperimentConfig::parse("no equals here\n"), ConfigError);
}

TEST(Config, EnvironmentOverridesOutputDir) {
    ::unsetenv("KAKEYA_LAB_OUT");
    EXPECT_EQ(resolve_output_dir(""), "out");
    EXPECT_EQ(resolve_output_dir("mine"), "mine");
    ::setenv("KAKEYA_LAB_OUT", "/tmp/elsewhere", 1);
    EXPECT_EQ(resolve_output_dir("mine"), "/tmp/elsewhere");
    ::unsetenv("KAKEYA_LAB_OUT");
}

TEST(Svg, DeterministicAndValidatesInput) {
    std::string csv = "x,y\n1,2\n2,3\n3,5\n";
    auto a = emit_plot(csv, PlotKind::Series, "t");
    EXPECT_EQ(a, emit_plot(csv, PlotKind::Series, "t"));
    EXPECT_NE(a.find("<svg"), std::string::npos);
    EXPECT_THROW(emit_plot("x,y\n1,zz\n", PlotKind::Series), PreconditionError);
    EXPECT_THROW(emit_plot(csv, PlotKind::Field), PreconditionError);
    EXPECT_THROW(parse_plot_kind("pie"), PreconditionError);
}
