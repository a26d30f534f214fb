#pragma once

#include "kakeya/exponents.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace kakeya::experiments {

// One output file. Content never carries timings or host details so that
// artifacts can be byte-compared across runs and worker counts.
struct Artifact {
    std::string name;
    std::string content;
};

struct Outcome {
    bool ok = true;  // the experiment's own property held
    std::string summary;
    std::map<std::string, double> metrics;
    std::vector<Artifact> artifacts;
};

// Writes every artifact under dir (created if missing); returns the paths.
std::vector<std::string> write_artifacts(const Outcome& out, const std::string& dir);

Outcome exponent_table(int figure, int lo, int hi, exponents::TableFormat fmt);
// verify_xy_zero and the p ladder closed form for lo <= m < n <= hi.
Outcome exponent_system(int lo, int hi);

// Random (P, I, t) with deg P <= max_degree, |t| <= 10.
Outcome poly_bound_fuzz(std::size_t trials, int max_degree, std::uint64_t seed);

// Tubes against polynomial partitions of random point clouds in the unit square.
struct BezoutConfig {
    std::size_t tubes = 1000;
    std::size_t partitions = 50;
    int max_degree = 4;
    double delta = 1.0 / 32;
    double h = 1.0 / 128;
    std::size_t points = 200;
    std::uint64_t seed = 1;
};
Outcome bezout(const BezoutConfig& cfg);

struct EqualMassConfig {
    std::size_t instances = 50;
    std::size_t points = 100;
    std::vector<int> degrees{2, 4};  // used in turn
    double tol = 0.25;
    double h = 1.0 / 64;
    std::uint64_t seed = 1;
};
Outcome equal_mass(const EqualMassConfig& cfg);

// kakeya_ratio at p over the deltas, normalized by sqrt(log 1/delta).
Outcome cordoba(const std::vector<double>& deltas, double p, std::uint64_t seed);

struct VanishingConfig {
    std::size_t families = 20;
    double delta = 1.0 / 32;
    double radius = 0.25;
    int A = 1;
    std::uint64_t seed = 1;
};
Outcome vanishing(const VanishingConfig& cfg);

// Grid field of a direction-separated family: CSV slice plus SVG.
Outcome field(int n, double delta, std::uint64_t seed);
// Broad/narrow decomposition constant for a direction-separated family.
Outcome split(int n, double delta, double p, int A, std::uint64_t seed);

// Partition of a random point cloud, exported as polynomial, cell CSV and SVG.
Outcome partition_cells(std::size_t points, int D, double tol, std::uint64_t seed);

struct SharpnessConfig {
    double delta = 1.0 / 32;
    std::vector<double> rho_factors{2, 4};      // rho = factor * delta
    std::vector<double> lambda1{0.25, 0.5};     // lambda_2 = 1
    std::size_t random_families = 20;
    std::uint64_t seed = 1;
};
Outcome sharpness(const SharpnessConfig& cfg);

// Single multiscale count on a direction-separated family (n=3, k=1, m=2).
Outcome wolff_count(double delta, double rho, const std::vector<double>& lambdas, std::uint64_t seed);
Outcome sm_volume(double rho, const std::vector<double>& lambdas, std::size_t samples, std::uint64_t seed);

struct CorpusConfig {
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    double delta = 1.0 / 64;
};
Outcome corpus(const CorpusConfig& cfg);
Outcome alg2(double delta, std::uint64_t seed);
// One run on B(center, delta^eps0) with Z the plane.
Outcome alg1(double delta, std::uint64_t seed);

// Figures 1, 3 and 4 over 2..15 as CSV, named figure{N}.csv.
Outcome golden_tables();

// Regression constants from fresh runs, margins applied.
struct Calibration {
    double cordoba_C = 0;
    double wolff_lower = 0;
    double wolff_upper = 0;
    double fitted_I = 0;
    double fitted_II = 0;
    double fitted_III = 0;
    std::map<std::uint64_t, double> fke;
};
std::string calibration_json(const Calibration& c);
Calibration parse_calibration(const std::string& json);
Calibration calibrate(const Outcome& cordoba_run, const Outcome& sharpness_run, const Outcome& corpus_run);

}  // namespace kakeya::experiments
