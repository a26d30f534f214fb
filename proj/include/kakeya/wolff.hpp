#pragma once

#include "kakeya/algebraic.hpp"
#include "kakeya/geometry.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kakeya {

// Scales lambda_k <= ... <= lambda_m with varieties Z_j (dim j) and nested balls.
struct MultiscaleConfig {
    int n = 3;
    int k = 1;
    int m = 2;
    double delta = 1.0 / 32;
    double rho = 1.0 / 16;
    std::vector<double> lambdas;   // index j - k
    std::vector<Variety> varieties;
    std::vector<Vec> centers;      // ball centers

    void validate() const;
    // (prod_{j<m} rho/lambda_j) (rho/lambda_m)^{n-m} delta^{-(n-1)}
    double bound() const;
};

// Chain of nested affine planes through x0: Z_j = x0 + span(u_1..u_j) for a
// fixed orthonormal frame, all balls centered at x0.
MultiscaleConfig nested_plane_config(int n, int k, int m, double delta, double rho, const std::vector<double>& lambdas,
                                     const Vec& x0);

struct CountResult {
    std::size_t count = 0;
    double bound = 0;
    double ratio = 0;
};

// Tubes T with |T cap B_j cap N_rho Z_j| >= lambda_j |T| for every scale.
CountResult count_multiscale_tubes(const TubeFamily& family, const MultiscaleConfig& cfg);
// Whether one tube passes all occupancy tests.
bool occupies_all(const Tube& tube, const MultiscaleConfig& cfg);

// Bush of delta-separated tubes through x0 whose directions make angle at most
// arcsin(min(1, 2 rho/lambda_j)) with every Z_j. Empty (with a diagnostic)
// when the bound is below 1.
TubeFamily nested_plane_extremal_family(const MultiscaleConfig& cfg, std::uint64_t seed, std::string* diagnostic = nullptr);
TubeFamily nested_plane_extremal_family(int n, int k, int m, double delta, double rho,
                                        const std::vector<double>& lambdas, std::uint64_t seed,
                                        std::string* diagnostic = nullptr);

struct SmConfig {
    int n = 3;
    int k = 1;
    int m = 2;
    int degree = 1;
    double rho = 1.0 / 16;
    std::vector<double> lambdas;    // index j - k
    std::vector<Variety> planes;    // affine, dim j
    std::vector<Vec> centers;       // ball centers
    std::size_t samples = 200000;

    void validate() const;
    // Dyadic interval I_j = [lo, hi] on the last coordinate axis.
    std::pair<double, double> interval(int j) const;
    double bound() const;  // (prod_{j<m} rho/lambda_j) lambda_m^m rho^{n-m}
};

SmConfig nested_sm_config(int n, int k, int m, double rho, const std::vector<double>& lambdas, std::size_t samples);

struct SmEstimate {
    double volume = 0;
    double stderr_ = 0;
    double bound = 0;
    double ratio = 0;
    std::size_t samples = 0;
    std::size_t hits = 0;
    bool inconclusive = false;  // fewer than 10 accepted samples
};

// Volume of S_m(I_m, rho) by sampling the image region directly.
SmEstimate sm_volume(const SmConfig& cfg, std::uint64_t seed);

// Whether x lies on some admissible segment: exists d with |d_i|, |a_i| <= 1
// (a = x' - t d) and l_{a,d}(I_j) inside N_rho Z_j cap B_j for all j.
bool sm_member(const SmConfig& cfg, const Vec& x);

struct AverageBound {
    double lhs = 0;
    double rhs = 0;
    double integral = 0;
    bool holds = false;
};

// |P(t)| <= (8m max{|I|, dist(t,I)}/|I|)^m (1/|I|) int_I |P|; coefficients in
// increasing powers, m = degree.
AverageBound poly_average_bound(const std::vector<double>& coefs, double a, double b, double t);

}  // namespace kakeya
