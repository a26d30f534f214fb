#pragma once

#include "kakeya/algebraic.hpp"
#include "kakeya/norms.hpp"
#include "kakeya/polynomial.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kakeya {

// r/2 for 'c', r^{1+eps0} for 'a'.
double sigma_step(double r, char letter, double eps0);

// Quantities fixed by a history word.
struct History {
    std::string word;
    int count_a = 0;
    int count_c = 0;

    static History of(const std::string& word);
    double scale(double r0, double eps0) const;  // sigma applied letter by letter
    int A(int A0) const;                         // 2^{-#a} A0, at least 1
    double coefficient(int d, int n, double eps0) const;  // d^{#c eps0} d^{#a (n + eps0)}
};

struct AlgConfig {
    double delta = 1.0 / 64;
    double r0 = 0;  // 0 means delta^{eps0}
    int A = 4;
    double eps0 = 0.1;
    int d = 4;
    int k = 2;
    double p = 2;
    double beta = 0.125;
    double c_tang = 10;     // [tang] stopping constant
    double c_alg = 4;       // degree ceiling factor for the walls
    double tangent_angle = 1;  // constant in the tangency test
    int budget = 64;
    int restarts = 48;      // partition search effort per cell
    int iterations = 30;
    double h = 0;           // grid step; 0 means delta/4
    std::uint64_t seed = 0;

    double grid_step() const { return h > 0 ? h : delta / 4; }
    double initial_scale() const;
    void validate() const;
};

struct AlgCell {
    int id = 0;
    std::vector<std::size_t> region;  // sorted grid indices
    std::vector<int> tubes;           // ascending tube ids
    double broad = 0;                 // BL^p_{k,A_j}(O; T[O])
};

struct Ensemble {
    int step = 0;
    History history;
    double r = 0;
    int A = 0;
    double C = 0;
    int d = 0;
    std::vector<AlgCell> cells;
};

enum class StopReason { Tiny, Tang, Budget, Exhausted };
std::string to_string(StopReason s);

struct StepRecord {
    int step = 0;
    std::string word;
    double r = 0;
    int A = 0;
    double C = 0;
    std::size_t cells = 0;
    std::size_t tubes_sum = 0;
    std::size_t tubes_max = 0;
    double broad_sum = 0;
    double ratio_I = 0;    // BL^p(B_r0) / (C_j sum_O BL^p(O))
    double ratio_II = 0;   // sum #T[O] / (C_j d^{#c} #T)
    double ratio_III = 0;  // max #T[O] / (C_j d^{-#c(m-1)} #T)
    std::size_t cellular_cells = 0;
    std::size_t algebraic_cells = 0;
    char next = 0;  // letter appended, 0 on the final step
};

struct TangSet {
    Polynomial equation;  // S = Z(equation), dim m-1
    Vec center;           // B[S]
    double radius = 0;
    std::vector<int> tubes;  // T[S]
    double broad = 0;        // BL^p_{k,A_j/2}(B[S]; T[S])
};

struct TangCheck {
    bool evaluated = false;
    double broad_total = 0;
    double broad_tang = 0;
    double count_total = 0;
    double count_tang = 0;
    double max_total = 0;
    double max_tang = 0;
    bool cond_broad = false;
    bool cond_count = false;
    bool cond_max = false;

    bool fires() const { return evaluated && cond_broad && cond_count && cond_max; }
};

struct RunReport {
    StopReason stop = StopReason::Tiny;
    int n = 2;
    int m = 2;
    double delta = 0;
    double r0 = 0;
    double eps0 = 0;
    int d = 0;
    int A = 0;
    std::size_t tubes = 0;
    double lhs = 0;  // BL^p_{k,A}(B_r0)
    std::vector<StepRecord> steps;
    double fitted_I = 0;
    double fitted_II = 0;
    double fitted_III = 0;
    std::vector<TangCheck> tang_checks;  // one per step where candidates existed
    std::vector<TangSet> tang;           // S, T[S], B[S] when stop = tang
};

struct Alg1Result {
    std::vector<Ensemble> ensembles;
    RunReport report;
};

// Family tangent to Z in B(x0, r0); n = 2.
Alg1Result run_alg1(const TubeFamily& family, const Variety& Z, const Vec& x0, const AlgConfig& cfg);

// Same, reusing an evaluator built on the family: region (sorted) and tube ids restrict
// the input. Tangency of the tubes to Z is not re-checked.
Alg1Result run_alg1(const TubeFamily& family, const BroadEvaluator& ev, const Variety& Z, const Vec& x0,
                    std::vector<std::size_t> region, std::vector<int> tubes, const AlgConfig& cfg);

enum class Alg2Outcome { TinyDominant, Degenerate, TangDominant };
std::string to_string(Alg2Outcome o);

struct BallRun {
    Vec center;
    double radius = 0;
    std::size_t tubes = 0;
    double broad = 0;
    StopReason stop = StopReason::Tiny;
    int count_c = 0;
    int count_a = 0;
    double D = 1;  // d^{#c(J)}
    std::size_t final_cells = 0;
    double final_broad = 0;
    std::size_t final_tubes_sum = 0;
    std::size_t final_tubes_max = 0;
    int final_A = 0;
    double fitted_I = 0;
    double fitted_II = 0;
    double fitted_III = 0;
};

struct Alg2Config {
    AlgConfig alg;
    std::vector<double> p_vector{2.0};  // p_k >= ... >= p_n
};

struct Alg2Report {
    Alg2Outcome outcome = Alg2Outcome::TinyDominant;
    std::string message;
    int level = 2;  // m at termination
    double delta = 0;
    std::size_t tubes = 0;
    double total_broad = 0;  // BL^p_{k,A}(R^n)
    double level_sum = 0;    // sum over S of BL^p(B[S])
    double tiny_sum = 0;
    double tang_sum = 0;
    std::vector<BallRun> runs;
    std::vector<RunReport> reports;
    std::vector<std::pair<double, std::size_t>> groups;  // D value -> number of tiny runs
    double group_D = 1;
    double fke_lhs = 0;
    double fke_rhs = 0;
    double fke_ratio = 0;
    double theta = 1;
    double property2 = 0;  // max over tiny runs of sum #T[O] / (D^{1+eps0} #T[S])
    double property3 = 0;  // max over tiny runs of max #T[O] / (D^{-(m-1)+eps0} #T[S])
    std::vector<double> level1_norms;  // broad norms on the tangent sets one level down
};

Alg2Report run_alg2(const TubeFamily& family, const Alg2Config& cfg);

// (1 - 1/p_l)^{-1} (1 - 1/p).
double theta_value(double p_l, double p);

// prod_{i=m-1}^{n-1} (delta_i/delta)^{-sum_{j=m}^{i} gamma_j} D_i^{-i(1 - sum_{j=m}^{i} gamma_j)} delta^{-(n-1)};
// gammas = (gamma_m..gamma_n), D and deltas indexed i = m-1..n-1.
double second_key_estimate(const std::vector<double>& gammas, const std::vector<double>& D,
                           const std::vector<double>& deltas, double delta, int n, int m);

std::string report_json(const RunReport& r);
std::string report_json(const Alg2Report& r);
// Fixed-width step table for terminal output.
std::string report_table(const RunReport& r);

}  // namespace kakeya
