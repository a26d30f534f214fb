#pragma once

#include "kakeya/rational.hpp"

#include <string>
#include <vector>

namespace kakeya::exponents {

struct ExponentRow {
    int k;
    Rational first;   // broad term (or the (n/(n-1))^{n-k} term for the Wolff-axiom exponent)
    Rational second;  // Bourgain-Guth term (or (n-1)/(n-k+1))
    Rational max;
};

struct ExponentReport {
    int n = 0;
    std::vector<ExponentRow> rows;
    int argmin_k = 0;
    Rational p;
    double p_float = 0;
    std::vector<std::string> trace;
};

// p = 1 + min_{2<=k<=n} max{2n/((n-1)n+(k-1)k), 1/(n-k+1)}; ties go to the smaller k.
ExponentReport linear_exponent(int n);

// 1 + 1/((2-sqrt2)(n-1)). Throws AssertionFailure if linear_exponent(n) exceeds it.
double easy_exponent(int n);

Rational broad_exponent(int n, int k);
Rational bg_threshold(int n, int k);

// (gamma_m, ..., gamma_{n-1}, gamma_n) with gamma_n = 1 - sum of the others.
std::vector<Rational> gamma_weights(int n, int m);

// (p_m, ..., p_n).
std::vector<Rational> p_ladder(int n, int m);
std::vector<Rational> p_ladder_from_gammas(int n, int m, const std::vector<Rational>& gammas);

// Closed form of (1 - 1/p_n)^{-1}.
Rational final_conjugate(int n, int m);

struct XYCheck {
    std::vector<Rational> X;  // X_m ... X_{n-1}
    std::vector<Rational> Y;  // Y_{m-1} ... Y_{n-1}
    bool all_zero = false;
};

XYCheck xy_values(int n, int m, const std::vector<Rational>& gammas);
bool verify_xy_zero(int n, int m);
bool verify_xy_zero_with(int n, int m, const std::vector<Rational>& gammas);

Rational hausdorff_bound(int n);

struct K1Threshold {
    double root;
    double upper_bound;
    double residual;
    double k0;
};

K1Threshold k1_threshold(int n);

struct DimensionCorollary {
    double best;          // (2-sqrt2)n + 3/2 - 1/sqrt2 - eps
    double worst_p;       // 1 + 1/((2-sqrt2)n - 1/2 - 1/(8 sqrt2 n))
    double worst;         // conjugate of worst_p
    std::vector<std::string> trace;
};

DimensionCorollary dimension_corollary(int n, double eps);

// p = 1 + min_k max{(n/(n-1))^{n-k}, (n-1)/(n-k+1)}/(n-1).
ExponentReport pwa_exponent(int n);

// Solution of e^W = 1/W by bisection.
double omega_constant();
bool omega_check(int n);  // alpha_n = (p-1)(n-1) < 1/Omega

enum class TableFormat { Csv, Markdown };

struct TableRow {
    int n;
    std::string value;      // exact value or quoted prior-work value
    std::string display;    // human form, e.g. 1+5^2/4^3
    std::string source;     // "computed" or a prior-work label
    int k;                  // argmin witness, 0 for prior rows
};

std::vector<TableRow> table_rows(int figure, int lo, int hi);
std::string emit_table(int figure, int lo, int hi, TableFormat fmt);

}  // namespace kakeya::exponents
