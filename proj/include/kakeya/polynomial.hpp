#pragma once

#include "kakeya/common.hpp"

#include <string>
#include <vector>

namespace kakeya {

struct Monomial {
    std::vector<int> exps;
    double coef = 0;
};

// Real polynomial in n variables. Terms are kept in graded-lex order.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(int nvars) : n_(nvars) {}

    static Polynomial from_terms(int nvars, std::vector<Monomial> terms);
    // Coefficients listed against monomial_basis(nvars, degree).
    static Polynomial from_coefficients(int nvars, int degree, const std::vector<double>& coefs);
    static Polynomial linear(const Vec& normal, double offset);  // normal.x + offset

    // Exponent vectors of total degree <= d in graded-lex order (constant first).
    static std::vector<std::vector<int>> monomial_basis(int nvars, int degree);

    int nvars() const { return n_; }
    int degree() const { return deg_; }
    const std::vector<Monomial>& terms() const { return terms_; }
    std::vector<double> coefficients(int degree) const;

    double eval(const double* x) const;
    double eval(const Vec& x) const { return eval(x.data()); }
    // Value and gradient in one pass; grad must hold nvars entries.
    double eval_grad(const double* x, double* grad) const;
    Vec gradient(const Vec& x) const;

    Polynomial operator*(const Polynomial& other) const;
    Polynomial operator+(const Polynomial& other) const;

    std::string str() const;

private:
    void normalize();

    int n_ = 0;
    int deg_ = 0;
    std::vector<Monomial> terms_;
};

// Evaluates every basis monomial at x (same order as monomial_basis).
void eval_basis(const std::vector<std::vector<int>>& basis, const double* x, int nvars, double* out);

}  // namespace kakeya
