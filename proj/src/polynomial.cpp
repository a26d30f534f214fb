#include "kakeya/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

namespace kakeya {

namespace {

// Graded-lex comparison: lower total degree first, then larger leading exponents.
bool grlex_less(const std::vector<int>& a, const std::vector<int>& b) {
    int da = std::accumulate(a.begin(), a.end(), 0);
    int db = std::accumulate(b.begin(), b.end(), 0);
    if (da != db) return da < db;
    return a > b;
}

void power_table(const double* x, int n, int deg, std::vector<double>& pw) {
    pw.assign(static_cast<std::size_t>(n) * (deg + 1), 1.0);
    for (int i = 0; i < n; ++i)
        for (int e = 1; e <= deg; ++e) pw[i * (deg + 1) + e] = pw[i * (deg + 1) + e - 1] * x[i];
}

}  // namespace

std::vector<std::vector<int>> Polynomial::monomial_basis(int nvars, int degree) {
    std::vector<std::vector<int>> out;
    std::vector<int> e(nvars, 0);
    for (int d = 0; d <= degree; ++d) {
        // All exponent vectors of total degree d, lexicographically descending.
        std::vector<std::vector<int>> level;
        std::function<void(int, int)> rec = [&](int i, int left) {
            if (i == nvars - 1) {
                e[i] = left;
                level.push_back(e);
                return;
            }
            for (int k = left; k >= 0; --k) {
                e[i] = k;
                rec(i + 1, left - k);
            }
        };
        rec(0, d);
        out.insert(out.end(), level.begin(), level.end());
    }
    return out;
}

void eval_basis(const std::vector<std::vector<int>>& basis, const double* x, int nvars, double* out) {
    int deg = 0;
    for (const auto& b : basis) deg = std::max(deg, std::accumulate(b.begin(), b.end(), 0));
    std::vector<double> pw;
    power_table(x, nvars, deg, pw);
    for (std::size_t k = 0; k < basis.size(); ++k) {
        double v = 1.0;
        for (int i = 0; i < nvars; ++i) v *= pw[i * (deg + 1) + basis[k][i]];
        out[k] = v;
    }
}

Polynomial Polynomial::from_terms(int nvars, std::vector<Monomial> terms) {
    Polynomial p(nvars);
    for (auto& t : terms) require(static_cast<int>(t.exps.size()) == nvars, "Polynomial: exponent arity mismatch");
    p.terms_ = std::move(terms);
    p.normalize();
    return p;
}

Polynomial Polynomial::from_coefficients(int nvars, int degree, const std::vector<double>& coefs) {
    auto basis = monomial_basis(nvars, degree);
    require(coefs.size() == basis.size(), "Polynomial: coefficient count does not match the monomial basis");
    std::vector<Monomial> terms;
    for (std::size_t k = 0; k < basis.size(); ++k) terms.push_back({basis[k], coefs[k]});
    return from_terms(nvars, std::move(terms));
}

Polynomial Polynomial::linear(const Vec& normal, double offset) {
    const int n = static_cast<int>(normal.size());
    std::vector<Monomial> terms;
    terms.push_back({std::vector<int>(n, 0), offset});
    for (int i = 0; i < n; ++i) {
        std::vector<int> e(n, 0);
        e[i] = 1;
        terms.push_back({e, normal[i]});
    }
    return from_terms(n, std::move(terms));
}

void Polynomial::normalize() {
    std::map<std::vector<int>, double, decltype(&grlex_less)> acc(&grlex_less);
    for (const auto& t : terms_) acc[t.exps] += t.coef;
    terms_.clear();
    for (const auto& [e, c] : acc)
        if (c != 0.0) terms_.push_back({e, c});
    deg_ = 0;
    for (const auto& t : terms_) deg_ = std::max(deg_, std::accumulate(t.exps.begin(), t.exps.end(), 0));
}

std::vector<double> Polynomial::coefficients(int degree) const {
    auto basis = monomial_basis(n_, degree);
    std::vector<double> out(basis.size(), 0.0);
    for (const auto& t : terms_) {
        auto it = std::find(basis.begin(), basis.end(), t.exps);
        require(it != basis.end(), "Polynomial: degree exceeds the requested basis");
        out[it - basis.begin()] = t.coef;
    }
    return out;
}

double Polynomial::eval(const double* x) const {
    const int deg = degree();
    thread_local std::vector<double> pw;
    power_table(x, n_, deg, pw);
    double s = 0;
    for (const auto& t : terms_) {
        double v = t.coef;
        for (int i = 0; i < n_; ++i) v *= pw[i * (deg + 1) + t.exps[i]];
        s += v;
    }
    return s;
}

double Polynomial::eval_grad(const double* x, double* grad) const {
    const int deg = degree();
    thread_local std::vector<double> pw;
    power_table(x, n_, deg, pw);
    std::fill(grad, grad + n_, 0.0);
    double s = 0;
    for (const auto& t : terms_) {
        double v = t.coef;
        for (int i = 0; i < n_; ++i) v *= pw[i * (deg + 1) + t.exps[i]];
        s += v;
        for (int j = 0; j < n_; ++j) {
            if (t.exps[j] == 0) continue;
            double g = t.coef * t.exps[j];
            for (int i = 0; i < n_; ++i) g *= pw[i * (deg + 1) + (i == j ? t.exps[i] - 1 : t.exps[i])];
            grad[j] += g;
        }
    }
    return s;
}

Vec Polynomial::gradient(const Vec& x) const {
    Vec g(n_);
    eval_grad(x.data(), g.data());
    return g;
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
    require(n_ == other.n_, "Polynomial: variable count mismatch");
    std::vector<Monomial> terms;
    for (const auto& a : terms_)
        for (const auto& b : other.terms_) {
            Monomial m{a.exps, a.coef * b.coef};
            for (int i = 0; i < n_; ++i) m.exps[i] += b.exps[i];
            terms.push_back(std::move(m));
        }
    return from_terms(n_, std::move(terms));
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
    require(n_ == other.n_, "Polynomial: variable count mismatch");
    auto terms = terms_;
    terms.insert(terms.end(), other.terms_.begin(), other.terms_.end());
    return from_terms(n_, std::move(terms));
}

std::string Polynomial::str() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& t : terms_) {
        if (!first) os << " + ";
        first = false;
        os << t.coef;
        for (int i = 0; i < n_; ++i)
            if (t.exps[i] > 0) os << "*x" << i << (t.exps[i] > 1 ? "^" + std::to_string(t.exps[i]) : "");
    }
    if (first) os << "0";
    return os.str();
}

}  // namespace kakeya
