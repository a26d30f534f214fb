#include "kakeya/exponents.hpp"
#include "kakeya/common.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace kakeya::exponents {

namespace {

struct PriorRow {
    const char* value;
    const char* source;
};

// Rows of the three tables that quote earlier results rather than new ones.
const std::map<int, PriorRow>& prior_rows(int figure) {
    static const std::map<int, PriorRow> fig1 = {
        {2, {"2", "Cordoba"}},
        {3, {"5/3-eps", "Katz-Zahl"}},
        {4, {"1.4794...", "Katz-Zahl"}},
        {6, {"4/3", "Wolff"}},
    };
    static const std::map<int, PriorRow> fig3 = {
        {2, {"2", "Davies"}},           {3, {"5/2+eps", "Katz-Zahl"}},
        {4, {"3.0858...", "Katz-Zahl"}}, {6, {"7-2sqrt2", "Katz-Tao"}},
        {8, {"11-4sqrt2", "Katz-Tao"}},  {10, {"15-6sqrt2", "Katz-Tao"}},
        {11, {"17-7sqrt2", "Katz-Tao"}}, {13, {"21-9sqrt2", "Katz-Tao"}},
        {15, {"25-11sqrt2", "Katz-Tao"}},
    };
    static const std::map<int, PriorRow> fig4 = {
        {2, {"2", "Cordoba"}},
        {3, {"5/3-eps", "Katz-Zahl"}},
        {4, {"121/81", "Guth-Zahl"}},
        {6, {"4/3", "Wolff"}},
    };
    switch (figure) {
        case 1: return fig1;
        case 3: return fig3;
        case 4: return fig4;
        default: throw PreconditionError("emit_table: figure must be 1, 3 or 4");
    }
}

ExponentReport minimize(int n, const std::vector<ExponentRow>& rows, const Rational& scale,
                        const std::string& label) {
    ExponentReport rep;
    rep.n = n;
    rep.rows = rows;
    const ExponentRow* best = nullptr;
    for (const auto& r : rows) {
        std::ostringstream os;
        os << label << " k=" << r.k << ": max{" << r.first << ", " << r.second << "} = " << r.max;
        rep.trace.push_back(os.str());
        if (!best || r.max < best->max) best = &r;
    }
    rep.argmin_k = best->k;
    rep.p = Rational(1) + best->max * scale;
    rep.p_float = rep.p.to_double();
    rep.trace.push_back("argmin k=" + std::to_string(rep.argmin_k) + " (ties toward smaller k)");
    rep.trace.push_back("p = " + rep.p.str());
    return rep;
}

}  // namespace

Rational broad_exponent(int n, int k) {
    require(2 <= k && k <= n, "broad_exponent: need 2 <= k <= n");
    return Rational(1) + Rational(2L * n, long(n - 1) * n + long(k - 1) * k);
}

Rational bg_threshold(int n, int k) {
    require(2 <= k && k <= n, "bg_threshold: need 2 <= k <= n");
    return Rational(n - k + 2, n - k + 1);
}

ExponentReport linear_exponent(int n) {
    require(n >= 2, "linear_exponent: need n >= 2");
    std::vector<ExponentRow> rows;
    for (int k = 2; k <= n; ++k) {
        Rational a = broad_exponent(n, k) - 1;
        Rational b = bg_threshold(n, k) - 1;
        rows.push_back({k, a, b, a < b ? b : a});
    }
    return minimize(n, rows, Rational(1), "linear");
}

double easy_exponent(int n) {
    require(n >= 2, "easy_exponent: need n >= 2");
    double v = 1.0 + 1.0 / ((2.0 - std::sqrt(2.0)) * (n - 1));
    double p = linear_exponent(n).p_float;
    if (p > v + 1e-12)
        throw AssertionFailure("easy_exponent: linear exponent " + format_double(p) +
                               " exceeds " + format_double(v) + " at n=" + std::to_string(n));
    return v;
}

std::vector<Rational> gamma_weights(int n, int m) {
    require(2 <= m && m <= n - 1, "gamma_weights: need 2 <= m <= n-1");
    std::vector<Rational> g;
    Rational sum(0);
    for (int j = m; j <= n - 1; ++j) {
        Rational closed(long(m - 1) * m, long(j - 1) * j * (j + 1));
        Rational rec = j == m ? Rational(1, m + 1) : Rational(j - 2, j + 1) * g.back();
        if (closed != rec)
            throw AssertionFailure("gamma_weights: closed form and recursion disagree at j=" +
                                   std::to_string(j));
        g.push_back(closed);
        sum += closed;
    }
    g.push_back(Rational(1) - sum);
    return g;
}

std::vector<Rational> p_ladder_from_gammas(int n, int m, const std::vector<Rational>& gammas) {
    require(2 <= m && m <= n, "p_ladder: need 2 <= m <= n");
    require(static_cast<int>(gammas.size()) >= n - m, "p_ladder: too few weights");
    std::vector<Rational> p;
    for (int i = m; i <= n; ++i) {
        Rational conj(m);
        for (int j = m; j <= i - 1; ++j) conj += Rational(i - j) * gammas[j - m];
        p.push_back(conj / (conj - 1));
    }
    return p;
}

std::vector<Rational> p_ladder(int n, int m) {
    if (m == n) return p_ladder_from_gammas(n, m, {});
    auto p = p_ladder_from_gammas(n, m, gamma_weights(n, m));
    Rational last = p.back() / (p.back() - 1);
    if (last != final_conjugate(n, m))
        throw AssertionFailure("p_ladder: closed form mismatch for (n,m)=(" + std::to_string(n) +
                               "," + std::to_string(m) + ")");
    return p;
}

Rational final_conjugate(int n, int m) {
    return Rational(n) - Rational(long(n - 1) * n - long(m - 1) * m, 2L * n);
}

XYCheck xy_values(int n, int m, const std::vector<Rational>& gammas) {
    require(2 <= m && m <= n - 1, "verify_xy_zero: need 2 <= m <= n-1");
    auto p = p_ladder_from_gammas(n, m, gammas);
    Rational one_minus = Rational(1) - p.back().inverse();  // 1 - 1/p with p = p_n
    auto theta = [&](int l) {
        const Rational& pl = p[l - m];
        return (Rational(1) - pl.inverse()).inverse() * one_minus;
    };
    XYCheck out;
    Rational partial(0);
    for (int i = m; i <= n - 1; ++i) {
        partial += gammas[i - m];
        out.X.push_back(theta(i + 1) - theta(i) - partial * one_minus);
    }
    partial = Rational(0);
    for (int i = m - 1; i <= n - 1; ++i) {
        if (i >= m) partial += gammas[i - m];
        out.Y.push_back(theta(i + 1) - (Rational(1) + Rational(i) * (Rational(1) - partial)) * one_minus);
    }
    out.all_zero = true;
    for (const auto& x : out.X) out.all_zero = out.all_zero && x.sign() == 0;
    for (const auto& y : out.Y) out.all_zero = out.all_zero && y.sign() == 0;
    return out;
}

bool verify_xy_zero_with(int n, int m, const std::vector<Rational>& gammas) {
    return xy_values(n, m, gammas).all_zero;
}

bool verify_xy_zero(int n, int m) { return verify_xy_zero_with(n, m, gamma_weights(n, m)); }

Rational hausdorff_bound(int n) {
    Rational p = linear_exponent(n).p;
    return p / (p - 1);
}

K1Threshold k1_threshold(int n) {
    require(n >= 2, "k1_threshold: need n >= 2");
    const double N = n;
    const double s2 = std::sqrt(2.0);
    K1Threshold out;
    out.root = (1.0 - 2.0 * N + std::sqrt(8.0 * N * N + 8.0 * N + 1.0)) / 2.0;
    out.upper_bound = (s2 - 1.0) * N + 0.5 + 1.0 / s2 + 1.0 / (8.0 * s2 * N);
    double k = out.root;
    out.residual = 2.0 * N / (N * (N - 1.0) + k * (k - 1.0)) - 1.0 / (N - k + 1.0);
    out.k0 = (1.0 - 2.0 * N + std::sqrt(8.0 * N * N + 1.0)) / 2.0;
    if (out.root > out.upper_bound)
        throw AssertionFailure("k1_threshold: root exceeds the sqrt2 bound at n=" + std::to_string(n));
    return out;
}

DimensionCorollary dimension_corollary(int n, double eps) {
    require(n >= 2 && eps >= 0, "dimension_corollary: need n >= 2, eps >= 0");
    const double N = n;
    const double s2 = std::sqrt(2.0);
    DimensionCorollary out;
    out.best = (2.0 - s2) * N + 1.5 - 1.0 / s2 - eps;
    double denom = (2.0 - s2) * N - 0.5 - 1.0 / (8.0 * s2 * N);
    out.worst_p = 1.0 + 1.0 / denom;
    out.worst = out.worst_p / (out.worst_p - 1.0);
    out.trace.push_back("best = (2-sqrt2)n + 3/2 - 1/sqrt2 - eps = " + format_double(out.best));
    out.trace.push_back("worst p = 1 + 1/((2-sqrt2)n - 1/2 - 1/(8 sqrt2 n)) = " + format_double(out.worst_p));
    out.trace.push_back("worst dimension = p/(p-1) = " + format_double(out.worst));
    return out;
}

ExponentReport pwa_exponent(int n) {
    require(n >= 2, "pwa_exponent: need n >= 2");
    std::vector<ExponentRow> rows;
    Rational ratio(n, n - 1);
    for (int k = 2; k <= n; ++k) {
        Rational a = ratio.pow(n - k);
        Rational b(n - 1, n - k + 1);
        rows.push_back({k, a, b, a < b ? b : a});
    }
    return minimize(n, rows, Rational(1, n - 1), "pwa");
}

double omega_constant() {
    double lo = 0.5, hi = 1.0;
    while (hi - lo > 1e-14) {
        double mid = 0.5 * (lo + hi);
        if (std::exp(mid) - 1.0 / mid < 0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

bool omega_check(int n) {
    auto rep = pwa_exponent(n);
    double alpha = (rep.p - 1).to_double() * (n - 1);
    return alpha < 1.0 / omega_constant();
}

std::vector<TableRow> table_rows(int figure, int lo, int hi) {
    require(2 <= lo && lo <= hi && hi <= 64, "emit_table: range must lie within [2, 64]");
    const auto& prior = prior_rows(figure);
    std::vector<TableRow> rows;
    for (int n = lo; n <= hi; ++n) {
        auto it = prior.find(n);
        if (it != prior.end()) {
            rows.push_back({n, it->second.value, it->second.value, it->second.source, 0});
            continue;
        }
        if (figure == 1) {
            auto rep = linear_exponent(n);
            rows.push_back({n, rep.p.str(), rep.p.str(), "computed", rep.argmin_k});
        } else if (figure == 3) {
            auto rep = linear_exponent(n);
            Rational d = rep.p / (rep.p - 1);
            rows.push_back({n, d.str(), d.str(), "computed", rep.argmin_k});
        } else {
            auto rep = pwa_exponent(n);
            const auto& w = rep.rows[rep.argmin_k - 2];
            std::string display = rep.p.str();
            if (w.first > w.second) {
                int e = n - rep.argmin_k;
                display = "1+" + std::to_string(n) + "^" + std::to_string(e) + "/" +
                          std::to_string(n - 1) + "^" + std::to_string(e + 1);
            }
            rows.push_back({n, rep.p.str(), display, "computed", rep.argmin_k});
        }
    }
    return rows;
}

std::string emit_table(int figure, int lo, int hi, TableFormat fmt) {
    auto rows = table_rows(figure, lo, hi);
    const char* head = figure == 3 ? "dim_H" : "p";
    std::ostringstream os;
    if (fmt == TableFormat::Csv) {
        os << "n," << head << ",display,source,k\n";
        for (const auto& r : rows)
            os << r.n << ',' << r.value << ',' << r.display << ',' << r.source << ',' << r.k << '\n';
    } else {
        os << "| n | " << head << " | source |\n|---|---|---|\n";
        for (const auto& r : rows) os << "| " << r.n << " | " << r.display << " | " << r.source << " |\n";
    }
    return os.str();
}

}  // namespace kakeya::exponents
