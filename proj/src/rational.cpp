#include "kakeya/rational.hpp"
#include "kakeya/common.hpp"

#include <cmath>
#include <cstdio>

namespace kakeya {

Rational::Rational(long n, long d) {
    require(d != 0, "Rational: zero denominator");
    q_ = mpq_class(n, d);
    q_.canonicalize();
}

Rational Rational::parse(const std::string& s) {
    auto slash = s.find('/');
    mpq_class q;
    if (slash == std::string::npos) {
        q = mpq_class(mpz_class(s));
    } else {
        mpz_class d(s.substr(slash + 1));
        require(d != 0, "Rational: zero denominator in '" + s + "'");
        q = mpq_class(mpz_class(s.substr(0, slash)), d);
    }
    return Rational(q);
}

std::string Rational::str() const {
    if (is_integer()) return num_str();
    return num_str() + "/" + den_str();
}

Rational Rational::pow(int e) const {
    if (e < 0) return inverse().pow(-e);
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), q_.get_num_mpz_t(), static_cast<unsigned long>(e));
    mpz_pow_ui(den.get_mpz_t(), q_.get_den_mpz_t(), static_cast<unsigned long>(e));
    return Rational(mpq_class(num, den));
}

Rational Rational::inverse() const {
    require(q_ != 0, "Rational: inverse of zero");
    return Rational(mpq_class(1 / q_));
}

Rational operator/(const Rational& a, const Rational& b) {
    require(b.q_ != 0, "Rational: division by zero");
    return Rational(mpq_class(a.q_ / b.q_));
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

double unit_ball_volume(int d) {
    return std::pow(kPi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace kakeya
