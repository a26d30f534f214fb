#include "kakeya/rng.hpp"

#include <cmath>

namespace kakeya {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t hash_tag(std::string_view tag) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Rng::Rng(std::uint64_t seed, std::string_view tag, std::uint64_t shard)
    : eng_(mix64(mix64(seed) ^ hash_tag(tag) ^ mix64(shard + 0x632be59bd9b4e019ULL))) {}

double Rng::uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

double Rng::uniform(double a, double b) { return a + (b - a) * uniform(); }

double Rng::normal() {
    double u = 1.0 - uniform();
    double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * kPi * v);
}

std::uint64_t Rng::below(std::uint64_t n) {
    require(n > 0, "Rng::below: empty range");
    std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % n);
    std::uint64_t x;
    do {
        x = eng_();
    } while (x >= limit);
    return x % n;
}

Vec Rng::unit_vector(int n) {
    Vec v(n);
    double norm = 0;
    do {
        for (int i = 0; i < n; ++i) v[i] = normal();
        norm = v.norm();
    } while (norm < 1e-12);
    return v / norm;
}

}  // namespace kakeya
