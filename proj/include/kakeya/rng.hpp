#pragma once

#include "kakeya/common.hpp"

#include <cstdint>
#include <random>
#include <string_view>

namespace kakeya {

// A named random stream. Each operation call derives its own stream from
// (seed, tag[, shard]) so results never depend on call order or thread count.
class Rng {
public:
    Rng(std::uint64_t seed, std::string_view tag, std::uint64_t shard = 0);

    std::uint64_t bits() { return eng_(); }
    double uniform();                        // [0, 1)
    double uniform(double a, double b);      // [a, b)
    double normal();
    std::uint64_t below(std::uint64_t n);    // [0, n)
    Vec unit_vector(int n);

private:
    std::mt19937_64 eng_;
};

std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_tag(std::string_view tag);

}  // namespace kakeya
