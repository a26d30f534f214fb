#pragma once

#include "kakeya/common.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace kakeya {

// key=value experiment description. Values are kept as written so the text
// form round-trips exactly.
struct ExperimentConfig {
    std::string command;
    std::map<std::string, std::string> params;
    std::string output_dir;

    // One "key=value" per line; '#' starts a comment. "command" and "output"
    // are reserved keys.
    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::string& path);
    std::string to_text() const;

    // Throws ConfigError naming the first key outside the allowed set.
    void check_keys(const std::set<std::string>& allowed) const;

    bool has(const std::string& key) const { return params.count(key) > 0; }
    std::string get(const std::string& key, const std::string& fallback) const;
    // Decimal or a/b.
    double get_double(const std::string& key, double fallback) const;
    long get_int(const std::string& key, long fallback) const;
    std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;
    std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
};

// Parses "1/64", "0.015625" or "3"; throws ConfigError on anything else.
double parse_number(const std::string& key, const std::string& text);
std::vector<double> parse_number_list(const std::string& key, const std::string& text);
// "a..b" -> (a, b).
std::pair<int, int> parse_range(const std::string& key, const std::string& text);

// KAKEYA_LAB_OUT if set, else the requested directory (default "out").
std::string resolve_output_dir(const std::string& requested);

}  // namespace kakeya
