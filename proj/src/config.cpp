#include "kakeya/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace kakeya {

namespace {

std::string trim(const std::string& s) {
    const char* ws = " \t\r";
    auto b = s.find_first_not_of(ws);
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

double strict_double(const std::string& key, const std::string& t) {
    if (t.empty()) throw ConfigError(key + ": empty number");
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || errno == ERANGE) throw ConfigError(key + ": not a number: '" + t + "'");
    return v;
}

}  // namespace

double parse_number(const std::string& key, const std::string& text) {
    std::string t = trim(text);
    auto slash = t.find('/');
    if (slash == std::string::npos) return strict_double(key, t);
    double a = strict_double(key, trim(t.substr(0, slash)));
    double b = strict_double(key, trim(t.substr(slash + 1)));
    if (b == 0) throw ConfigError(key + ": zero denominator in '" + t + "'");
    return a / b;
}

std::vector<double> parse_number_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(key, item));
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
}

std::pair<int, int> parse_range(const std::string& key, const std::string& text) {
    auto dots = text.find("..");
    if (dots == std::string::npos) throw ConfigError(key + ": expected a..b, got '" + text + "'");
    double a = strict_double(key, trim(text.substr(0, dots)));
    double b = strict_double(key, trim(text.substr(dots + 2)));
    if (a != static_cast<int>(a) || b != static_cast<int>(b) || a > b)
        throw ConfigError(key + ": bad integer range '" + text + "'");
    return {static_cast<int>(a), static_cast<int>(b)};
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value, got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (key == "command") {
            cfg.command = value;
        } else if (key == "output") {
            cfg.output_dir = value;
        } else {
            if (cfg.params.count(key)) throw ConfigError(key + ": duplicate key");
            cfg.params[key] = value;
        }
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string ExperimentConfig::to_text() const {
    std::ostringstream os;
    if (!command.empty()) os << "command=" << command << '\n';
    if (!output_dir.empty()) os << "output=" << output_dir << '\n';
    for (const auto& [k, v] : params) os << k << '=' << v << '\n';
    return os.str();
}

void ExperimentConfig::check_keys(const std::set<std::string>& allowed) const {
    for (const auto& kv : params)
        if (!allowed.count(kv.first)) throw ConfigError("unknown key '" + kv.first + "'");
}

std::string ExperimentConfig::get(const std::string& key, const std::string& fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : parse_number(key, it->second);
}

long ExperimentConfig::get_int(const std::string& key, long fallback) const {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    double v = strict_double(key, trim(it->second));
    if (v != static_cast<long>(v)) throw ConfigError(key + ": expected an integer, got '" + it->second + "'");
    return static_cast<long>(v);
}

std::uint64_t ExperimentConfig::get_seed(const std::string& key, std::uint64_t fallback) const {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    const std::string t = trim(it->second);
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigError(key + ": seeds are non-negative integers, got '" + t + "'");
    errno = 0;
    unsigned long long v = std::strtoull(t.c_str(), nullptr, 10);
    if (errno == ERANGE) throw ConfigError(key + ": seed out of range");
    return v;
}

std::vector<double> ExperimentConfig::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : parse_number_list(key, it->second);
}

std::string resolve_output_dir(const std::string& requested) {
    if (const char* env = std::getenv("KAKEYA_LAB_OUT"); env && *env) return env;
    return requested.empty() ? "out" : requested;
}

}  // namespace kakeya
