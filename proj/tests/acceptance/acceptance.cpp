// Acceptance run: one PASS/FAIL line per criterion. Golden files are read from
// --golden; artifacts of every run land under --scratch.

#include "kakeya/common.hpp"
#include "kakeya/experiments.hpp"
#include "kakeya/parallel.hpp"
#include "kakeya/rational.hpp"
#include "kakeya/svg.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace ex = kakeya::experiments;
using kakeya::Rational;

namespace {

struct Args {
    std::string golden = "golden";
    std::string scratch = "acceptance-out";
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw kakeya::ConfigError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

// Named run, kept so that criterion 12 can repeat it with more workers.
struct Run {
    std::string name;
    std::function<ex::Outcome()> make;
    ex::Outcome first;
};

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
    if (!pass) ++failures;
    std::cout << "criterion " << id << ": " << (pass ? "PASS" : "FAIL") << "  " << detail << std::endl;
}

// Column `col` of a figure CSV keyed by n.
std::map<int, std::string> column(const std::string& csv, int col) {
    std::map<int, std::string> out;
    std::stringstream ss(csv);
    std::string line;
    std::getline(ss, line);
    while (std::getline(ss, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) cells.push_back(c);
        if (static_cast<int>(cells.size()) > col) out[std::stoi(cells[0])] = cells[col];
    }
    return out;
}

Rational one_plus(long a, int ea, long b, int eb) { return Rational(1) + Rational(a).pow(ea) / Rational(b).pow(eb); }

// Figure rows checked cell-for-cell plus a byte comparison against the golden file.
void figure_criterion(int id, int figure, const std::map<int, Rational>& expected, const Args& args,
                      std::vector<Run>& runs, double limit) {
    auto t0 = std::chrono::steady_clock::now();
    auto o = ex::golden_tables();
    double secs = seconds_since(t0);
    const std::string name = "figure" + std::to_string(figure) + ".csv";
    std::string csv;
    for (const auto& a : o.artifacts)
        if (a.name == name) csv = a.content;
    auto values = column(csv, 1);
    int bad = 0;
    std::string first_bad;
    for (const auto& [n, want] : expected) {
        bool ok = values.count(n) && Rational::parse(values[n]) == want;
        if (!ok && first_bad.empty()) first_bad = "n=" + std::to_string(n) + " got '" + values[n] + "' want " + want.str();
        bad += !ok;
    }
    std::string golden = slurp(args.golden + "/" + name);
    bool same = golden == csv;
    bool pass = bad == 0 && same && secs < limit;
    std::string detail = std::to_string(expected.size() - bad) + "/" + std::to_string(expected.size()) +
                         " rows exact, golden " + (same ? "identical" : "differs") + ", " + fmt(secs) + " s";
    if (!first_bad.empty()) detail += ", " + first_bad;
    report(id, pass, detail);
    runs.push_back({"figure" + std::to_string(figure), ex::golden_tables, std::move(o)});
}

}  // namespace

int main(int argc, char** argv) {
    Args args;
    for (int i = 1; i + 1 < argc; i += 2) {
        std::string k = argv[i];
        if (k == "--golden") args.golden = argv[i + 1];
        else if (k == "--scratch") args.scratch = argv[i + 1];
        else {
            std::cerr << "unknown option " << k << '\n';
            return 2;
        }
    }
    kakeya::set_workers(1);
    ex::Calibration golden;
    try {
        golden = ex::parse_calibration(slurp(args.golden + "/regression-constants.json"));
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }

    std::vector<Run> runs;
    auto timed = [&](const std::string& name, std::function<ex::Outcome()> make, double& secs) -> const ex::Outcome& {
        auto t0 = std::chrono::steady_clock::now();
        ex::Outcome o = make();
        secs = seconds_since(t0);
        ex::write_artifacts(o, args.scratch + "/" + name);
        runs.push_back({name, std::move(make), std::move(o)});
        return runs.back().first;
    };

    figure_criterion(1, 1,
                     {{5, Rational(18, 13)}, {7, Rational(34, 27)}, {8, Rational(21, 17)}, {9, Rational(6, 5)},
                      {10, Rational(13, 11)}, {11, Rational(7, 6)}, {12, Rational(31, 27)}, {13, Rational(106, 93)},
                      {14, Rational(9, 8)}, {15, Rational(47, 42)}},
                     args, runs, 1.0);
    figure_criterion(2, 3,
                     {{5, Rational(18, 5)}, {7, Rational(34, 7)}, {9, Rational(6)}, {12, Rational(31, 4)},
                      {14, Rational(9)}},
                     args, runs, 1.0);
    figure_criterion(3, 4,
                     {{5, one_plus(5, 2, 4, 3)}, {7, one_plus(7, 3, 6, 4)}, {8, one_plus(8, 4, 7, 5)},
                      {9, one_plus(9, 4, 8, 5)}, {10, one_plus(10, 5, 9, 6)}, {11, Rational(7, 6)},
                      {12, one_plus(12, 6, 11, 7)}, {13, Rational(8, 7)}, {14, one_plus(14, 7, 13, 8)},
                      {15, one_plus(15, 8, 14, 9)}},
                     args, runs, 1.0);

    double s = 0;
    {
        const auto& o = timed("system", [] { return ex::exponent_system(2, 20); }, s);
        report(4, o.ok && s < 5,
               fmt(o.metrics.at("pairs")) + " pairs, " + fmt(o.metrics.at("failures")) + " failures, " + fmt(s) + " s");
    }
    {
        const auto& o = timed("poly-bound", [] { return ex::poly_bound_fuzz(10000, 8, 1); }, s);
        report(5, o.metrics.at("violations") == 0 && o.metrics.at("trials") == 10000 && s < 60,
               fmt(o.metrics.at("trials")) + " cases, " + fmt(o.metrics.at("violations")) + " violations, max lhs/rhs " +
                   fmt(o.metrics.at("worst_ratio")) + ", " + fmt(s) + " s");
    }
    {
        const auto& o = timed("bezout", [] { return ex::bezout(ex::BezoutConfig{}); }, s);
        report(6, o.metrics.at("violations") == 0 && o.metrics.at("checks") == 50000 && s < 120,
               fmt(o.metrics.at("checks")) + " tube/partition pairs, " + fmt(o.metrics.at("violations")) +
                   " violations, " + fmt(s) + " s");
    }
    {
        const auto& o = timed("equal-mass", [] { return ex::equal_mass(ex::EqualMassConfig{}); }, s);
        report(7, o.metrics.at("passed") == 50 && o.metrics.at("instances") == 50 && s < 120,
               fmt(o.metrics.at("passed")) + "/" + fmt(o.metrics.at("instances")) + " instances, " + fmt(s) + " s");
    }
    {
        const auto& o = timed("cordoba", [] { return ex::cordoba({1.0 / 16, 1.0 / 32, 1.0 / 64}, 2, 1); }, s);
        double C = o.metrics.at("C");
        double rel = std::abs(C - golden.cordoba_C) / golden.cordoba_C;
        report(8, rel <= 0.1 && s < 300,
               "C_run " + fmt(C) + " vs golden " + fmt(golden.cordoba_C) + " (rel " + fmt(rel) + "), " + fmt(s) + " s");
    }
    {
        const auto& o = timed("vanishing", [] { return ex::vanishing(ex::VanishingConfig{}); }, s);
        report(9, o.ok && o.metrics.at("passed") == 20 && s < 60,
               fmt(o.metrics.at("passed")) + "/20 families, " + fmt(s) + " s");
    }
    {
        const auto& o = timed("sharpness", [] { return ex::sharpness(ex::SharpnessConfig{}); }, s);
        double lo = o.metrics.at("extremal_min"), hi = o.metrics.at("random_max");
        report(10, lo >= golden.wolff_lower && hi <= golden.wolff_upper && s < 300,
               "extremal min " + fmt(lo) + " >= " + fmt(golden.wolff_lower) + ", random max " + fmt(hi) +
                   " <= " + fmt(golden.wolff_upper) + ", " + fmt(s) + " s");
    }
    {
        const auto& o = timed("corpus", [] { return ex::corpus(ex::CorpusConfig{}); }, s);
        double fI = o.metrics.at("fitted_I"), fII = o.metrics.at("fitted_II"), fIII = o.metrics.at("fitted_III");
        bool fitted = fI <= golden.fitted_I && fII <= golden.fitted_II && fIII <= golden.fitted_III;
        int fke_bad = 0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            auto it = o.metrics.find("fke_" + std::to_string(seed));
            auto gt = golden.fke.find(seed);
            if (it == o.metrics.end() || gt == golden.fke.end() || !std::isfinite(it->second)) {
                ++fke_bad;
                continue;
            }
            double v = it->second, g = gt->second;
            bool close = v == g || std::abs(v - g) <= 0.1 * std::abs(g);
            fke_bad += !close;
        }
        bool stops = o.metrics.at("bad_stops") == 0;
        report(11, fitted && stops && fke_bad == 0 && o.ok && s < 600,
               "fitted I/II/III " + fmt(fI) + "/" + fmt(fII) + "/" + fmt(fIII) + " vs " + fmt(golden.fitted_I) + "/" +
                   fmt(golden.fitted_II) + "/" + fmt(golden.fitted_III) + ", bad stops " +
                   fmt(o.metrics.at("bad_stops")) + ", FKE mismatches " + std::to_string(fke_bad) + ", " + fmt(s) +
                   " s");
    }

    // Criterion 12: the same runs with 8 workers, artifact by artifact.
    {
        kakeya::set_workers(8);
        auto t0 = std::chrono::steady_clock::now();
        std::size_t compared = 0, differing = 0;
        std::string first;
        for (const auto& r : runs) {
            ex::Outcome again = r.make();
            if (again.artifacts.size() != r.first.artifacts.size()) {
                ++differing;
                if (first.empty()) first = r.name + ": artifact count";
                continue;
            }
            for (std::size_t i = 0; i < again.artifacts.size(); ++i) {
                ++compared;
                const auto& a = r.first.artifacts[i];
                const auto& b = again.artifacts[i];
                if (a.name != b.name || a.content != b.content) {
                    ++differing;
                    if (first.empty()) first = r.name + "/" + a.name;
                }
            }
        }
        kakeya::set_workers(1);
        double secs = seconds_since(t0);
        report(12, differing == 0 && compared > 0,
               std::to_string(compared) + " artifacts compared at workers 1 and 8, " + std::to_string(differing) +
                   " differ" + (first.empty() ? "" : " (first: " + first + ")") + ", " + fmt(secs) + " s");
    }

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
