// kakeya-lab: command line front end for the experiments.
//
// Exit codes: 0 success, 1 a checked property failed, 2 bad configuration or
// arguments.

#include "kakeya/config.hpp"
#include "kakeya/experiments.hpp"
#include "kakeya/parallel.hpp"
#include "kakeya/svg.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace ex = kakeya::experiments;
using kakeya::ConfigError;

namespace {

// Options are kept as text and converted after parsing so that "1/64" works
// wherever a scale is expected.
struct Args {
    std::string out;
    std::string config;
    int workers = 1;

    int figure = 1;
    std::string range = "2..15";
    std::string format = "csv";
    bool system = false;

    std::size_t trials = 10000;
    int degree = 8;
    std::uint64_t seed = 1;
    std::string seeds = "1..10";
    std::string delta = "1/64";
    std::string deltas = "1/16,1/32,1/64";
    std::string p = "2";
    std::string rho = "1/16";
    std::string lambdas = "1/4,1";
    std::size_t samples = 200000;
    std::size_t families = 20;
    std::size_t tubes = 1000;
    std::size_t partitions = 50;
    std::size_t instances = 50;
    std::size_t points = 100;
    std::string tol = "0.25";
    int n = 2;
    int A = 1;

    std::string golden = "golden";
    bool calibrate = false;

    std::string csv;
    std::string kind = "series";
    std::string title;
};

double num(const std::string& key, const std::string& v) { return kakeya::parse_number(key, v); }

std::vector<std::uint64_t> seed_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    if (text.find("..") != std::string::npos) {
        auto [a, b] = kakeya::parse_range("seeds", text);
        if (a < 0) throw ConfigError("seeds: must be non-negative");
        for (int s = a; s <= b; ++s) out.push_back(static_cast<std::uint64_t>(s));
        return out;
    }
    for (double v : kakeya::parse_number_list("seeds", text)) {
        if (v < 0 || v != static_cast<double>(static_cast<std::uint64_t>(v)))
            throw ConfigError("seeds: not a non-negative integer");
        out.push_back(static_cast<std::uint64_t>(v));
    }
    return out;
}

// Turns a key=value config into argv tokens: global options, command words,
// then --key value.
std::vector<std::string> config_argv(const kakeya::ExperimentConfig& cfg, const std::string& out, int workers) {
    std::vector<std::string> argv{"kakeya-lab"};
    if (cfg.command.empty()) throw ConfigError("config: missing 'command'");
    // An explicit --out beats the config's output key.
    std::string dir = !out.empty() ? out : cfg.output_dir;
    if (!dir.empty()) {
        argv.push_back("--out");
        argv.push_back(dir);
    }
    argv.push_back("--workers");
    argv.push_back(std::to_string(workers));
    std::istringstream words(cfg.command);
    std::string w;
    while (words >> w) argv.push_back(w);
    for (const auto& [k, v] : cfg.params) {
        argv.push_back("--" + k);
        if (v != "true") argv.push_back(v);
    }
    return argv;
}

int finish(const ex::Outcome& o, const Args& a) {
    std::string dir = kakeya::resolve_output_dir(a.out);
    auto paths = ex::write_artifacts(o, dir);
    std::cout << o.summary << '\n';
    for (const auto& p : paths) std::cout << "  wrote " << p << '\n';
    return o.ok ? 0 : 1;
}

int run(int argc, const char* const* argv) {
    Args a;
    CLI::App app{"Kakeya maximal estimate laboratory"};
    app.require_subcommand(0, 1);
    app.add_option("--out", a.out, "output directory (KAKEYA_LAB_OUT overrides)");
    app.add_option("--workers", a.workers, "worker threads")->check(CLI::Range(1, 256));
    app.add_option("--config", a.config, "key=value experiment file");

    auto* exps = app.add_subcommand("exponents", "exponent tables and the weight system");
    exps->add_option("--figure", a.figure)->check(CLI::IsMember({1, 3, 4}));
    exps->add_option("--range", a.range, "a..b");
    exps->add_option("--format", a.format)->check(CLI::IsMember({"csv", "md"}));
    exps->add_flag("--system", a.system, "check the X/Y system and the p ladder");

    auto* wolff = app.add_subcommand("wolff", "polynomial Wolff experiments");
    wolff->require_subcommand(1);
    auto* pb = wolff->add_subcommand("poly-bound", "fuzz the polynomial averaging bound");
    pb->add_option("--trials", a.trials);
    pb->add_option("--degree", a.degree);
    pb->add_option("--seed", a.seed);
    auto* sharp = wolff->add_subcommand("sharpness", "extremal vs random multiscale counts");
    sharp->add_option("--delta", a.delta);
    sharp->add_option("--families", a.families);
    sharp->add_option("--seed", a.seed);
    auto* count = wolff->add_subcommand("count", "one multiscale count on a random family");
    count->add_option("--delta", a.delta);
    count->add_option("--rho", a.rho);
    count->add_option("--lambdas", a.lambdas);
    count->add_option("--seed", a.seed);
    auto* smv = wolff->add_subcommand("sm-volume", "Monte Carlo volume of the segment union");
    smv->add_option("--rho", a.rho);
    smv->add_option("--lambdas", a.lambdas);
    smv->add_option("--samples", a.samples);
    smv->add_option("--seed", a.seed);

    auto* norms = app.add_subcommand("norms", "maximal function and broad norms");
    norms->require_subcommand(1);
    auto* ratio = norms->add_subcommand("ratio", "kakeya ratio over a delta sweep");
    ratio->add_option("--deltas", a.deltas);
    ratio->add_option("--p", a.p);
    ratio->add_option("--seed", a.seed);
    auto* van = norms->add_subcommand("vanishing", "broad norm of line-tangent families");
    van->add_option("--families", a.families);
    van->add_option("--delta", a.delta);
    van->add_option("--seed", a.seed);
    auto* fld = norms->add_subcommand("field", "rasterized family");
    fld->add_option("--n", a.n);
    fld->add_option("--delta", a.delta);
    fld->add_option("--seed", a.seed);
    auto* spl = norms->add_subcommand("split", "broad/narrow decomposition");
    spl->add_option("--n", a.n);
    spl->add_option("--delta", a.delta);
    spl->add_option("--p", a.p);
    spl->add_option("--A", a.A);
    spl->add_option("--seed", a.seed);

    auto* part = app.add_subcommand("partition", "polynomial partitioning");
    part->require_subcommand(1);
    auto* bez = part->add_subcommand("bezout", "tube crossings of shrunken cells");
    bez->add_option("--tubes", a.tubes);
    bez->add_option("--partitions", a.partitions);
    bez->add_option("--seed", a.seed);
    auto* em = part->add_subcommand("equal-mass", "equal-mass property on point clouds");
    em->add_option("--instances", a.instances);
    em->add_option("--points", a.points);
    em->add_option("--tol", a.tol);
    em->add_option("--seed", a.seed);
    auto* cells = part->add_subcommand("cells", "export one partition");
    cells->add_option("--points", a.points);
    cells->add_option("--degree", a.degree);
    cells->add_option("--tol", a.tol);
    cells->add_option("--seed", a.seed);

    auto* st = app.add_subcommand("structure", "recursive partitioning runs");
    st->require_subcommand(1);
    auto* corp = st->add_subcommand("corpus", "seeded two-dimensional corpus");
    corp->add_option("--seeds", a.seeds, "a..b or a list");
    corp->add_option("--delta", a.delta);
    auto* a2 = st->add_subcommand("alg2", "one outer run");
    a2->add_option("--delta", a.delta);
    a2->add_option("--seed", a.seed);
    auto* a1 = st->add_subcommand("alg1", "one inner run on a ball");
    a1->add_option("--delta", a.delta);
    a1->add_option("--seed", a.seed);

    auto* tables = app.add_subcommand("tables", "golden tables and regression constants");
    tables->add_option("--golden", a.golden, "golden directory");
    tables->add_flag("--calibrate", a.calibrate, "refit regression-constants.json (slow)");

    auto* plot = app.add_subcommand("plot", "render a CSV as SVG");
    plot->add_option("--csv", a.csv)->required();
    plot->add_option("--kind", a.kind)->check(CLI::IsMember({"series", "field", "cells"}));
    plot->add_option("--title", a.title);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (a.config.empty() && app.get_subcommands().empty()) {
        std::cerr << "A subcommand is required\nRun with --help for more information.\n";
        return 2;
    }
    if (!a.config.empty()) {
        auto cfg = kakeya::ExperimentConfig::load(a.config);
        auto toks = config_argv(cfg, a.out, a.workers);
        std::vector<const char*> ptrs;
        for (const auto& t : toks) ptrs.push_back(t.c_str());
        return run(static_cast<int>(ptrs.size()), ptrs.data());
    }

    kakeya::set_workers(a.workers);

    if (*exps) {
        auto [lo, hi] = kakeya::parse_range("range", a.range);
        if (a.system) {
            if (!exps->count("--range")) lo = 2, hi = 20;
            return finish(ex::exponent_system(lo, hi), a);
        }
        auto fmt = a.format == "md" ? kakeya::exponents::TableFormat::Markdown : kakeya::exponents::TableFormat::Csv;
        auto o = ex::exponent_table(a.figure, lo, hi, fmt);
        std::cout << o.artifacts.front().content;
        return finish(o, a);
    }
    if (*pb) return finish(ex::poly_bound_fuzz(a.trials, a.degree, a.seed), a);
    if (*sharp) {
        ex::SharpnessConfig c;
        c.delta = sharp->count("--delta") ? num("delta", a.delta) : 1.0 / 32;
        c.random_families = a.families;
        c.seed = a.seed;
        return finish(ex::sharpness(c), a);
    }
    if (*count)
        return finish(ex::wolff_count(num("delta", count->count("--delta") ? a.delta : "1/32"),
                                      num("rho", a.rho), kakeya::parse_number_list("lambdas", a.lambdas), a.seed),
                      a);
    if (*smv)
        return finish(ex::sm_volume(num("rho", a.rho), kakeya::parse_number_list("lambdas", a.lambdas), a.samples, a.seed),
                      a);
    if (*ratio)
        return finish(ex::cordoba(kakeya::parse_number_list("deltas", a.deltas), num("p", a.p), a.seed), a);
    if (*van) {
        ex::VanishingConfig c;
        c.families = a.families;
        c.delta = van->count("--delta") ? num("delta", a.delta) : 1.0 / 32;
        c.seed = a.seed;
        return finish(ex::vanishing(c), a);
    }
    if (*fld) return finish(ex::field(a.n, num("delta", fld->count("--delta") ? a.delta : "1/32"), a.seed), a);
    if (*spl)
        return finish(ex::split(a.n, num("delta", spl->count("--delta") ? a.delta : "1/32"), num("p", a.p), a.A, a.seed),
                      a);
    if (*bez) {
        ex::BezoutConfig c;
        c.tubes = a.tubes;
        c.partitions = a.partitions;
        c.seed = a.seed;
        return finish(ex::bezout(c), a);
    }
    if (*em) {
        ex::EqualMassConfig c;
        c.instances = a.instances;
        c.points = a.points;
        c.tol = num("tol", a.tol);
        c.seed = a.seed;
        return finish(ex::equal_mass(c), a);
    }
    if (*cells)
        return finish(ex::partition_cells(a.points, cells->count("--degree") ? a.degree : 4, num("tol", a.tol), a.seed),
                      a);
    if (*corp) {
        ex::CorpusConfig c;
        c.seeds = seed_list(a.seeds);
        c.delta = num("delta", a.delta);
        return finish(ex::corpus(c), a);
    }
    if (*a2) return finish(ex::alg2(num("delta", a.delta), a.seed), a);
    if (*a1) return finish(ex::alg1(num("delta", a.delta), a.seed), a);
    if (*tables) {
        ex::write_artifacts(ex::golden_tables(), a.golden);
        std::cout << "wrote figure{1,3,4}.csv under " << a.golden << '\n';
        if (a.calibrate) {
            ex::SharpnessConfig sc;
            auto cal = ex::calibrate(ex::cordoba({1.0 / 16, 1.0 / 32, 1.0 / 64}, 2, 1), ex::sharpness(sc),
                                     ex::corpus(ex::CorpusConfig{}));
            ex::Outcome o;
            o.artifacts.push_back({"regression-constants.json", ex::calibration_json(cal)});
            ex::write_artifacts(o, a.golden);
            std::cout << "wrote regression-constants.json under " << a.golden << '\n';
        }
        return 0;
    }
    if (*plot) {
        std::ifstream in(a.csv);
        if (!in) throw ConfigError("cannot read '" + a.csv + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        ex::Outcome o;
        std::string base = a.csv.substr(a.csv.find_last_of('/') + 1);
        base = base.substr(0, base.rfind('.'));
        o.artifacts.push_back({base + ".svg", kakeya::emit_plot(ss.str(), kakeya::parse_plot_kind(a.kind), a.title)});
        o.summary = "rendered " + a.csv;
        return finish(o, a);
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const kakeya::PreconditionError& e) {
        std::cerr << "precondition: " << e.what() << '\n';
        return 2;
    } catch (const kakeya::AssertionFailure& e) {
        std::cerr << "assertion failed: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
