#include "kakeya/experiments.hpp"

#include "kakeya/algebraic.hpp"
#include "kakeya/geometry.hpp"
#include "kakeya/norms.hpp"
#include "kakeya/parallel.hpp"
#include "kakeya/partition.hpp"
#include "kakeya/rng.hpp"
#include "kakeya/structure.hpp"
#include "kakeya/svg.hpp"
#include "kakeya/wolff.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace kakeya::experiments {

namespace {

using ojson = nlohmann::ordered_json;

std::string fd(double x) { return format_double(x); }

void add(Outcome& o, std::string name, std::string content) {
    o.artifacts.push_back(Artifact{std::move(name), std::move(content)});
}

}  // namespace

std::vector<std::string> write_artifacts(const Outcome& out, const std::string& dir) {
    namespace fs = std::filesystem;
    std::vector<std::string> paths;
    fs::create_directories(dir);
    for (const auto& a : out.artifacts) {
        fs::path p = fs::path(dir) / a.name;
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        std::ofstream f(p, std::ios::binary);
        if (!f) throw ConfigError("cannot write '" + p.string() + "'");
        f << a.content;
        paths.push_back(p.string());
    }
    return paths;
}

// ---------------------------------------------------------------- exponents

Outcome exponent_table(int figure, int lo, int hi, exponents::TableFormat fmt) {
    Outcome o;
    std::string text = exponents::emit_table(figure, lo, hi, fmt);
    add(o, "figure" + std::to_string(figure) + (fmt == exponents::TableFormat::Csv ? ".csv" : ".md"), text);
    o.summary = "figure " + std::to_string(figure) + ": " + std::to_string(hi - lo + 1) + " rows";
    return o;
}

Outcome exponent_system(int lo, int hi) {
    require(2 <= lo && lo < hi, "exponent_system: need 2 <= lo < hi");
    Outcome o;
    std::ostringstream csv;
    csv << "n,m,xy_zero,ladder_closed_form,p_n\n";
    std::size_t pairs = 0, bad = 0;
    for (int n = lo + 1; n <= hi; ++n) {
        for (int m = lo; m < n; ++m) {
            bool xy = exponents::verify_xy_zero(n, m);
            auto p = exponents::p_ladder_from_gammas(n, m, exponents::gamma_weights(n, m));
            bool ladder = p.back() / (p.back() - 1) == exponents::final_conjugate(n, m);
            ++pairs;
            if (!xy || !ladder) ++bad;
            csv << n << ',' << m << ',' << xy << ',' << ladder << ',' << p.back().str() << '\n';
        }
    }
    add(o, "system.csv", csv.str());
    o.ok = bad == 0;
    o.metrics["pairs"] = static_cast<double>(pairs);
    o.metrics["failures"] = static_cast<double>(bad);
    o.summary = std::to_string(pairs) + " (n, m) pairs, " + std::to_string(bad) + " failures";
    return o;
}

// ---------------------------------------------------------------- wolff

Outcome poly_bound_fuzz(std::size_t trials, int max_degree, std::uint64_t seed) {
    require(trials > 0 && max_degree >= 1, "poly_bound_fuzz: need trials > 0 and max_degree >= 1");
    struct Row {
        int degree;
        double a, b, t;
        AverageBound r;
    };
    auto chunks = map_chunks<std::vector<Row>>(trials, 64, [&](std::size_t b, std::size_t e) {
        std::vector<Row> rows;
        for (std::size_t i = b; i < e; ++i) {
            Rng rng(seed, "poly_bound_fuzz", i);
            int deg = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_degree)));
            std::vector<double> coefs(deg + 1);
            double scale = std::pow(10.0, rng.uniform(-3, 3));
            for (auto& c : coefs) c = scale * rng.normal();
            double a = rng.uniform(-5, 5);
            double len = std::exp(rng.uniform(std::log(1e-2), std::log(10.0)));
            // A third of the points fall inside I, the rest anywhere in [-10, 10].
            double t = rng.below(3) == 0 ? rng.uniform(a, a + len) : rng.uniform(-10, 10);
            rows.push_back({deg, a, a + len, t, poly_average_bound(coefs, a, a + len, t)});
        }
        return rows;
    });
    Outcome o;
    std::ostringstream csv;
    csv << "trial,degree,a,b,t,lhs,rhs,holds\n";
    std::size_t i = 0, violations = 0;
    double worst = 0;
    for (const auto& ch : chunks)
        for (const auto& r : ch) {
            csv << i++ << ',' << r.degree << ',' << fd(r.a) << ',' << fd(r.b) << ',' << fd(r.t) << ',' << fd(r.r.lhs)
                << ',' << fd(r.r.rhs) << ',' << r.r.holds << '\n';
            if (!r.r.holds) ++violations;
            if (r.r.rhs > 0) worst = std::max(worst, r.r.lhs / r.r.rhs);
        }
    add(o, "poly-bound.csv", csv.str());
    o.ok = violations == 0;
    o.metrics["trials"] = static_cast<double>(trials);
    o.metrics["violations"] = static_cast<double>(violations);
    o.metrics["worst_ratio"] = worst;
    o.summary = std::to_string(trials) + " trials, " + std::to_string(violations) + " violations, max lhs/rhs " +
                fd(worst);
    return o;
}

// ---------------------------------------------------------------- partition

namespace {

std::vector<Vec> random_cloud(std::size_t count, Rng& rng) {
    // Half uniform, half around a few random centers.
    std::vector<Vec> centers;
    for (int i = 0; i < 3; ++i) centers.push_back(Vec{{rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8)}});
    std::vector<Vec> pts;
    for (std::size_t i = 0; i < count; ++i) {
        Vec x(2);
        if (i % 2 == 0) {
            x << rng.uniform(0.02, 0.98), rng.uniform(0.02, 0.98);
        } else {
            const Vec& c = centers[rng.below(centers.size())];
            x << c[0] + 0.08 * rng.normal(), c[1] + 0.08 * rng.normal();
            x = x.cwiseMax(0.02).cwiseMin(0.98);
        }
        pts.push_back(x);
    }
    return pts;
}

GridSpec unit_square(double h) { return GridSpec::covering(Vec::Zero(2), Vec::Ones(2), h); }

Partition partition_or_best(const std::vector<Vec>& pts, const GridSpec& g, int D, double tol, std::uint64_t seed,
                            bool* converged) {
    try {
        Partition p = partition_points(pts, g, D, tol, seed);
        if (converged) *converged = p.converged;
        return p;
    } catch (const PartitionFailure& e) {
        if (converged) *converged = false;
        return *e.best;
    }
}

}  // namespace

Outcome bezout(const BezoutConfig& cfg) {
    require(cfg.tubes > 0 && cfg.partitions > 0 && cfg.max_degree >= 1, "bezout: empty experiment");
    const GridSpec g = unit_square(cfg.h);
    struct Row {
        int D = 0, degree = 0;
        std::size_t cells = 0, max_crossings = 0, violations = 0;
    };
    std::vector<Row> rows(cfg.partitions);
    parallel_for(cfg.partitions, [&](std::size_t j) {
        Rng prng(cfg.seed, "bezout_points", j);
        auto pts = random_cloud(cfg.points, prng);
        Row& row = rows[j];
        row.D = 1 + static_cast<int>(j % static_cast<std::size_t>(cfg.max_degree));
        Partition P = partition_or_best(pts, g, row.D, 0.25, mix64(cfg.seed ^ j), nullptr);
        shrunken_cells(P, cfg.delta);
        row.degree = P.degree();
        row.cells = P.cells.size();
        Rng trng(cfg.seed, "bezout_tubes", j);
        for (std::size_t t = 0; t < cfg.tubes; ++t) {
            Vec dir = trng.unit_vector(2);
            Vec c{{trng.uniform(), trng.uniform()}};
            Tube tube = make_tube(dir, c, cfg.delta);
            try {
                row.max_crossings = std::max(row.max_crossings, tube_cell_crossings(tube, P).size());
            } catch (const AssertionFailure&) {
                ++row.violations;
                row.max_crossings = std::max<std::size_t>(row.max_crossings, row.degree + 2);
            }
        }
    });
    Outcome o;
    std::ostringstream csv;
    csv << "partition,D,degree,cells,tubes,max_crossings,violations\n";
    std::size_t violations = 0;
    for (std::size_t j = 0; j < rows.size(); ++j) {
        const Row& r = rows[j];
        csv << j << ',' << r.D << ',' << r.degree << ',' << r.cells << ',' << cfg.tubes << ',' << r.max_crossings << ','
            << r.violations << '\n';
        violations += r.violations;
    }
    add(o, "bezout.csv", csv.str());
    o.ok = violations == 0;
    o.metrics["violations"] = static_cast<double>(violations);
    o.metrics["checks"] = static_cast<double>(cfg.tubes * cfg.partitions);
    o.summary = std::to_string(cfg.tubes * cfg.partitions) + " tube/partition checks, " + std::to_string(violations) +
                " ceiling violations";
    return o;
}

Outcome equal_mass(const EqualMassConfig& cfg) {
    require(cfg.instances > 0 && !cfg.degrees.empty(), "equal_mass: empty experiment");
    const GridSpec g = unit_square(cfg.h);
    struct Row {
        int D = 0, steps = 0;
        std::size_t cells = 0, refined = 0;
        double worst = 0;  // max refined cell mass / (mass / 2^S)
        bool converged = false, pass = false;
    };
    std::vector<Row> rows(cfg.instances);
    parallel_for(cfg.instances, [&](std::size_t j) {
        Rng rng(cfg.seed, "equal_mass", j);
        auto pts = random_cloud(cfg.points, rng);
        Row& row = rows[j];
        row.D = cfg.degrees[j % cfg.degrees.size()];
        Partition P = partition_or_best(pts, g, row.D, cfg.tol, mix64(cfg.seed + j), &row.converged);
        row.steps = P.steps;
        row.cells = P.cells.size();
        auto refined = refined_cells(P);
        row.refined = refined.size();
        const double share = P.total_mass / static_cast<double>(P.class_count());
        for (int id : refined) row.worst = std::max(row.worst, P.cells[id].mass / share);
        row.pass = !refined.empty() && row.worst <= 1 + cfg.tol + 1e-12;
    });
    Outcome o;
    std::ostringstream csv;
    csv << "instance,D,steps,cells,refined,worst_share,converged,pass\n";
    std::size_t passed = 0;
    for (std::size_t j = 0; j < rows.size(); ++j) {
        const Row& r = rows[j];
        csv << j << ',' << r.D << ',' << r.steps << ',' << r.cells << ',' << r.refined << ',' << fd(r.worst) << ','
            << r.converged << ',' << r.pass << '\n';
        passed += r.pass;
    }
    add(o, "equal-mass.csv", csv.str());
    o.ok = passed == rows.size();
    o.metrics["passed"] = static_cast<double>(passed);
    o.metrics["instances"] = static_cast<double>(rows.size());
    o.summary = std::to_string(passed) + "/" + std::to_string(rows.size()) + " instances within (1+tol) of the share";
    return o;
}

Outcome partition_cells(std::size_t points, int D, double tol, std::uint64_t seed) {
    require(points > 0, "partition_cells: need points");
    const GridSpec g = unit_square(1.0 / 64);
    Rng rng(seed, "partition_cells");
    auto pts = random_cloud(points, rng);
    bool converged = false;
    Partition P = partition_or_best(pts, g, D, tol, seed, &converged);
    shrunken_cells(P, g.h);
    Outcome o;
    std::ostringstream poly, cells, map;
    write_partition_polynomial(poly, P);
    write_partition_cells_csv(cells, P);
    map << "x,y,cell\n";
    for (std::size_t pos = 0; pos < P.domain.size(); ++pos) {
        Vec x = g.center(P.domain[pos]);
        map << fd(x[0]) << ',' << fd(x[1]) << ',' << P.label[pos] << '\n';
    }
    add(o, "partition-polynomial.txt", poly.str());
    add(o, "partition-cells.csv", cells.str());
    add(o, "partition-map.csv", map.str());
    add(o, "partition-map.svg", emit_plot(map.str(), PlotKind::Cells, "partition D=" + std::to_string(D)));
    o.ok = converged;
    o.metrics["cells"] = static_cast<double>(P.cells.size());
    o.metrics["deviation"] = P.deviation;
    o.summary = std::to_string(P.cells.size()) + " cells, degree " + std::to_string(P.degree()) + ", deviation " +
                fd(P.deviation) + (converged ? "" : " (not converged)");
    return o;
}

// ---------------------------------------------------------------- norms

Outcome cordoba(const std::vector<double>& deltas, double p, std::uint64_t seed) {
    require(!deltas.empty(), "cordoba: need at least one delta");
    Outcome o;
    std::ostringstream csv;
    csv << "log_inv_delta,ratio,normalized\n";
    double C = 0;
    for (double delta : deltas) {
        require(delta > 0 && delta < 1, "cordoba: delta must lie in (0, 1)");
        auto fam = make_direction_separated_family(2, delta, seed);
        double ratio = kakeya_ratio(fam, p, delta / 4);
        double L = std::log(1 / delta);
        double normalized = ratio / std::sqrt(L);
        C = std::max(C, normalized);
        csv << fd(L) << ',' << fd(ratio) << ',' << fd(normalized) << '\n';
    }
    add(o, "cordoba.csv", csv.str());
    add(o, "cordoba.svg", emit_plot(csv.str(), PlotKind::Series, "kakeya ratio against log(1/delta)"));
    o.metrics["C"] = C;
    o.summary = "C = max ratio / sqrt(log 1/delta) = " + fd(C);
    return o;
}

namespace {

// Tubes within a small angle of the line x0 + s u, cores within delta/2 of it.
TubeFamily line_tangent_family(const Vec& x0, const Vec& u, double delta, double max_angle, std::size_t count,
                               Rng& rng) {
    TubeFamily fam;
    fam.dim = 2;
    fam.delta = delta;
    Vec nrm{{-u[1], u[0]}};
    for (std::size_t i = 0; i < count; ++i) {
        double a = rng.uniform(-max_angle, max_angle);
        Vec d = std::cos(a) * u + std::sin(a) * nrm;
        Vec c = x0 + rng.uniform(-0.1, 0.1) * u + rng.uniform(-0.5, 0.5) * delta * nrm;
        fam.tubes.push_back(make_tube(d, c, delta));
    }
    return fam;
}

}  // namespace

Outcome vanishing(const VanishingConfig& cfg) {
    require(cfg.families > 0, "vanishing: need families");
    struct Row {
        std::size_t tubes = 0, violations = 0;
        double norm = 0, transverse_norm = 0;
        bool vanishes = false, transverse_positive = false;
    };
    std::vector<Row> rows(cfg.families);
    parallel_for(cfg.families, [&](std::size_t j) {
        Rng rng(cfg.seed, "vanishing", j);
        Vec x0{{rng.uniform(0.3, 0.7), rng.uniform(0.3, 0.7)}};
        Vec u = rng.unit_vector(2);
        // Tangency asks for angle <= delta/r; stay at half of that.
        auto fam = line_tangent_family(x0, u, cfg.delta, 0.5 * cfg.delta / cfg.radius, 4 + rng.below(9), rng);
        Variety line = Variety::plane(x0, {u});
        BroadConfig bc;
        bc.k = 2;
        bc.A = cfg.A;
        auto r = vanishing_check(fam, line, x0, cfg.radius, bc);
        Row& row = rows[j];
        row.tubes = fam.size();
        row.violations = r.violations.size();
        row.norm = r.norm;
        row.vanishes = r.vanishes;
        // One transverse tube through x0.
        fam.tubes.push_back(make_tube(Vec{{-u[1], u[0]}}, x0, cfg.delta));
        BroadConfig with = bc;
        with.candidates.push_back(Subspace::span({u}));
        BroadEvaluator ev(fam, with, cfg.delta / 4);
        std::vector<std::size_t> region;
        for (std::size_t c = 0; c < ev.grid().size(); ++c)
            if ((ev.grid().center(c) - x0).norm() <= cfg.radius) region.push_back(c);
        row.transverse_norm = ev.broad_norm(&region, nullptr, cfg.A);
        row.transverse_positive = row.transverse_norm > 0;
    });
    Outcome o;
    std::ostringstream csv;
    csv << "family,tubes,precondition_violations,norm,vanishes,transverse_norm\n";
    std::size_t good = 0;
    for (std::size_t j = 0; j < rows.size(); ++j) {
        const Row& r = rows[j];
        csv << j << ',' << r.tubes << ',' << r.violations << ',' << fd(r.norm) << ',' << r.vanishes << ','
            << fd(r.transverse_norm) << '\n';
        good += r.vanishes && r.violations == 0 && r.transverse_positive;
    }
    add(o, "vanishing.csv", csv.str());
    o.ok = good == rows.size();
    o.metrics["passed"] = static_cast<double>(good);
    o.summary = std::to_string(good) + "/" + std::to_string(rows.size()) +
                " families vanish exactly and turn positive with a transverse tube";
    return o;
}

Outcome field(int n, double delta, std::uint64_t seed) {
    require(n == 2 || n == 3, "field: n must be 2 or 3");
    auto fam = make_direction_separated_family(n, delta, seed);
    GridField f = rasterize(fam, delta / 4);
    Outcome o;
    std::ostringstream bin, slice;
    write_field_binary(bin, f);
    write_field_slice_csv(slice, f);
    add(o, "field.bin", bin.str());
    add(o, "field-slice.csv", slice.str());
    add(o, "field-slice.svg", emit_plot(slice.str(), PlotKind::Field, "sum of tube indicators"));
    o.metrics["tubes"] = static_cast<double>(fam.size());
    o.metrics["l2"] = lp_norm(f, 2);
    o.summary = std::to_string(fam.size()) + " tubes, L2 norm " + fd(o.metrics["l2"]);
    return o;
}

Outcome split(int n, double delta, double p, int A, std::uint64_t seed) {
    auto fam = make_direction_separated_family(n, delta, seed);
    BroadConfig bc;
    bc.k = 2;
    bc.A = A;
    bc.p = p;
    auto s = broad_narrow_split(fam, bc, delta / 4);
    Outcome o;
    std::ostringstream csv;
    csv << "lp_power,broad_term,narrow_sum,rhs,constant,narrow_caps\n"
        << fd(s.lp_power) << ',' << fd(s.broad_term) << ',' << fd(s.narrow_sum) << ',' << fd(s.rhs) << ','
        << fd(s.constant) << ',' << s.narrow.size() << '\n';
    add(o, "split.csv", csv.str());
    o.metrics["constant"] = s.constant;
    o.summary = "||f||_p^p / rhs = " + fd(s.constant);
    return o;
}

// ---------------------------------------------------------------- wolff counts

Outcome sharpness(const SharpnessConfig& cfg) {
    require(!cfg.rho_factors.empty() && !cfg.lambda1.empty(), "sharpness: empty lattice");
    const Vec x0 = Vec::Constant(3, 0.5);
    std::vector<MultiscaleConfig> lattice;
    for (double f : cfg.rho_factors)
        for (double l1 : cfg.lambda1) lattice.push_back(nested_plane_config(3, 1, 2, cfg.delta, f * cfg.delta, {l1, 1.0}, x0));

    Outcome o;
    std::ostringstream csv;
    csv << "kind,family,rho,lambda1,tubes,count,bound,ratio\n";
    double ext_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lattice.size(); ++i) {
        const auto& mc = lattice[i];
        auto fam = nested_plane_extremal_family(mc, cfg.seed);
        auto c = count_multiscale_tubes(fam, mc);
        ext_min = std::min(ext_min, c.ratio);
        csv << "extremal,0," << fd(mc.rho) << ',' << fd(mc.lambdas[0]) << ',' << fam.size() << ',' << c.count << ','
            << fd(c.bound) << ',' << fd(c.ratio) << '\n';
    }
    std::vector<std::vector<CountResult>> counts(cfg.random_families);
    std::vector<std::size_t> sizes(cfg.random_families);
    for (std::size_t s = 0; s < cfg.random_families; ++s) {
        auto fam = make_direction_separated_family(3, cfg.delta, mix64(cfg.seed * 1000 + s));
        sizes[s] = fam.size();
        for (const auto& mc : lattice) counts[s].push_back(count_multiscale_tubes(fam, mc));
    }
    double rnd_max = 0;
    for (std::size_t s = 0; s < cfg.random_families; ++s)
        for (std::size_t i = 0; i < lattice.size(); ++i) {
            const auto& c = counts[s][i];
            rnd_max = std::max(rnd_max, c.ratio);
            csv << "random," << s + 1 << ',' << fd(lattice[i].rho) << ',' << fd(lattice[i].lambdas[0]) << ','
                << sizes[s] << ',' << c.count << ',' << fd(c.bound) << ',' << fd(c.ratio) << '\n';
        }
    add(o, "sharpness.csv", csv.str());
    o.metrics["extremal_min"] = ext_min;
    o.metrics["random_max"] = rnd_max;
    o.ok = rnd_max < ext_min;
    o.summary = "extremal min ratio " + fd(ext_min) + ", random max ratio " + fd(rnd_max);
    return o;
}

Outcome wolff_count(double delta, double rho, const std::vector<double>& lambdas, std::uint64_t seed) {
    require(lambdas.size() == 2, "wolff count: need lambda_1, lambda_2");
    auto mc = nested_plane_config(3, 1, 2, delta, rho, lambdas, Vec::Constant(3, 0.5));
    auto fam = make_direction_separated_family(3, delta, seed);
    auto c = count_multiscale_tubes(fam, mc);
    Outcome o;
    std::ostringstream csv;
    csv << "tubes,count,bound,ratio\n" << fam.size() << ',' << c.count << ',' << fd(c.bound) << ',' << fd(c.ratio) << '\n';
    add(o, "count.csv", csv.str());
    o.metrics["ratio"] = c.ratio;
    o.summary = std::to_string(c.count) + " of " + std::to_string(fam.size()) + " tubes, ratio " + fd(c.ratio);
    return o;
}

Outcome sm_volume(double rho, const std::vector<double>& lambdas, std::size_t samples, std::uint64_t seed) {
    require(lambdas.size() == 2, "sm-volume: need lambda_1, lambda_2");
    auto sc = nested_sm_config(3, 1, 2, rho, lambdas, samples);
    auto e = kakeya::sm_volume(sc, seed);
    Outcome o;
    std::ostringstream csv;
    csv << "volume,stderr,bound,ratio,samples,hits,inconclusive\n"
        << fd(e.volume) << ',' << fd(e.stderr_) << ',' << fd(e.bound) << ',' << fd(e.ratio) << ',' << e.samples << ','
        << e.hits << ',' << e.inconclusive << '\n';
    add(o, "sm-volume.csv", csv.str());
    o.ok = !e.inconclusive;
    o.metrics["ratio"] = e.ratio;
    o.summary = "volume " + fd(e.volume) + " +- " + fd(e.stderr_) + ", ratio " + fd(e.ratio);
    return o;
}

// ---------------------------------------------------------------- structure

Outcome corpus(const CorpusConfig& cfg) {
    require(!cfg.seeds.empty(), "corpus: need seeds");
    Outcome o;
    std::ostringstream csv;
    csv << "seed,tubes,outcome,runs,tiny,tang,budget,exhausted,fitted_I,fitted_II,fitted_III,fke_ratio,property2,"
           "property3\n";
    double fI = 0, fII = 0, fIII = 0;
    std::size_t bad_stops = 0;
    bool finite = true;
    for (auto seed : cfg.seeds) {
        auto fam = make_direction_separated_family(2, cfg.delta, seed);
        Alg2Config c;
        c.alg.delta = cfg.delta;
        c.alg.seed = seed;
        auto r = run_alg2(fam, c);
        std::size_t stops[4] = {0, 0, 0, 0};
        double rI = 0, rII = 0, rIII = 0;
        for (const auto& run : r.runs) {
            ++stops[static_cast<int>(run.stop)];
            rI = std::max(rI, run.fitted_I);
            rII = std::max(rII, run.fitted_II);
            rIII = std::max(rIII, run.fitted_III);
        }
        fI = std::max(fI, rI);
        fII = std::max(fII, rII);
        fIII = std::max(fIII, rIII);
        bad_stops += stops[static_cast<int>(StopReason::Budget)] + stops[static_cast<int>(StopReason::Exhausted)];
        finite = finite && std::isfinite(r.fke_ratio);
        csv << seed << ',' << fam.size() << ',' << to_string(r.outcome) << ',' << r.runs.size() << ','
            << stops[static_cast<int>(StopReason::Tiny)] << ',' << stops[static_cast<int>(StopReason::Tang)] << ','
            << stops[static_cast<int>(StopReason::Budget)] << ',' << stops[static_cast<int>(StopReason::Exhausted)]
            << ',' << fd(rI) << ',' << fd(rII) << ',' << fd(rIII) << ',' << fd(r.fke_ratio) << ','
            << fd(r.property2) << ',' << fd(r.property3) << '\n';
        o.metrics["fke_" + std::to_string(seed)] = r.fke_ratio;
        add(o, "alg2-seed" + std::to_string(seed) + ".json", report_json(r));
    }
    o.artifacts.insert(o.artifacts.begin(), Artifact{"corpus.csv", csv.str()});
    o.metrics["fitted_I"] = fI;
    o.metrics["fitted_II"] = fII;
    o.metrics["fitted_III"] = fIII;
    o.metrics["bad_stops"] = static_cast<double>(bad_stops);
    o.ok = bad_stops == 0 && finite;
    o.summary = std::to_string(cfg.seeds.size()) + " seeds, fitted I/II/III " + fd(fI) + " / " + fd(fII) + " / " +
                fd(fIII) + ", " + std::to_string(bad_stops) + " budget or exhausted stops";
    return o;
}

Outcome alg2(double delta, std::uint64_t seed) {
    CorpusConfig c;
    c.seeds = {seed};
    c.delta = delta;
    return corpus(c);
}

Outcome alg1(double delta, std::uint64_t seed) {
    auto fam = make_direction_separated_family(2, delta, seed);
    AlgConfig cfg;
    cfg.delta = delta;
    cfg.seed = seed;
    auto res = run_alg1(fam, Variety::whole_space(2), Vec::Constant(2, 0.5), cfg);
    Outcome o;
    add(o, "alg1.json", report_json(res.report));
    add(o, "alg1.txt", report_table(res.report));
    o.ok = res.report.stop == StopReason::Tiny || res.report.stop == StopReason::Tang;
    o.metrics["steps"] = static_cast<double>(res.report.steps.size());
    o.metrics["fitted_I"] = res.report.fitted_I;
    o.summary = "stop " + to_string(res.report.stop) + " after " + std::to_string(res.report.steps.size()) + " steps";
    return o;
}

// ---------------------------------------------------------------- golden

Outcome golden_tables() {
    Outcome o;
    for (int fig : {1, 3, 4})
        add(o, "figure" + std::to_string(fig) + ".csv", exponents::emit_table(fig, 2, 15, exponents::TableFormat::Csv));
    o.summary = "figures 1, 3 and 4 over 2..15";
    return o;
}

std::string calibration_json(const Calibration& c) {
    ojson j;
    j["cordoba_C"] = c.cordoba_C;
    j["wolff_lower"] = c.wolff_lower;
    j["wolff_upper"] = c.wolff_upper;
    j["fitted_I"] = c.fitted_I;
    j["fitted_II"] = c.fitted_II;
    j["fitted_III"] = c.fitted_III;
    ojson f = ojson::object();
    for (const auto& [seed, v] : c.fke) f[std::to_string(seed)] = v;
    j["fke_ratio"] = f;
    return j.dump(2) + "\n";
}

Calibration parse_calibration(const std::string& text) {
    Calibration c;
    try {
        auto j = ojson::parse(text);
        c.cordoba_C = j.at("cordoba_C").get<double>();
        c.wolff_lower = j.at("wolff_lower").get<double>();
        c.wolff_upper = j.at("wolff_upper").get<double>();
        c.fitted_I = j.at("fitted_I").get<double>();
        c.fitted_II = j.at("fitted_II").get<double>();
        c.fitted_III = j.at("fitted_III").get<double>();
        for (const auto& [k, v] : j.at("fke_ratio").items()) c.fke[std::stoull(k)] = v.get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("regression constants: ") + e.what());
    }
    return c;
}

Calibration calibrate(const Outcome& cordoba_run, const Outcome& sharpness_run, const Outcome& corpus_run) {
    Calibration c;
    c.cordoba_C = cordoba_run.metrics.at("C");
    c.wolff_lower = 0.9 * sharpness_run.metrics.at("extremal_min");
    c.wolff_upper = 1.1 * sharpness_run.metrics.at("random_max");
    c.fitted_I = 1.1 * corpus_run.metrics.at("fitted_I");
    c.fitted_II = 1.1 * corpus_run.metrics.at("fitted_II");
    c.fitted_III = 1.1 * corpus_run.metrics.at("fitted_III");
    for (const auto& [k, v] : corpus_run.metrics)
        if (k.rfind("fke_", 0) == 0) c.fke[std::stoull(k.substr(4))] = v;
    return c;
}

}  // namespace kakeya::experiments
