#include "kakeya/structure.hpp"

#include "kakeya/parallel.hpp"
#include "kakeya/partition.hpp"
#include "kakeya/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

namespace kakeya {

double sigma_step(double r, char letter, double eps0) {
    require(r > 0 && r < 1, "sigma_step: r must lie in (0,1)");
    require(eps0 > 0 && eps0 < 0.25, "sigma_step: eps0 must lie in (0,1/4)");
    require(letter == 'a' || letter == 'c', "sigma_step: letter must be 'a' or 'c'");
    return letter == 'c' ? r / 2 : std::pow(r, 1 + eps0);
}

History History::of(const std::string& word) {
    History h;
    h.word = word;
    for (char ch : word) {
        require(ch == 'a' || ch == 'c', "history: letters must be 'a' or 'c'");
        (ch == 'a' ? h.count_a : h.count_c)++;
    }
    return h;
}

double History::scale(double r0, double eps0) const {
    double r = r0;
    for (char ch : word) r = sigma_step(r, ch, eps0);
    return r;
}

int History::A(int A0) const {
    int a = A0;
    for (int i = 0; i < count_a && a > 1; ++i) a /= 2;
    return std::max(a, 1);
}

double History::coefficient(int d, int n, double eps0) const {
    return std::pow(static_cast<double>(d), count_c * eps0 + count_a * (n + eps0));
}

double AlgConfig::initial_scale() const { return r0 > 0 ? r0 : std::pow(delta, eps0); }

void AlgConfig::validate() const {
    require(delta > 0 && delta < 0.5, "alg: delta must lie in (0,1/2)");
    require(eps0 > 0 && eps0 < 0.25, "alg: eps0 must lie in (0,1/4)");
    require(A >= 1, "alg: A must be at least 1");
    require(d >= 1 && d <= 8, "alg: d must lie in [1,8]");
    require(k == 2, "alg: only k = 2 is supported");
    require(p >= 1, "alg: p must be at least 1");
    require(budget >= 1, "alg: budget must be positive");
    const double r = initial_scale();
    const double lo = std::pow(delta, 1 - eps0), hi = std::pow(delta, eps0);
    require(r >= lo * (1 - 1e-12) && r <= hi * (1 + 1e-12), "alg: r0 must lie in [delta^(1-eps0), delta^eps0]");
    require(grid_step() <= delta / 2, "alg: grid step must be at most delta/2");
}

std::string to_string(StopReason s) {
    switch (s) {
        case StopReason::Tiny: return "tiny";
        case StopReason::Tang: return "tang";
        case StopReason::Budget: return "budget";
        case StopReason::Exhausted: return "exhausted";
    }
    return "?";
}

std::string to_string(Alg2Outcome o) {
    switch (o) {
        case Alg2Outcome::TinyDominant: return "tiny-dom";
        case Alg2Outcome::Degenerate: return "degenerate";
        case Alg2Outcome::TangDominant: return "tang-dom";
    }
    return "?";
}

namespace {

std::vector<char> mask_of(std::size_t count, const std::vector<int>& ids) {
    std::vector<char> m(count, 0);
    for (int t : ids) m[t] = 1;
    return m;
}

std::vector<int> tubes_meeting(const Incidence& inc, const std::vector<std::size_t>& region,
                               const std::vector<char>& allowed) {
    std::vector<char> hit(allowed.size(), 0);
    for (std::size_t c : region)
        for (std::size_t o = inc.offsets[c]; o < inc.offsets[c + 1]; ++o)
            if (allowed[inc.ids[o]]) hit[inc.ids[o]] = 1;
    std::vector<int> out;
    for (std::size_t t = 0; t < hit.size(); ++t)
        if (hit[t]) out.push_back(static_cast<int>(t));
    return out;
}

// Grid cells whose centers lie in the closed ball, ascending.
std::vector<std::size_t> ball_cells(const GridSpec& g, const Vec& c, double r) {
    const int n = g.dim;
    std::vector<long> lo(n), hi(n);
    for (int i = 0; i < n; ++i) {
        lo[i] = std::max(0L, static_cast<long>(std::floor((c[i] - r - g.lo[i]) / g.h - 0.5)));
        hi[i] = std::min(g.extent[i] - 1, static_cast<long>(std::ceil((c[i] + r - g.lo[i]) / g.h - 0.5)));
        if (hi[i] < lo[i]) return {};
    }
    std::vector<std::size_t> out;
    std::vector<long> idx = lo;
    while (true) {
        std::size_t id = g.index(idx);
        if ((g.center(id) - c).norm() <= r) out.push_back(id);
        int ax = n - 1;
        while (ax >= 0 && ++idx[ax] > hi[ax]) {
            idx[ax] = lo[ax];
            --ax;
        }
        if (ax < 0) break;
    }
    return out;
}

bool near_zero_set(const Polynomial& Q, const Vec& x, double rad) {
    Vec g = Q.gradient(x);
    return std::abs(Q.eval(x)) <= rad * g.norm();
}

bool near_variety(const Variety& Z, const Vec& x, double rad) {
    if (Z.dim() == Z.ambient_dim()) return true;
    if (Z.is_affine()) return Z.distance_to(x) <= rad;
    Vec res = Z.residual(x);
    double g = Z.jacobian(x).norm();
    return g > 0 && res.norm() <= rad * g;
}

struct BallPlan {
    Vec center;
    std::vector<std::size_t> ball;    // all grid cells of B
    std::vector<std::size_t> region;  // B cap N_delta Y cap O
    std::vector<int> tang, trans;
};

struct CellPlan {
    bool cellular = true;
    std::vector<std::vector<std::size_t>> children;
    Polynomial wall;
    std::vector<BallPlan> balls;
};

struct StepContext {
    const TubeFamily* family;
    const BroadEvaluator* ev;
    const AlgConfig* cfg;
    int m;
    double r;
    int A;
    int step;
};

CellPlan plan_cell(const StepContext& ctx, const AlgCell& cell) {
    const auto& ev = *ctx.ev;
    const auto& cfg = *ctx.cfg;
    const GridSpec& grid = ev.grid();
    const double delta = cfg.delta;
    CellPlan plan;
    auto mask = mask_of(ev.tube_count(), cell.tubes);
    auto dens = ev.broad_density(cell.region, &mask, ctx.A);

    PartitionOptions opt;
    opt.D = cfg.d;
    opt.tol = 0.25;
    opt.restarts = cfg.restarts;
    opt.iterations = cfg.iterations;
    opt.seed = mix64(cfg.seed ^ mix64(static_cast<std::uint64_t>(ctx.step) * 0x9e3779b97f4a7c15ULL +
                                      static_cast<std::uint64_t>(cell.id)));
    CaseResult cr = cellular_or_algebraic(grid, cell.region, dens, grid.dim, delta, opt);

    if (cr.kind == CaseResult::Kind::Cellular) {
        auto shr = shrunken_cells(cr.partition, delta);
        double total = std::accumulate(dens.begin(), dens.end(), 0.0);
        std::vector<double> mass(shr.size(), 0.0);
        std::size_t nonempty = 0;
        double shrunk_total = 0;
        for (std::size_t i = 0; i < shr.size(); ++i) {
            for (std::size_t c : shr[i].members) {
                auto it = std::lower_bound(cell.region.begin(), cell.region.end(), c);
                if (it != cell.region.end() && *it == c) mass[i] += dens[it - cell.region.begin()];
            }
            if (mass[i] > 0) ++nonempty;
            shrunk_total += mass[i];
        }
        double kept = 0;
        for (std::size_t i = 0; i < shr.size(); ++i) {
            if (mass[i] <= 0 || mass[i] < shrunk_total / (2.0 * nonempty)) continue;
            kept += mass[i];
            plan.children.push_back(shr[i].members);
        }
        if (kept >= 0.5 * total) return plan;
        // The shrunken cells lost the mass to the wall neighbourhood.
        plan.children.clear();
        plan.cellular = false;
        plan.wall = cr.partition.polynomial();
    } else {
        plan.cellular = false;
        plan.wall = cr.wall;
    }

    const Polynomial& Q = plan.wall;
    const double rho = std::max(std::pow(ctx.r, 1 + cfg.eps0), std::pow(delta, 1 - cfg.eps0));
    std::vector<std::size_t> wall_cells;
    for (std::size_t c : cell.region)
        if (near_zero_set(Q, grid.center(c), delta)) wall_cells.push_back(c);
    std::vector<Vec> centers;
    for (std::size_t c : wall_cells) {
        Vec x = grid.center(c);
        bool covered = false;
        for (const auto& y : centers)
            if ((x - y).norm() <= rho) {
                covered = true;
                break;
            }
        if (!covered) centers.push_back(x);
    }
    const bool curve = ctx.m - 1 >= 1;
    std::optional<Variety> Y;
    if (curve && Q.degree() >= 1) Y = Variety::polynomial(grid.dim, {Q}, Q.degree());
    // Each wall cell goes to its nearest center so sibling regions are disjoint.
    std::vector<std::vector<std::size_t>> owned(centers.size());
    for (std::size_t c : wall_cells) {
        Vec x = grid.center(c);
        std::size_t best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < centers.size(); ++j) {
            double dj = (x - centers[j]).squaredNorm();
            if (dj < bd) {
                bd = dj;
                best = j;
            }
        }
        owned[best].push_back(c);
    }
    for (std::size_t j = 0; j < centers.size(); ++j) {
        const Vec& x = centers[j];
        BallPlan bp;
        bp.center = x;
        bp.ball = ball_cells(grid, x, rho);
        bp.region = std::move(owned[j]);
        for (int t : tubes_meeting(ev.incidence(), bp.region, mask)) {
            bool tangent = false;
            if (Y) {
                auto rep = is_tangent_tube(ctx.family->tubes[t], *Y, x, rho, cfg.tangent_angle, t, true);
                tangent = rep.is_tangent();
            }
            (tangent ? bp.tang : bp.trans).push_back(t);
        }
        plan.balls.push_back(std::move(bp));
    }
    return plan;
}


struct ChildSpec {
    std::vector<std::size_t> region;
    std::vector<int> tubes;  // known tube list (algebraic) or empty to derive from parent
    const std::vector<char>* parent = nullptr;
    int A = 1;
};

void record_step(RunReport& rep, const Ensemble& E, int m) {
    StepRecord s;
    s.step = E.step;
    s.word = E.history.word;
    s.r = E.r;
    s.A = E.A;
    s.C = E.C;
    s.cells = E.cells.size();
    for (const auto& c : E.cells) {
        s.tubes_sum += c.tubes.size();
        s.tubes_max = std::max(s.tubes_max, c.tubes.size());
        s.broad_sum += c.broad;
    }
    const double T = static_cast<double>(rep.tubes);
    const double d = rep.d;
    const double inf = std::numeric_limits<double>::infinity();
    s.ratio_I = s.broad_sum > 0 ? rep.lhs / (E.C * s.broad_sum) : inf;
    s.ratio_II = s.tubes_sum / (E.C * std::pow(d, E.history.count_c) * T);
    s.ratio_III = s.tubes_max / (E.C * std::pow(d, -E.history.count_c * (m - 1.0)) * T);
    rep.fitted_I = std::max(rep.fitted_I, s.ratio_I);
    rep.fitted_II = std::max(rep.fitted_II, s.ratio_II);
    rep.fitted_III = std::max(rep.fitted_III, s.ratio_III);
    rep.steps.push_back(s);
}

}  // namespace

Alg1Result run_alg1(const TubeFamily& family, const BroadEvaluator& ev, const Variety& Z, const Vec& x0,
                    std::vector<std::size_t> region, std::vector<int> tubes, const AlgConfig& cfg) {
    cfg.validate();
    require(family.dim == 2, "alg1: only n = 2 is supported");
    require(Z.ambient_dim() == 2 && (Z.dim() == 1 || Z.dim() == 2), "alg1: Z must be a curve or the plane");
    require(ev.tube_count() == family.size(), "alg1: evaluator does not match the family");
    const int n = 2;
    const int m = Z.dim();
    const double delta = cfg.delta;
    const double tiny = std::pow(delta, 1 - cfg.eps0);
    const GridSpec& grid = ev.grid();
    (void)x0;

    Alg1Result out;
    RunReport& rep = out.report;
    rep.n = n;
    rep.m = m;
    rep.delta = delta;
    rep.r0 = cfg.initial_scale();
    rep.eps0 = cfg.eps0;
    rep.d = cfg.d;
    rep.A = cfg.A;
    rep.tubes = tubes.size();
    std::sort(tubes.begin(), tubes.end());
    std::sort(region.begin(), region.end());
    {
        auto mask = mask_of(ev.tube_count(), tubes);
        rep.lhs = ev.broad_power(&region, &mask, cfg.A);
    }
    require(rep.lhs > 0, "alg1: the broad norm vanishes on B(x0, r0)");

    int next_id = 0;
    Ensemble E;
    E.step = 0;
    E.history = History::of("");
    E.r = rep.r0;
    E.A = cfg.A;
    E.C = 1;
    E.d = cfg.d;
    E.cells.push_back(AlgCell{next_id++, std::move(region), std::move(tubes), rep.lhs});

    while (true) {
        record_step(rep, E, m);
        if (E.cells.empty()) {
            rep.stop = StopReason::Exhausted;
            out.ensembles.push_back(std::move(E));
            break;
        }
        if (E.r <= tiny) {
            rep.stop = StopReason::Tiny;
            out.ensembles.push_back(std::move(E));
            break;
        }
        if (E.step >= cfg.budget) {
            rep.stop = StopReason::Budget;
            out.ensembles.push_back(std::move(E));
            break;
        }

        StepContext ctx{&family, &ev, &cfg, m, E.r, E.A, E.step};
        std::vector<CellPlan> plans(E.cells.size());
        parallel_for(E.cells.size(), [&](std::size_t i) { plans[i] = plan_cell(ctx, E.cells[i]); });

        double cell_sum = 0, alg_sum = 0;
        std::size_t n_cell = 0, n_alg = 0;
        for (std::size_t i = 0; i < plans.size(); ++i) {
            (plans[i].cellular ? cell_sum : alg_sum) += E.cells[i].broad;
            (plans[i].cellular ? n_cell : n_alg)++;
        }
        rep.steps.back().cellular_cells = n_cell;
        rep.steps.back().algebraic_cells = n_alg;
        const int A_half = std::max(1, E.A / 2);

        // [tang]: candidate sets come from the walls of the algebraic cells.
        if (n_alg > 0 && m >= 2) {
            TangCheck tc;
            std::vector<TangSet> sets;
            std::vector<const BallPlan*> sources;
            for (const auto& pl : plans) {
                if (pl.cellular) continue;
                for (const auto& b : pl.balls) {
                    if (b.tang.empty()) continue;
                    TangSet S;
                    S.equation = pl.wall;
                    S.center = b.center;
                    S.radius = std::max(std::pow(E.r, 1 + cfg.eps0), tiny);
                    S.tubes = b.tang;
                    sets.push_back(std::move(S));
                    sources.push_back(&b);
                }
            }
            if (!sets.empty()) {
                parallel_for(sets.size(), [&](std::size_t i) {
                    auto mask = mask_of(ev.tube_count(), sets[i].tubes);
                    sets[i].broad = ev.broad_power(&sources[i]->ball, &mask, A_half);
                });
                tc.evaluated = true;
                for (const auto& c : E.cells) {
                    tc.broad_total += c.broad;
                    tc.count_total += c.tubes.size();
                    tc.max_total = std::max(tc.max_total, static_cast<double>(c.tubes.size()));
                }
                for (const auto& S : sets) {
                    tc.broad_tang += S.broad;
                    tc.count_tang += S.tubes.size();
                    tc.max_tang = std::max(tc.max_tang, static_cast<double>(S.tubes.size()));
                }
                tc.cond_broad = tc.broad_total <= cfg.c_tang * std::log(static_cast<double>(cfg.d)) * tc.broad_tang;
                tc.cond_count = tc.count_tang <= cfg.c_tang * std::pow(delta, -n * cfg.eps0) * tc.count_total;
                tc.cond_max = tc.max_tang <= cfg.c_tang * tc.max_total;
                rep.tang_checks.push_back(tc);
                if (tc.fires()) {
                    rep.stop = StopReason::Tang;
                    rep.tang = std::move(sets);
                    out.ensembles.push_back(std::move(E));
                    break;
                }
            }
        }

        const bool cellular = alg_sum <= cell_sum;
        const char letter = cellular ? 'c' : 'a';
        rep.steps.back().next = letter;

        std::vector<std::vector<char>> masks(E.cells.size());
        std::vector<ChildSpec> specs;
        for (std::size_t i = 0; i < plans.size(); ++i) {
            if (plans[i].cellular != cellular) continue;
            masks[i] = mask_of(ev.tube_count(), E.cells[i].tubes);
            if (cellular) {
                for (auto& ch : plans[i].children) specs.push_back(ChildSpec{std::move(ch), {}, &masks[i], E.A});
            } else {
                for (auto& b : plans[i].balls) {
                    if (b.region.empty() || b.trans.empty()) continue;
                    specs.push_back(ChildSpec{std::move(b.region), std::move(b.trans), nullptr, A_half});
                }
            }
        }
        std::vector<AlgCell> children(specs.size());
        parallel_for(specs.size(), [&](std::size_t i) {
            AlgCell& c = children[i];
            c.region = std::move(specs[i].region);
            c.tubes = specs[i].parent ? tubes_meeting(ev.incidence(), c.region, *specs[i].parent)
                                      : std::move(specs[i].tubes);
            auto mask = mask_of(ev.tube_count(), c.tubes);
            c.broad = c.tubes.empty() ? 0.0 : ev.broad_power(&c.region, &mask, specs[i].A);
        });

        Ensemble next;
        next.step = E.step + 1;
        next.history = History::of(E.history.word + letter);
        next.r = sigma_step(E.r, letter, cfg.eps0);
        next.A = cellular ? E.A : A_half;
        next.C = next.history.coefficient(cfg.d, n, cfg.eps0);
        next.d = cfg.d;
        for (auto& c : children) {
            if (c.broad <= 0) continue;
            c.id = next_id++;
            next.cells.push_back(std::move(c));
        }
        out.ensembles.push_back(std::move(E));
        E = std::move(next);
    }
    (void)grid;
    return out;
}

Alg1Result run_alg1(const TubeFamily& family, const Variety& Z, const Vec& x0, const AlgConfig& cfg) {
    cfg.validate();
    require(family.dim == 2 && x0.size() == 2, "alg1: only n = 2 is supported");
    require(!family.tubes.empty(), "alg1: empty family");
    const double r0 = cfg.initial_scale();
    for (std::size_t i = 0; i < family.size(); ++i) {
        if (Z.dim() == Z.ambient_dim()) break;
        auto rep = is_tangent_tube(family.tubes[i], Z, x0, r0, cfg.tangent_angle, static_cast<int>(i));
        require(rep.is_tangent(), "alg1: tube " + std::to_string(i) + " is not tangent to Z in B(x0, r0)");
    }
    BroadConfig bc;
    bc.k = cfg.k;
    bc.A = cfg.A;
    bc.beta = cfg.beta;
    bc.p = cfg.p;
    const double h = cfg.grid_step();
    auto [lo, hi] = family_bounds(family);
    Vec pad = Vec::Constant(2, r0 + 2 * h);
    GridSpec grid = GridSpec::covering(lo.cwiseMin(x0 - pad), hi.cwiseMax(x0 + pad), h);
    BroadEvaluator ev(family, bc, grid);
    std::vector<std::size_t> region;
    for (std::size_t c : ball_cells(grid, x0, r0))
        if (near_variety(Z, grid.center(c), 4 * cfg.delta)) region.push_back(c);
    std::vector<char> all(family.size(), 1);
    auto tubes = tubes_meeting(ev.incidence(), region, all);
    return run_alg1(family, ev, Z, x0, std::move(region), std::move(tubes), cfg);
}

double theta_value(double p_l, double p) {
    require(p_l > 1 && p >= 1, "theta: exponents must exceed 1");
    return (1 - 1 / p) / (1 - 1 / p_l);
}

Alg2Report run_alg2(const TubeFamily& family, const Alg2Config& c2) {
    AlgConfig cfg = c2.alg;
    cfg.r0 = 0;
    require(family.dim == 2, "alg2: only n = 2 is supported");
    require(cfg.k == 2, "alg2: only k = 2 is supported");
    require(!family.tubes.empty(), "alg2: empty family (the broad norm must be nonzero)");
    const int n = 2;
    require(static_cast<int>(c2.p_vector.size()) == n - cfg.k + 1, "alg2: p_vector must list p_k..p_n");
    for (std::size_t i = 0; i < c2.p_vector.size(); ++i) {
        require(c2.p_vector[i] >= 1, "alg2: exponents must be at least 1");
        if (i > 0) require(c2.p_vector[i] <= c2.p_vector[i - 1], "alg2: p_vector must be non-increasing");
    }
    cfg.p = c2.p_vector.back();
    cfg.delta = family.delta;
    cfg.validate();
    const double p = cfg.p;
    const double r = cfg.initial_scale();

    Alg2Report out;
    out.delta = cfg.delta;
    out.tubes = family.size();

    BroadConfig bc;
    bc.k = cfg.k;
    bc.A = cfg.A;
    bc.beta = cfg.beta;
    bc.p = p;
    const double h = cfg.grid_step();
    auto [lo, hi] = family_bounds(family);
    GridSpec grid = GridSpec::covering(lo - Vec::Constant(2, 2 * h), hi + Vec::Constant(2, 2 * h), h);
    BroadEvaluator ev(family, bc, grid);
    out.total_broad = ev.broad_power(nullptr, nullptr, cfg.A);
    if (out.total_broad <= 0) {
        out.outcome = Alg2Outcome::Degenerate;
        out.message = "broad norm of the family vanishes; the non-degeneracy hypothesis fails";
        return out;
    }

    // First step: lattice of delta^{eps0}-balls meeting the union of the tubes.
    const Vec mid = (lo + hi) / 2;
    const Vec half = (hi - lo) / 2;
    std::vector<long> reach(2);
    for (int i = 0; i < 2; ++i) reach[i] = static_cast<long>(std::ceil(half[i] / r)) + 1;
    const Variety plane = Variety::whole_space(2);
    std::vector<char> all(family.size(), 1);
    for (long a = -reach[0]; a <= reach[0]; ++a) {
        for (long b = -reach[1]; b <= reach[1]; ++b) {
            Vec c = mid + r * Vec((Vec(2) << a, b).finished());
            auto region = ball_cells(grid, c, r);
            if (region.empty()) continue;
            auto tubes = tubes_meeting(ev.incidence(), region, all);
            if (tubes.empty()) continue;
            auto mask = mask_of(family.size(), tubes);
            double bl = ev.broad_power(&region, &mask, cfg.A);
            if (bl <= 0) continue;
            AlgConfig ac = cfg;
            ac.seed = mix64(cfg.seed ^ mix64(static_cast<std::uint64_t>(out.runs.size()) + 1));
            Alg1Result res = run_alg1(family, ev, plane, c, std::move(region), tubes, ac);
            const Ensemble& last = res.ensembles.back();
            BallRun br;
            br.center = c;
            br.radius = r;
            br.tubes = tubes.size();
            br.broad = bl;
            br.stop = res.report.stop;
            br.count_c = last.history.count_c;
            br.count_a = last.history.count_a;
            br.D = std::pow(static_cast<double>(cfg.d), br.count_c);
            br.final_cells = last.cells.size();
            br.final_A = last.A;
            for (const auto& cell : last.cells) {
                br.final_broad += cell.broad;
                br.final_tubes_sum += cell.tubes.size();
                br.final_tubes_max = std::max(br.final_tubes_max, cell.tubes.size());
            }
            br.fitted_I = res.report.fitted_I;
            br.fitted_II = res.report.fitted_II;
            br.fitted_III = res.report.fitted_III;
            out.level_sum += bl;
            (br.stop == StopReason::Tiny ? out.tiny_sum : out.tang_sum) += bl;
            out.runs.push_back(std::move(br));
            out.reports.push_back(std::move(res.report));
        }
    }

    const int m = n;
    out.theta = theta_value(c2.p_vector.front() > 1 ? c2.p_vector.front() : 2.0, p);
    if (out.level_sum <= 2 * out.tiny_sum) {
        out.outcome = Alg2Outcome::TinyDominant;
        out.level = m;
        // Pigeonhole the tiny runs by their D value; keep the heaviest group.
        std::map<double, std::pair<std::size_t, double>> groups;
        for (const auto& br : out.runs) {
            if (br.stop != StopReason::Tiny) continue;
            auto& g = groups[br.D];
            g.first++;
            g.second += br.final_broad;
        }
        double best = -1;
        for (const auto& [D, g] : groups) {
            out.groups.emplace_back(D, g.first);
            if (g.second > best) {
                best = g.second;
                out.group_D = D;
            }
        }
        double rhs_sum = 0;
        for (const auto& br : out.runs) {
            if (br.stop != StopReason::Tiny) continue;
            const double T = static_cast<double>(br.tubes);
            out.property2 = std::max(out.property2, br.final_tubes_sum / (std::pow(br.D, 1 + cfg.eps0) * T));
            out.property3 =
                std::max(out.property3, br.final_tubes_max / (std::pow(br.D, -(m - 1) + cfg.eps0) * T));
            if (br.D == out.group_D) rhs_sum += br.final_broad;
        }
        out.fke_lhs = std::pow(out.total_broad, 1 / p);
        const double dn = std::pow(cfg.delta, n) * static_cast<double>(family.size());
        out.fke_rhs = std::pow(dn, 1 - out.theta) * std::pow(rhs_sum, out.theta / p);
        out.fke_ratio = out.fke_rhs > 0 ? out.fke_lhs / out.fke_rhs : std::numeric_limits<double>::infinity();
        return out;
    }

    // One level down the tangent sets are curves, of dimension k-1: the broad
    // norm should vanish there, which contradicts non-degeneracy.
    BroadConfig vc = bc;
    bool all_vanish = true;
    for (const auto& rep : out.reports) {
        if (rep.stop != StopReason::Tang) continue;
        for (const auto& S : rep.tang) {
            TubeFamily sub;
            sub.dim = 2;
            sub.delta = family.delta;
            for (int t : S.tubes) sub.tubes.push_back(family.tubes[t]);
            Variety Y = Variety::polynomial(2, {S.equation}, S.equation.degree());
            vc.A = std::max(1, cfg.A / 2);
            auto vr = vanishing_check(sub, Y, S.center, S.radius, vc, cfg.eps0, cfg.tangent_angle);
            out.level1_norms.push_back(vr.norm);
            if (!vr.vanishes) all_vanish = false;
        }
    }
    out.level = m - 1;
    if (all_vanish) {
        out.outcome = Alg2Outcome::Degenerate;
        out.message = "tangent sets dominate and their broad norms vanish at level k-1; contradicts non-degeneracy";
    } else {
        out.outcome = Alg2Outcome::TangDominant;
        out.message = "tangent sets dominate with non-vanishing broad norm at level k-1";
    }
    return out;
}

double second_key_estimate(const std::vector<double>& gammas, const std::vector<double>& D,
                           const std::vector<double>& deltas, double delta, int n, int m) {
    require(n >= 2 && m >= 1 && m <= n, "second_key_estimate: need 1 <= m <= n");
    const std::size_t L = static_cast<std::size_t>(n - m + 1);
    require(gammas.size() == L, "second_key_estimate: need gamma_m..gamma_n");
    require(D.size() == L && deltas.size() == L, "second_key_estimate: D and deltas must be indexed m-1..n-1");
    require(delta > 0 && delta < 1, "second_key_estimate: delta must lie in (0,1)");
    double sum = 0;
    for (double g : gammas) {
        require(g >= 0 && g <= 1, "second_key_estimate: weights must lie in [0,1]");
        sum += g;
    }
    require(std::abs(sum - 1) <= 1e-12, "second_key_estimate: weights must sum to 1");
    double log_bound = -(n - 1) * std::log(delta);
    double partial = 0;  // sum_{j=m}^{i} gamma_j
    for (int i = m - 1; i <= n - 1; ++i) {
        const std::size_t pos = static_cast<std::size_t>(i - (m - 1));
        if (i >= m) partial += gammas[static_cast<std::size_t>(i - m)];
        require(D[pos] >= 1 && deltas[pos] > 0, "second_key_estimate: need D_i >= 1 and delta_i > 0");
        if (i > m - 1) log_bound += -partial * std::log(deltas[pos] / delta);
        log_bound += -i * (1 - partial) * std::log(D[pos]);
    }
    return std::exp(log_bound);
}

namespace {

using ojson = nlohmann::ordered_json;

ojson num(double x) { return std::isfinite(x) ? ojson(x) : ojson(format_double(x)); }

ojson vec_json(const Vec& v) {
    ojson a = ojson::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(num(v[i]));
    return a;
}

ojson run_json(const RunReport& r) {
    ojson j;
    j["stop"] = to_string(r.stop);
    j["n"] = r.n;
    j["m"] = r.m;
    j["delta"] = num(r.delta);
    j["r0"] = num(r.r0);
    j["eps0"] = num(r.eps0);
    j["d"] = r.d;
    j["A"] = r.A;
    j["tubes"] = r.tubes;
    j["broad_ball"] = num(r.lhs);
    j["fitted"] = {{"I", num(r.fitted_I)}, {"II", num(r.fitted_II)}, {"III", num(r.fitted_III)}};
    ojson steps = ojson::array();
    for (const auto& s : r.steps) {
        ojson e;
        e["step"] = s.step;
        e["word"] = s.word;
        e["r"] = num(s.r);
        e["A"] = s.A;
        e["C"] = num(s.C);
        e["cells"] = s.cells;
        e["tubes_sum"] = s.tubes_sum;
        e["tubes_max"] = s.tubes_max;
        e["broad_sum"] = num(s.broad_sum);
        e["ratios"] = {{"I", num(s.ratio_I)}, {"II", num(s.ratio_II)}, {"III", num(s.ratio_III)}};
        e["cellular_cells"] = s.cellular_cells;
        e["algebraic_cells"] = s.algebraic_cells;
        e["next"] = s.next ? std::string(1, s.next) : std::string();
        steps.push_back(e);
    }
    j["steps"] = steps;
    ojson checks = ojson::array();
    for (const auto& t : r.tang_checks) {
        checks.push_back({{"broad_total", num(t.broad_total)},
                          {"broad_tang", num(t.broad_tang)},
                          {"count_total", num(t.count_total)},
                          {"count_tang", num(t.count_tang)},
                          {"max_total", num(t.max_total)},
                          {"max_tang", num(t.max_tang)},
                          {"fires", t.fires()}});
    }
    j["tang_checks"] = checks;
    ojson sets = ojson::array();
    for (const auto& S : r.tang) {
        sets.push_back({{"equation", S.equation.str()},
                        {"center", vec_json(S.center)},
                        {"radius", num(S.radius)},
                        {"tubes", S.tubes},
                        {"broad", num(S.broad)}});
    }
    j["tang"] = sets;
    return j;
}

}  // namespace

std::string report_json(const RunReport& r) { return run_json(r).dump(2) + "\n"; }

std::string report_json(const Alg2Report& r) {
    ojson j;
    j["outcome"] = to_string(r.outcome);
    j["message"] = r.message;
    j["level"] = r.level;
    j["delta"] = num(r.delta);
    j["tubes"] = r.tubes;
    j["broad_total"] = num(r.total_broad);
    j["level_sum"] = num(r.level_sum);
    j["tiny_sum"] = num(r.tiny_sum);
    j["tang_sum"] = num(r.tang_sum);
    j["theta"] = num(r.theta);
    j["first_key_estimate"] = {{"lhs", num(r.fke_lhs)}, {"rhs", num(r.fke_rhs)}, {"ratio", num(r.fke_ratio)}};
    j["property2"] = num(r.property2);
    j["property3"] = num(r.property3);
    ojson groups = ojson::array();
    for (const auto& [D, c] : r.groups) groups.push_back({{"D", num(D)}, {"runs", c}});
    j["groups"] = groups;
    j["group_D"] = num(r.group_D);
    ojson l1 = ojson::array();
    for (double x : r.level1_norms) l1.push_back(num(x));
    j["level1_norms"] = l1;
    ojson runs = ojson::array();
    for (std::size_t i = 0; i < r.runs.size(); ++i) {
        const auto& b = r.runs[i];
        ojson e;
        e["center"] = vec_json(b.center);
        e["radius"] = num(b.radius);
        e["tubes"] = b.tubes;
        e["broad"] = num(b.broad);
        e["stop"] = to_string(b.stop);
        e["count_c"] = b.count_c;
        e["count_a"] = b.count_a;
        e["D"] = num(b.D);
        e["final_cells"] = b.final_cells;
        e["final_broad"] = num(b.final_broad);
        e["final_A"] = b.final_A;
        e["report"] = run_json(r.reports[i]);
        runs.push_back(e);
    }
    j["runs"] = runs;
    return j.dump(2) + "\n";
}

std::string report_table(const RunReport& r) {
    std::ostringstream os;
    char line[256];
    std::snprintf(line, sizeof line, "%4s %-12s %10s %3s %10s %6s %8s %10s %10s %10s\n", "step", "word", "r", "A",
                  "C", "cells", "tubes", "I", "II", "III");
    os << line;
    for (const auto& s : r.steps) {
        std::snprintf(line, sizeof line, "%4d %-12s %10.4g %3d %10.4g %6zu %8zu %10.4g %10.4g %10.4g\n", s.step,
                      s.word.empty() ? "-" : s.word.c_str(), s.r, s.A, s.C, s.cells, s.tubes_sum, s.ratio_I,
                      s.ratio_II, s.ratio_III);
        os << line;
    }
    os << "stop: " << to_string(r.stop) << "\n";
    return os.str();
}

}  // namespace kakeya
