#include "kakeya/partition.hpp"

#include "kakeya/parallel.hpp"
#include "kakeya/rng.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <ostream>

namespace kakeya {

namespace {

// Affine normalization x -> (x - c) / s onto roughly [-1, 1]^n.
struct Frame {
    Vec c;
    Vec s;

    Vec to_local(const Vec& x) const { return (x - c).cwiseQuotient(s); }
};

Frame frame_of(const GridSpec& g, const std::vector<std::size_t>& domain) {
    const int n = g.dim;
    Vec lo = Vec::Constant(n, std::numeric_limits<double>::infinity()), hi = -lo;
    for (std::size_t idx : domain) {
        Vec x = g.center(idx);
        lo = lo.cwiseMin(x);
        hi = hi.cwiseMax(x);
    }
    Frame f;
    f.c = (lo + hi) / 2;
    f.s = ((hi - lo) / 2).cwiseMax(Vec::Constant(n, g.h));
    return f;
}

Frame frame_of_points(const std::vector<Vec>& pts) {
    const int n = static_cast<int>(pts.front().size());
    Vec lo = Vec::Constant(n, std::numeric_limits<double>::infinity()), hi = -lo;
    for (const auto& x : pts) {
        lo = lo.cwiseMin(x);
        hi = hi.cwiseMax(x);
    }
    Frame f;
    f.c = (lo + hi) / 2;
    f.s = ((hi - lo) / 2).cwiseMax(Vec::Constant(n, 1e-9));
    return f;
}

// Q(u) with u = (x - c)/s, re-expressed in x.
Polynomial to_global(const Polynomial& q, const Frame& f) {
    const int n = q.nvars();
    std::vector<Polynomial> u;
    for (int i = 0; i < n; ++i) {
        Vec e = Vec::Zero(n);
        e[i] = 1 / f.s[i];
        u.push_back(Polynomial::linear(e, -f.c[i] / f.s[i]));
    }
    Polynomial out = Polynomial::linear(Vec::Zero(n), 0.0);
    for (const auto& t : q.terms()) {
        Polynomial term = Polynomial::linear(Vec::Zero(n), t.coef);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < t.exps[i]; ++k) term = term * u[i];
        out = out + term;
    }
    return out;
}

struct Samples {
    std::vector<std::vector<double>> phi;  // basis values without the constant
    std::vector<double> w;
    std::vector<int> cls;
    std::vector<Vec> x;  // local coordinates
};

struct ConstantFit {
    double objective = std::numeric_limits<double>::infinity();
    double constant = 0;
};

// Exact minimization over the constant term of the largest class half.
ConstantFit best_constant(const std::vector<double>& q, const std::vector<double>& w, const std::vector<int>& cls,
                          const std::vector<double>& cmass) {
    const std::size_t N = q.size();
    const std::size_t K = cmass.size();
    ConstantFit fit;
    if (N == 0) {
        fit.objective = 0;
        return fit;
    }
    std::vector<std::size_t> order(N);
    std::iota(order.begin(), order.end(), 0);
    // Point i turns positive once the constant exceeds -q_i.
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (q[a] != q[b]) return q[a] > q[b];
        return a < b;
    });
    std::vector<double> plus(K, 0.0);
    double best_gap = -1;
    std::size_t i = 0;
    while (i < N) {
        const double t = -q[order[i]];
        while (i < N && -q[order[i]] == t) {
            plus[cls[order[i]]] += w[order[i]];
            ++i;
        }
        double F = 0;
        for (std::size_t c = 0; c < K; ++c) F = std::max(F, std::max(plus[c], cmass[c] - plus[c]));
        const double next = i < N ? -q[order[i]] : t + 2;
        const double gap = next - t;
        if (F < fit.objective - 1e-15 * (1 + F) || (std::abs(F - fit.objective) <= 1e-15 * (1 + F) && gap > best_gap)) {
            fit.objective = F;
            fit.constant = (t + next) / 2;
            best_gap = gap;
        }
    }
    return fit;
}

std::vector<double> class_mass(const std::vector<double>& w, const std::vector<int>& cls, std::size_t K) {
    std::vector<double> m(K, 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) m[cls[i]] += w[i];
    return m;
}

struct StepResult {
    std::vector<double> coef;  // constant first, against the local basis
    double objective = 0;
};

StepResult search_factor(const Samples& S, const std::vector<std::vector<int>>& basis, std::size_t K, double target,
                         const PartitionOptions& opt, int step) {
    const std::size_t B = basis.size() - 1;
    const std::size_t N = S.w.size();
    auto cm = class_mass(S.w, S.cls, K);
    StepResult best;
    best.objective = std::numeric_limits<double>::infinity();
    std::vector<double> q(N), a(B), grad(B);
    for (int r = 0; r < opt.restarts; ++r) {
        Rng rng(opt.seed, "partition_search", static_cast<std::uint64_t>(step) * 1000003ULL + r);
        for (auto& v : a) v = rng.normal();
        double eta = 0.3;
        for (int it = 0; it < opt.iterations; ++it) {
            double nrm = 0;
            for (double v : a) nrm += v * v;
            nrm = std::sqrt(nrm);
            if (nrm == 0) break;
            for (auto& v : a) v /= nrm;
            for (std::size_t i = 0; i < N; ++i) {
                double s = 0;
                for (std::size_t j = 0; j < B; ++j) s += a[j] * S.phi[i][j];
                q[i] = s;
            }
            ConstantFit fit = best_constant(q, S.w, S.cls, cm);
            if (fit.objective < best.objective) {
                best.objective = fit.objective;
                best.coef.assign(B + 1, 0.0);
                best.coef[0] = fit.constant;
                for (std::size_t j = 0; j < B; ++j) best.coef[j + 1] = a[j];
            }
            if (best.objective <= target) return best;
            // Smoothed imbalance sum_c (sum_i w_i tanh(Q_i/tau) / m_c)^2.
            double tau = 0;
            for (std::size_t i = 0; i < N; ++i) tau += std::abs(q[i] + fit.constant);
            tau = std::max(1e-6, 0.25 * tau / static_cast<double>(N));
            std::vector<double> imb(K, 0.0);
            std::vector<double> th(N);
            for (std::size_t i = 0; i < N; ++i) {
                th[i] = std::tanh((q[i] + fit.constant) / tau);
                imb[S.cls[i]] += S.w[i] * th[i];
            }
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t i = 0; i < N; ++i) {
                const int c = S.cls[i];
                if (cm[c] <= 0) continue;
                const double f = 2 * imb[c] / (cm[c] * cm[c]) * S.w[i] * (1 - th[i] * th[i]) / tau;
                for (std::size_t j = 0; j < B; ++j) grad[j] += f * S.phi[i][j];
            }
            double gn = 0;
            for (double v : grad) gn += v * v;
            gn = std::sqrt(gn);
            if (gn == 0) break;
            for (std::size_t j = 0; j < B; ++j) a[j] -= eta * grad[j] / gn;
            eta *= 0.9;
        }
    }
    return best;
}

int sign_of(double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

double eval_factors(const std::vector<Polynomial>& fs, const double* x) {
    double p = 1;
    for (const auto& f : fs) p *= f.eval(x);
    return p;
}

// Labels the wall and the connected components of its complement.
void build_cells(Partition& P, const std::vector<double>& mass) {
    const GridSpec& g = P.grid;
    const int n = g.dim;
    const std::size_t M = P.domain.size();
    P.label.assign(M, -1);
    P.cells.clear();
    if (M == 0) return;
    // Index bounding box of the domain.
    std::vector<long> lo(n, std::numeric_limits<long>::max()), hi(n, std::numeric_limits<long>::min());
    for (std::size_t idx : P.domain) {
        auto c = g.coords(idx);
        for (int i = 0; i < n; ++i) {
            lo[i] = std::min(lo[i], c[i]);
            hi[i] = std::max(hi[i], c[i]);
        }
    }
    std::vector<long> cext(n);
    std::size_t ncorner = 1;
    for (int i = 0; i < n; ++i) {
        cext[i] = hi[i] - lo[i] + 2;
        ncorner *= static_cast<std::size_t>(cext[i]);
    }
    // Per corner: bit i set when factor i is positive, -1 on a zero. Comparing
    // patterns rather than the product sign keeps two nearby walls from
    // cancelling inside one grid cell.
    std::vector<int> csign(ncorner);
    parallel_chunks(ncorner, 4096, [&](std::size_t, std::size_t b, std::size_t e) {
        Vec x(n);
        for (std::size_t k = b; k < e; ++k) {
            std::size_t t = k;
            for (int i = n - 1; i >= 0; --i) {
                long ci = static_cast<long>(t % static_cast<std::size_t>(cext[i])) + lo[i];
                t /= static_cast<std::size_t>(cext[i]);
                x[i] = g.lo[i] + static_cast<double>(ci) * g.h;
            }
            int pattern = 0;
            for (std::size_t f = 0; f < P.factors.size() && pattern >= 0; ++f) {
                int sf = sign_of(P.factors[f].eval(x.data()));
                if (sf == 0) pattern = -1;
                else if (sf > 0) pattern |= 1 << f;
            }
            csign[k] = pattern;
        }
    });
    auto corner_index = [&](const std::vector<long>& c) {
        std::size_t k = 0;
        for (int i = 0; i < n; ++i) k = k * static_cast<std::size_t>(cext[i]) + static_cast<std::size_t>(c[i] - lo[i]);
        return k;
    };
    std::vector<int> cell_sign(M, 0);
    const int ncorners = 1 << n;
    for (std::size_t pos = 0; pos < M; ++pos) {
        auto c = g.coords(P.domain[pos]);
        int s0 = -2;
        bool wall = false;
        std::vector<long> cc(n);
        for (int m = 0; m < ncorners && !wall; ++m) {
            for (int i = 0; i < n; ++i) cc[i] = c[i] + ((m >> i) & 1);
            int s = csign[corner_index(cc)];
            if (s < 0 || (s0 != -2 && s != s0)) wall = true;
            s0 = s;
        }
        // Product sign: even number of negative factors means positive.
        const int negatives = static_cast<int>(P.factors.size()) - __builtin_popcount(static_cast<unsigned>(s0));
        cell_sign[pos] = wall ? 0 : (negatives % 2 == 0 ? 1 : -1);
    }
    auto pos_of = [&](std::size_t idx) -> long {
        auto it = std::lower_bound(P.domain.begin(), P.domain.end(), idx);
        if (it == P.domain.end() || *it != idx) return -1;
        return it - P.domain.begin();
    };
    std::deque<std::size_t> queue;
    for (std::size_t start = 0; start < M; ++start) {
        if (cell_sign[start] == 0 || P.label[start] >= 0) continue;
        PartitionCell cell;
        cell.id = static_cast<int>(P.cells.size());
        cell.sign = cell_sign[start];
        P.label[start] = cell.id;
        queue.push_back(start);
        while (!queue.empty()) {
            std::size_t pos = queue.front();
            queue.pop_front();
            cell.members.push_back(P.domain[pos]);
            auto c = g.coords(P.domain[pos]);
            for (int i = 0; i < n; ++i)
                for (int d : {-1, 1}) {
                    auto nb = c;
                    nb[i] += d;
                    if (!g.in_range(nb)) continue;
                    long q = pos_of(g.index(nb));
                    if (q < 0 || cell_sign[q] == 0 || P.label[q] >= 0) continue;
                    P.label[q] = cell.id;
                    queue.push_back(static_cast<std::size_t>(q));
                }
        }
        std::sort(cell.members.begin(), cell.members.end());
        P.cells.push_back(std::move(cell));
    }
    // Masses and diameters.
    P.wall_mass = 0;
    for (std::size_t pos = 0; pos < M; ++pos) {
        if (P.label[pos] < 0)
            P.wall_mass += mass[pos];
        else
            P.cells[P.label[pos]].mass += mass[pos];
    }
    for (auto& cell : P.cells) {
        Vec blo = Vec::Constant(n, std::numeric_limits<double>::infinity()), bhi = -blo;
        for (std::size_t idx : cell.members) {
            Vec x = g.center(idx);
            blo = blo.cwiseMin(x);
            bhi = bhi.cwiseMax(x);
        }
        cell.diameter = (bhi - blo).norm() + g.h * std::sqrt(static_cast<double>(n));
    }
}

}  // namespace

int Partition::degree() const {
    int d = 0;
    for (const auto& f : factors) d += f.degree();
    return d;
}

Polynomial Partition::polynomial() const {
    const int n = grid.dim;
    Polynomial p = Polynomial::linear(Vec::Zero(n), 1.0);
    for (const auto& f : factors) p = p * f;
    return p;
}

double Partition::eval(const Vec& x) const { return eval_factors(factors, x.data()); }

int Partition::cell_of(std::size_t grid_index) const {
    auto it = std::lower_bound(domain.begin(), domain.end(), grid_index);
    if (it == domain.end() || *it != grid_index) return -1;
    return label[it - domain.begin()];
}

int Partition::shrunken_cell_of(std::size_t grid_index) const {
    auto it = std::lower_bound(domain.begin(), domain.end(), grid_index);
    if (it == domain.end() || *it != grid_index) return -1;
    return shrunken_label[it - domain.begin()];
}

std::vector<int> bisection_degrees(int n, int D) {
    std::vector<int> out;
    int used = 0;
    for (int s = 1;; ++s) {
        const double need = std::ldexp(1.0, s - 1);
        int d = 1;
        // smallest d with C(d+n, n) - 1 >= 2^{s-1}
        while (true) {
            double binom = 1;
            for (int i = 1; i <= n; ++i) binom = binom * (d + i) / i;
            if (binom - 1 >= need) break;
            ++d;
        }
        if (used + d > D) break;
        used += d;
        out.push_back(d);
    }
    return out;
}

Partition partition_mass(const GridSpec& grid, const std::vector<std::size_t>& domain, const std::vector<double>& mass,
                         const PartitionOptions& opt) {
    const int n = grid.dim;
    require(n == 2 || n == 3, "partition: grid dimension must be 2 or 3");
    require(opt.D >= 1 && opt.D <= 8, "partition: degree bound D must lie in [1, 8]");
    require(opt.tol > 0, "partition: tol must be positive");
    require(domain.size() == mass.size(), "partition: mass vector must match the domain");
    require(std::is_sorted(domain.begin(), domain.end()), "partition: domain must be sorted");
    double total = 0;
    for (double m : mass) {
        require(m >= 0, "partition: masses must be non-negative");
        total += m;
    }
    require(total > 0, "partition: field has zero mass");

    Partition P;
    P.grid = grid;
    P.domain = domain;
    P.total_mass = total;
    const auto degrees = bisection_degrees(n, opt.D);
    P.steps = static_cast<int>(degrees.size());
    const Frame frame = frame_of(grid, domain);

    // Full-resolution samples: massive grid cells.
    std::vector<std::size_t> heavy;
    for (std::size_t pos = 0; pos < domain.size(); ++pos)
        if (mass[pos] > 0) heavy.push_back(pos);
    std::vector<Vec> xl(heavy.size());
    std::vector<double> w(heavy.size());
    for (std::size_t i = 0; i < heavy.size(); ++i) {
        xl[i] = frame.to_local(grid.center(domain[heavy[i]]));
        w[i] = mass[heavy[i]];
    }
    // Search samples: the same points, or block aggregates when there are many.
    constexpr std::size_t kSearchCap = 4096;
    std::vector<std::size_t> group(heavy.size());
    std::size_t ngroups = heavy.size();
    std::iota(group.begin(), group.end(), 0);
    if (heavy.size() > kSearchCap) {
        long block = 1;
        while (true) {
            std::vector<std::size_t> keys(heavy.size());
            for (std::size_t i = 0; i < heavy.size(); ++i) {
                auto c = grid.coords(domain[heavy[i]]);
                std::size_t k = 0;
                for (int a = 0; a < n; ++a) k = k * 1000003ULL + static_cast<std::size_t>(c[a] / block);
                keys[i] = k;
            }
            auto uniq = keys;
            std::sort(uniq.begin(), uniq.end());
            uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
            if (uniq.size() <= 1024 || block > (1L << 20)) {
                for (std::size_t i = 0; i < heavy.size(); ++i)
                    group[i] = std::lower_bound(uniq.begin(), uniq.end(), keys[i]) - uniq.begin();
                ngroups = uniq.size();
                break;
            }
            block *= 2;
        }
    }
    std::vector<int> cls(heavy.size(), 0);
    double target_base = total;
    for (int s = 1; s <= P.steps; ++s) {
        const int d = degrees[s - 1];
        const auto basis = Polynomial::monomial_basis(n, d);
        const std::size_t K = std::size_t{1} << (s - 1);
        target_base /= 2;
        const double target = std::pow(1 + opt.tol, static_cast<double>(s) / P.steps) * target_base;
        // Aggregate to search samples; class of a group = class of its heaviest member.
        Samples S;
        S.x.assign(ngroups, Vec::Zero(n));
        S.w.assign(ngroups, 0.0);
        S.cls.assign(ngroups, 0);
        std::vector<double> heaviest(ngroups, -1);
        for (std::size_t i = 0; i < heavy.size(); ++i) {
            auto gi = group[i];
            S.x[gi] += w[i] * xl[i];
            S.w[gi] += w[i];
            if (w[i] > heaviest[gi]) {
                heaviest[gi] = w[i];
                S.cls[gi] = cls[i];
            }
        }
        S.phi.resize(ngroups);
        std::vector<double> tmp(basis.size());
        for (std::size_t gi = 0; gi < ngroups; ++gi) {
            S.x[gi] /= S.w[gi];
            eval_basis(basis, S.x[gi].data(), n, tmp.data());
            S.phi[gi].assign(tmp.begin() + 1, tmp.end());
        }
        StepResult best = search_factor(S, basis, K, target, opt, s);
        // Exact constant on the full-resolution samples.
        if (ngroups != heavy.size()) {
            std::vector<double> q(heavy.size());
            for (std::size_t i = 0; i < heavy.size(); ++i) {
                eval_basis(basis, xl[i].data(), n, tmp.data());
                double v = 0;
                for (std::size_t j = 1; j < basis.size(); ++j) v += best.coef[j] * tmp[j];
                q[i] = v;
            }
            ConstantFit fit = best_constant(q, w, cls, class_mass(w, cls, K));
            best.coef[0] = fit.constant;
            best.objective = fit.objective;
        }
        P.step_objective.push_back(best.objective / target);
        std::vector<Monomial> terms;
        for (std::size_t j = 0; j < basis.size(); ++j) terms.push_back({basis[j], best.coef[j]});
        Polynomial local = Polynomial::from_terms(n, terms);
        for (std::size_t i = 0; i < heavy.size(); ++i)
            if (local.eval(xl[i]) > 0) cls[i] |= 1 << (s - 1);
        P.factors.push_back(to_global(local, frame));
    }
    build_cells(P, mass);
    double maxm = 0;
    for (const auto& c : P.cells) maxm = std::max(maxm, c.mass);
    const double bound = total / static_cast<double>(P.class_count());
    P.deviation = maxm / bound - 1;
    P.converged = maxm <= (1 + opt.tol) * bound * (1 + 1e-12);
    if (!P.converged)
        throw PartitionFailure("partition: no polynomial met the equal-mass tolerance (deviation " +
                                   format_double(P.deviation) + ")",
                               std::make_shared<Partition>(P));
    return P;
}

Partition partition_mass(const GridField& field, int D, double tol, std::uint64_t seed) {
    std::vector<std::size_t> domain(field.grid.size());
    std::iota(domain.begin(), domain.end(), 0);
    std::vector<double> mass(field.values.size());
    const double vol = field.grid.cell_volume();
    for (std::size_t i = 0; i < mass.size(); ++i) mass[i] = field.values[i] * vol;
    PartitionOptions opt;
    opt.D = D;
    opt.tol = tol;
    opt.seed = seed;
    return partition_mass(field.grid, domain, mass, opt);
}

Partition partition_points(const std::vector<Vec>& points, const GridSpec& grid, int D, double tol, std::uint64_t seed) {
    std::vector<std::size_t> domain(grid.size());
    std::iota(domain.begin(), domain.end(), 0);
    std::vector<double> mass(grid.size(), 0.0);
    for (const auto& x : points) {
        require(x.size() == grid.dim, "partition_points: dimension mismatch");
        std::vector<long> c(grid.dim);
        for (int i = 0; i < grid.dim; ++i) c[i] = static_cast<long>(std::floor((x[i] - grid.lo[i]) / grid.h));
        require(grid.in_range(c), "partition_points: point outside the grid");
        mass[grid.index(c)] += 1.0;
    }
    PartitionOptions opt;
    opt.D = D;
    opt.tol = tol;
    opt.seed = seed;
    return partition_mass(grid, domain, mass, opt);
}

std::vector<PartitionCell> shrunken_cells(Partition& P, double delta) {
    const GridSpec& g = P.grid;
    const int n = g.dim;
    const double r = std::max(delta, g.h) + g.h;
    P.shrink_delta = std::max(delta, g.h);
    P.shrunken_label = P.label;
    const long R = static_cast<long>(std::floor(r / g.h + 1e-9));
    std::vector<std::vector<long>> stencil;
    std::vector<long> o(n, -R);
    while (true) {
        double d2 = 0;
        for (long v : o) d2 += static_cast<double>(v * v);
        if (std::sqrt(d2) * g.h <= r * (1 + 1e-12)) stencil.push_back(o);
        int ax = n - 1;
        while (ax >= 0) {
            if (++o[ax] <= R) break;
            o[ax] = -R;
            --ax;
        }
        if (ax < 0) break;
    }
    std::vector<char> removed(P.domain.size(), 0);
    for (std::size_t pos = 0; pos < P.domain.size(); ++pos) {
        if (P.label[pos] >= 0) continue;
        auto c = g.coords(P.domain[pos]);
        std::vector<long> nb(n);
        for (const auto& s : stencil) {
            for (int i = 0; i < n; ++i) nb[i] = c[i] + s[i];
            if (!g.in_range(nb)) continue;
            auto it = std::lower_bound(P.domain.begin(), P.domain.end(), g.index(nb));
            if (it != P.domain.end() && *it == g.index(nb)) removed[it - P.domain.begin()] = 1;
        }
    }
    std::vector<PartitionCell> out;
    for (const auto& cell : P.cells) {
        PartitionCell s;
        s.id = cell.id;
        s.sign = cell.sign;
        out.push_back(s);
    }
    for (std::size_t pos = 0; pos < P.domain.size(); ++pos) {
        if (removed[pos]) P.shrunken_label[pos] = -1;
        if (P.shrunken_label[pos] >= 0) out[P.shrunken_label[pos]].members.push_back(P.domain[pos]);
    }
    for (auto& cell : out) {
        if (cell.members.empty()) continue;
        Vec blo = Vec::Constant(n, std::numeric_limits<double>::infinity()), bhi = -blo;
        for (std::size_t idx : cell.members) {
            Vec x = g.center(idx);
            blo = blo.cwiseMin(x);
            bhi = bhi.cwiseMax(x);
        }
        cell.diameter = (bhi - blo).norm() + g.h * std::sqrt(static_cast<double>(n));
    }
    return out;
}

std::vector<int> tube_cell_crossings(const Tube& tube, const Partition& P) {
    require(!P.shrunken_label.empty() || P.domain.empty(), "tube_cell_crossings: shrink the partition first");
    std::vector<std::size_t> cells;
    tube_cells(tube, P.grid, cells);
    std::vector<int> ids;
    for (std::size_t c : cells) {
        int id = P.shrunken_cell_of(c);
        if (id >= 0) ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (static_cast<int>(ids.size()) > P.degree() + 1)
        throw AssertionFailure("Bezout ceiling violated: tube meets " + std::to_string(ids.size()) +
                               " shrunken cells of a degree " + std::to_string(P.degree()) + " partition");
    return ids;
}

std::vector<int> refined_cells(const Partition& P) {
    std::vector<int> out;
    if (P.cells.empty()) return out;
    double sum = 0;
    for (const auto& c : P.cells) sum += c.mass;
    const double avg = sum / static_cast<double>(P.cells.size());
    for (const auto& c : P.cells)
        if (c.mass >= avg / 2 && c.mass > 0) out.push_back(c.id);
    return out;
}

Polynomial fit_wall(const std::vector<Vec>& points, const std::vector<double>& weights, int D) {
    require(!points.empty() && points.size() == weights.size(), "fit_wall: need weighted points");
    const int n = static_cast<int>(points.front().size());
    const Frame f = frame_of_points(points);
    const auto basis = Polynomial::monomial_basis(n, D);
    const std::size_t B = basis.size();
    Mat M = Mat::Zero(B, B);
    Vec phi(B);
    for (std::size_t i = 0; i < points.size(); ++i) {
        Vec u = f.to_local(points[i]);
        eval_basis(basis, u.data(), n, phi.data());
        M.noalias() += weights[i] * phi * phi.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(M);
    Vec v = es.eigenvectors().col(0);
    std::vector<Monomial> terms;
    for (std::size_t j = 0; j < B; ++j) terms.push_back({basis[j], v[j]});
    return to_global(Polynomial::from_terms(n, terms), f);
}

namespace {

double mass_near_zero_set(const Polynomial& Q, const std::vector<Vec>& pts, const std::vector<double>& w, double delta) {
    double s = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        Vec gr = Q.gradient(pts[i]);
        double v = std::abs(Q.eval(pts[i]));
        double gn = gr.norm();
        if (v <= delta * gn) s += w[i];
    }
    return s;
}

}  // namespace

CaseResult cellular_or_algebraic(const GridSpec& grid, const std::vector<std::size_t>& domain,
                                 const std::vector<double>& mass, int m, double delta, const PartitionOptions& opt) {
    require(grid.dim == 2, "cellular_or_algebraic: grid dimension must be 2");
    require(m == grid.dim, "cellular_or_algebraic: partitioning on a proper subvariety is not supported");
    CaseResult res;
    std::vector<Vec> pts;
    std::vector<double> w;
    double total = 0;
    for (std::size_t pos = 0; pos < domain.size(); ++pos) {
        if (mass[pos] <= 0) continue;
        pts.push_back(grid.center(domain[pos]));
        w.push_back(mass[pos]);
        total += mass[pos];
    }
    require(total > 0, "cellular_or_algebraic: field has zero mass");
    // Mass concentrated near a low-degree curve; the lowest degree that works wins.
    for (int deg = 1; deg <= opt.D; ++deg) {
        Polynomial Q = fit_wall(pts, w, deg);
        double near = mass_near_zero_set(Q, pts, w, delta) / total;
        if (near >= 0.5) {
            res.kind = CaseResult::Kind::Algebraic;
            res.wall = Q;
            res.wall_mass_ratio = near;
            return res;
        }
    }
    try {
        res.partition = partition_mass(grid, domain, mass, opt);
    } catch (const PartitionFailure& e) {
        res.partition = *e.best;
    }
    res.refined = refined_cells(res.partition);
    double kept = 0;
    for (int id : res.refined) kept += res.partition.cells[id].mass;
    res.refined_mass_ratio = kept / total;
    res.wall = res.partition.polynomial();
    if (res.refined_mass_ratio >= 0.5) {
        res.kind = CaseResult::Kind::Cellular;
    } else {
        res.kind = CaseResult::Kind::Algebraic;
        res.wall_mass_ratio = mass_near_zero_set(res.wall, pts, w, delta) / total;
    }
    return res;
}

CaseResult cellular_or_algebraic(const GridField& field, int m, int D, double delta, std::uint64_t seed) {
    std::vector<std::size_t> domain(field.grid.size());
    std::iota(domain.begin(), domain.end(), 0);
    std::vector<double> mass(field.values.size());
    const double vol = field.grid.cell_volume();
    for (std::size_t i = 0; i < mass.size(); ++i) mass[i] = field.values[i] * vol;
    PartitionOptions opt;
    opt.D = D;
    opt.seed = seed;
    return cellular_or_algebraic(field.grid, domain, mass, m, delta, opt);
}

void write_partition_polynomial(std::ostream& os, const Partition& p) {
    Polynomial P = p.polynomial();
    const int d = P.degree();
    os << p.grid.dim << ' ' << d << '\n';
    for (double c : P.coefficients(d)) os << format_double(c) << '\n';
}

void write_partition_cells_csv(std::ostream& os, const Partition& p) {
    os << "id,mass,diameter,grid_cells\n";
    for (const auto& c : p.cells)
        os << c.id << ',' << format_double(c.mass) << ',' << format_double(c.diameter) << ',' << c.members.size()
           << '\n';
}

}  // namespace kakeya
