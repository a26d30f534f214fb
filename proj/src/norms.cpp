#include "kakeya/norms.hpp"

#include "kakeya/algebraic.hpp"
#include "kakeya/parallel.hpp"
#include "kakeya/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace kakeya {

// ---------------------------------------------------------------- grid

GridSpec GridSpec::covering(const Vec& lo, const Vec& hi, double h) {
    require(h > 0, "grid: spacing must be positive");
    require(lo.size() == hi.size() && lo.size() >= 1, "grid: box dimension mismatch");
    GridSpec g;
    g.dim = static_cast<int>(lo.size());
    g.lo = lo;
    g.h = h;
    g.extent.resize(g.dim);
    for (int i = 0; i < g.dim; ++i) {
        require(hi[i] >= lo[i], "grid: box has negative extent");
        g.extent[i] = std::max<long>(1, static_cast<long>(std::ceil((hi[i] - lo[i]) / h - 1e-9)));
    }
    return g;
}

std::size_t GridSpec::size() const {
    std::size_t s = 1;
    for (long e : extent) s *= static_cast<std::size_t>(e);
    return dim == 0 ? 0 : s;
}

std::vector<long> GridSpec::coords(std::size_t idx) const {
    std::vector<long> c(dim);
    for (int i = dim - 1; i >= 0; --i) {
        c[i] = static_cast<long>(idx % static_cast<std::size_t>(extent[i]));
        idx /= static_cast<std::size_t>(extent[i]);
    }
    return c;
}

std::size_t GridSpec::index(const std::vector<long>& c) const {
    std::size_t idx = 0;
    for (int i = 0; i < dim; ++i) idx = idx * static_cast<std::size_t>(extent[i]) + static_cast<std::size_t>(c[i]);
    return idx;
}

bool GridSpec::in_range(const std::vector<long>& c) const {
    for (int i = 0; i < dim; ++i)
        if (c[i] < 0 || c[i] >= extent[i]) return false;
    return true;
}

Vec GridSpec::center(std::size_t idx) const {
    auto c = coords(idx);
    Vec x(dim);
    for (int i = 0; i < dim; ++i) x[i] = lo[i] + (static_cast<double>(c[i]) + 0.5) * h;
    return x;
}

Vec GridSpec::hi() const {
    Vec x(dim);
    for (int i = 0; i < dim; ++i) x[i] = lo[i] + static_cast<double>(extent[i]) * h;
    return x;
}

double GridSpec::cell_volume() const { return std::pow(h, dim); }

double GridField::mass() const {
    double s = 0;
    for (double v : values) s += v;
    return s * grid.cell_volume();
}

// ---------------------------------------------------------------- rasterization

namespace {

// Half-width of the tube's projection onto each axis.
Vec tube_half_extent(const Tube& t) {
    Vec e(t.dim);
    for (int i = 0; i < t.dim; ++i) {
        double v = t.direction[i];
        e[i] = std::abs(v) / 2 + t.delta * std::sqrt(std::max(0.0, 1 - v * v));
    }
    return e;
}

// Calls f(cell) for every grid cell whose center lies in the closed tube.
// Rows along the last axis are intersected with the cylinder analytically.
template <class F>
void for_each_tube_cell(const Tube& t, const GridSpec& g, F&& f) {
    const int n = g.dim;
    const Vec ext = tube_half_extent(t);
    std::vector<long> lo(n), hi(n);
    for (int i = 0; i < n; ++i) {
        lo[i] = std::max<long>(0, static_cast<long>(std::floor((t.center[i] - ext[i] - g.lo[i]) / g.h - 0.5)));
        hi[i] = std::min<long>(g.extent[i] - 1,
                               static_cast<long>(std::ceil((t.center[i] + ext[i] - g.lo[i]) / g.h - 0.5)));
        if (lo[i] > hi[i]) return;
    }
    const int last = n - 1;
    const double vl = t.direction[last];
    const double a = 1 - vl * vl;
    std::vector<long> c(lo);
    Vec w(n);
    while (true) {
        // w = base point of the row minus the tube center, with last coordinate 0.
        for (int i = 0; i < last; ++i) w[i] = g.lo[i] + (static_cast<double>(c[i]) + 0.5) * g.h - t.center[i];
        w[last] = -t.center[last];
        const double wv = w.dot(t.direction);
        double t1 = -std::numeric_limits<double>::infinity(), t2 = std::numeric_limits<double>::infinity();
        bool empty = false;
        // radial^2 = a t^2 + b t + cc <= delta^2
        const double b = 2 * (w[last] - wv * vl);
        const double cc = w.squaredNorm() - wv * wv - t.delta * t.delta;
        if (a < 1e-14) {
            if (std::abs(b) < 1e-14) {
                if (cc > 1e-15) empty = true;
            } else if (b > 0) {
                t2 = -cc / b;
            } else {
                t1 = -cc / b;
            }
        } else {
            double disc = b * b - 4 * a * cc;
            if (disc < 0) {
                empty = true;
            } else {
                double sq = std::sqrt(disc);
                t1 = (-b - sq) / (2 * a);
                t2 = (-b + sq) / (2 * a);
            }
        }
        // |s| <= 1/2 with s = wv + t vl
        if (!empty) {
            if (std::abs(vl) < 1e-14) {
                if (std::abs(wv) > 0.5) empty = true;
            } else {
                double s1 = (-0.5 - wv) / vl, s2 = (0.5 - wv) / vl;
                if (s1 > s2) std::swap(s1, s2);
                t1 = std::max(t1, s1);
                t2 = std::min(t2, s2);
            }
        }
        if (!empty && t1 <= t2) {
            long j1 = std::max<long>(lo[last], static_cast<long>(std::ceil((t1 - g.lo[last]) / g.h - 0.5)));
            long j2 = std::min<long>(hi[last], static_cast<long>(std::floor((t2 - g.lo[last]) / g.h - 0.5)));
            if (j1 <= j2) {
                c[last] = j1;
                std::size_t base = g.index(c);
                for (long j = j1; j <= j2; ++j) f(base + static_cast<std::size_t>(j - j1));
            }
        }
        // advance the multi-index over axes 0..n-2
        int ax = last - 1;
        while (ax >= 0) {
            if (++c[ax] <= hi[ax]) break;
            c[ax] = lo[ax];
            --ax;
        }
        if (ax < 0) break;
    }
}

void check_box(const TubeFamily& family, const GridSpec& g) {
    const Vec hi = g.hi();
    for (std::size_t k = 0; k < family.size(); ++k) {
        const Tube& t = family.tubes[k];
        Vec ext = tube_half_extent(t);
        for (int i = 0; i < g.dim; ++i) {
            if (t.center[i] - ext[i] < g.lo[i] - 1e-12 || t.center[i] + ext[i] > hi[i] + 1e-12) {
                std::ostringstream os;
                os << "rasterize: box does not contain tube " << k << " (center";
                for (int j = 0; j < t.dim; ++j) os << ' ' << t.center[j];
                os << ")";
                throw PreconditionError(os.str());
            }
        }
    }
}

constexpr std::size_t kTubeChunk = 64;

}  // namespace

void tube_cells(const Tube& tube, const GridSpec& grid, std::vector<std::size_t>& out) {
    out.clear();
    for_each_tube_cell(tube, grid, [&](std::size_t c) { out.push_back(c); });
}

std::pair<Vec, Vec> family_bounds(const TubeFamily& family) {
    const int n = family.dim;
    require(n >= 2, "family_bounds: dimension must be at least 2");
    if (family.tubes.empty()) return {Vec::Constant(n, -0.5), Vec::Constant(n, 0.5)};
    Vec lo = Vec::Constant(n, std::numeric_limits<double>::infinity());
    Vec hi = -lo;
    for (const auto& t : family.tubes) {
        Vec e = tube_half_extent(t);
        lo = lo.cwiseMin(t.center - e);
        hi = hi.cwiseMax(t.center + e);
    }
    return {lo, hi};
}

GridField rasterize(const TubeFamily& family, double h, const Vec& lo, const Vec& hi) {
    require(family.delta > 0, "rasterize: family delta must be positive");
    require(h <= family.delta / 2 * (1 + 1e-12), "rasterize: spacing must satisfy h <= delta/2");
    GridField f;
    f.grid = GridSpec::covering(lo, hi, h);
    check_box(family, f.grid);
    f.values.assign(f.grid.size(), 0.0);
    // Per-chunk cell lists, merged in chunk order.
    auto parts = map_chunks<std::vector<std::size_t>>(family.size(), kTubeChunk, [&](std::size_t b, std::size_t e) {
        std::vector<std::size_t> cells;
        for (std::size_t k = b; k < e; ++k) for_each_tube_cell(family.tubes[k], f.grid, [&](std::size_t c) { cells.push_back(c); });
        return cells;
    });
    for (const auto& part : parts)
        for (std::size_t c : part) f.values[c] += 1.0;
    return f;
}

GridField rasterize(const TubeFamily& family, double h) {
    auto [lo, hi] = family_bounds(family);
    Vec pad = Vec::Constant(family.dim, h);
    return rasterize(family, h, lo - pad, hi + pad);
}

double lp_norm(const GridField& field, double p) {
    require(p >= 1, "lp_norm: p must be at least 1");
    double s = 0;
    for (double v : field.values) s += std::pow(std::abs(v), p);
    return std::pow(s * field.grid.cell_volume(), 1 / p);
}

double lp_norm(const GridField& field, double p, const std::vector<std::size_t>& cells) {
    require(p >= 1, "lp_norm: p must be at least 1");
    double s = 0;
    for (std::size_t c : cells) s += std::pow(std::abs(field.values.at(c)), p);
    return std::pow(s * field.grid.cell_volume(), 1 / p);
}

double kakeya_ratio(const TubeFamily& family, double p, double h) {
    require(family.separated || family.size() <= 1, "kakeya_ratio: family must be direction-separated");
    require(!family.tubes.empty(), "kakeya_ratio: empty family");
    GridField f = rasterize(family, h);
    const int n = family.dim;
    const double scale = std::pow(family.delta, -(n - 1 - n / p));
    return lp_norm(f, p) / (scale * std::pow(family.total_volume(), 1 / p));
}

Incidence build_incidence(const TubeFamily& family, const GridSpec& grid) {
    check_box(family, grid);
    Incidence inc;
    inc.grid = grid;
    using Pairs = std::vector<std::pair<std::size_t, int>>;
    auto parts = map_chunks<Pairs>(family.size(), kTubeChunk, [&](std::size_t b, std::size_t e) {
        Pairs out;
        for (std::size_t k = b; k < e; ++k)
            for_each_tube_cell(family.tubes[k], grid, [&](std::size_t c) { out.emplace_back(c, static_cast<int>(k)); });
        return out;
    });
    inc.offsets.assign(grid.size() + 1, 0);
    for (const auto& part : parts)
        for (const auto& pr : part) ++inc.offsets[pr.first + 1];
    for (std::size_t i = 0; i < grid.size(); ++i) inc.offsets[i + 1] += inc.offsets[i];
    inc.ids.resize(inc.offsets.back());
    std::vector<std::size_t> fill(inc.offsets.begin(), inc.offsets.end() - 1);
    // Chunks are in tube order, so ids come out ascending within each cell.
    for (const auto& part : parts)
        for (const auto& pr : part) inc.ids[fill[pr.first]++] = pr.second;
    return inc;
}

// ---------------------------------------------------------------- candidates

std::vector<Subspace> cap_span_candidates(const std::vector<Cap>& caps, int k, std::size_t max_count) {
    std::vector<Subspace> out;
    const int r = k - 1;
    require(r >= 1, "candidates: k must be at least 2");
    if (caps.empty()) return out;
    const std::size_t m = caps.size();
    if (r == 1) {
        for (const auto& c : caps) out.push_back(Subspace::span({c.center}));
        return out;
    }
    auto try_add = [&](const std::vector<std::size_t>& idx) {
        std::vector<Vec> vs;
        for (auto i : idx) vs.push_back(caps[i].center);
        try {
            out.push_back(Subspace::span(vs));
        } catch (const PreconditionError&) {
        }
    };
    // Exact enumeration when small, otherwise a seeded sample of subsets.
    double total = 1;
    for (int i = 0; i < r; ++i) total = total * static_cast<double>(m - i) / (i + 1);
    if (total <= static_cast<double>(max_count)) {
        std::vector<std::size_t> idx(r);
        std::iota(idx.begin(), idx.end(), 0);
        while (true) {
            try_add(idx);
            int i = r - 1;
            while (i >= 0 && idx[i] == m - r + i) --i;
            if (i < 0) break;
            ++idx[i];
            for (int j = i + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
        }
    } else {
        Rng rng(0, "cap_span_candidates");
        while (out.size() < max_count) {
            std::vector<std::size_t> idx;
            while (static_cast<int>(idx.size()) < r) {
                std::size_t c = rng.below(m);
                if (std::find(idx.begin(), idx.end(), c) == idx.end()) idx.push_back(c);
            }
            std::sort(idx.begin(), idx.end());
            try_add(idx);
        }
    }
    return out;
}

// ---------------------------------------------------------------- ball cover

BallCover::BallCover(const GridSpec& grid, double delta) : grid_(grid), radius_(delta) {
    require(delta > 0, "ball cover: radius must be positive");
    const int n = grid.dim;
    stride_ = std::max<long>(1, std::lround(delta / grid.h));
    const long R = static_cast<long>(std::floor(delta / grid.h + 1e-9));
    // Stencil: offsets whose cell centers lie in the ball about a cell center.
    std::vector<long> o(n, -R);
    while (true) {
        double d2 = 0;
        for (long v : o) d2 += static_cast<double>(v * v);
        if (std::sqrt(d2) * grid.h <= delta * (1 + 1e-12)) stencil_.push_back(o);
        int ax = n - 1;
        while (ax >= 0) {
            if (++o[ax] <= R) break;
            o[ax] = -R;
            --ax;
        }
        if (ax < 0) break;
    }
    lat_lo_.resize(n);
    lat_extent_.resize(n);
    nballs_ = 1;
    for (int i = 0; i < n; ++i) {
        long qlo = static_cast<long>(std::floor(-static_cast<double>(R) / stride_));
        long qhi = static_cast<long>(std::ceil(static_cast<double>(grid.extent[i] - 1 + R) / stride_));
        lat_lo_[i] = qlo;
        lat_extent_[i] = qhi - qlo + 1;
        nballs_ *= static_cast<std::size_t>(lat_extent_[i]);
    }
    // Multiplicity depends only on the cell index modulo the stride.
    std::size_t nres = 1;
    for (int i = 0; i < n; ++i) nres *= static_cast<std::size_t>(stride_);
    mult_by_residue_.assign(nres, 0);
    std::vector<long> r(n, 0);
    for (std::size_t ri = 0; ri < nres; ++ri) {
        std::size_t t = ri;
        for (int i = n - 1; i >= 0; --i) {
            r[i] = static_cast<long>(t % static_cast<std::size_t>(stride_));
            t /= static_cast<std::size_t>(stride_);
        }
        int count = 0;
        for (const auto& s : stencil_) {
            bool ok = true;
            for (int i = 0; i < n && ok; ++i) ok = (((r[i] - s[i]) % stride_) + stride_) % stride_ == 0;
            count += ok;
        }
        if (count == 0) throw PreconditionError("ball cover: lattice of delta-balls does not cover the grid");
        mult_by_residue_[ri] = count;
    }
}

std::size_t BallCover::residue_index(const std::vector<long>& c) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
        idx = idx * static_cast<std::size_t>(stride_) + static_cast<std::size_t>(((c[i] % stride_) + stride_) % stride_);
    return idx;
}

int BallCover::multiplicity(std::size_t cell) const { return mult_by_residue_[residue_index(grid_.coords(cell))]; }

void BallCover::cells(std::size_t ball, std::vector<std::size_t>& out) const {
    out.clear();
    const int n = grid_.dim;
    std::vector<long> q(n), c(n);
    std::size_t t = ball;
    for (int i = n - 1; i >= 0; --i) {
        q[i] = static_cast<long>(t % static_cast<std::size_t>(lat_extent_[i])) + lat_lo_[i];
        t /= static_cast<std::size_t>(lat_extent_[i]);
    }
    for (const auto& s : stencil_) {
        for (int i = 0; i < n; ++i) c[i] = q[i] * stride_ + s[i];
        if (grid_.in_range(c)) out.push_back(grid_.index(c));
    }
    std::sort(out.begin(), out.end());
}

void BallCover::balls_of(std::size_t cell, std::vector<std::size_t>& out) const {
    out.clear();
    const int n = grid_.dim;
    auto c = grid_.coords(cell);
    for (const auto& s : stencil_) {
        std::size_t id = 0;
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            long d = c[i] - s[i];
            if (((d % stride_) + stride_) % stride_ != 0) {
                ok = false;
                break;
            }
            long q = d / stride_ - lat_lo_[i];
            id = id * static_cast<std::size_t>(lat_extent_[i]) + static_cast<std::size_t>(q);
        }
        if (ok) out.push_back(id);
    }
}

Vec BallCover::ball_center(std::size_t ball) const {
    const int n = grid_.dim;
    Vec x(n);
    std::size_t t = ball;
    for (int i = n - 1; i >= 0; --i) {
        long q = static_cast<long>(t % static_cast<std::size_t>(lat_extent_[i])) + lat_lo_[i];
        t /= static_cast<std::size_t>(lat_extent_[i]);
        x[i] = grid_.lo[i] + (static_cast<double>(q * stride_) + 0.5) * grid_.h;
    }
    return x;
}

// ---------------------------------------------------------------- broad evaluator

namespace {

GridSpec default_grid(const TubeFamily& family, double h) {
    auto [lo, hi] = family_bounds(family);
    Vec pad = Vec::Constant(family.dim, h);
    return GridSpec::covering(lo - pad, hi + pad, h);
}

}  // namespace

BroadEvaluator::BroadEvaluator(const TubeFamily& family, const BroadConfig& cfg, double h)
    : BroadEvaluator(family, cfg, default_grid(family, h)) {}

BroadEvaluator::BroadEvaluator(const TubeFamily& family, const BroadConfig& cfg, const GridSpec& grid)
    : cfg_(cfg), inc_(), cover_(grid, family.delta) {
    const int n = family.dim;
    require(cfg.k >= 2 && cfg.k <= n, "broad: k must lie in [2, n]");
    require(cfg.A >= 1, "broad: A must be at least 1");
    require(cfg.p >= 1, "broad: p must be at least 1");
    require(cfg.beta > family.delta, "broad: beta must exceed delta");
    require(grid.dim == n, "broad: grid dimension mismatch");
    inc_ = build_incidence(family, grid);
    caps_ = cap_decomposition(n, cfg.beta);
    tube_cap_ = cap_assignment(family, caps_);
    if (cfg.default_candidates) cands_ = cap_span_candidates(caps_, cfg.k);
    for (const auto& V : cfg.candidates) {
        require(V.ambient() == n && V.dim() == cfg.k - 1, "broad: candidate subspaces must be (k-1)-dimensional");
        cands_.push_back(V);
    }
    require(!cands_.empty(), "broad: candidate list is empty");
    require(static_cast<std::size_t>(cfg.A) <= cands_.size(), "broad: A exceeds the number of candidates");
    killers_.assign(caps_.size(), {});
    auto rows = map_chunks<std::vector<std::vector<int>>>(caps_.size(), 16, [&](std::size_t b, std::size_t e) {
        std::vector<std::vector<int>> part;
        for (std::size_t t = b; t < e; ++t) {
            std::vector<int> ks;
            for (std::size_t a = 0; a < cands_.size(); ++a)
                if (cap_angle_to_subspace(caps_[t], cands_[a]) <= cfg_.beta) ks.push_back(static_cast<int>(a));
            part.push_back(std::move(ks));
        }
        return part;
    });
    std::size_t t = 0;
    for (auto& part : rows)
        for (auto& ks : part) killers_[t++] = std::move(ks);
}

std::vector<std::pair<int, double>> BroadEvaluator::cap_masses(std::size_t ball, const std::vector<char>* tubes) const {
    thread_local std::vector<std::size_t> cells;
    cover_.cells(ball, cells);
    std::vector<std::pair<int, double>> acc;
    std::vector<std::pair<int, int>> counts;
    const double vol = inc_.grid.cell_volume();
    for (std::size_t c : cells) {
        counts.clear();
        for (std::size_t j = inc_.offsets[c]; j < inc_.offsets[c + 1]; ++j) {
            int id = inc_.ids[j];
            if (tubes && !(*tubes)[id]) continue;
            int cap = tube_cap_[id];
            auto it = std::find_if(counts.begin(), counts.end(), [&](auto& pr) { return pr.first == cap; });
            if (it == counts.end())
                counts.emplace_back(cap, 1);
            else
                ++it->second;
        }
        if (counts.empty()) continue;
        const double w = vol / cover_.multiplicity(c);
        for (auto& [cap, cnt] : counts) {
            double v = std::pow(static_cast<double>(cnt), cfg_.p) * w;
            auto it = std::find_if(acc.begin(), acc.end(), [&](auto& pr) { return pr.first == cap; });
            if (it == acc.end())
                acc.emplace_back(cap, v);
            else
                it->second += v;
        }
    }
    std::sort(acc.begin(), acc.end());
    return acc;
}

bool BroadEvaluator::coverable(const std::vector<int>& caps, std::size_t upto, int A, std::vector<char>& covered) const {
    std::size_t first = 0;
    while (first < upto && covered[first]) ++first;
    if (first == upto) return true;
    if (A == 0) return false;
    for (int a : killers_[caps[first]]) {
        std::vector<std::size_t> newly;
        for (std::size_t j = first; j < upto; ++j) {
            if (covered[j]) continue;
            const auto& ks = killers_[caps[j]];
            if (std::binary_search(ks.begin(), ks.end(), a)) {
                covered[j] = 1;
                newly.push_back(j);
            }
        }
        bool ok = coverable(caps, upto, A - 1, covered);
        for (auto j : newly) covered[j] = 0;
        if (ok) return true;
    }
    return false;
}

double BroadEvaluator::mu_of(std::vector<std::pair<int, double>> masses, int A) const {
    if (masses.empty()) return 0;
    std::sort(masses.begin(), masses.end(), [](auto& x, auto& y) {
        if (x.second != y.second) return x.second > y.second;
        return x.first < y.first;
    });
    std::vector<int> caps;
    for (auto& m : masses) caps.push_back(m.first);
    std::vector<char> covered(caps.size(), 0);
    // Largest prefix of the mass-sorted caps that A candidates can remove.
    std::size_t lo = 0, hi = caps.size();
    while (lo < hi) {
        std::size_t mid = (lo + hi + 1) / 2;
        std::fill(covered.begin(), covered.end(), 0);
        if (coverable(caps, mid, A, covered))
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo == caps.size() ? 0.0 : masses[lo].second;
}

double BroadEvaluator::mu(std::size_t ball, const std::vector<char>* tubes, int A) const {
    return mu_of(cap_masses(ball, tubes), A);
}

namespace {

constexpr std::size_t kBallChunk = 256;

std::vector<std::size_t> balls_touching(const BallCover& cover, const std::vector<std::size_t>& region) {
    std::vector<std::size_t> out, tmp;
    for (std::size_t c : region) {
        cover.balls_of(c, tmp);
        out.insert(out.end(), tmp.begin(), tmp.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

double BroadEvaluator::broad_power(const std::vector<std::size_t>* region, const std::vector<char>* tubes, int A) const {
    const double bsize = static_cast<double>(cover_.stencil_size());
    if (!region) {
        auto parts = map_chunks<double>(cover_.ball_count(), kBallChunk, [&](std::size_t b, std::size_t e) {
            std::vector<std::size_t> cells;
            double s = 0;
            for (std::size_t ball = b; ball < e; ++ball) {
                double m = mu(ball, tubes, A);
                if (m == 0) continue;
                cover_.cells(ball, cells);
                s += m * static_cast<double>(cells.size()) / bsize;
            }
            return s;
        });
        return std::accumulate(parts.begin(), parts.end(), 0.0);
    }
    auto balls = balls_touching(cover_, *region);
    auto parts = map_chunks<double>(balls.size(), kBallChunk, [&](std::size_t b, std::size_t e) {
        std::vector<std::size_t> cells;
        double s = 0;
        for (std::size_t i = b; i < e; ++i) {
            double m = mu(balls[i], tubes, A);
            if (m == 0) continue;
            cover_.cells(balls[i], cells);
            std::size_t inside = 0;
            for (std::size_t c : cells) inside += std::binary_search(region->begin(), region->end(), c);
            s += m * static_cast<double>(inside) / bsize;
        }
        return s;
    });
    return std::accumulate(parts.begin(), parts.end(), 0.0);
}

double BroadEvaluator::broad_norm(const std::vector<std::size_t>* region, const std::vector<char>* tubes, int A) const {
    return std::pow(broad_power(region, tubes, A), 1 / cfg_.p);
}

std::vector<double> BroadEvaluator::broad_density(const std::vector<std::size_t>& region,
                                                  const std::vector<char>* tubes, int A) const {
    auto balls = balls_touching(cover_, region);
    auto mus = map_chunks<std::vector<double>>(balls.size(), kBallChunk, [&](std::size_t b, std::size_t e) {
        std::vector<double> out;
        for (std::size_t i = b; i < e; ++i) out.push_back(mu(balls[i], tubes, A));
        return out;
    });
    std::vector<double> density(region.size(), 0.0);
    const double bsize = static_cast<double>(cover_.stencil_size());
    std::vector<std::size_t> cells;
    std::size_t i = 0;
    for (const auto& part : mus)
        for (double m : part) {
            std::size_t ball = balls[i++];
            if (m == 0) continue;
            cover_.cells(ball, cells);
            for (std::size_t c : cells) {
                auto it = std::lower_bound(region.begin(), region.end(), c);
                if (it != region.end() && *it == c) density[it - region.begin()] += m / bsize;
            }
        }
    return density;
}

double BroadEvaluator::lp_power(const std::vector<std::size_t>* region, const std::vector<char>* tubes, double p) const {
    const double vol = inc_.grid.cell_volume();
    auto cell_value = [&](std::size_t c) {
        std::size_t cnt = 0;
        for (std::size_t j = inc_.offsets[c]; j < inc_.offsets[c + 1]; ++j) cnt += !tubes || (*tubes)[inc_.ids[j]];
        return cnt ? std::pow(static_cast<double>(cnt), p) * vol : 0.0;
    };
    double s = 0;
    if (region) {
        for (std::size_t c : *region) s += cell_value(c);
    } else {
        for (std::size_t c = 0; c < inc_.grid.size(); ++c) s += cell_value(c);
    }
    return s;
}

double BroadEvaluator::narrow_power() const {
    const double vol = inc_.grid.cell_volume();
    std::vector<int> counts(caps_.size(), 0);
    double s = 0;
    for (std::size_t c = 0; c < inc_.grid.size(); ++c) {
        if (inc_.count(c) == 0) continue;
        for (std::size_t j = inc_.offsets[c]; j < inc_.offsets[c + 1]; ++j) ++counts[tube_cap_[inc_.ids[j]]];
        for (std::size_t j = inc_.offsets[c]; j < inc_.offsets[c + 1]; ++j) {
            int& k = counts[tube_cap_[inc_.ids[j]]];
            if (k) s += std::pow(static_cast<double>(k), cfg_.p) * vol;
            k = 0;
        }
    }
    return s;
}

double BroadEvaluator::bilinear_power() const {
    const double vol = inc_.grid.cell_volume();
    // Two caps are transverse when no candidate removes both.
    auto transverse = [&](int a, int b) {
        const auto& ka = killers_[a];
        const auto& kb = killers_[b];
        std::size_t i = 0, j = 0;
        while (i < ka.size() && j < kb.size()) {
            if (ka[i] == kb[j]) return false;
            if (ka[i] < kb[j])
                ++i;
            else
                ++j;
        }
        return true;
    };
    double s = 0;
    std::vector<std::pair<int, int>> counts;
    for (std::size_t c = 0; c < inc_.grid.size(); ++c) {
        if (inc_.count(c) < 2) continue;
        counts.clear();
        for (std::size_t j = inc_.offsets[c]; j < inc_.offsets[c + 1]; ++j) {
            int cap = tube_cap_[inc_.ids[j]];
            auto it = std::find_if(counts.begin(), counts.end(), [&](auto& pr) { return pr.first == cap; });
            if (it == counts.end())
                counts.emplace_back(cap, 1);
            else
                ++it->second;
        }
        for (std::size_t a = 0; a < counts.size(); ++a)
            for (std::size_t b = a + 1; b < counts.size(); ++b)
                if (transverse(counts[a].first, counts[b].first))
                    s += std::pow(static_cast<double>(counts[a].second) * counts[b].second, cfg_.p / 2) * vol;
    }
    return s;
}

double k_broad_norm(const TubeFamily& family, const BroadConfig& cfg, double h, const std::vector<std::size_t>* region) {
    BroadEvaluator ev(family, cfg, h);
    return ev.broad_norm(region, nullptr, cfg.A);
}

double broad_mu(const TubeFamily& family, const Vec& ball_center, const BroadConfig& cfg, double h) {
    // A single ball, unweighted: every tube's cells whose centers lie within delta of the center.
    const double delta = family.delta;
    auto [lo, hi] = family_bounds(family);
    Vec pad = Vec::Constant(family.dim, h);
    lo = lo.cwiseMin(ball_center - Vec::Constant(family.dim, delta)) - pad;
    hi = hi.cwiseMax(ball_center + Vec::Constant(family.dim, delta)) + pad;
    BroadEvaluator ev(family, cfg, GridSpec::covering(lo, hi, h));
    const GridSpec& g = ev.grid();
    const auto& inc = ev.incidence();
    std::vector<std::pair<int, double>> acc;
    for (std::size_t c = 0; c < g.size(); ++c) {
        if (inc.count(c) == 0) continue;
        if ((g.center(c) - ball_center).norm() > delta) continue;
        std::vector<std::pair<int, int>> counts;
        for (std::size_t j = inc.offsets[c]; j < inc.offsets[c + 1]; ++j) {
            int cap = ev.tube_caps()[inc.ids[j]];
            auto it = std::find_if(counts.begin(), counts.end(), [&](auto& pr) { return pr.first == cap; });
            if (it == counts.end())
                counts.emplace_back(cap, 1);
            else
                ++it->second;
        }
        for (auto& [cap, cnt] : counts) {
            double v = std::pow(static_cast<double>(cnt), cfg.p) * g.cell_volume();
            auto it = std::find_if(acc.begin(), acc.end(), [&](auto& pr) { return pr.first == cap; });
            if (it == acc.end())
                acc.emplace_back(cap, v);
            else
                it->second += v;
        }
    }
    return ev.mu_of(acc, cfg.A);
}

// ---------------------------------------------------------------- vanishing

namespace {

// Extends an orthonormal basis to dimension r with coordinate directions.
Subspace extend_to(const Subspace& V, int r) {
    const int n = V.ambient();
    std::vector<Vec> vs;
    for (int j = 0; j < V.dim(); ++j) vs.push_back(V.basis.col(j));
    for (int i = 0; i < n && static_cast<int>(vs.size()) < r; ++i) {
        Vec e = Vec::Zero(n);
        e[i] = 1;
        Vec rest = e;
        for (const auto& v : vs) rest -= v.dot(e) * v;
        if (rest.norm() > 1e-6) vs.push_back(rest.normalized());
    }
    return Subspace::span(vs);
}

}  // namespace

VanishingResult vanishing_check(const TubeFamily& family, const Variety& V, const Vec& x0, double r, BroadConfig cfg,
                                double eps0, double c_tang) {
    VanishingResult res;
    const int n = family.dim;
    const double delta = family.delta;
    require(V.ambient_dim() == n && x0.size() == n, "vanishing_check: dimension mismatch");
    if (V.dim() > cfg.k - 1) res.violations.push_back("variety dimension exceeds k-1");
    if (!(r > std::pow(delta, 1 - eps0))) res.violations.push_back("radius r must exceed delta^(1-eps0)");
    for (std::size_t i = 0; i < family.size(); ++i) {
        auto rep = is_tangent_tube(family.tubes[i], V, x0, r, c_tang, static_cast<int>(i));
        if (!rep.is_tangent()) res.violations.push_back("tube " + std::to_string(i) + " is not tangent to the variety");
    }
    const double h = delta / 4;
    auto [lo, hi] = family.tubes.empty() ? std::pair<Vec, Vec>{x0, x0} : family_bounds(family);
    Vec pad = Vec::Constant(n, r + h);
    GridSpec grid = GridSpec::covering(lo.cwiseMin(x0 - pad), hi.cwiseMax(x0 + pad), h);
    if (family.tubes.empty()) {
        res.vanishes = true;
        return res;
    }
    // Tangent spans at the points of V nearest to each delta-ball meeting B(x0, r).
    BallCover cover(grid, delta);
    std::vector<Subspace> injected;
    if (V.is_affine()) {
        injected.push_back(extend_to(V.tangent_space(V.basepoint()), cfg.k - 1));
    } else {
        for (std::size_t b = 0; b < cover.ball_count(); ++b) {
            Vec c = cover.ball_center(b);
            if ((c - x0).norm() > r + delta) continue;
            auto d = V.distance(c);
            if (d.value > 2 * delta || d.nearest.size() != n) continue;
            try {
                injected.push_back(extend_to(V.tangent_space(d.nearest), cfg.k - 1));
            } catch (const PreconditionError&) {
            }
        }
    }
    cfg.candidates.insert(cfg.candidates.end(), injected.begin(), injected.end());
    BroadEvaluator ev(family, cfg, grid);
    std::vector<std::size_t> region;
    for (std::size_t c = 0; c < grid.size(); ++c)
        if ((grid.center(c) - x0).norm() <= r) region.push_back(c);
    double power = ev.broad_power(&region, nullptr, cfg.A);
    res.norm = std::pow(power, 1 / cfg.p);
    res.vanishes = power == 0.0;
    return res;
}

// ---------------------------------------------------------------- broad / narrow

SplitResult broad_narrow_split(const TubeFamily& family, const BroadConfig& cfg, double h) {
    const int n = family.dim;
    const double gate = static_cast<double>(n - cfg.k + 2) / (n - cfg.k + 1);
    require(cfg.p >= gate, "broad_narrow_split: p must be at least (n-k+2)/(n-k+1)");
    BroadEvaluator ev(family, cfg, h);
    SplitResult out;
    out.lp_power = ev.lp_power(nullptr, nullptr, cfg.p);
    out.broad_term = ev.broad_power(nullptr, nullptr, cfg.A);
    out.narrow_sum = ev.narrow_power();
    out.rhs = std::pow(cfg.beta, -(n - 1) * cfg.p) * out.broad_term +
              std::pow(cfg.beta, -(cfg.k - 2) * (cfg.p - 1)) * out.narrow_sum;
    out.constant = out.rhs > 0 ? out.lp_power / out.rhs : (out.lp_power > 0 ? std::numeric_limits<double>::infinity() : 0);
    auto buckets = bucket_by_cap(family, ev.caps());
    for (std::size_t t = 0; t < buckets.size(); ++t) {
        if (buckets[t].tubes.empty()) continue;
        out.narrow.push_back({ev.caps()[t], buckets[t], rescale_bucket(buckets[t], ev.caps()[t])});
    }
    return out;
}

// ---------------------------------------------------------------- export

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double x) {
    std::uint64_t v;
    std::memcpy(&v, &x, 8);
    put_u64(os, v);
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw ConfigError("field: truncated binary input");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

double get_f64(std::istream& is) {
    std::uint64_t v = get_u64(is);
    double x;
    std::memcpy(&x, &v, 8);
    return x;
}

}  // namespace

void write_field_binary(std::ostream& os, const GridField& field) {
    const GridSpec& g = field.grid;
    put_u64(os, static_cast<std::uint64_t>(g.dim));
    Vec hi = g.hi();
    for (int i = 0; i < g.dim; ++i) put_f64(os, g.lo[i]);
    for (int i = 0; i < g.dim; ++i) put_f64(os, hi[i]);
    put_f64(os, g.h);
    for (int i = 0; i < g.dim; ++i) put_u64(os, static_cast<std::uint64_t>(g.extent[i]));
    for (double v : field.values) put_f64(os, v);
}

GridField read_field_binary(std::istream& is) {
    GridField f;
    GridSpec& g = f.grid;
    g.dim = static_cast<int>(get_u64(is));
    if (g.dim < 1 || g.dim > 8) throw ConfigError("field: bad dimension in header");
    g.lo.resize(g.dim);
    for (int i = 0; i < g.dim; ++i) g.lo[i] = get_f64(is);
    for (int i = 0; i < g.dim; ++i) get_f64(is);
    g.h = get_f64(is);
    g.extent.resize(g.dim);
    for (int i = 0; i < g.dim; ++i) g.extent[i] = static_cast<long>(get_u64(is));
    f.values.resize(g.size());
    for (auto& v : f.values) v = get_f64(is);
    return f;
}

void write_field_slice_csv(std::ostream& os, const GridField& field, int axis0, int axis1) {
    const GridSpec& g = field.grid;
    require(axis0 != axis1 && axis0 >= 0 && axis1 >= 0 && axis0 < g.dim && axis1 < g.dim,
            "field slice: invalid axes");
    // Remaining axes are fixed at their middle index.
    std::vector<long> c(g.dim);
    for (int i = 0; i < g.dim; ++i) c[i] = g.extent[i] / 2;
    os << "x,y,value\n";
    for (long i = 0; i < g.extent[axis0]; ++i)
        for (long j = 0; j < g.extent[axis1]; ++j) {
            c[axis0] = i;
            c[axis1] = j;
            os << format_double(g.lo[axis0] + (i + 0.5) * g.h) << ',' << format_double(g.lo[axis1] + (j + 0.5) * g.h)
               << ',' << format_double(field.values[g.index(c)]) << '\n';
        }
}

}  // namespace kakeya
