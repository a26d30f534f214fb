#include "kakeya/geometry.hpp"
#include "kakeya/rng.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace kakeya {

bool Tube::contains(const double* x) const {
    const double* v = direction.data();
    const double* c = center.data();
    double s = 0, r2 = 0;
    for (int i = 0; i < dim; ++i) s += (x[i] - c[i]) * v[i];
    if (std::abs(s) > 0.5) return false;
    for (int i = 0; i < dim; ++i) {
        double w = x[i] - c[i] - s * v[i];
        r2 += w * w;
    }
    return r2 <= delta * delta;
}

bool Tube::contains(const Vec& x) const { return contains(x.data()); }

double Tube::volume() const { return unit_ball_volume(dim - 1) * std::pow(delta, dim - 1); }

Tube make_tube(const Vec& direction, const Vec& center, double delta) {
    require(direction.size() >= 2 && direction.size() == center.size(), "make_tube: dimension mismatch");
    require(delta > 0 && delta <= 0.5, "make_tube: delta must lie in (0, 1/2]");
    double norm = direction.norm();
    require(norm > 1e-12, "make_tube: zero direction");
    Tube t;
    t.dim = static_cast<int>(direction.size());
    t.delta = delta;
    t.direction = direction / norm;
    t.center = center;
    return t;
}

double TubeFamily::total_volume() const {
    double s = 0;
    for (const auto& t : tubes) s += t.volume();
    return s;
}

double TubeFamily::min_pairwise_angle() const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tubes.size(); ++i)
        for (std::size_t j = i + 1; j < tubes.size(); ++j)
            best = std::min(best, line_angle(tubes[i].direction, tubes[j].direction));
    return best;
}

bool Cap::contains(const Vec& v) const { return vector_angle(center, v) <= radius + 1e-12; }

Subspace Subspace::span(const std::vector<Vec>& vectors) {
    require(!vectors.empty(), "Subspace: zero-dimensional subspace");
    const int n = static_cast<int>(vectors.front().size());
    Mat A(n, static_cast<int>(vectors.size()));
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        require(vectors[i].size() == n, "Subspace: dimension mismatch");
        A.col(static_cast<int>(i)) = vectors[i];
    }
    Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    require(s(s.size() - 1) > 1e-10 * std::max(1.0, s(0)), "Subspace: linearly dependent directions");
    return Subspace{svd.matrixU()};
}

double vector_angle(const Vec& u, const Vec& v) {
    double c = u.dot(v) / (u.norm() * v.norm());
    return std::acos(std::clamp(c, -1.0, 1.0));
}

double line_angle(const Vec& u, const Vec& v) {
    // atan2 form keeps precision for nearly parallel lines.
    Vec a = u / u.norm();
    Vec b = v / v.norm();
    double d = a.dot(b);
    return std::atan2((a - d * b).norm(), std::abs(d));
}

double angle_to_subspace(const Vec& v, const Subspace& V) {
    require(V.dim() >= 1, "angle_to_subspace: zero-dimensional subspace");
    double nv = v.norm();
    Vec p = V.project(v);
    double c = p.norm() / nv;
    double s = (v - p).norm() / nv;
    return std::atan2(s, c);
}

double cap_angle_to_subspace(const Cap& cap, const Subspace& V) {
    return std::max(0.0, angle_to_subspace(cap.center, V) - cap.radius);
}

namespace {

// Points spread over the whole sphere S^{n-1}: Fibonacci lattice for n = 3,
// Gaussian sampling otherwise.
std::vector<Vec> sphere_pool(int n, std::size_t count, Rng& rng) {
    std::vector<Vec> pool;
    pool.reserve(count);
    if (n == 3) {
        const double golden = kPi * (3.0 - std::sqrt(5.0));
        for (std::size_t i = 0; i < count; ++i) {
            double z = 1.0 - (2.0 * i + 1.0) / count;
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            double phi = golden * static_cast<double>(i);
            Vec v(3);
            v << r * std::cos(phi), r * std::sin(phi), z;
            pool.push_back(v);
        }
        // Random rotation so different seeds give different nets.
        Mat G(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) G(i, j) = rng.normal();
        Eigen::HouseholderQR<Mat> qr(G);
        Mat Q = qr.householderQ();
        for (auto& v : pool) v = Q * v;
    } else {
        for (std::size_t i = 0; i < count; ++i) pool.push_back(rng.unit_vector(n));
    }
    return pool;
}

// Flip v into the half-space where its first nonzero coordinate is positive.
Vec canonical_line(const Vec& v) {
    for (int i = static_cast<int>(v.size()) - 1; i >= 0; --i) {
        if (v[i] > 0) return v;
        if (v[i] < 0) return -v;
    }
    return v;
}

// Greedy selection from a pool with a spatial hash on the ambient cube.
class GreedyNet {
public:
    GreedyNet(int n, double cell) : n_(n), cell_(cell) {
        offsets_.push_back({});
        for (int d = 0; d < n; ++d) {
            std::vector<std::vector<int>> next;
            for (const auto& o : offsets_)
                for (int s = -1; s <= 1; ++s) {
                    auto e = o;
                    e.push_back(s);
                    next.push_back(e);
                }
            offsets_ = std::move(next);
        }
    }

    // Accepts v if every selected w has sep(v, w) >= min_sep. The predicate
    // must imply |v - w| >= min_chord for rejected neighbours to be found.
    template <class Sep>
    bool try_add(const Vec& v, double min_sep, bool signed_check, Sep sep) {
        if (conflict(v, min_sep, sep)) return false;
        if (!signed_check && conflict(Vec(-v), min_sep, sep)) return false;
        std::size_t idx = points_.size();
        points_.push_back(v);
        grid_[key(cell_of(v))].push_back(idx);
        return true;
    }

    const std::vector<Vec>& points() const { return points_; }

private:
    std::vector<long> cell_of(const Vec& v) const {
        std::vector<long> c(n_);
        for (int i = 0; i < n_; ++i) c[i] = static_cast<long>(std::floor(v[i] / cell_));
        return c;
    }

    static std::uint64_t key(const std::vector<long>& c) {
        std::uint64_t h = 0x12345;
        for (long x : c) h = mix64(h ^ static_cast<std::uint64_t>(x + (1L << 30)));
        return h;
    }

    template <class Sep>
    bool conflict(const Vec& v, double min_sep, Sep sep) const {
        auto base = cell_of(v);
        std::vector<long> c(n_);
        for (const auto& o : offsets_) {
            for (int i = 0; i < n_; ++i) c[i] = base[i] + o[i];
            auto it = grid_.find(key(c));
            if (it == grid_.end()) continue;
            for (std::size_t idx : it->second)
                if (sep(v, points_[idx]) < min_sep) return true;
        }
        return false;
    }

    int n_;
    double cell_;
    std::vector<std::vector<int>> offsets_;
    std::vector<Vec> points_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid_;
};

std::size_t pool_size(int n, double scale) {
    double want = n == 3 ? 400.0 / (scale * scale) : 64.0 * std::pow(2.0 / scale, n - 1);
    return static_cast<std::size_t>(std::min(want, 2.0e6));
}

}  // namespace

std::vector<Vec> direction_net(int n, double delta, std::uint64_t seed) {
    require(n >= 2, "direction_net: need n >= 2");
    require(delta > 0 && delta <= 0.25, "direction_net: need 0 < delta <= 1/4");
    Rng rng(seed, "direction_net");
    std::vector<Vec> out;
    if (n == 2) {
        const long K = static_cast<long>(std::floor(kPi / delta));
        const double step = kPi / static_cast<double>(K);
        const double phase = rng.uniform(0.0, step);
        for (long i = 0; i < K; ++i) {
            double th = phase + step * static_cast<double>(i);
            Vec v(2);
            v << std::cos(th), std::sin(th);
            out.push_back(v);
        }
        return out;
    }
    auto pool = sphere_pool(n, pool_size(n, delta), rng);
    for (auto& v : pool) v = canonical_line(v);
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    GreedyNet net(n, delta);
    for (std::size_t i : order)
        net.try_add(pool[i], delta, false, [](const Vec& a, const Vec& b) { return line_angle(a, b); });
    return net.points();
}

TubeFamily make_direction_separated_family(int n, double delta, std::uint64_t seed) {
    require(n >= 2 && n <= 8, "make_direction_separated_family: need 2 <= n <= 8");
    require(delta > 0 && delta <= 0.25, "make_direction_separated_family: need 0 < delta <= 1/4");
    auto dirs = direction_net(n, delta, seed);
    Rng rng(seed, "family_positions");
    TubeFamily fam;
    fam.dim = n;
    fam.delta = delta;
    fam.separated = true;
    for (const auto& d : dirs) {
        Vec c(n);
        for (int i = 0; i < n; ++i) c[i] = rng.uniform();
        fam.tubes.push_back(make_tube(d, c, delta));
    }
    return fam;
}

std::vector<Cap> cap_decomposition(int n, double beta) {
    require(n >= 2, "cap_decomposition: need n >= 2");
    require(beta > 0 && beta <= 0.5, "cap_decomposition: need 0 < beta <= 1/2");
    std::vector<Cap> caps;
    if (n == 2) {
        const long K = static_cast<long>(std::ceil(2.0 * kPi / beta));
        for (long i = 0; i < K; ++i) {
            double th = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(K);
            Vec v(2);
            v << std::cos(th), std::sin(th);
            caps.push_back({v, beta});
        }
        return caps;
    }
    Rng rng(0, "cap_decomposition");
    auto pool = sphere_pool(n, pool_size(n, 0.75 * beta) / 2, rng);
    GreedyNet net(n, 0.75 * beta);
    for (const auto& v : pool)
        net.try_add(v, 0.75 * beta, true, [](const Vec& a, const Vec& b) { return vector_angle(a, b); });
    for (const auto& v : net.points()) caps.push_back({v, beta});
    return caps;
}

int cap_multiplicity(const std::vector<Cap>& caps, const Vec& v) {
    int c = 0;
    for (const auto& cap : caps) c += cap.contains(v) ? 1 : 0;
    return c;
}

int cap_index(const std::vector<Cap>& caps, const Vec& v) {
    for (std::size_t i = 0; i < caps.size(); ++i)
        if (caps[i].contains(v)) return static_cast<int>(i);
    return -1;
}

std::vector<int> cap_assignment(const TubeFamily& family, const std::vector<Cap>& caps) {
    std::vector<int> out;
    out.reserve(family.size());
    for (const auto& t : family.tubes) {
        int idx = cap_index(caps, t.direction);
        if (idx < 0) throw AssertionFailure("bucket_by_cap: direction covered by no cap");
        out.push_back(idx);
    }
    return out;
}

std::vector<TubeFamily> bucket_by_cap(const TubeFamily& family, const std::vector<Cap>& caps) {
    for (const auto& c : caps)
        require(c.radius > family.delta, "bucket_by_cap: cap radius must exceed delta");
    std::vector<TubeFamily> out(caps.size());
    for (auto& b : out) {
        b.dim = family.dim;
        b.delta = family.delta;
        b.separated = family.separated;
    }
    auto assign = cap_assignment(family, caps);
    for (std::size_t i = 0; i < family.size(); ++i) out[assign[i]].tubes.push_back(family.tubes[i]);
    return out;
}

AffineMap rescale_cap_map(const Cap& cap, const Vec& origin) {
    require(cap.radius > 0 && cap.radius <= 1, "rescale_cap_map: need 0 < beta <= 1");
    const int n = static_cast<int>(cap.center.size());
    Vec w = cap.center.normalized();
    Mat P = w * w.transpose();
    AffineMap L;
    L.linear = P + (Mat::Identity(n, n) - P) / cap.radius;
    L.offset = origin - L.linear * origin;
    return L;
}

AffineMap rescale_cap_map(const Cap& cap) {
    return rescale_cap_map(cap, Vec::Zero(cap.center.size()));
}

std::vector<Tube> cover_mapped_tube(const Tube& t, const AffineMap& L, double beta) {
    const double R = t.delta / beta;
    Vec u = L.linear * t.direction;
    const double len = u.norm();
    Vec dir = u / len;
    Vec c = L.apply(t.center);
    const double span = len + 2.0 * R;
    const int count = static_cast<int>(std::ceil(span));
    std::vector<Tube> out;
    for (int i = 0; i < count; ++i) {
        double s = -span / 2.0 + (i + 0.5) * span / count;
        out.push_back(make_tube(dir, c + s * dir, R));
    }
    return out;
}

TubeFamily rescale_bucket(const TubeFamily& bucket, const Cap& cap) {
    TubeFamily out;
    out.dim = bucket.dim;
    out.delta = bucket.delta / cap.radius;
    out.separated = false;
    auto L = rescale_cap_map(cap);
    for (const auto& t : bucket.tubes)
        for (auto& piece : cover_mapped_tube(t, L, cap.radius)) out.tubes.push_back(std::move(piece));
    return out;
}

void write_family(std::ostream& os, const TubeFamily& family) {
    os << family.dim << ' ' << format_double(family.delta) << ' ' << family.size() << '\n';
    for (const auto& t : family.tubes) {
        for (int i = 0; i < family.dim; ++i) os << format_double(t.direction[i]) << ' ';
        for (int i = 0; i < family.dim; ++i) os << format_double(t.center[i]) << (i + 1 < family.dim ? " " : "\n");
    }
}

TubeFamily read_family(std::istream& is) {
    TubeFamily fam;
    std::size_t count = 0;
    if (!(is >> fam.dim >> fam.delta >> count)) throw ConfigError("read_family: malformed header");
    require(fam.dim >= 2 && fam.dim <= 8, "read_family: dimension out of range");
    for (std::size_t k = 0; k < count; ++k) {
        Tube t;
        t.dim = fam.dim;
        t.delta = fam.delta;
        t.direction.resize(fam.dim);
        t.center.resize(fam.dim);
        for (int i = 0; i < fam.dim; ++i) is >> t.direction[i];
        for (int i = 0; i < fam.dim; ++i) is >> t.center[i];
        if (!is) throw ConfigError("read_family: truncated tube list");
        fam.tubes.push_back(std::move(t));
    }
    fam.separated = fam.min_pairwise_angle() >= fam.delta;
    return fam;
}

}  // namespace kakeya
