#include "kakeya/wolff.hpp"

#include "kakeya/parallel.hpp"
#include "kakeya/rng.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kakeya {

namespace {

// Frame u_1 = e_n, u_2 = e_1, u_3 = e_2, ... so that Z_1 is transverse to
// horizontal hyperplanes.
std::vector<Vec> standard_frame(int n) {
    std::vector<Vec> u;
    u.push_back(Vec::Unit(n, n - 1));
    for (int i = 0; i < n - 1; ++i) u.push_back(Vec::Unit(n, i));
    return u;
}

void check_chain(int n, int k, int m, double lo, double rho, const std::vector<double>& lambdas) {
    require(n >= 2 && 1 <= k && k <= m && m <= n, "multiscale: need n >= m >= k >= 1");
    require(static_cast<int>(lambdas.size()) == m - k + 1, "multiscale: need one lambda per scale");
    require(0 < lo && lo <= rho, "multiscale: need 0 < delta <= rho");
    for (std::size_t i = 0; i + 1 < lambdas.size(); ++i)
        require(lambdas[i] <= lambdas[i + 1], "multiscale: lambdas must be non-decreasing");
    require(lambdas.back() <= 1, "multiscale: lambda_m must be at most 1");
}

void check_nested(const std::vector<Vec>& centers, const std::vector<double>& lambdas) {
    for (std::size_t i = 0; i + 1 < lambdas.size(); ++i)
        require((centers[i] - centers[i + 1]).norm() + lambdas[i] <= lambdas[i + 1] * (1 + 1e-12),
                "multiscale: balls must be nested");
}

}  // namespace

void MultiscaleConfig::validate() const {
    check_chain(n, k, m, delta, rho, lambdas);
    require(rho <= lambdas.front(), "multiscale: need rho <= lambda_k");
    require(static_cast<int>(varieties.size()) == m - k + 1 && centers.size() == varieties.size(),
            "multiscale: need one variety and one ball per scale");
    for (int j = k; j <= m; ++j) {
        require(varieties[j - k].dim() == j && varieties[j - k].ambient_dim() == n,
                "multiscale: Z_j must be a j-dimensional variety in R^n");
        require(centers[j - k].size() == n, "multiscale: ball center dimension mismatch");
    }
    check_nested(centers, lambdas);
}

double MultiscaleConfig::bound() const {
    double b = std::pow(delta, -(n - 1));
    for (int j = k; j < m; ++j) b *= rho / lambdas[j - k];
    return b * std::pow(rho / lambdas.back(), n - m);
}

MultiscaleConfig nested_plane_config(int n, int k, int m, double delta, double rho, const std::vector<double>& lambdas,
                                     const Vec& x0) {
    MultiscaleConfig cfg;
    cfg.n = n;
    cfg.k = k;
    cfg.m = m;
    cfg.delta = delta;
    cfg.rho = rho;
    cfg.lambdas = lambdas;
    auto u = standard_frame(n);
    for (int j = k; j <= m; ++j) {
        cfg.varieties.push_back(Variety::plane(x0, std::vector<Vec>(u.begin(), u.begin() + j)));
        cfg.centers.push_back(x0);
    }
    cfg.validate();
    return cfg;
}

bool occupies_all(const Tube& tube, const MultiscaleConfig& cfg) {
    for (int j = cfg.k; j <= cfg.m; ++j) {
        const int i = j - cfg.k;
        // |T cap B cap N_rho Z| / |T| equals the occupied fraction of the unit core segment.
        if (tube_occupancy(tube, cfg.centers[i], cfg.lambdas[i], cfg.varieties[i], cfg.rho) < cfg.lambdas[i])
            return false;
    }
    return true;
}

CountResult count_multiscale_tubes(const TubeFamily& family, const MultiscaleConfig& cfg) {
    cfg.validate();
    require(family.dim == cfg.n, "count_multiscale_tubes: dimension mismatch");
    auto parts = map_chunks<std::size_t>(family.size(), 256, [&](std::size_t b, std::size_t e) {
        std::size_t c = 0;
        for (std::size_t i = b; i < e; ++i) c += occupies_all(family.tubes[i], cfg);
        return c;
    });
    CountResult r;
    r.count = std::accumulate(parts.begin(), parts.end(), std::size_t{0});
    r.bound = cfg.bound();
    r.ratio = static_cast<double>(r.count) / r.bound;
    return r;
}

TubeFamily nested_plane_extremal_family(const MultiscaleConfig& cfg, std::uint64_t seed, std::string* diagnostic) {
    cfg.validate();
    TubeFamily fam;
    fam.dim = cfg.n;
    fam.delta = cfg.delta;
    fam.separated = true;
    const double bound = cfg.bound();
    if (bound < 1) {
        if (diagnostic) *diagnostic = "infeasible scale chain: bound " + format_double(bound) + " < 1";
        return fam;
    }
    const Vec& x0 = cfg.centers.back();
    std::vector<Subspace> spans;
    std::vector<double> max_angle;
    for (int j = cfg.k; j <= cfg.m; ++j) {
        spans.push_back(Subspace{cfg.varieties[j - cfg.k].basis()});
        max_angle.push_back(std::asin(std::min(1.0, 2 * cfg.rho / cfg.lambdas[j - cfg.k])));
    }
    std::size_t rejected = 0;
    for (const Vec& w : direction_net(cfg.n, cfg.delta, seed)) {
        bool ok = true;
        for (std::size_t i = 0; i < spans.size() && ok; ++i)
            ok = spans[i].dim() == cfg.n || angle_to_subspace(w, spans[i]) <= max_angle[i];
        if (!ok) continue;
        Tube t = make_tube(w, x0, cfg.delta);
        if (!occupies_all(t, cfg)) {
            ++rejected;
            continue;
        }
        fam.tubes.push_back(t);
    }
    if (diagnostic)
        *diagnostic = "constructed " + std::to_string(fam.size()) + " tubes, bound " + format_double(bound) +
                      ", rejected " + std::to_string(rejected);
    return fam;
}

TubeFamily nested_plane_extremal_family(int n, int k, int m, double delta, double rho,
                                        const std::vector<double>& lambdas, std::uint64_t seed,
                                        std::string* diagnostic) {
    check_chain(n, k, m, delta, rho, lambdas);
    return nested_plane_extremal_family(nested_plane_config(n, k, m, delta, rho, lambdas, Vec::Zero(n)), seed,
                                        diagnostic);
}

// ---------------------------------------------------------------- S_m volume

void SmConfig::validate() const {
    check_chain(n, k, m, rho, rho, lambdas);
    require(rho <= 4 * lambdas.front(), "sm_volume: need rho <= 4 lambda_k");
    require(degree >= 1, "sm_volume: degree bound must be positive");
    require(static_cast<int>(planes.size()) == m - k + 1 && centers.size() == planes.size(),
            "sm_volume: need one plane and one ball per scale");
    for (int j = k; j <= m; ++j) {
        const Variety& Z = planes[j - k];
        require(Z.is_affine(), "sm_volume: only affine planes are supported");
        require(Z.dim() == j && Z.ambient_dim() == n, "sm_volume: Z_j must be a j-plane in R^n");
    }
    check_nested(centers, lambdas);
    require(samples >= 1000, "sm_volume: need at least 1000 samples");
}

std::pair<double, double> SmConfig::interval(int j) const {
    const double raw = lambdas[j - k] / (2.0 * n * degree);
    const double len = std::ldexp(1.0, static_cast<int>(std::floor(std::log2(raw) + 1e-12)));
    const double tc = centers[j - k][n - 1];
    return {tc - len / 2, tc + len / 2};
}

double SmConfig::bound() const {
    double b = std::pow(lambdas.back(), m) * std::pow(rho, n - m);
    for (int j = k; j < m; ++j) b *= rho / lambdas[j - k];
    return b;
}

SmConfig nested_sm_config(int n, int k, int m, double rho, const std::vector<double>& lambdas, std::size_t samples) {
    SmConfig cfg;
    cfg.n = n;
    cfg.k = k;
    cfg.m = m;
    cfg.rho = rho;
    cfg.lambdas = lambdas;
    cfg.samples = samples;
    auto u = standard_frame(n);
    for (int j = k; j <= m; ++j) {
        cfg.planes.push_back(Variety::plane(Vec::Zero(n), std::vector<Vec>(u.begin(), u.begin() + j)));
        cfg.centers.push_back(Vec::Zero(n));
    }
    cfg.validate();
    return cfg;
}

namespace {

// Convex constraint g(d) <= 0 in the slope vector d, with a subgradient.
struct Constraint {
    enum class Kind { Box, PlaneDist, BallDist } kind;
    int axis = 0;       // Box: coordinate; sign in `scale`
    double scale = 0;   // Box: g = scale * d[axis] + offset
    double offset = 0;
    double shift = 0;   // s - t0 for endpoint constraints
    Vec p0;             // endpoint with d = 0
    int j = 0;
};

double eval_constraint(const SmConfig& cfg, const Constraint& c, const Vec& d, Vec& grad) {
    const int q = cfg.n - 1;
    grad.setZero(q);
    if (c.kind == Constraint::Kind::Box) {
        grad[c.axis] = c.scale;
        return c.scale * d[c.axis] + c.offset;
    }
    Vec p = c.p0;
    p.head(q) += c.shift * d;
    const Variety& Z = cfg.planes[c.j];
    Vec r;
    double lim;
    if (c.kind == Constraint::Kind::PlaneDist) {
        Vec u = p - Z.basepoint();
        r = u - Z.basis() * (Z.basis().transpose() * u);
        lim = cfg.rho;
    } else {
        r = p - cfg.centers[c.j];
        lim = cfg.lambdas[c.j];
    }
    const double nr = r.norm();
    if (nr > 0) grad = c.shift * r.head(q) / nr;
    return nr - lim;
}

}  // namespace

bool sm_member(const SmConfig& cfg, const Vec& x) {
    const int n = cfg.n;
    const int q = n - 1;
    const double t0 = x[n - 1];
    const Vec xp = x.head(q);
    std::vector<Constraint> cons;
    for (int i = 0; i < q; ++i) {
        // |d_i| <= 1 and |x'_i - t0 d_i| <= 1
        cons.push_back({Constraint::Kind::Box, i, 1.0, -1.0, 0, Vec(), 0});
        cons.push_back({Constraint::Kind::Box, i, -1.0, -1.0, 0, Vec(), 0});
        cons.push_back({Constraint::Kind::Box, i, -t0, xp[i] - 1, 0, Vec(), 0});
        cons.push_back({Constraint::Kind::Box, i, t0, -xp[i] - 1, 0, Vec(), 0});
    }
    // Segments lie in convex sets, so endpoints suffice.
    for (int j = cfg.k; j <= cfg.m; ++j) {
        auto [a, b] = cfg.interval(j);
        for (double s : {a, b}) {
            Vec p0(n);
            p0.head(q) = xp;
            p0[n - 1] = s;
            for (auto kind : {Constraint::Kind::PlaneDist, Constraint::Kind::BallDist})
                cons.push_back({kind, 0, 0, 0, s - t0, p0, j - cfg.k});
        }
    }
    Vec d = Vec::Zero(q), grad(q), best_grad(q);
    auto worst = [&](Vec& g) {
        double w = -std::numeric_limits<double>::infinity();
        for (const auto& c : cons) {
            double v = eval_constraint(cfg, c, d, grad);
            if (v > w) {
                w = v;
                g = grad;
            }
        }
        return w;
    };
    if (q == 1) {
        double lo = -1, hi = 1;
        for (int it = 0; it < 200; ++it) {
            d[0] = (lo + hi) / 2;
            double w = worst(best_grad);
            if (w <= 0) return true;
            if (best_grad[0] == 0) return false;
            if (best_grad[0] > 0)
                hi = d[0];
            else
                lo = d[0];
            if (hi - lo < 1e-13) return false;
        }
        return false;
    }
    // Central-cut ellipsoid method on {d : g(d) <= 0} starting from a ball around the box.
    Mat E = Mat::Identity(q, q) * static_cast<double>(q);
    const double qd = q;
    for (int it = 0; it < 400; ++it) {
        double w = worst(best_grad);
        if (w <= 0) return true;
        Vec Eg = E * best_grad;
        double gEg = best_grad.dot(Eg);
        if (gEg <= 1e-300) return false;
        Vec step = Eg / std::sqrt(gEg);
        d -= step / (qd + 1);
        E = qd * qd / (qd * qd - 1) * (E - 2.0 / (qd + 1) * step * step.transpose());
        if (E.trace() < 1e-24) return false;
    }
    return false;
}

SmEstimate sm_volume(const SmConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const int n = cfg.n;
    const int q = n - 1;
    const int im = cfg.m - cfg.k;
    const Vec& cm = cfg.centers[im];
    const double lm = cfg.lambdas[im];
    auto [ta, tb] = cfg.interval(cfg.m);
    const double box = std::pow(2 * lm, q) * (tb - ta);
    SmEstimate est;
    est.bound = cfg.bound();
    std::size_t budget = cfg.samples;
    constexpr std::size_t kShard = 4096;
    std::size_t hits = 0, total = 0, shard0 = 0;
    for (int round = 0; round < 5; ++round) {
        const std::size_t shards = (budget + kShard - 1) / kShard;
        auto parts = map_chunks<std::size_t>(shards, 1, [&](std::size_t b, std::size_t) {
            Rng rng(seed, "sm_volume", shard0 + b);
            std::size_t h = 0;
            Vec x(n);
            for (std::size_t s = 0; s < kShard; ++s) {
                for (int i = 0; i < q; ++i) x[i] = rng.uniform(cm[i] - lm, cm[i] + lm);
                x[n - 1] = rng.uniform(ta, tb);
                // x itself lies on l(I_m), hence in N_rho Z_m cap B_m.
                if ((x - cm).norm() > lm) continue;
                if (cfg.planes[im].distance_to(x) > cfg.rho) continue;
                h += sm_member(cfg, x);
            }
            return h;
        });
        hits += std::accumulate(parts.begin(), parts.end(), std::size_t{0});
        total += shards * kShard;
        shard0 += shards;
        if (hits >= 10) break;
        budget *= 2;
    }
    const double f = static_cast<double>(hits) / static_cast<double>(total);
    est.samples = total;
    est.hits = hits;
    est.volume = box * f;
    est.stderr_ = box * std::sqrt(f * (1 - f) / static_cast<double>(total));
    est.ratio = est.volume / est.bound;
    est.inconclusive = hits < 10;
    return est;
}

// ---------------------------------------------------------------- averaging bound

AverageBound poly_average_bound(const std::vector<double>& coefs, double a, double b, double t) {
    int m = static_cast<int>(coefs.size()) - 1;
    while (m >= 0 && coefs[m] == 0) --m;
    require(m >= 1, "poly_average_bound: degree must be at least 1");
    require(b > a, "poly_average_bound: interval must have positive length");
    auto P = [&](double x) {
        double v = 0;
        for (int i = m; i >= 0; --i) v = v * x + coefs[i];
        return v;
    };
    // Split the interval at real roots so |P| is smooth on every piece.
    std::vector<double> cuts{a, b};
    if (m >= 1) {
        Mat C = Mat::Zero(m, m);
        for (int i = 1; i < m; ++i) C(i, i - 1) = 1;
        for (int i = 0; i < m; ++i) C(i, m - 1) = -coefs[i] / coefs[m];
        Eigen::EigenSolver<Mat> es(C, false);
        for (int i = 0; i < m; ++i) {
            auto z = es.eigenvalues()[i];
            if (std::abs(z.imag()) <= 1e-9 * (1 + std::abs(z.real())) && z.real() > a && z.real() < b)
                cuts.push_back(z.real());
        }
    }
    std::sort(cuts.begin(), cuts.end());
    using boost::math::quadrature::gauss_kronrod;
    double integral = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] <= cuts[i]) continue;
        integral += gauss_kronrod<double, 15>::integrate([&](double x) { return std::abs(P(x)); }, cuts[i],
                                                         cuts[i + 1], 15, 1e-10);
    }
    const double len = b - a;
    const double dist = t < a ? a - t : (t > b ? t - b : 0.0);
    AverageBound r;
    r.lhs = std::abs(P(t));
    r.integral = integral;
    r.rhs = std::pow(8.0 * m * std::max(len, dist) / len, m) * integral / len;
    r.holds = r.lhs <= r.rhs * (1 + 1e-10);
    return r;
}

}  // namespace kakeya
