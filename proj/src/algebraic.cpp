#include "kakeya/algebraic.hpp"
#include "kakeya/parallel.hpp"
#include "kakeya/rng.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <string>

namespace kakeya {

namespace {

constexpr double kTransversality = 1e-8;

// Orthonormal basis of the complement of v (n x (n-1)).
Mat orthogonal_complement(const Vec& v) {
    const int n = static_cast<int>(v.size());
    Eigen::JacobiSVD<Mat> svd(Mat(v.transpose()), Eigen::ComputeFullV);
    return svd.matrixV().rightCols(n - 1);
}

// Roots interval of a s^2 + b s + c <= 0 intersected with [lo, hi].
std::pair<double, double> quadratic_sublevel(double a, double b, double c, double lo, double hi) {
    if (std::abs(a) < 1e-15) {
        if (std::abs(b) < 1e-15) return c <= 0 ? std::make_pair(lo, hi) : std::make_pair(1.0, 0.0);
        double s = -c / b;
        return b > 0 ? std::make_pair(lo, std::min(hi, s)) : std::make_pair(std::max(lo, s), hi);
    }
    double disc = b * b - 4 * a * c;
    if (disc < 0) return {1.0, 0.0};
    double sq = std::sqrt(disc);
    double q = -0.5 * (b + (b >= 0 ? sq : -sq));
    double r1 = q / a;
    double r2 = q != 0 ? c / q : r1;
    if (r1 > r2) std::swap(r1, r2);
    return {std::max(lo, r1), std::min(hi, r2)};
}

}  // namespace

Variety Variety::plane(const Vec& basepoint, const std::vector<Vec>& directions) {
    Variety V;
    V.kind_ = Kind::Affine;
    V.n_ = static_cast<int>(basepoint.size());
    V.m_ = static_cast<int>(directions.size());
    V.base_ = basepoint;
    require(V.m_ <= V.n_, "plane_variety: too many directions");
    if (V.m_ == 0) {
        V.basis_ = Mat(V.n_, 0);
    } else {
        V.basis_ = Subspace::span(directions).basis;
    }
    return V;
}

Variety Variety::whole_space(int n) {
    std::vector<Vec> dirs;
    for (int i = 0; i < n; ++i) dirs.push_back(Vec::Unit(n, i));
    return plane(Vec::Zero(n), dirs);
}

Variety Variety::polynomial(int n, std::vector<Polynomial> equations, int degree_bound) {
    require(!equations.empty() && static_cast<int>(equations.size()) < n,
            "polynomial variety: need 1 <= #equations < n");
    Variety V;
    V.kind_ = Kind::Polynomial;
    V.n_ = n;
    V.m_ = n - static_cast<int>(equations.size());
    V.d_ = degree_bound;
    for (const auto& p : equations) {
        require(p.nvars() == n, "polynomial variety: variable count mismatch");
        require(p.degree() <= degree_bound, "polynomial variety: degree exceeds the bound");
    }
    V.eqs_ = std::move(equations);
    return V;
}

Vec Variety::residual(const Vec& x) const {
    Vec r(eqs_.size());
    for (std::size_t j = 0; j < eqs_.size(); ++j) r[j] = eqs_[j].eval(x);
    return r;
}

Mat Variety::jacobian(const Vec& x) const {
    Mat J(eqs_.size(), n_);
    Vec g(n_);
    for (std::size_t j = 0; j < eqs_.size(); ++j) {
        eqs_[j].eval_grad(x.data(), g.data());
        J.row(static_cast<int>(j)) = g.transpose();
    }
    return J;
}

bool Variety::project(Vec& z) const {
    Vec r = residual(z);
    double rn = r.norm();
    for (int it = 0; it < 40; ++it) {
        if (rn < 1e-14 * (1.0 + z.norm())) return true;
        Mat J = jacobian(z);
        Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& s = svd.singularValues();
        if (s(s.size() - 1) < kTransversality) return false;
        Vec step = svd.solve(r);
        double t = 1.0;
        bool improved = false;
        for (int h = 0; h < 12; ++h) {
            Vec trial = z - t * step;
            Vec rt = residual(trial);
            if (rt.norm() < rn) {
                z = trial;
                r = rt;
                rn = rt.norm();
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if (!improved) return rn < 1e-10;
    }
    return rn < 1e-10;
}

namespace {

constexpr int kMaxDim = 16;

// Newton projection onto Z(P) along the gradient.
bool project_hypersurface(const Polynomial& P, int n, double* z) {
    double g[kMaxDim];
    for (int it = 0; it < 40; ++it) {
        double v = P.eval_grad(z, g);
        double zn = 0, gg = 0;
        for (int i = 0; i < n; ++i) {
            zn += z[i] * z[i];
            gg += g[i] * g[i];
        }
        if (std::abs(v) < 1e-14 * (1.0 + std::sqrt(zn))) return true;
        if (gg < kTransversality * kTransversality) return false;
        for (int i = 0; i < n; ++i) z[i] -= v / gg * g[i];
    }
    return std::abs(P.eval(z)) < 1e-10;
}

double dist(const double* a, const double* b, int n) {
    double s = 0;
    for (int i = 0; i < n; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

}  // namespace

DistanceResult Variety::distance(const Vec& x, int starts) const {
    require(x.size() == n_, "distance_to: dimension mismatch");
    DistanceResult out;
    if (is_affine()) {
        Vec w = x - base_;
        Vec off = w - basis_ * (basis_.transpose() * w);
        out.value = off.norm();
        out.nearest = x - off;
        return out;
    }
    out.approximate = true;
    if (eqs_.size() == 1 && n_ <= kMaxDim) {
        // Hypersurface: the same projection-and-slide search without matrix factorizations.
        const Polynomial& P = eqs_.front();
        double g[kMaxDim], z[kMaxDim], trial[kMaxDim], best[kMaxDim];
        double v0 = P.eval_grad(x.data(), g);
        double gn = 0;
        for (int i = 0; i < n_; ++i) gn += g[i] * g[i];
        gn = std::sqrt(gn);
        double scale = std::max(0.05, gn > 0 ? std::abs(v0) / gn : 1.0);
        std::optional<Rng> rng;
        double best_d = std::numeric_limits<double>::infinity();
        for (int s = 0; s < std::max(1, starts); ++s) {
            for (int i = 0; i < n_; ++i) z[i] = x[i];
            if (s > 0) {
                if (!rng) rng.emplace(0x7a11, "distance_starts");
                Vec u = rng->unit_vector(n_);
                for (int i = 0; i < n_; ++i) z[i] += (0.1 * s) * scale * u[i];
            }
            if (!project_hypersurface(P, n_, z)) continue;
            double alpha = 1.0;
            for (int it = 0; it < 50; ++it) {
                P.eval_grad(z, g);
                double gg = 0, dot = 0, wn = 0;
                for (int i = 0; i < n_; ++i) {
                    gg += g[i] * g[i];
                    dot += g[i] * (x[i] - z[i]);
                    wn += (x[i] - z[i]) * (x[i] - z[i]);
                }
                if (gg <= 0) break;
                double sn = 0;
                for (int i = 0; i < n_; ++i) {
                    double st = (x[i] - z[i]) - dot / gg * g[i];
                    trial[i] = st;
                    sn += st * st;
                }
                if (std::sqrt(sn) < 1e-13 * (1.0 + std::sqrt(wn))) break;
                for (int i = 0; i < n_; ++i) trial[i] = z[i] + alpha * trial[i];
                if (project_hypersurface(P, n_, trial) && dist(trial, x.data(), n_) < dist(z, x.data(), n_)) {
                    for (int i = 0; i < n_; ++i) z[i] = trial[i];
                    alpha = std::min(1.0, 2.0 * alpha);
                } else {
                    alpha *= 0.5;
                    if (alpha < 1.0 / 64) break;
                }
            }
            double d = dist(z, x.data(), n_);
            if (d < best_d) {
                best_d = d;
                for (int i = 0; i < n_; ++i) best[i] = z[i];
            }
        }
        if (std::isfinite(best_d)) {
            out.value = best_d;
            out.nearest = Eigen::Map<Vec>(best, n_);
        } else {
            out.diverged = true;
        }
        return out;
    }
    Vec r0 = residual(x);
    Mat J0 = jacobian(x);
    double grad = J0.norm();
    double scale = std::max(0.05, grad > 0 ? r0.norm() / grad : 1.0);
    Rng rng(0x7a11, "distance_starts");
    for (int s = 0; s < std::max(1, starts); ++s) {
        Vec z = x;
        if (s > 0) z += (0.1 * s) * scale * rng.unit_vector(n_);
        if (!project(z)) continue;
        double alpha = 1.0;
        for (int it = 0; it < 50; ++it) {
            Mat J = jacobian(z);
            Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeFullV);
            Mat T = svd.matrixV().rightCols(m_);
            Vec step = T * (T.transpose() * (x - z));
            if (step.norm() < 1e-13 * (1.0 + (x - z).norm())) break;
            Vec trial = z + alpha * step;
            if (project(trial) && (trial - x).norm() < (z - x).norm()) {
                z = trial;
                alpha = std::min(1.0, 2.0 * alpha);
            } else {
                alpha *= 0.5;
                if (alpha < 1.0 / 64) break;
            }
        }
        double d = (z - x).norm();
        if (d < out.value) {
            out.value = d;
            out.nearest = z;
        }
    }
    if (!std::isfinite(out.value)) out.diverged = true;
    return out;
}

Subspace Variety::tangent_space(const Vec& z) const {
    if (is_affine()) return Subspace{basis_};
    Vec r = residual(z);
    Mat J = jacobian(z);
    for (int j = 0; j < r.size(); ++j) {
        double g = J.row(j).norm();
        require(g > 0 && std::abs(r[j]) / g <= 1e-8, "tangent_space: point is not on the variety");
    }
    if (n_ == 2 && J.rows() == 1) {
        double g = J.row(0).norm();
        require(g > kTransversality, "tangent_space: transversality fails (degenerate point)");
        Mat T(2, 1);
        T << -J(0, 1) / g, J(0, 0) / g;
        return Subspace{T};
    }
    Eigen::JacobiSVD<Mat> svd(J, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    require(s(s.size() - 1) > kTransversality, "tangent_space: transversality fails (degenerate point)");
    return Subspace{svd.matrixV().rightCols(m_)};
}

TangencyReport is_tangent_tube(const Tube& T, const Variety& V, const Vec& x0, double r, double c_tang,
                               int tube_id, bool verdict_only) {
    require(T.delta < r, "is_tangent_tube: need delta < r");
    require(T.dim == V.ambient_dim(), "is_tangent_tube: dimension mismatch");
    TangencyReport rep;
    rep.tube_id = tube_id;
    rep.c_tang = c_tang;
    const double delta = T.delta;
    const double spacing = std::min(1.0 / 64.0, r / 8.0);
    const int count = static_cast<int>(std::ceil(1.0 / spacing)) + 1;
    Mat perp = orthogonal_complement(T.direction);
    const bool flat = V.is_affine();
    const bool full = V.dim() == V.ambient_dim();
    double flat_angle = 0;
    if (flat && !full && V.dim() > 0) flat_angle = angle_to_subspace(T.direction, Subspace{V.basis()});
    if (flat && V.dim() == 0) flat_angle = kPi / 2;

    std::vector<Vec> offsets{Vec::Zero(T.dim)};
    for (int k = 0; k < perp.cols(); ++k) {
        offsets.push_back(delta * perp.col(k));
        offsets.push_back(-delta * perp.col(k));
    }
    bool found = false;
    for (int i = 0; i < count; ++i) {
        double s = -0.5 + static_cast<double>(i) / (count - 1);
        Vec p = T.center + s * T.direction;
        for (std::size_t o = 0; o < offsets.size(); ++o) {
            Vec x = p + offsets[o];
            double dx0 = (x - x0).norm();
            bool want_i = o == 0 && !rep.condition_i && dx0 <= r;
            bool want_ii = dx0 <= 2 * r + 8 * delta;
            if (!want_i && !want_ii) continue;
            if (!flat) {
                // First-order screen before the iterative projection.
                Vec res = V.residual(x);
                double g = V.jacobian(x).norm();
                if (g > 0 && res.norm() / g > 16 * delta) continue;
            }
            DistanceResult dr = V.distance(x, 1);
            if (!std::isfinite(dr.value)) continue;
            if (want_i && dr.value <= delta) rep.condition_i = true;
            if (!want_ii || dr.value > 8 * delta || (dr.nearest - x0).norm() > 2 * r) continue;
            double ang = 0;
            if (flat) {
                ang = flat_angle;
            } else {
                try {
                    ang = angle_to_subspace(T.direction, V.tangent_space(dr.nearest));
                } catch (const PreconditionError&) {
                    continue;
                }
            }
            if (!found || ang > rep.worst_angle) {
                rep.worst_angle = ang;
                rep.witness = x;
            }
            found = true;
            if (verdict_only && rep.worst_angle > c_tang * delta / r + 1e-12) {
                rep.condition_ii = false;
                return rep;
            }
        }
    }
    rep.undecidable = !found;
    rep.condition_ii = !found || rep.worst_angle <= c_tang * delta / r + 1e-12;
    return rep;
}

double max_distance_in_ball(const Tube& T, const Variety& V, const Vec& x0, double r) {
    const double spacing = std::min(1.0 / 64.0, r / 8.0);
    const int count = static_cast<int>(std::ceil(1.0 / spacing)) + 1;
    Mat perp = orthogonal_complement(T.direction);
    double worst = 0;
    for (int i = 0; i < count; ++i) {
        double s = -0.5 + static_cast<double>(i) / (count - 1);
        Vec p = T.center + s * T.direction;
        for (int k = -1; k < perp.cols(); ++k) {
            for (int sign : {1, -1}) {
                Vec x = k < 0 ? p : Vec(p + sign * T.delta * perp.col(k));
                if ((x - x0).norm() > 2 * r) continue;
                worst = std::max(worst, V.distance(x, 1).value);
                if (k < 0) break;
            }
        }
    }
    return worst;
}

double wongkew_reference(int n, int m, double lambda, double rho) {
    return unit_ball_volume(m) * std::pow(lambda, m) * unit_ball_volume(n - m) * std::pow(rho, n - m);
}

VolumeEstimate wongkew_volume(const Variety& V, double lambda, double rho, const Vec& center,
                              std::size_t samples, std::uint64_t seed, WongkewMode mode) {
    require(samples >= 1000, "wongkew_volume: need at least 10^3 samples");
    require(rho > 0 && rho <= lambda && lambda <= 1, "wongkew_volume: need 0 < rho <= lambda <= 1");
    const int n = V.ambient_dim();
    require(center.size() == n, "wongkew_volume: dimension mismatch");
    const double half = mode == WongkewMode::NeighborhoodOfPiece ? lambda + rho : lambda;
    const double box = std::pow(2 * half, n);

    // V = R^n: the set is the ball B(center, half) itself.
    if (V.dim() == n) {
        VolumeEstimate out;
        out.samples = samples;
        out.hits = samples;
        out.volume = unit_ball_volume(n) * std::pow(half, n);
        out.ratio = out.volume / std::pow(lambda, n);
        return out;
    }

    // Disk V cap B_lambda for the affine case.
    Vec disk_center;
    double disk_r2 = -1;
    if (V.is_affine()) {
        disk_center = V.distance(center).nearest;
        disk_r2 = lambda * lambda - (center - disk_center).squaredNorm();
    }

    auto inside = [&](const Vec& x) -> bool {
        if (mode == WongkewMode::PieceOfNeighborhood) {
            if ((x - center).norm() > lambda) return false;
            if (!V.is_affine()) {
                Vec res = V.residual(x);
                double g = V.jacobian(x).norm();
                if (g > 0 && res.norm() / g > 2 * rho) return false;
            }
            return V.distance(x, 1).value <= rho;
        }
        if (V.is_affine()) {
            if (disk_r2 < 0) return false;
            Vec q = V.distance(x).nearest;
            double radial = std::max(0.0, (q - disk_center).norm() - std::sqrt(disk_r2));
            return (x - q).squaredNorm() + radial * radial <= rho * rho;
        }
        Vec res = V.residual(x);
        double g = V.jacobian(x).norm();
        if (g > 0 && res.norm() / g > 2 * rho) return false;
        auto dr = V.distance(x, 1);
        return dr.value <= rho && (dr.nearest - center).norm() <= lambda * (1 + 1e-9);
    };

    const std::size_t shard = 4096;
    auto hits = map_chunks<std::size_t>(samples, shard, [&](std::size_t b, std::size_t e) {
        Rng rng(seed, "wongkew", b / shard);
        std::size_t h = 0;
        Vec x(n);
        for (std::size_t i = b; i < e; ++i) {
            for (int k = 0; k < n; ++k) x[k] = center[k] + rng.uniform(-half, half);
            if (inside(x)) ++h;
        }
        return h;
    });
    VolumeEstimate out;
    out.samples = samples;
    for (auto h : hits) out.hits += h;
    double f = static_cast<double>(out.hits) / static_cast<double>(samples);
    out.volume = box * f;
    out.stderr_ = box * std::sqrt(f * (1 - f) / static_cast<double>(samples));
    out.ratio = out.volume / (std::pow(lambda, V.dim()) * std::pow(rho, n - V.dim()));
    return out;
}

double tube_occupancy(const Tube& T, const Vec& center, double lambda, const Variety& V, double rho) {
    require(rho >= T.delta, "tube_occupancy: need rho >= delta");
    const Vec& v = T.direction;
    Vec w = T.center - center;
    auto ball = quadratic_sublevel(v.squaredNorm(), 2 * v.dot(w), w.squaredNorm() - lambda * lambda, -0.5, 0.5);
    if (ball.first >= ball.second) return 0.0;
    if (V.is_affine()) {
        const Mat& B = V.basis();
        Vec u0 = T.center - V.basepoint();
        Vec u = u0 - B * (B.transpose() * u0);
        Vec g = v - B * (B.transpose() * v);
        auto slab = quadratic_sublevel(g.squaredNorm(), 2 * u.dot(g), u.squaredNorm() - rho * rho, ball.first,
                                       ball.second);
        return std::max(0.0, slab.second - slab.first);
    }
    const int count = 1024;
    int inside = 0;
    for (int i = 0; i < count; ++i) {
        double s = -0.5 + (i + 0.5) / count;
        if (s < ball.first || s > ball.second) continue;
        if (V.distance(Vec(T.center + s * v), 1).value <= rho) ++inside;
    }
    return static_cast<double>(inside) / count;
}

void write_variety(std::ostream& os, const Variety& V) {
    const int n = V.ambient_dim();
    if (V.is_affine()) {
        os << "affine " << n << ' ' << V.dim() << '\n';
        for (int i = 0; i < n; ++i) os << format_double(V.basepoint()[i]) << (i + 1 < n ? " " : "\n");
        for (int k = 0; k < V.dim(); ++k)
            for (int i = 0; i < n; ++i) os << format_double(V.basis()(i, k)) << (i + 1 < n ? " " : "\n");
        return;
    }
    os << "poly " << n << ' ' << V.dim() << ' ' << V.degree_bound() << '\n';
    for (const auto& p : V.equations()) {
        auto c = p.coefficients(V.degree_bound());
        for (std::size_t i = 0; i < c.size(); ++i) os << format_double(c[i]) << (i + 1 < c.size() ? " " : "\n");
    }
}

Variety read_variety(std::istream& is) {
    std::string kind;
    int n = 0, m = 0;
    if (!(is >> kind >> n >> m)) throw ConfigError("read_variety: malformed header");
    if (kind == "affine") {
        Vec base(n);
        for (int i = 0; i < n; ++i) is >> base[i];
        std::vector<Vec> dirs(m, Vec(n));
        for (auto& d : dirs)
            for (int i = 0; i < n; ++i) is >> d[i];
        if (!is) throw ConfigError("read_variety: truncated affine variety");
        return Variety::plane(base, dirs);
    }
    if (kind == "poly") {
        int d = 0;
        is >> d;
        std::size_t count = Polynomial::monomial_basis(n, d).size();
        std::vector<Polynomial> eqs;
        for (int j = 0; j < n - m; ++j) {
            std::vector<double> c(count);
            for (auto& x : c) is >> x;
            if (!is) throw ConfigError("read_variety: truncated coefficient list");
            eqs.push_back(Polynomial::from_coefficients(n, d, c));
        }
        return Variety::polynomial(n, std::move(eqs), d);
    }
    throw ConfigError("read_variety: unknown kind '" + kind + "'");
}

}  // namespace kakeya
