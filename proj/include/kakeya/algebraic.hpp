#pragma once

#include "kakeya/geometry.hpp"
#include "kakeya/polynomial.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

namespace kakeya {

struct DistanceResult {
    double value = std::numeric_limits<double>::infinity();
    bool approximate = false;
    bool diverged = false;
    Vec nearest;
};

// Affine subspace, or a transverse complete intersection Z(P_1..P_{n-m}).
class Variety {
public:
    enum class Kind { Affine, Polynomial };

    static Variety plane(const Vec& basepoint, const std::vector<Vec>& directions);
    static Variety whole_space(int n);
    static Variety polynomial(int n, std::vector<Polynomial> equations, int degree_bound);

    Kind kind() const { return kind_; }
    bool is_affine() const { return kind_ == Kind::Affine; }
    int ambient_dim() const { return n_; }
    int dim() const { return m_; }
    int degree_bound() const { return d_; }

    const Vec& basepoint() const { return base_; }
    const Mat& basis() const { return basis_; }  // n x m, orthonormal columns
    const std::vector<Polynomial>& equations() const { return eqs_; }

    // Exact for affine varieties. For polynomial ones: Gauss-Newton projection
    // plus tangent steps (50 iterations) from x and deterministic perturbations
    // of x; the smallest distance found is an upper bound.
    DistanceResult distance(const Vec& x, int starts = 4) const;
    double distance_to(const Vec& x) const { return distance(x).value; }

    Subspace tangent_space(const Vec& z) const;

    Vec residual(const Vec& x) const;
    Mat jacobian(const Vec& x) const;

private:
    bool project(Vec& z) const;

    Kind kind_ = Kind::Affine;
    int n_ = 0;
    int m_ = 0;
    int d_ = 1;
    Vec base_;
    Mat basis_;
    std::vector<Polynomial> eqs_;
};

struct TangencyReport {
    int tube_id = -1;
    bool condition_i = false;
    bool condition_ii = false;
    bool undecidable = false;  // no witness pair found for condition ii
    double worst_angle = 0;
    double c_tang = 1;
    Vec witness;  // point of T realising the worst angle

    bool is_tangent() const { return condition_i && condition_ii; }
};

// verdict_only stops at the first angle that rules tangency out; worst_angle
// is then a lower bound.
TangencyReport is_tangent_tube(const Tube& T, const Variety& V, const Vec& x0, double r,
                               double c_tang = 1.0, int tube_id = -1, bool verdict_only = false);

// Largest distance to V over sampled points of T inside B(x0, 2r).
double max_distance_in_ball(const Tube& T, const Variety& V, const Vec& x0, double r);

enum class WongkewMode {
    NeighborhoodOfPiece,  // N_rho(V cap B_lambda)
    PieceOfNeighborhood,  // N_rho V cap B_lambda
};

struct VolumeEstimate {
    double volume = 0;
    double stderr_ = 0;
    double ratio = 0;  // volume / (lambda^m rho^{n-m})
    std::size_t samples = 0;
    std::size_t hits = 0;
};

VolumeEstimate wongkew_volume(const Variety& V, double lambda, double rho, const Vec& center,
                              std::size_t samples, std::uint64_t seed,
                              WongkewMode mode = WongkewMode::NeighborhoodOfPiece);

// Leading-order volume of N_rho(m-plane) inside B_lambda: c_m lambda^m c_{n-m} rho^{n-m}.
double wongkew_reference(int n, int m, double lambda, double rho);

// Fraction of the core segment of T inside B(center, lambda) cap N_rho V.
double tube_occupancy(const Tube& T, const Vec& center, double lambda, const Variety& V, double rho);

void write_variety(std::ostream& os, const Variety& V);
Variety read_variety(std::istream& is);

}  // namespace kakeya
