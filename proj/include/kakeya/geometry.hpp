#pragma once

#include "kakeya/common.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace kakeya {

// Closed cylinder of unit height and radius delta about the segment
// center + s*direction, |s| <= 1/2.
struct Tube {
    int dim = 0;
    double delta = 0;
    Vec direction;
    Vec center;

    bool contains(const Vec& x) const;
    bool contains(const double* x) const;
    double volume() const;  // |T| = omega_{n-1} delta^{n-1}
};

Tube make_tube(const Vec& direction, const Vec& center, double delta);

struct TubeFamily {
    int dim = 0;
    double delta = 0;
    std::vector<Tube> tubes;
    bool separated = false;

    std::size_t size() const { return tubes.size(); }
    double total_volume() const;
    // Smallest pairwise line angle; +inf for fewer than two tubes.
    double min_pairwise_angle() const;
};

struct Cap {
    Vec center;
    double radius = 0;

    bool contains(const Vec& v) const;
};

// Orthonormal basis stored as columns.
struct Subspace {
    Mat basis;

    int ambient() const { return static_cast<int>(basis.rows()); }
    int dim() const { return static_cast<int>(basis.cols()); }
    Vec project(const Vec& v) const { return basis * (basis.transpose() * v); }

    // Orthonormalizes the given spanning vectors; rejects dependent input.
    static Subspace span(const std::vector<Vec>& vectors);
};

// Angle in [0, pi] between two vectors.
double vector_angle(const Vec& u, const Vec& v);
// Unsigned angle in [0, pi/2] between the lines spanned by u and v.
double line_angle(const Vec& u, const Vec& v);

double angle_to_subspace(const Vec& v, const Subspace& V);
// inf over the cap of the angle to V.
double cap_angle_to_subspace(const Cap& cap, const Subspace& V);

// Maximal greedy delta-separated set of line directions.
std::vector<Vec> direction_net(int n, double delta, std::uint64_t seed);

TubeFamily make_direction_separated_family(int n, double delta, std::uint64_t seed);

std::vector<Cap> cap_decomposition(int n, double beta);
// Number of caps containing v.
int cap_multiplicity(const std::vector<Cap>& caps, const Vec& v);
// Lowest index of a cap containing v, or -1.
int cap_index(const std::vector<Cap>& caps, const Vec& v);

// One sub-family per cap (same order as caps).
std::vector<TubeFamily> bucket_by_cap(const TubeFamily& family, const std::vector<Cap>& caps);
// Cap index per tube.
std::vector<int> cap_assignment(const TubeFamily& family, const std::vector<Cap>& caps);

struct AffineMap {
    Mat linear;
    Vec offset;

    Vec apply(const Vec& x) const { return linear * x + offset; }
};

// Fixes span(omega) and dilates its orthogonal complement by 1/beta about origin.
AffineMap rescale_cap_map(const Cap& cap, const Vec& origin);
AffineMap rescale_cap_map(const Cap& cap);

// Tubes of radius delta/beta and unit height whose union contains L(T).
std::vector<Tube> cover_mapped_tube(const Tube& t, const AffineMap& L, double beta);

// Image of a bucket under the cap rescaling, covered tube by tube.
TubeFamily rescale_bucket(const TubeFamily& bucket, const Cap& cap);

void write_family(std::ostream& os, const TubeFamily& family);
TubeFamily read_family(std::istream& is);

}  // namespace kakeya
