#pragma once

#include "kakeya/geometry.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace kakeya {

// Regular grid of cubes of side h; axis 0 varies slowest.
struct GridSpec {
    int dim = 0;
    Vec lo;
    double h = 0;
    std::vector<long> extent;

    static GridSpec covering(const Vec& lo, const Vec& hi, double h);

    std::size_t size() const;
    std::vector<long> coords(std::size_t idx) const;
    std::size_t index(const std::vector<long>& c) const;
    bool in_range(const std::vector<long>& c) const;
    Vec center(std::size_t idx) const;
    Vec hi() const;
    double cell_volume() const;
};

struct GridField {
    GridSpec grid;
    std::vector<double> values;

    double mass() const;  // h^n * sum of values
};

// Axis-aligned box containing every tube of the family.
std::pair<Vec, Vec> family_bounds(const TubeFamily& family);

// Grid cells (clipped to the grid) whose centers lie in the closed tube.
void tube_cells(const Tube& tube, const GridSpec& grid, std::vector<std::size_t>& out);

GridField rasterize(const TubeFamily& family, double h, const Vec& lo, const Vec& hi);
GridField rasterize(const TubeFamily& family, double h);

double lp_norm(const GridField& field, double p);
// Norm restricted to the listed cells.
double lp_norm(const GridField& field, double p, const std::vector<std::size_t>& cells);

// ||sum chi_T||_p / (delta^{-(n-1-n/p)} (sum |T|)^{1/p}).
double kakeya_ratio(const TubeFamily& family, double p, double h);

// For every grid cell, the ids of the tubes whose closed cylinder contains its center.
struct Incidence {
    GridSpec grid;
    std::vector<std::size_t> offsets;  // size grid.size()+1
    std::vector<int> ids;

    std::size_t count(std::size_t cell) const { return offsets[cell + 1] - offsets[cell]; }
};

Incidence build_incidence(const TubeFamily& family, const GridSpec& grid);

struct BroadConfig {
    int k = 2;
    int A = 1;
    double beta = 0.125;
    double p = 2.0;
    // Extra (k-1)-dimensional subspaces added to the default candidate list.
    std::vector<Subspace> candidates;
    bool default_candidates = true;
};

// Spans of (k-1)-subsets of cap centers (at most max_count, chosen deterministically).
std::vector<Subspace> cap_span_candidates(const std::vector<Cap>& caps, int k, std::size_t max_count = 4096);

// Lattice of balls of radius delta, centers on a delta-spaced sub-lattice of grid cell centers.
class BallCover {
public:
    BallCover(const GridSpec& grid, double delta);

    std::size_t ball_count() const { return nballs_; }
    // Grid cells inside the ball (clipped to the grid).
    void cells(std::size_t ball, std::vector<std::size_t>& out) const;
    // Balls containing the cell.
    void balls_of(std::size_t cell, std::vector<std::size_t>& out) const;
    int multiplicity(std::size_t cell) const;
    std::size_t stencil_size() const { return stencil_.size(); }
    Vec ball_center(std::size_t ball) const;
    double radius() const { return radius_; }

private:
    GridSpec grid_;
    double radius_;
    long stride_;
    std::vector<long> lat_lo_, lat_extent_;
    std::size_t nballs_ = 0;
    std::vector<std::vector<long>> stencil_;
    std::vector<int> mult_by_residue_;
    std::size_t residue_index(const std::vector<long>& c) const;
};

// Broad-norm machinery for one family on one grid.
class BroadEvaluator {
public:
    BroadEvaluator(const TubeFamily& family, const BroadConfig& cfg, double h);
    BroadEvaluator(const TubeFamily& family, const BroadConfig& cfg, const GridSpec& grid);

    const GridSpec& grid() const { return inc_.grid; }
    const Incidence& incidence() const { return inc_; }
    const BallCover& cover() const { return cover_; }
    const std::vector<Cap>& caps() const { return caps_; }
    const std::vector<int>& tube_caps() const { return tube_cap_; }
    const std::vector<Subspace>& candidates() const { return cands_; }
    const BroadConfig& config() const { return cfg_; }
    std::size_t tube_count() const { return tube_cap_.size(); }

    // Per-cap local L^p masses on a ball (partition-of-unity weighted).
    std::vector<std::pair<int, double>> cap_masses(std::size_t ball, const std::vector<char>* tubes) const;
    // mu(B) with the given A; tubes == nullptr means all tubes.
    double mu(std::size_t ball, const std::vector<char>* tubes, int A) const;
    double mu(std::size_t ball) const { return mu(ball, nullptr, cfg_.A); }
    // Exact min over A-tuples of candidates of the largest surviving cap mass.
    double mu_of(std::vector<std::pair<int, double>> masses, int A) const;

    // BL^p over a region (sorted grid cell list); empty region pointer = whole grid.
    double broad_power(const std::vector<std::size_t>* region, const std::vector<char>* tubes, int A) const;
    double broad_norm(const std::vector<std::size_t>* region, const std::vector<char>* tubes, int A) const;

    // Per-cell density whose sum is BL^p(region): mu(B)|B cap U|/|B| spread over B cap U.
    std::vector<double> broad_density(const std::vector<std::size_t>& region, const std::vector<char>* tubes,
                                      int A) const;

    // ||sum chi_T||_p^p over a region for a tube subset.
    double lp_power(const std::vector<std::size_t>* region, const std::vector<char>* tubes, double p) const;
    // sum over caps of ||f_tau||_p^p on the whole grid.
    double narrow_power() const;
    // Bilinear (k=2) quantity: sum over cells and beta-transverse cap pairs of (f_tau f_tau')^{p/2}.
    double bilinear_power() const;

private:
    bool coverable(const std::vector<int>& caps, std::size_t upto, int A, std::vector<char>& covered) const;

    BroadConfig cfg_;
    Incidence inc_;
    BallCover cover_;
    std::vector<Cap> caps_;
    std::vector<int> tube_cap_;
    std::vector<Subspace> cands_;
    std::vector<std::vector<int>> killers_;  // per cap: candidates within beta
};

double k_broad_norm(const TubeFamily& family, const BroadConfig& cfg, double h,
                    const std::vector<std::size_t>* region = nullptr);

double broad_mu(const TubeFamily& family, const Vec& ball_center, const BroadConfig& cfg, double h);

struct VanishingResult {
    bool vanishes = false;
    double norm = 0;
    std::vector<std::string> violations;  // precondition failures
};

// Family tangent to V in B(x0, r): checks tangency, injects T_z V spans and
// returns whether BL^p over the ball is exactly zero.
VanishingResult vanishing_check(const TubeFamily& family, const class Variety& V, const Vec& x0, double r,
                                BroadConfig cfg, double eps0 = 0.1, double c_tang = 1.0);

struct NarrowProblem {
    Cap cap;
    TubeFamily bucket;
    TubeFamily rescaled;
};

struct SplitResult {
    double lp_power = 0;
    double broad_term = 0;
    double narrow_sum = 0;
    double rhs = 0;
    double constant = 0;  // lp_power / rhs
    std::vector<NarrowProblem> narrow;
};

// Refuses p below (n-k+2)/(n-k+1).
SplitResult broad_narrow_split(const TubeFamily& family, const BroadConfig& cfg, double h);

void write_field_binary(std::ostream& os, const GridField& field);
GridField read_field_binary(std::istream& is);
// CSV "x,y,value" slice through the field at the given cell index of the remaining axes.
void write_field_slice_csv(std::ostream& os, const GridField& field, int axis0 = 0, int axis1 = 1);

}  // namespace kakeya
