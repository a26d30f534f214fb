#pragma once

#include "kakeya/norms.hpp"
#include "kakeya/polynomial.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

namespace kakeya {

struct PartitionCell {
    int id = -1;
    int sign = 0;
    std::vector<std::size_t> members;  // sorted grid indices
    double mass = 0;
    double diameter = 0;
};

// Cells of a polynomial partition of a grid domain. The polynomial is kept
// as a product of factors, one per bisection step.
struct Partition {
    GridSpec grid;
    std::vector<Polynomial> factors;
    std::vector<std::size_t> domain;  // sorted grid indices
    std::vector<int> label;           // per domain position: cell id, or -1 on the wall
    std::vector<PartitionCell> cells;
    double total_mass = 0;
    double wall_mass = 0;
    int steps = 0;                       // number of bisection steps S
    std::vector<double> step_objective;  // largest half mass / target, per step
    bool converged = false;
    double deviation = 0;  // max cell mass * 2^S / total - 1

    // Filled by shrunken_cells.
    double shrink_delta = 0;
    std::vector<int> shrunken_label;

    int degree() const;
    Polynomial polynomial() const;
    double eval(const Vec& x) const;  // product of the factors
    int cell_of(std::size_t grid_index) const;
    int shrunken_cell_of(std::size_t grid_index) const;
    std::size_t class_count() const { return std::size_t{1} << steps; }
};

// Non-convergence; carries the best partition found.
struct PartitionFailure : AssertionFailure {
    PartitionFailure(const std::string& what, std::shared_ptr<Partition> best)
        : AssertionFailure(what), best(std::move(best)) {}
    std::shared_ptr<Partition> best;
};

struct PartitionOptions {
    int D = 4;
    double tol = 0.25;
    std::uint64_t seed = 0;
    int restarts = 400;
    int iterations = 30;
};

// Degrees of the successive bisecting factors for a total degree budget D.
std::vector<int> bisection_degrees(int n, int D);

// Masses are given per grid cell (over the domain).
Partition partition_mass(const GridSpec& grid, const std::vector<std::size_t>& domain,
                         const std::vector<double>& mass, const PartitionOptions& opt);
// Field values times cell volume, whole grid as domain.
Partition partition_mass(const GridField& field, int D, double tol, std::uint64_t seed);
// Unit point masses, each assigned to the grid cell containing it.
Partition partition_points(const std::vector<Vec>& points, const GridSpec& grid, int D, double tol, std::uint64_t seed);

// Removes grid cells within delta (clamped to >= h) of the wall; keeps cell ids.
std::vector<PartitionCell> shrunken_cells(Partition& partition, double delta);

// Distinct shrunken cells met by the tube. Throws AssertionFailure above deg P + 1.
std::vector<int> tube_cell_crossings(const Tube& tube, const Partition& partition);

// Ids of cells holding at least half the average cell mass.
std::vector<int> refined_cells(const Partition& partition);

struct CaseResult {
    enum class Kind { Cellular, Algebraic };
    Kind kind = Kind::Cellular;
    Partition partition;
    std::vector<int> refined;       // cellular case
    Polynomial wall;                // algebraic case: the wall polynomial
    double refined_mass_ratio = 0;  // refined cell mass / total
    double wall_mass_ratio = 0;     // mass within delta of the wall / total
};

// Algebraic when at least half the mass sits within delta of a degree <= D curve
// fitted to it, or when refinement keeps less than half the mass.
CaseResult cellular_or_algebraic(const GridSpec& grid, const std::vector<std::size_t>& domain,
                                 const std::vector<double>& mass, int m, double delta, const PartitionOptions& opt);
CaseResult cellular_or_algebraic(const GridField& field, int m, int D, double delta, std::uint64_t seed);

// Least-squares curve of degree <= D through weighted points (smallest eigenvector).
Polynomial fit_wall(const std::vector<Vec>& points, const std::vector<double>& weights, int D);

// Coefficients (graded-lex) of the partitioning polynomial, one per line.
void write_partition_polynomial(std::ostream& os, const Partition& p);
// id,mass,diameter,grid_cells
void write_partition_cells_csv(std::ostream& os, const Partition& p);

}  // namespace kakeya
