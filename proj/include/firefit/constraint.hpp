#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "firefit/grid.hpp"

namespace firefit {

struct PerimeterPoint {
    double x = 0.0;
    double y = 0.0;
    double time = 0.0;
};

/// Observed perimeter: points with their arrival times. A single point is an
/// ignition. Points usually share one time, but generated cases carry the time
/// read off the reference field at each point.
struct Perimeter {
    std::vector<PerimeterPoint> points;

    static Perimeter at_time(std::span<const std::array<double, 2>> xy, double time);
    static Perimeter ignition(double x, double y, double time);
};

struct TrianglePoint {
    std::size_t triangle = 0;
    std::array<std::size_t, 3> nodes{};
    std::array<double, 3> weights{};
};

/// Cells are split along the (i, j)-(i+1, j+1) diagonal. Triangle 2c covers
/// s >= t (below the diagonal), 2c + 1 covers t > s, with c the cell index
/// cj * (nx - 1) + ci. Points on grid lines go to the lower-left cell.
TrianglePoint locate_point(const Grid& grid, double px, double py);

/// Condensed sparse constraint H T = g with a factorized Gram matrix H H'.
/// Immutable after construction.
class ConstraintSystem {
public:
    struct Entry {
        std::size_t node;
        double coef;
    };

    ConstraintSystem(const Grid& grid, std::vector<std::vector<Entry>> rows,
                     std::vector<double> rhs, std::vector<std::size_t> counts = {});

    const Grid& grid() const { return grid_; }
    std::size_t rows() const { return rows_.size(); }
    std::span<const Entry> row(std::size_t r) const { return rows_[r]; }
    const std::vector<double>& rhs() const { return rhs_; }
    /// Number of perimeter points condensed into each row.
    const std::vector<std::size_t>& counts() const { return counts_; }
    /// Sorted node indices carrying a nonzero coefficient.
    const std::vector<std::size_t>& constrained_nodes() const { return support_; }
    /// Row indices touching node k.
    std::span<const std::size_t> rows_of(std::size_t k) const;

    std::vector<double> apply(std::span<const double> T) const;
    /// H' y accumulated into out.
    void apply_transpose_add(std::span<const double> y, std::span<double> out,
                             double scale = 1.0) const;
    /// Solves (H H') x = b in place.
    void solve_gram(std::span<double> b) const;

    /// max |H T - g| / max(1, max |g|)
    double relative_violation(std::span<const double> T) const;

    /// Minimum-norm u0 with H u0 = g.
    ScalarField feasible_point() const;
    /// v - H'(HH')^{-1} H v
    ScalarField project_nullspace(const ScalarField& v) const;
    void project_nullspace_inplace(std::span<double> v) const;

    /// Dense copy, for tests and diagnostics.
    std::vector<std::vector<double>> dense() const;

private:
    void factorize();

    Grid grid_;
    std::vector<std::vector<Entry>> rows_;
    std::vector<double> rhs_;
    std::vector<std::size_t> counts_;
    std::vector<std::size_t> support_;
    std::vector<std::size_t> node_row_ptr_;
    std::vector<std::size_t> node_rows_;
    std::vector<double> chol_;  // lower factor of H H', row-major m x m
};

/// One row per (perimeter, triangle) pair that receives points: the sum of the
/// points' barycentric rows, with g the sum of their times. Rows are ordered by
/// perimeter index, then triangle id. Throws OutOfDomain naming the offending
/// point and RankDeficient if H H' is numerically singular.
ConstraintSystem build_constraints(const Grid& grid, std::span<const Perimeter> perimeters);

/// Relative pivot tolerance for the Gram Cholesky factorization.
inline constexpr double kGramPivotTolerance = 1e-12;

}  // namespace firefit
