#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "firefit/errors.hpp"

namespace firefit {

/// Node-registered rectangular grid. Node (i, j) sits at (x0 + i*dx, y0 + j*dy);
/// field storage is row-major with i fastest.
struct Grid {
    std::size_t nx = 0;
    std::size_t ny = 0;
    double dx = 1.0;
    double dy = 1.0;
    double x0 = 0.0;
    double y0 = 0.0;

    std::size_t size() const { return nx * ny; }
    std::size_t index(std::size_t i, std::size_t j) const { return j * nx + i; }
    std::size_t col(std::size_t k) const { return k % nx; }
    std::size_t row(std::size_t k) const { return k / nx; }
    double x(std::size_t i) const { return x0 + static_cast<double>(i) * dx; }
    double y(std::size_t j) const { return y0 + static_cast<double>(j) * dy; }
    double x_max() const { return x(nx - 1); }
    double y_max() const { return y(ny - 1); }
    double cell_area() const { return dx * dy; }

    bool contains(double px, double py) const {
        return px >= x0 && px <= x_max() && py >= y0 && py <= y_max();
    }

    friend bool operator==(const Grid&, const Grid&) = default;
};

/// Throws InvalidDimension unless nx, ny >= 2 and dx, dy > 0 (and finite).
Grid make_grid(std::size_t nx, std::size_t ny, double dx, double dy, double x0 = 0.0,
               double y0 = 0.0);

/// One real value per grid node.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Grid& grid, double fill = 0.0)
        : grid_(grid), values_(grid.size(), fill) {}
    ScalarField(const Grid& grid, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    double& operator[](std::size_t k) { return values_[k]; }
    double operator[](std::size_t k) const { return values_[k]; }
    double& at(std::size_t i, std::size_t j) { return values_[grid_.index(i, j)]; }
    double at(std::size_t i, std::size_t j) const { return values_[grid_.index(i, j)]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    std::vector<double>& data() { return values_; }
    const std::vector<double>& data() const { return values_; }

    bool all_finite() const;

private:
    Grid grid_{};
    std::vector<double> values_;
};

void require_same_grid(const Grid& expected, const Grid& actual, const char* what);

/// Bilinear interpolation of a node field at a point in the grid bounding box.
/// Throws OutOfDomain outside the box.
double bilinear(const ScalarField& f, double px, double py);

/// First-order Godunov upwind norm of the gradient:
///   sqrt(max(D-x T, -D+x T, 0)^2 + max(D-y T, -D+y T, 0)^2)
/// Edge nodes use only the one-sided difference toward the interior.
ScalarField upwind_gradient_norm(const ScalarField& T);

/// Godunov norm at a single node, the stencil shared by every caller.
double upwind_gradient_norm_at(const Grid& g, std::span<const double> T, std::size_t i,
                               std::size_t j);

/// Nodes (outside `excluded`) strictly below every existing 4-neighbor.
std::size_t count_local_minima(const ScalarField& T, std::span<const std::size_t> excluded);

/// Depth below the lowest 4-neighbor if node k is a strict local minimum, else 0.
double local_minimum_depth(const Grid& g, std::span<const double> T, std::size_t k);

namespace serial {
// Single-threaded reference kernels, kept for tests and benchmarks.
ScalarField upwind_gradient_norm(const ScalarField& T);
}  // namespace serial

}  // namespace firefit
