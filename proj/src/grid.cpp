#include "firefit/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace firefit {

Grid make_grid(std::size_t nx, std::size_t ny, double dx, double dy, double x0, double y0) {
    if (nx < 2 || ny < 2) {
        std::ostringstream msg;
        msg << "grid needs at least 2 nodes per axis, got " << nx << "x" << ny;
        throw InvalidDimension(msg.str());
    }
    if (!(dx > 0.0) || !(dy > 0.0) || !std::isfinite(dx) || !std::isfinite(dy)) {
        throw InvalidDimension("grid steps must be positive and finite");
    }
    if (!std::isfinite(x0) || !std::isfinite(y0)) {
        throw InvalidDimension("grid origin must be finite");
    }
    return Grid{nx, ny, dx, dy, x0, y0};
}

ScalarField::ScalarField(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw ShapeMismatch("field has " + std::to_string(values_.size()) +
                            " values, grid has " + std::to_string(grid_.size()) + " nodes");
    }
}

bool ScalarField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](double v) { return std::isfinite(v); });
}

void require_same_grid(const Grid& expected, const Grid& actual, const char* what) {
    if (!(expected == actual)) {
        throw ShapeMismatch(std::string(what) + ": field is not on the expected grid");
    }
}

double bilinear(const ScalarField& f, double px, double py) {
    const Grid& g = f.grid();
    if (!g.contains(px, py)) {
        std::ostringstream msg;
        msg << "point (" << px << ", " << py << ") is outside the grid";
        throw OutOfDomain(msg.str());
    }
    const double u = (px - g.x0) / g.dx;
    const double v = (py - g.y0) / g.dy;
    const auto i = std::min(static_cast<std::size_t>(u), g.nx - 2);
    const auto j = std::min(static_cast<std::size_t>(v), g.ny - 2);
    const double s = u - static_cast<double>(i);
    const double t = v - static_cast<double>(j);
    return (1 - s) * (1 - t) * f.at(i, j) + s * (1 - t) * f.at(i + 1, j) +
           (1 - s) * t * f.at(i, j + 1) + s * t * f.at(i + 1, j + 1);
}

double upwind_gradient_norm_at(const Grid& g, std::span<const double> T, std::size_t i,
                               std::size_t j) {
    const std::size_t k = g.index(i, j);
    const double c = T[k];
    double ax = 0.0;
    if (i > 0) ax = std::max(ax, (c - T[k - 1]) / g.dx);
    if (i + 1 < g.nx) ax = std::max(ax, (c - T[k + 1]) / g.dx);
    double ay = 0.0;
    if (j > 0) ay = std::max(ay, (c - T[k - g.nx]) / g.dy);
    if (j + 1 < g.ny) ay = std::max(ay, (c - T[k + g.nx]) / g.dy);
    return std::sqrt(ax * ax + ay * ay);
}

ScalarField upwind_gradient_norm(const ScalarField& T) {
    const Grid& g = T.grid();
    ScalarField out(g);
    const auto src = T.values();
    const auto ny = static_cast<std::ptrdiff_t>(g.ny);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            out.at(i, static_cast<std::size_t>(j)) =
                upwind_gradient_norm_at(g, src, i, static_cast<std::size_t>(j));
        }
    }
    return out;
}

namespace serial {

ScalarField upwind_gradient_norm(const ScalarField& T) {
    const Grid& g = T.grid();
    ScalarField out(g);
    for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            // Written out independently of upwind_gradient_norm_at.
            const double c = T.at(i, j);
            const double left = i > 0 ? (c - T.at(i - 1, j)) / g.dx : 0.0;
            const double right = i + 1 < g.nx ? (c - T.at(i + 1, j)) / g.dx : 0.0;
            const double down = j > 0 ? (c - T.at(i, j - 1)) / g.dy : 0.0;
            const double up = j + 1 < g.ny ? (c - T.at(i, j + 1)) / g.dy : 0.0;
            const double ax = std::max({left, right, 0.0});
            const double ay = std::max({down, up, 0.0});
            out.at(i, j) = std::sqrt(ax * ax + ay * ay);
        }
    }
    return out;
}

}  // namespace serial

double local_minimum_depth(const Grid& g, std::span<const double> T, std::size_t k) {
    const std::size_t i = g.col(k);
    const std::size_t j = g.row(k);
    double lowest = std::numeric_limits<double>::infinity();
    if (i > 0) lowest = std::min(lowest, T[k - 1]);
    if (i + 1 < g.nx) lowest = std::min(lowest, T[k + 1]);
    if (j > 0) lowest = std::min(lowest, T[k - g.nx]);
    if (j + 1 < g.ny) lowest = std::min(lowest, T[k + g.nx]);
    return T[k] < lowest ? lowest - T[k] : 0.0;
}

std::size_t count_local_minima(const ScalarField& T, std::span<const std::size_t> excluded) {
    const Grid& g = T.grid();
    std::vector<char> skip(g.size(), 0);
    for (std::size_t k : excluded) {
        if (k >= g.size()) throw OutOfDomain("excluded node index outside the grid");
        skip[k] = 1;
    }
    std::size_t count = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!skip[k] && local_minimum_depth(g, T.values(), k) > 0.0) ++count;
    }
    return count;
}

}  // namespace firefit
