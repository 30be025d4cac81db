#include "firefit/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace firefit {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

double axis_eigenvalue(std::size_t k, std::size_t n, double h) {
    return 2.0 / (h * h) * (1.0 - std::cos(std::numbers::pi * static_cast<double>(k) /
                                           static_cast<double>(n)));
}

}  // namespace

struct SpectralOperator::Plans {
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;

    Plans(std::size_t nx, std::size_t ny) {
        std::lock_guard lock(planner_mutex());
        double* scratch = fftw_alloc_real(nx * ny);
        const int n0 = static_cast<int>(ny);
        const int n1 = static_cast<int>(nx);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        forward = fftw_plan_r2r_2d(n0, n1, scratch, scratch, FFTW_REDFT10, FFTW_REDFT10, flags);
        inverse = fftw_plan_r2r_2d(n0, n1, scratch, scratch, FFTW_REDFT01, FFTW_REDFT01, flags);
        fftw_free(scratch);
    }
    ~Plans() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(forward);
        fftw_destroy_plan(inverse);
    }
    Plans(const Plans&) = delete;
    Plans& operator=(const Plans&) = delete;
};

SpectralOperator::SpectralOperator(const Grid& grid, double alpha, bool allow_subunit_alpha)
    : grid_(grid), alpha_(alpha) {
    if (!std::isfinite(alpha) || !(alpha > 0.0)) {
        throw InvalidArgument("fractional exponent must be positive");
    }
    if (alpha < 1.0 && !allow_subunit_alpha) {
        throw InvalidArgument("fractional exponent below 1 needs the explicit override");
    }
    eig_.resize(grid.size());
    for (std::size_t l = 0; l < grid.ny; ++l) {
        for (std::size_t k = 0; k < grid.nx; ++k) {
            const double lam = axis_eigenvalue(k, grid.nx, grid.dx) +
                               axis_eigenvalue(l, grid.ny, grid.dy);
            eig_[l * grid.nx + k] = (k == 0 && l == 0) ? 0.0 : std::pow(lam, alpha);
        }
    }
    plans_ = std::make_shared<const Plans>(grid.nx, grid.ny);
}

void SpectralOperator::scaled_roundtrip(std::span<const double> v, std::span<double> out,
                                        bool pinv) const {
    const std::size_t n = grid_.size();
    if (v.size() != n || out.size() != n) throw ShapeMismatch("spectral operand size mismatch");
    std::vector<double> work(v.begin(), v.end());
    fftw_execute_r2r(plans_->forward, work.data(), work.data());
    // REDFT10 followed by REDFT01 multiplies by 2 nx * 2 ny.
    const double norm = 1.0 / (4.0 * static_cast<double>(n));
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t m = 0; m < count; ++m) {
        const double lam = eig_[static_cast<std::size_t>(m)];
        double scale = 0.0;
        if (!pinv) {
            scale = lam;
        } else if (lam > 0.0) {
            scale = 1.0 / lam;
        }
        work[static_cast<std::size_t>(m)] *= scale * norm;
    }
    fftw_execute_r2r(plans_->inverse, work.data(), work.data());
    std::copy(work.begin(), work.end(), out.begin());
}

void SpectralOperator::apply(std::span<const double> v, std::span<double> out) const {
    scaled_roundtrip(v, out, false);
}

void SpectralOperator::apply_pinv(std::span<const double> v, std::span<double> out) const {
    scaled_roundtrip(v, out, true);
}

ScalarField SpectralOperator::apply(const ScalarField& v) const {
    require_same_grid(grid_, v.grid(), "spectral apply");
    ScalarField out(grid_);
    apply(v.values(), out.values());
    return out;
}

ScalarField SpectralOperator::apply_pinv(const ScalarField& v) const {
    require_same_grid(grid_, v.grid(), "spectral apply_pinv");
    ScalarField out(grid_);
    apply_pinv(v.values(), out.values());
    return out;
}

namespace serial {

std::vector<double> spectral_apply(const Grid& grid, double alpha, std::span<const double> v,
                                   bool pinv) {
    const std::size_t nx = grid.nx, ny = grid.ny;
    // Orthonormal DCT-II bases per axis.
    auto basis = [](std::size_t n) {
        std::vector<double> B(n * n);
        for (std::size_t k = 0; k < n; ++k) {
            const double c = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
            for (std::size_t i = 0; i < n; ++i) {
                B[k * n + i] = c * std::cos(std::numbers::pi * k * (i + 0.5) / n);
            }
        }
        return B;
    };
    const auto Bx = basis(nx);
    const auto By = basis(ny);
    std::vector<double> tmp(nx * ny, 0.0), coef(nx * ny, 0.0), out(nx * ny, 0.0);
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t k = 0; k < nx; ++k)
            for (std::size_t i = 0; i < nx; ++i) tmp[j * nx + k] += Bx[k * nx + i] * v[j * nx + i];
    for (std::size_t l = 0; l < ny; ++l)
        for (std::size_t k = 0; k < nx; ++k)
            for (std::size_t j = 0; j < ny; ++j) coef[l * nx + k] += By[l * ny + j] * tmp[j * nx + k];
    for (std::size_t l = 0; l < ny; ++l) {
        for (std::size_t k = 0; k < nx; ++k) {
            const double lam = axis_eigenvalue(k, nx, grid.dx) + axis_eigenvalue(l, ny, grid.dy);
            double s = 0.0;
            if (k != 0 || l != 0) s = pinv ? std::pow(lam, -alpha) : std::pow(lam, alpha);
            coef[l * nx + k] *= s;
        }
    }
    std::fill(tmp.begin(), tmp.end(), 0.0);
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t k = 0; k < nx; ++k)
            for (std::size_t l = 0; l < ny; ++l) tmp[j * nx + k] += By[l * ny + j] * coef[l * nx + k];
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i)
            for (std::size_t k = 0; k < nx; ++k) out[j * nx + i] += Bx[k * nx + i] * tmp[j * nx + k];
    return out;
}

}  // namespace serial

}  // namespace firefit
