#pragma once

#include <memory>
#include <span>
#include <vector>

#include "firefit/grid.hpp"

namespace firefit {

/// S = A^alpha where A is the node graph Laplacian with Neumann (reflecting)
/// boundary: interior rows (2u_i - u_{i-1} - u_{i+1})/h^2, edge rows (u_0 - u_1)/h^2,
/// summed over both axes. Diagonalized by the 2-D DCT-II with mode eigenvalues
///   lambda_kl = [(2/dx^2)(1 - cos(pi k/nx)) + (2/dy^2)(1 - cos(pi l/ny))]^alpha.
/// Constants span the nullspace. Copies share the transform plans.
class SpectralOperator {
public:
    /// alpha >= 1 unless allow_subunit_alpha is set.
    SpectralOperator(const Grid& grid, double alpha, bool allow_subunit_alpha = false);

    const Grid& grid() const { return grid_; }
    double alpha() const { return alpha_; }
    /// Mode eigenvalue (already raised to alpha), mode (k, l) at l * nx + k.
    double eigenvalue(std::size_t k, std::size_t l) const { return eig_[l * grid_.nx + k]; }

    void apply(std::span<const double> v, std::span<double> out) const;
    /// Inverse on the complement of the constants; the constant mode maps to 0.
    void apply_pinv(std::span<const double> v, std::span<double> out) const;

    ScalarField apply(const ScalarField& v) const;
    ScalarField apply_pinv(const ScalarField& v) const;

private:
    struct Plans;
    void scaled_roundtrip(std::span<const double> v, std::span<double> out, bool pinv) const;

    Grid grid_;
    double alpha_;
    std::vector<double> eig_;
    std::shared_ptr<const Plans> plans_;
};

namespace serial {
/// Reference S / S+ by explicit cosine sums (O(n^3)); no FFT.
std::vector<double> spectral_apply(const Grid& grid, double alpha, std::span<const double> v,
                                   bool pinv);
}  // namespace serial

}  // namespace firefit
