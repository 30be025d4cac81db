#pragma once

#include <functional>
#include <span>
#include <vector>

namespace firefit {

using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

struct PcgResult {
    std::vector<double> x;
    std::size_t iterations = 0;
    /// sqrt(<r, M r>) at the start and after every iteration.
    std::vector<double> history;
    bool converged = false;
};

/// Preconditioned conjugate gradients from a zero initial guess. Stops once
/// sqrt(<r, Mr>) <= tol * sqrt(<b, Mb>) or after maxit iterations. Throws
/// SolverBreakdown when a search direction has non-positive curvature.
PcgResult pcg(const LinearMap& op, const LinearMap& precond, std::span<const double> rhs,
              double tol, std::size_t maxit);

/// Identity preconditioner.
void identity_map(std::span<const double> in, std::span<double> out);

}  // namespace firefit
