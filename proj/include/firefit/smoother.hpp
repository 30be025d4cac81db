#pragma once

#include <string>
#include <vector>

#include "firefit/constraint.hpp"
#include "firefit/pcg.hpp"
#include "firefit/spectral.hpp"

namespace firefit {

struct SmootherConfig {
    double alpha = 1.4;
    double rho = 1.0;
    double pcg_tol = 1e-4;
    std::size_t pcg_maxit = 200;

    void validate() const;
};

struct InitialField {
    ScalarField T;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> history;
    double violation = 0.0;
    std::string warning;
};

/// L v = P (S P v) + rho (I - P) v on the constraint nullspace formulation.
LinearMap constrained_operator(const ConstraintSystem& c, const SpectralOperator& s, double rho);

/// M r = P P_Z S+ P_Z P r, with P_Z removing the mean.
LinearMap nullspace_preconditioner(const ConstraintSystem& c, const SpectralOperator& s);

/// Right-hand side P f0 with f0 = -S u0 (no load term).
std::vector<double> constrained_rhs(const ConstraintSystem& c, const SpectralOperator& s,
                                    const ScalarField& u0);

/// Minimizes 1/2 <S T, T> subject to H T = g. The result is u0 + P v, so the
/// constraint holds to rounding whatever the PCG accuracy. Non-convergence is
/// reported through `warning`, the iterate is still returned.
InitialField solve_initial(const ConstraintSystem& c, const SpectralOperator& s,
                           const SmootherConfig& cfg);

/// |T(node) - mean of its existing 4-neighbours|; the sharp-funnel indicator.
double funnel_metric(const ScalarField& T, std::size_t node);

}  // namespace firefit
