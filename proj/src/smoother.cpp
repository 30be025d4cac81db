#include "firefit/smoother.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace firefit {

void SmootherConfig::validate() const {
    if (!(alpha > 0.0) || !(rho > 0.0) || !(pcg_tol > 0.0) || pcg_maxit == 0) {
        throw InvalidArgument("smoother config: alpha, rho, pcg_tol, pcg_maxit must be positive");
    }
}

namespace {

void remove_mean(std::span<double> v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    for (double& x : v) x -= mean;
}

}  // namespace

LinearMap constrained_operator(const ConstraintSystem& c, const SpectralOperator& s, double rho) {
    return [&c, &s, rho](std::span<const double> v, std::span<double> out) {
        std::vector<double> pv(v.begin(), v.end());
        c.project_nullspace_inplace(pv);
        std::vector<double> spv(v.size());
        s.apply(pv, spv);
        c.project_nullspace_inplace(spv);
        for (std::size_t i = 0; i < v.size(); ++i) {
            out[i] = spv[i] + rho * (v[i] - pv[i]);
        }
    };
}

LinearMap nullspace_preconditioner(const ConstraintSystem& c, const SpectralOperator& s) {
    return [&c, &s](std::span<const double> r, std::span<double> out) {
        std::vector<double> w(r.begin(), r.end());
        c.project_nullspace_inplace(w);
        remove_mean(w);
        s.apply_pinv(w, out);
        remove_mean(out);
        c.project_nullspace_inplace(out);
    };
}

std::vector<double> constrained_rhs(const ConstraintSystem& c, const SpectralOperator& s,
                                    const ScalarField& u0) {
    std::vector<double> f0(u0.size());
    s.apply(u0.values(), f0);
    for (double& x : f0) x = -x;
    c.project_nullspace_inplace(f0);
    return f0;
}

InitialField solve_initial(const ConstraintSystem& c, const SpectralOperator& s,
                           const SmootherConfig& cfg) {
    cfg.validate();
    require_same_grid(c.grid(), s.grid(), "solve_initial");
    const ScalarField u0 = c.feasible_point();
    const auto rhs = constrained_rhs(c, s, u0);
    auto res = pcg(constrained_operator(c, s, cfg.rho), nullspace_preconditioner(c, s), rhs,
                   cfg.pcg_tol, cfg.pcg_maxit);
    c.project_nullspace_inplace(res.x);
    InitialField out{u0, res.iterations, res.converged, std::move(res.history), 0.0, {}};
    for (std::size_t k = 0; k < u0.size(); ++k) out.T[k] += res.x[k];
    out.violation = c.relative_violation(out.T.values());
    if (!res.converged) {
        std::ostringstream msg;
        msg << "PCG stopped after " << res.iterations << " iterations at relative residual "
            << out.history.back() / out.history.front();
        out.warning = msg.str();
    }
    return out;
}

double funnel_metric(const ScalarField& T, std::size_t node) {
    const Grid& g = T.grid();
    const std::size_t i = g.col(node), j = g.row(node);
    double sum = 0.0;
    int n = 0;
    if (i > 0) { sum += T[node - 1]; ++n; }
    if (i + 1 < g.nx) { sum += T[node + 1]; ++n; }
    if (j > 0) { sum += T[node - g.nx]; ++n; }
    if (j + 1 < g.ny) { sum += T[node + g.nx]; ++n; }
    return std::abs(T[node] - sum / n);
}

}  // namespace firefit
