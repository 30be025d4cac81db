#include "firefit/pcg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "firefit/errors.hpp"

namespace firefit {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

void identity_map(std::span<const double> in, std::span<double> out) {
    std::copy(in.begin(), in.end(), out.begin());
}

PcgResult pcg(const LinearMap& op, const LinearMap& precond, std::span<const double> rhs,
              double tol, std::size_t maxit) {
    const std::size_t n = rhs.size();
    PcgResult res;
    res.x.assign(n, 0.0);
    std::vector<double> r(rhs.begin(), rhs.end()), z(n), p(n), Ap(n);
    precond(r, z);
    double rz = dot(r, z);
    if (rz < 0.0) throw SolverBreakdown("preconditioner is not positive semidefinite");
    const double norm0 = std::sqrt(rz);
    res.history.push_back(norm0);
    if (norm0 == 0.0) {
        res.converged = true;
        return res;
    }
    p = z;
    while (res.iterations < maxit) {
        op(p, Ap);
        const double curvature = dot(p, Ap);
        if (!(curvature > 0.0)) {
            std::ostringstream msg;
            msg << "PCG breakdown: <Ap, p> = " << curvature << " at iteration " << res.iterations;
            throw SolverBreakdown(msg.str());
        }
        const double step = rz / curvature;
        for (std::size_t i = 0; i < n; ++i) {
            res.x[i] += step * p[i];
            r[i] -= step * Ap[i];
        }
        ++res.iterations;
        precond(r, z);
        const double rz_next = dot(r, z);
        const double norm = std::sqrt(std::max(rz_next, 0.0));
        res.history.push_back(norm);
        if (norm <= tol * norm0) {
            res.converged = true;
            break;
        }
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    return res;
}

}  // namespace firefit
