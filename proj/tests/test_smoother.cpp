#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "firefit/concentric.hpp"
#include "firefit/constraint.hpp"
#include "firefit/errors.hpp"
#include "firefit/pcg.hpp"
#include "firefit/smoother.hpp"
#include "firefit/spectral.hpp"
#include "support.hpp"

using namespace firefit;

namespace {

std::vector<Perimeter> rings(double cx, double cy, double r1, double r2,
                             double shift = 0.0) {
    std::vector<std::array<double, 2>> a, b;
    for (int k = 0; k < 48; ++k) {
        const double th = 2.0 * std::numbers::pi * k / 48.0;
        a.push_back({cx + r1 * std::cos(th), cy + r1 * std::sin(th)});
        b.push_back({cx + r2 * std::cos(th), cy + r2 * std::sin(th)});
    }
    return {Perimeter::ignition(cx, cy, shift), Perimeter::at_time(a, r1 + shift),
            Perimeter::at_time(b, r2 + shift)};
}

double relative(std::span<const double> a, const Eigen::VectorXd& b) {
    return test::max_abs_diff(a, std::span<const double>(b.data(), b.size())) /
           std::max(1e-300, b.cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("spectral operator annihilates constants") {
    const Grid g = make_grid(12, 9, 1, 1);
    const SpectralOperator S(g, 1.4);
    const auto out = S.apply(ScalarField(g, 3.0));
    CHECK(test::max_abs(out.values()) < 1e-12);
}

TEST_CASE("alpha = 1 reproduces the 5-point Neumann Laplacian") {
    for (const Grid g : {make_grid(8, 8, 1, 1), make_grid(8, 6, 0.5, 2.0)}) {
        const SpectralOperator S(g, 1.0);
        const Eigen::MatrixXd A = test::neumann_laplacian(g);
        for (std::uint64_t seed : {1, 2, 3}) {
            const auto v = test::random_field(g, seed);
            const auto out = S.apply(v);
            CHECK(relative(out.values(), A * test::to_eigen(v.values())) < 1e-12);
        }
    }
}

TEST_CASE("fractional powers match a dense eigendecomposition") {
    const Grid g = make_grid(7, 5, 1.0, 1.5);
    const Eigen::MatrixXd A = test::neumann_laplacian(g);
    for (double alpha : {1.0, 1.2, 1.4, 2.0}) {
        const SpectralOperator S(g, alpha);
        const Eigen::MatrixXd Sa = test::dense_power(A, alpha);
        const Eigen::MatrixXd Sp = test::dense_power(A, alpha, true);
        const auto v = test::random_field(g, 8);
        CHECK(relative(S.apply(v).values(), Sa * test::to_eigen(v.values())) < 1e-10);
        CHECK(relative(S.apply_pinv(v).values(), Sp * test::to_eigen(v.values())) < 1e-10);
    }
}

TEST_CASE("pseudoinverse undoes the operator up to the mean") {
    const Grid g = make_grid(20, 14, 1, 1);
    const SpectralOperator S(g, 1.4);
    for (std::uint64_t seed : {4, 5}) {
        const auto v = test::random_field(g, seed);
        const double mean = std::accumulate(v.data().begin(), v.data().end(), 0.0) / g.size();
        const auto back = S.apply_pinv(S.apply(v));
        double err = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) err = std::max(err, std::abs(back[k] - (v[k] - mean)));
        CHECK(err < 1e-10);
    }
}

TEST_CASE("FFT and explicit cosine-sum operators agree") {
    const Grid g = make_grid(10, 7, 1.0, 0.8);
    const SpectralOperator S(g, 1.3);
    const auto v = test::random_field(g, 12);
    const auto ref = serial::spectral_apply(g, 1.3, v.values(), false);
    const auto refp = serial::spectral_apply(g, 1.3, v.values(), true);
    CHECK(test::max_abs_diff(S.apply(v).values(), ref) < 1e-10 * test::max_abs(ref));
    CHECK(test::max_abs_diff(S.apply_pinv(v).values(), refp) < 1e-10 * test::max_abs(refp));
}

TEST_CASE("alpha below one is refused unless forced") {
    const Grid g = make_grid(4, 4, 1, 1);
    CHECK_THROWS_AS(SpectralOperator(g, 0.8), InvalidArgument);
    CHECK_NOTHROW(SpectralOperator(g, 0.8, true));
    CHECK_THROWS_AS(SpectralOperator(g, 0.0, true), InvalidArgument);
}

TEST_CASE("pcg on trivial systems") {
    const auto b = test::random_vector(16, 3);
    SUBCASE("identity converges in one iteration") {
        const auto r = pcg(identity_map, identity_map, b, 1e-12, 10);
        CHECK(r.converged);
        CHECK(r.iterations == 1);
        CHECK(test::max_abs_diff(r.x, b) < 1e-15);
    }
    SUBCASE("diagonal system with Jacobi") {
        const LinearMap op = [](std::span<const double> x, std::span<double> y) {
            for (std::size_t k = 0; k < x.size(); ++k) y[k] = static_cast<double>(k + 1) * x[k];
        };
        const LinearMap jac = [](std::span<const double> x, std::span<double> y) {
            for (std::size_t k = 0; k < x.size(); ++k) y[k] = x[k] / static_cast<double>(k + 1);
        };
        const auto r = pcg(op, jac, b, 1e-12, 16);
        CHECK(r.converged);
        for (std::size_t k = 0; k < b.size(); ++k) CHECK(r.x[k] == doctest::Approx(b[k] / (k + 1)));
        const auto plain = pcg(op, identity_map, b, 1e-12, 16);
        CHECK(plain.iterations <= 16);
        for (std::size_t k = 0; k < b.size(); ++k)
            CHECK(plain.x[k] == doctest::Approx(b[k] / (k + 1)).epsilon(1e-8));
    }
    SUBCASE("negative curvature breaks down") {
        const LinearMap neg = [](std::span<const double> x, std::span<double> y) {
            for (std::size_t k = 0; k < x.size(); ++k) y[k] = -x[k];
        };
        CHECK_THROWS_AS(pcg(neg, identity_map, b, 1e-8, 10), SolverBreakdown);
    }
    SUBCASE("zero right-hand side") {
        const std::vector<double> z(5, 0.0);
        const auto r = pcg(identity_map, identity_map, z, 1e-8, 10);
        CHECK(r.converged);
        CHECK(test::max_abs(r.x) == 0.0);
    }
}

TEST_CASE("constrained operator is symmetric and non-negative") {
    const Grid g = make_grid(16, 16, 1, 1);
    const auto p = rings(7.5, 8.0, 3.0, 6.5);
    const auto c = build_constraints(g, p);
    const SpectralOperator S(g, 1.4);
    for (double rho : {0.1, 1.0, 10.0}) {
        const auto L = constrained_operator(c, S, rho);
        const auto v = test::random_vector(g.size(), 1);
        const auto w = test::random_vector(g.size(), 2);
        std::vector<double> lv(g.size()), lw(g.size());
        L(v, lv);
        L(w, lw);
        double a = 0, b = 0, q = 0, scale = 0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            a += lv[k] * w[k];
            b += v[k] * lw[k];
            q += lv[k] * v[k];
            scale += std::abs(lv[k] * w[k]);
        }
        CHECK(std::abs(a - b) <= 1e-8 * scale);
        CHECK(q >= -1e-8 * scale);
    }
}

TEST_CASE("preconditioner reduces the iteration count") {
    const Grid g = make_grid(16, 16, 1, 1);
    const auto c = build_constraints(g, rings(7.5, 8.0, 3.0, 6.5));
    const SpectralOperator S(g, 1.4);
    const auto L = constrained_operator(c, S, 1.0);
    const auto rhs = constrained_rhs(c, S, c.feasible_point());
    const auto with = pcg(L, nullspace_preconditioner(c, S), rhs, 1e-6, 2000);
    const auto without = pcg(L, identity_map, rhs, 1e-6, 2000);
    CHECK(with.converged);
    CHECK(without.converged);
    CHECK(with.iterations < without.iterations);
}

TEST_CASE("single pinned node gives the constant field") {
    const Grid g = make_grid(12, 12, 1, 1);
    const ConstraintSystem c(g, {{{g.index(4, 5), 1.0}}}, {0.0});
    for (double alpha : {1.0, 1.4, 2.0}) {
        const auto f = solve_initial(c, SpectralOperator(g, alpha), {alpha, 1.0, 1e-8, 200});
        CHECK(test::max_abs(f.T.values()) < 1e-12);
    }
    const ConstraintSystem d(g, {{{g.index(4, 5), 1.0}}}, {7.0});
    const auto f = solve_initial(d, SpectralOperator(g, 1.4), {1.4, 1.0, 1e-10, 200});
    for (double v : f.T.values()) CHECK(v == doctest::Approx(7.0).epsilon(1e-8));
}

TEST_CASE("two pinned nodes match the dense KKT solve") {
    const Grid g = make_grid(16, 16, 1, 1);
    const std::size_t a = g.index(3, 4), b = g.index(12, 10);
    const ConstraintSystem c(g, {{{a, 1.0}}, {{b, 1.0}}}, {0.0, 24.0});
    const auto f = solve_initial(c, SpectralOperator(g, 1.4), {1.4, 1.0, 1e-12, 1000});
    CHECK(f.converged);

    const std::size_t n = g.size();
    const Eigen::MatrixXd S = test::dense_power(test::neumann_laplacian(g), 1.4);
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + 2, n + 2);
    K.topLeftCorner(n, n) = S;
    K(a, n) = K(n, a) = 1.0;
    K(b, n + 1) = K(n + 1, b) = 1.0;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 2);
    rhs(n + 1) = 24.0;
    const Eigen::VectorXd sol = K.fullPivLu().solve(rhs);
    CHECK(relative(f.T.values(), sol.head(n)) < 1e-8);
    CHECK(f.T[a] == doctest::Approx(0.0).scale(24.0).epsilon(1e-12));
    CHECK(f.T[b] == doctest::Approx(24.0).epsilon(1e-12));
}

TEST_CASE("initial field honours the constraints and shifts with the data") {
    const Grid g = make_grid(40, 36, 1, 1);
    const auto c0 = build_constraints(g, rings(20.2, 17.6, 6.0, 14.0));
    const auto c1 = build_constraints(g, rings(20.2, 17.6, 6.0, 14.0, 5.0));
    const SpectralOperator S(g, 1.4);
    const SmootherConfig cfg{1.4, 1.0, 1e-10, 500};
    const auto f0 = solve_initial(c0, S, cfg);
    const auto f1 = solve_initial(c1, S, cfg);
    CHECK(f0.violation <= 1e-10);
    CHECK(f1.violation <= 1e-10);
    CHECK(c0.relative_violation(f0.T.values()) <= 1e-10);
    double err = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) err = std::max(err, std::abs(f1.T[k] - f0.T[k] - 5.0));
    CHECK(err < 1e-6);
}

TEST_CASE("result barely depends on rho") {
    const Grid g = make_grid(32, 32, 1, 1);
    const auto c = build_constraints(g, rings(15.7, 16.3, 5.0, 12.0));
    const SpectralOperator S(g, 1.4);
    const auto ref = solve_initial(c, S, {1.4, 1.0, 1e-10, 1000});
    const double scale = test::max_abs(ref.T.values());
    for (double rho : {0.1, 10.0}) {
        const auto f = solve_initial(c, S, {1.4, rho, 1e-10, 1000});
        CHECK(test::max_abs_diff(f.T.values(), ref.T.values()) < 1e-6 * scale);
    }
}

TEST_CASE("non-convergence is a warning, not an error") {
    const Grid g = make_grid(32, 32, 1, 1);
    const auto c = build_constraints(g, rings(15.7, 16.3, 5.0, 12.0));
    const auto f = solve_initial(c, SpectralOperator(g, 1.4), {1.4, 1.0, 1e-14, 2});
    CHECK_FALSE(f.converged);
    CHECK_FALSE(f.warning.empty());
    CHECK(f.violation <= 1e-10);
}

TEST_CASE("the funnel at the ignition flattens as alpha grows") {
    const auto cs = make_concentric_case({});
    const auto c = build_constraints(cs.spec.grid, cs.perimeters);
    double prev = INFINITY;
    for (double alpha : {1.0, 1.1, 1.2, 1.3, 1.4}) {
        const auto f = solve_initial(c, SpectralOperator(cs.spec.grid, alpha), {alpha, 1.0, 1e-4, 200});
        const double F = funnel_metric(f.T, cs.ignition_node);
        CHECK(F < prev);
        prev = F;
    }
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS((SmootherConfig{1.4, 0.0, 1e-4, 200}.validate()), InvalidArgument);
    CHECK_THROWS_AS((SmootherConfig{1.4, 1.0, 0.0, 200}.validate()), InvalidArgument);
    CHECK_THROWS_AS((SmootherConfig{1.4, 1.0, 1e-4, 0}.validate()), InvalidArgument);
}
