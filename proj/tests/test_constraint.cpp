#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "firefit/constraint.hpp"
#include "firefit/errors.hpp"
#include "support.hpp"

using namespace firefit;

namespace {

Eigen::MatrixXd dense_h(const ConstraintSystem& c) {
    const auto d = c.dense();
    Eigen::MatrixXd H(d.size(), c.grid().size());
    for (std::size_t r = 0; r < d.size(); ++r)
        for (std::size_t k = 0; k < d[r].size(); ++k) H(r, k) = d[r][k];
    return H;
}

ConstraintSystem random_system(const Grid& g, std::size_t m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> node(0, g.size() - 1);
    std::uniform_real_distribution<double> coef(0.1, 1.0), time(0.0, 30.0);
    std::vector<std::vector<ConstraintSystem::Entry>> rows(m);
    std::vector<double> rhs(m);
    for (std::size_t r = 0; r < m; ++r) {
        for (int e = 0; e < 3; ++e) rows[r].push_back({node(rng), coef(rng)});
        rhs[r] = time(rng);
    }
    return ConstraintSystem(g, rows, rhs);
}

// Barycentric weights of p in the triangle (a, b, c), by Cramer's rule.
std::array<double, 3> barycentric(std::array<double, 2> a, std::array<double, 2> b,
                                  std::array<double, 2> c, double px, double py) {
    const double det = (b[1] - c[1]) * (a[0] - c[0]) + (c[0] - b[0]) * (a[1] - c[1]);
    const double l0 = ((b[1] - c[1]) * (px - c[0]) + (c[0] - b[0]) * (py - c[1])) / det;
    const double l1 = ((c[1] - a[1]) * (px - c[0]) + (a[0] - c[0]) * (py - c[1])) / det;
    return {l0, l1, 1.0 - l0 - l1};
}

}  // namespace

TEST_CASE("locate_point at a node and on an edge") {
    const Grid g = make_grid(10, 10, 1, 1);
    const auto tp = locate_point(g, 3.0, 4.0);
    double on_node = 0.0, elsewhere = 0.0;
    for (int n = 0; n < 3; ++n) (tp.nodes[n] == g.index(3, 4) ? on_node : elsewhere) += tp.weights[n];
    CHECK(on_node == 1.0);
    CHECK(elsewhere == 0.0);

    const auto e = locate_point(g, 5.5, 2.0);
    int halves = 0;
    for (int n = 0; n < 3; ++n) halves += e.weights[n] == 0.5;
    CHECK(halves == 2);
}

TEST_CASE("locate_point weights solve the 3x3 barycentric system") {
    const Grid g = make_grid(4, 4, 1, 1);
    for (auto [px, py] : {std::pair{0.5, 0.25}, std::pair{0.25, 0.5}, std::pair{2.7, 1.1}}) {
        const auto tp = locate_point(g, px, py);
        Eigen::Matrix3d A;
        for (int n = 0; n < 3; ++n) {
            A(0, n) = g.x(g.col(tp.nodes[n]));
            A(1, n) = g.y(g.row(tp.nodes[n]));
            A(2, n) = 1.0;
        }
        const Eigen::Vector3d w = A.fullPivLu().solve(Eigen::Vector3d(px, py, 1.0));
        for (int n = 0; n < 3; ++n) CHECK(tp.weights[n] == doctest::Approx(w(n)).epsilon(1e-14));
    }
    const auto tp = locate_point(g, 0.5, 0.25);
    CHECK(tp.triangle == 0);
    CHECK(tp.nodes == std::array<std::size_t, 3>{0, 1, 5});
    CHECK(tp.weights[0] == doctest::Approx(0.5));
    CHECK(tp.weights[1] == doctest::Approx(0.25));
    CHECK(tp.weights[2] == doctest::Approx(0.25));
    CHECK(locate_point(g, 0.25, 0.5).triangle == 1);
    CHECK_THROWS_AS(locate_point(g, 3.5, 0.0), OutOfDomain);
}

TEST_CASE("point ignition gives a single unit row") {
    const Grid g = make_grid(10, 10, 1, 1);
    const Perimeter p[] = {Perimeter::ignition(4.0, 6.0, 0.0)};
    const auto c = build_constraints(g, p);
    REQUIRE(c.rows() == 1);
    REQUIRE(c.row(0).size() == 1);
    CHECK(c.row(0)[0].node == g.index(4, 6));
    CHECK(c.row(0)[0].coef == 1.0);
    CHECK(c.rhs() == std::vector<double>{0.0});
}

TEST_CASE("two points of one perimeter in one triangle condense to one row") {
    const Grid g = make_grid(10, 10, 1, 1);
    const std::array<double, 2> xy[] = {{2.6, 3.2}, {2.8, 3.5}};
    const Perimeter p[] = {Perimeter::at_time(xy, 16.0)};
    const auto c = build_constraints(g, p);
    REQUIRE(c.rows() == 1);
    double sum = 0.0;
    for (const auto& e : c.row(0)) sum += e.coef;
    CHECK(sum == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(c.rhs()[0] == 32.0);
    CHECK(c.counts()[0] == 2);
}

TEST_CASE("64-point circle matches brute-force triangle classification") {
    const Grid g = make_grid(100, 100, 1, 1);
    const double cx = 50.3, cy = 49.7, r = 16.0;
    std::vector<std::array<double, 2>> xy;
    for (int k = 0; k < 64; ++k) {
        const double th = 2.0 * std::numbers::pi * k / 64.0 + 0.01;
        xy.push_back({cx + r * std::cos(th), cy + r * std::sin(th)});
    }
    const Perimeter per[] = {Perimeter::at_time(xy, 16.0)};
    const auto c = build_constraints(g, per);

    // Every triangle of the mesh is tested for containment.
    std::map<std::size_t, std::map<std::size_t, double>> rows;
    std::map<std::size_t, double> rhs;
    for (const auto& p : xy) {
        int hits = 0;
        for (std::size_t cj = 0; cj + 1 < g.ny; ++cj) {
            for (std::size_t ci = 0; ci + 1 < g.nx; ++ci) {
                const std::size_t cell = cj * (g.nx - 1) + ci;
                const std::array<std::size_t, 3> tri[2] = {
                    {g.index(ci, cj), g.index(ci + 1, cj), g.index(ci + 1, cj + 1)},
                    {g.index(ci, cj), g.index(ci + 1, cj + 1), g.index(ci, cj + 1)}};
                for (int t = 0; t < 2; ++t) {
                    auto xyof = [&](std::size_t k) {
                        return std::array<double, 2>{g.x(g.col(k)), g.y(g.row(k))};
                    };
                    const auto w = barycentric(xyof(tri[t][0]), xyof(tri[t][1]), xyof(tri[t][2]),
                                               p[0], p[1]);
                    if (w[0] < 0 || w[1] < 0 || w[2] < 0) continue;
                    ++hits;
                    for (int n = 0; n < 3; ++n) rows[2 * cell + t][tri[t][n]] += w[n];
                    rhs[2 * cell + t] += 16.0;
                }
            }
        }
        REQUIRE(hits == 1);
    }
    REQUIRE(c.rows() == rows.size());
    std::size_t row = 0;
    for (const auto& [tri, entries] : rows) {
        CHECK(c.rhs()[row] == rhs[tri]);
        std::map<std::size_t, double> got;
        for (const auto& e : c.row(row)) got[e.node] = e.coef;
        for (const auto& [node, w] : entries) {
            if (w < 1e-14) continue;
            CHECK(got[node] == doctest::Approx(w).epsilon(1e-12));
        }
        ++row;
    }
}

TEST_CASE("assembly does not depend on point order") {
    const Grid g = make_grid(40, 40, 1, 1);
    std::vector<std::array<double, 2>> xy;
    for (int k = 0; k < 50; ++k) {
        const double th = 2.0 * std::numbers::pi * k / 50.0;
        xy.push_back({20.1 + 9 * std::cos(th), 19.8 + 9 * std::sin(th)});
    }
    const Perimeter a[] = {Perimeter::ignition(20.0, 20.0, 0.0), Perimeter::at_time(xy, 9.0)};
    std::mt19937_64 rng(17);
    std::shuffle(xy.begin(), xy.end(), rng);
    const Perimeter b[] = {Perimeter::ignition(20.0, 20.0, 0.0), Perimeter::at_time(xy, 9.0)};
    const auto ca = build_constraints(g, a);
    const auto cb = build_constraints(g, b);
    CHECK(ca.dense() == cb.dense());
    CHECK(ca.rhs() == cb.rhs());
}

TEST_CASE("assembly errors") {
    const Grid g = make_grid(10, 10, 1, 1);
    const Perimeter out[] = {Perimeter::ignition(20.0, 2.0, 0.0)};
    CHECK_THROWS_AS(build_constraints(g, out), OutOfDomain);
    CHECK_THROWS_AS(build_constraints(g, std::span<const Perimeter>{}), InvalidArgument);
    // The same node pinned by two perimeters gives parallel rows.
    const Perimeter dup[] = {Perimeter::ignition(3.0, 3.0, 0.0), Perimeter::ignition(3.0, 3.0, 1.0)};
    CHECK_THROWS_AS(build_constraints(g, dup), RankDeficient);
}

TEST_CASE("feasible point examples") {
    const Grid g = make_grid(6, 6, 1, 1);
    SUBCASE("single node") {
        const ConstraintSystem c(g, {{{7, 1.0}}}, {5.0});
        const auto u = c.feasible_point();
        for (std::size_t k = 0; k < g.size(); ++k) CHECK(u[k] == doctest::Approx(k == 7 ? 5.0 : 0.0));
    }
    SUBCASE("two disjoint nodes") {
        const ConstraintSystem c(g, {{{3, 1.0}}, {{20, 1.0}}}, {1.0, 2.0});
        const auto u = c.feasible_point();
        for (std::size_t k = 0; k < g.size(); ++k) {
            CHECK(u[k] == doctest::Approx(k == 3 ? 1.0 : k == 20 ? 2.0 : 0.0));
        }
    }
}

TEST_CASE("feasible point and projector match dense pseudoinverse oracles") {
    const Grid g = make_grid(16, 16, 1, 1);
    const auto c = random_system(g, 20, 42);
    const Eigen::MatrixXd H = dense_h(c);
    const Eigen::MatrixXd Hp = H.completeOrthogonalDecomposition().pseudoInverse();
    const Eigen::VectorXd gv = test::to_eigen(c.rhs());

    const auto u = c.feasible_point();
    const Eigen::VectorXd u_ref = Hp * gv;
    CHECK(test::max_abs_diff(u.values(), std::span<const double>(u_ref.data(), u_ref.size())) <
          1e-10 * u_ref.cwiseAbs().maxCoeff());
    CHECK(c.relative_violation(u.values()) < 1e-12);

    const Eigen::MatrixXd P = Eigen::MatrixXd::Identity(g.size(), g.size()) - Hp * H;
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto v = test::random_field(g, seed);
        const auto pv = c.project_nullspace(v);
        const Eigen::VectorXd ref = P * test::to_eigen(v.values());
        CHECK(test::max_abs_diff(pv.values(), std::span<const double>(ref.data(), ref.size())) < 1e-12);
        const auto hpv = c.apply(pv.values());
        CHECK(test::max_abs(hpv) < 1e-12);
    }
}

TEST_CASE("projector properties") {
    const Grid g = make_grid(16, 16, 1, 1);
    const auto c = random_system(g, 20, 7);
    const auto v = test::random_field(g, 21);
    const auto w = test::random_field(g, 22);
    const auto pv = c.project_nullspace(v);
    const auto ppv = c.project_nullspace(pv);
    CHECK(test::max_abs_diff(pv.values(), ppv.values()) <= 1e-10 * test::max_abs(pv.values()));

    const auto pw = c.project_nullspace(w);
    double a = 0.0, b = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        a += pv[k] * w[k];
        b += v[k] * pw[k];
    }
    CHECK(a == doctest::Approx(b).epsilon(1e-10));

    // fixed point on the nullspace
    const auto again = c.project_nullspace(pv);
    CHECK(test::max_abs_diff(again.values(), pv.values()) < 1e-12);

    // the feasible point projects onto the nullspace
    const auto u0 = c.feasible_point();
    CHECK(test::max_abs(c.apply(c.project_nullspace(u0).values())) < 1e-10);
}

TEST_CASE("constraint system on a concentric-style assembly satisfies H u0 = g") {
    const Grid g = make_grid(50, 50, 1, 1);
    std::vector<std::array<double, 2>> inner, outer;
    for (int k = 0; k < 128; ++k) {
        const double th = 2.0 * std::numbers::pi * k / 128.0;
        inner.push_back({25 + 8 * std::cos(th), 25 + 8 * std::sin(th)});
        outer.push_back({25 + 20 * std::cos(th), 25 + 20 * std::sin(th)});
    }
    const Perimeter p[] = {Perimeter::ignition(25, 25, 0), Perimeter::at_time(inner, 8),
                           Perimeter::at_time(outer, 20)};
    const auto c = build_constraints(g, p);
    CHECK(c.relative_violation(c.feasible_point().values()) < 1e-12);
    std::size_t total = 0;
    for (auto n : c.counts()) total += n;
    CHECK(total == 257);
}
