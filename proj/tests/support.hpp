#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "firefit/grid.hpp"

namespace test {

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double lo = -1.0,
                                         double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

inline firefit::ScalarField random_field(const firefit::Grid& g, std::uint64_t seed,
                                         double lo = -1.0, double hi = 1.0) {
    return firefit::ScalarField(g, random_vector(g.size(), seed, lo, hi));
}

inline Eigen::VectorXd to_eigen(std::span<const double> v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

inline double max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}

/// 5-point Neumann Laplacian, written out entry by entry.
inline Eigen::MatrixXd neumann_laplacian(const firefit::Grid& g) {
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            const auto k = static_cast<Eigen::Index>(g.index(i, j));
            auto couple = [&](std::size_t i2, std::size_t j2, double h) {
                const auto m = static_cast<Eigen::Index>(g.index(i2, j2));
                A(k, k) += 1.0 / (h * h);
                A(k, m) -= 1.0 / (h * h);
            };
            if (i > 0) couple(i - 1, j, g.dx);
            if (i + 1 < g.nx) couple(i + 1, j, g.dx);
            if (j > 0) couple(i, j - 1, g.dy);
            if (j + 1 < g.ny) couple(i, j + 1, g.dy);
        }
    }
    return A;
}

/// A^alpha through a dense symmetric eigendecomposition.
inline Eigen::MatrixXd dense_power(const Eigen::MatrixXd& A, double alpha, bool pinv = false) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    Eigen::VectorXd lam = es.eigenvalues();
    const double cut = 1e-10 * lam.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < lam.size(); ++k) {
        if (lam(k) <= cut) {
            lam(k) = 0.0;
        } else {
            lam(k) = pinv ? std::pow(lam(k), -alpha) : std::pow(lam(k), alpha);
        }
    }
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

inline std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("firefit_test_" + name);
    std::filesystem::remove_all(p);
    return p;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream s;
    s << is.rdbuf();
    return s.str();
}

}  // namespace test
