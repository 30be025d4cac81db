#include "firefit/objective.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>

namespace firefit {

double residual_function(ResidualVariant v, double grad_sq, double rate_sq) {
    switch (v) {
        case ResidualVariant::product:
            return 1.0 - grad_sq * rate_sq;
        case ResidualVariant::difference:
            return grad_sq - 1.0 / rate_sq;
    }
    return 0.0;
}

void ObjectiveConfig::validate() const {
    if (!(p >= 1.0) || !std::isfinite(p)) throw InvalidArgument("objective norm exponent p must be >= 1");
    if (penalty_weight && (!(*penalty_weight >= 0.0) || !std::isfinite(*penalty_weight))) {
        throw InvalidArgument("penalty weight must be >= 0");
    }
}

Objective::Objective(const RosModel& ros, const ObjectiveConfig& cfg,
                     std::span<const std::size_t> exempt)
    : ros_(&ros), cfg_(cfg), grid_(ros.grid()), exempt_(grid_.size(), 0) {
    cfg_.validate();
    for (std::size_t k : exempt) {
        if (k >= grid_.size()) throw OutOfDomain("exempt node outside the grid");
        exempt_[k] = 1;
    }
    if (ros.time_invariant()) cached_rate_ = ros.sample(0.0).data();
    if (cfg_.penalty_weight) {
        weight_ = *cfg_.penalty_weight;
    } else {
        const ScalarField r = ros.sample(0.0);
        double s = 0.0;
        for (double v : r.values()) s += 1.0 / (v * v);
        weight_ = 10.0 * s / static_cast<double>(r.size());
    }
}

double Objective::residual_at(std::span<const double> T, std::size_t k) const {
    const double g = upwind_gradient_norm_at(grid_, T, grid_.col(k), grid_.row(k));
    const double r = rate(k, T[k]);
    return residual_function(cfg_.variant, g * g, r * r);
}

double Objective::residual_term(std::span<const double> T, std::size_t k) const {
    const double a = std::abs(residual_at(T, k));
    const double powed = cfg_.p == 2.0 ? a * a : (cfg_.p == 1.0 ? a : std::pow(a, cfg_.p));
    return powed * grid_.cell_area();
}

double Objective::penalty_term(std::span<const double> T, std::size_t k) const {
    if (exempt_[k]) return 0.0;
    const double d = local_minimum_depth(grid_, T, k);
    return d * d;
}

double Objective::combine(double residual_sum, double penalty_sum) const {
    const double norm = cfg_.p == 2.0 ? std::sqrt(residual_sum)
                                      : std::pow(residual_sum, 1.0 / cfg_.p);
    return norm + weight_ * penalty_sum;
}

std::pair<std::vector<double>, std::vector<double>> Objective::terms(
    std::span<const double> T) const {
    if (T.size() != grid_.size()) throw ShapeMismatch("field does not match objective grid");
    std::vector<double> res(T.size()), pen(T.size());
    const auto n = static_cast<std::ptrdiff_t>(T.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        const auto u = static_cast<std::size_t>(k);
        res[u] = residual_term(T, u);
        pen[u] = penalty_term(T, u);
    }
    return {std::move(res), std::move(pen)};
}

double Objective::value(std::span<const double> T) const {
    const auto [res, pen] = terms(T);
    return combine(pairwise_sum(res), pairwise_sum(pen));
}

double Objective::penalty(std::span<const double> T) const {
    return weight_ * pairwise_sum(terms(T).second);
}

ScalarField Objective::residual_field(const ScalarField& T) const {
    require_same_grid(grid_, T.grid(), "residual_field");
    ScalarField out(grid_);
    const auto n = static_cast<std::ptrdiff_t>(T.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        out[static_cast<std::size_t>(k)] = residual_at(T.values(), static_cast<std::size_t>(k));
    }
    return out;
}

ScalarField residual_field(const ScalarField& T, const RosModel& ros, const ObjectiveConfig& cfg) {
    return Objective(ros, cfg).residual_field(T);
}

double objective(const ScalarField& T, const RosModel& ros, const ObjectiveConfig& cfg,
                 std::span<const std::size_t> exempt) {
    require_same_grid(ros.grid(), T.grid(), "objective");
    return Objective(ros, cfg, exempt).value(T);
}

namespace serial {

double objective(const ScalarField& T, const RosModel& ros, const ObjectiveConfig& cfg,
                 std::span<const std::size_t> exempt) {
    const Grid& g = T.grid();
    std::vector<char> skip(g.size(), 0);
    for (std::size_t k : exempt) skip[k] = 1;
    const ScalarField grad = serial::upwind_gradient_norm(T);
    double weight = 0.0;
    if (cfg.penalty_weight) {
        weight = *cfg.penalty_weight;
    } else {
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double r = ros.at_node(k, 0.0);
            weight += 1.0 / (r * r);
        }
        weight *= 10.0 / static_cast<double>(g.size());
    }
    double res = 0.0, pen = 0.0;
    for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            const std::size_t k = g.index(i, j);
            const double r = ros.at_node(k, T[k]);
            const double f = residual_function(cfg.variant, grad[k] * grad[k], r * r);
            res += std::pow(std::abs(f), cfg.p) * g.cell_area();
            if (skip[k]) continue;
            double lowest = std::numeric_limits<double>::infinity();
            if (i > 0) lowest = std::min(lowest, T.at(i - 1, j));
            if (i + 1 < g.nx) lowest = std::min(lowest, T.at(i + 1, j));
            if (j > 0) lowest = std::min(lowest, T.at(i, j - 1));
            if (j + 1 < g.ny) lowest = std::min(lowest, T.at(i, j + 1));
            if (T[k] < lowest) pen += (lowest - T[k]) * (lowest - T[k]);
        }
    }
    return std::pow(res, 1.0 / cfg.p) + weight * pen;
}

}  // namespace serial

PairwiseSum::PairwiseSum(std::span<const double> leaves) {
    width_ = std::bit_ceil(std::max<std::size_t>(leaves.size(), 1));
    tree_.assign(2 * width_, 0.0);
    std::copy(leaves.begin(), leaves.end(), tree_.begin() + static_cast<std::ptrdiff_t>(width_));
    for (std::size_t n = width_ - 1; n >= 1; --n) tree_[n] = tree_[2 * n] + tree_[2 * n + 1];
}

void PairwiseSum::set(std::size_t k, double v) {
    std::size_t n = width_ + k;
    tree_[n] = v;
    for (n /= 2; n >= 1; n /= 2) tree_[n] = tree_[2 * n] + tree_[2 * n + 1];
}

double pairwise_sum(std::span<const double> v) { return PairwiseSum(v).total(); }

ScalarField fast_march(const Grid& grid, const ScalarField& rates,
                       std::span<const FmmSource> sources) {
    require_same_grid(grid, rates.grid(), "fast_march rates");
    if (sources.empty()) throw InvalidArgument("fast marching needs at least one source");
    constexpr double inf = std::numeric_limits<double>::infinity();
    ScalarField T(grid, inf);
    std::vector<char> state(grid.size(), 0);  // 0 far, 1 trial, 2 accepted, 3 fixed source
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (const auto& s : sources) {
        if (s.node >= grid.size()) throw OutOfDomain("fast marching source outside the grid");
        if (state[s.node] == 3) {
            T[s.node] = std::min(T[s.node], s.time);
        } else {
            T[s.node] = s.time;
            state[s.node] = 3;
        }
    }
    for (std::size_t k = 0; k < grid.size(); ++k)
        if (state[k] == 3) heap.push({T[k], k});

    auto solve = [&](std::size_t k) {
        const std::size_t i = grid.col(k), j = grid.row(k);
        double a = inf, b = inf;
        if (i > 0 && state[k - 1] >= 2) a = std::min(a, T[k - 1]);
        if (i + 1 < grid.nx && state[k + 1] >= 2) a = std::min(a, T[k + 1]);
        if (j > 0 && state[k - grid.nx] >= 2) b = std::min(b, T[k - grid.nx]);
        if (j + 1 < grid.ny && state[k + grid.nx] >= 2) b = std::min(b, T[k + grid.nx]);
        const double slow = 1.0 / std::max(rates[k], kDefaultRateFloor);
        const double ta = a + grid.dx * slow;
        const double tb = b + grid.dy * slow;
        double t = std::min(ta, tb);
        if (std::isfinite(a) && std::isfinite(b) && t > std::max(a, b)) {
            // (t-a)^2/dx^2 + (t-b)^2/dy^2 = slow^2
            const double wx = 1.0 / (grid.dx * grid.dx), wy = 1.0 / (grid.dy * grid.dy);
            const double qa = wx + wy;
            const double qb = -2.0 * (a * wx + b * wy);
            const double qc = a * a * wx + b * b * wy - slow * slow;
            const double disc = qb * qb - 4.0 * qa * qc;
            if (disc >= 0.0) {
                const double root = (-qb + std::sqrt(disc)) / (2.0 * qa);
                if (root >= std::max(a, b)) t = std::min(t, root);
            }
        }
        return t;
    };

    while (!heap.empty()) {
        const auto [t, k] = heap.top();
        heap.pop();
        if (state[k] == 2 || (state[k] == 3 && t > T[k])) continue;
        if (state[k] == 1 && t > T[k]) continue;
        if (state[k] != 3) state[k] = 2;
        const std::size_t i = grid.col(k), j = grid.row(k);
        std::size_t nbrs[4];
        int count = 0;
        if (i > 0) nbrs[count++] = k - 1;
        if (i + 1 < grid.nx) nbrs[count++] = k + 1;
        if (j > 0) nbrs[count++] = k - grid.nx;
        if (j + 1 < grid.ny) nbrs[count++] = k + grid.nx;
        for (int n = 0; n < count; ++n) {
            const std::size_t q = nbrs[n];
            if (state[q] >= 2) continue;
            const double cand = solve(q);
            if (cand < T[q]) {
                T[q] = cand;
                state[q] = 1;
                heap.push({cand, q});
            }
        }
    }
    return T;
}

std::vector<FmmSource> point_sources(const ScalarField& rates, double px, double py, double t0) {
    const Grid& g = rates.grid();
    if (!g.contains(px, py)) throw OutOfDomain("ignition point outside the grid");
    const auto ci = std::min(static_cast<std::size_t>((px - g.x0) / g.dx), g.nx - 2);
    const auto cj = std::min(static_cast<std::size_t>((py - g.y0) / g.dy), g.ny - 2);
    std::vector<FmmSource> out;
    for (std::size_t dj = 0; dj < 2; ++dj) {
        for (std::size_t di = 0; di < 2; ++di) {
            const std::size_t k = g.index(ci + di, cj + dj);
            const double d = std::hypot(g.x(ci + di) - px, g.y(cj + dj) - py);
            out.push_back({k, t0 + d / std::max(rates[k], kDefaultRateFloor)});
        }
    }
    return out;
}

}  // namespace firefit
