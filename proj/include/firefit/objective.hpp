#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "firefit/grid.hpp"
#include "firefit/spread.hpp"

namespace firefit {

enum class ResidualVariant {
    product,     // f(x, y) = 1 - x y
    difference,  // f(x, y) = x - 1/y
};

/// Residual function evaluated at x = |grad T|^2, y = R^2.
double residual_function(ResidualVariant v, double grad_sq, double rate_sq);

struct ObjectiveConfig {
    ResidualVariant variant = ResidualVariant::product;
    double p = 2.0;
    /// Unset means 10 x the grid average of 1/R^2.
    std::optional<double> penalty_weight;

    void validate() const;
};

/// Evaluates the residual norm plus the local-minimum penalty. Holds the rate
/// model by reference; node rates are cached when the model is time invariant.
class Objective {
public:
    /// `exempt` nodes (ignitions, constrained nodes) never pay the penalty.
    Objective(const RosModel& ros, const ObjectiveConfig& cfg,
              std::span<const std::size_t> exempt = {});

    const Grid& grid() const { return grid_; }
    double p() const { return cfg_.p; }
    double penalty_weight() const { return weight_; }
    bool exempt(std::size_t k) const { return exempt_[k] != 0; }

    double rate(std::size_t k, double t) const {
        return cached_rate_.empty() ? ros_->at_node(k, t) : cached_rate_[k];
    }
    double residual_at(std::span<const double> T, std::size_t k) const;
    /// |residual|^p times the cell area.
    double residual_term(std::span<const double> T, std::size_t k) const;
    /// Squared strict-local-minimum depth, 0 on exempt nodes.
    double penalty_term(std::span<const double> T, std::size_t k) const;

    double combine(double residual_sum, double penalty_sum) const;

    ScalarField residual_field(const ScalarField& T) const;
    /// Per-node residual and penalty terms.
    std::pair<std::vector<double>, std::vector<double>> terms(std::span<const double> T) const;
    double value(std::span<const double> T) const;
    double value(const ScalarField& T) const { return value(T.values()); }
    double penalty(std::span<const double> T) const;

private:
    const RosModel* ros_;
    ObjectiveConfig cfg_;
    Grid grid_;
    std::vector<char> exempt_;
    std::vector<double> cached_rate_;
    double weight_ = 0.0;
};

ScalarField residual_field(const ScalarField& T, const RosModel& ros, const ObjectiveConfig& cfg);
double objective(const ScalarField& T, const RosModel& ros, const ObjectiveConfig& cfg,
                 std::span<const std::size_t> exempt = {});

/// Pairwise summation in a fixed binary-tree order. Updating single leaves
/// keeps the root bit-identical to a from-scratch sum of the same leaves.
class PairwiseSum {
public:
    PairwiseSum() = default;
    explicit PairwiseSum(std::span<const double> leaves);

    double total() const { return tree_.empty() ? 0.0 : tree_[1]; }
    double leaf(std::size_t k) const { return tree_[width_ + k]; }
    void set(std::size_t k, double v);

private:
    std::size_t width_ = 0;
    std::vector<double> tree_;
};

double pairwise_sum(std::span<const double> v);

struct FmmSource {
    std::size_t node;
    double time;
};

/// First-order fast marching for |grad T| = 1/R with the same Godunov stencil
/// as upwind_gradient_norm. Sources are fixed. Heap ties break on node index.
ScalarField fast_march(const Grid& grid, const ScalarField& rates,
                       std::span<const FmmSource> sources);

/// Sources for an ignition at an arbitrary point: the corners of its cell, at
/// t0 plus straight-line travel time.
std::vector<FmmSource> point_sources(const ScalarField& rates, double px, double py, double t0);

namespace serial {
double objective(const ScalarField& T, const RosModel& ros, const ObjectiveConfig& cfg,
                 std::span<const std::size_t> exempt = {});
}  // namespace serial

}  // namespace firefit
