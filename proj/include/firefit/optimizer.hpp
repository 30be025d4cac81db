#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "firefit/constraint.hpp"
#include "firefit/objective.hpp"

namespace firefit {

using ObjectiveFn = std::function<double(std::span<const double>)>;

/// Coarse-to-fine level steps (coarsest_step, coarsest_step/2, ..., 1) with a
/// sweep count per level, repeated `cycles` times.
struct LevelSchedule {
    std::size_t coarsest_step = 32;
    std::vector<std::size_t> sweeps{1, 2, 3, 4, 5, 6};
    std::size_t cycles = 4;
    /// Line-search bracket at step s is bracket_scale * s / extent, at least 1.
    /// Unset means the spread of the constrained times.
    std::optional<double> bracket_scale;

    std::vector<std::size_t> steps() const;
    void validate() const;
};

struct FitRecord {
    std::size_t iteration;
    std::size_t level;  // 0 = coarsest
    std::size_t step;
    double objective;
};

struct FitReport {
    double initial_objective = 0.0;
    std::vector<FitRecord> history;
    std::vector<std::size_t> searches_per_level;
    std::size_t accepted = 0;
    std::size_t skipped_directions = 0;
    double initial_violation = 0.0;
    double max_violation = 0.0;
    double final_violation = 0.0;
    /// max |H d| / |d| over every searched direction.
    double max_direction_leak = 0.0;
    double seconds = 0.0;
};

struct FitResult {
    ScalarField T;
    FitReport report;
};

/// Sparse search direction, nodes ascending.
struct Direction {
    std::vector<std::size_t> nodes;
    std::vector<double> values;

    double max_abs() const;
};

/// Coarse lattice along one axis: multiples of step plus the last node.
std::vector<std::size_t> coarse_lattice(std::size_t n, std::size_t step);

/// Tensor-product hat of half-width `step` centred at anchor (ai, aj).
/// Throws InvalidArgument when the anchor is not on the coarse lattice.
ScalarField coarse_basis(const Grid& grid, std::size_t step, std::size_t ai, std::size_t aj);
Direction coarse_direction(const Grid& grid, std::size_t step, std::size_t ai, std::size_t aj);

/// P d restricted to the nonzeros of the result.
Direction project_direction(const ConstraintSystem& c, const Direction& d);

struct LineSearchResult {
    double step = 0.0;
    double value = 0.0;
    std::size_t evaluations = 0;
};

/// Golden-section search of phi over [-bracket, bracket] until the interval is
/// narrower than rel_width * bracket. The best probe is returned only when it
/// is strictly below value_at_zero, otherwise step 0.
LineSearchResult golden_section(const std::function<double(double)>& phi, double value_at_zero,
                                double bracket, double rel_width = 1e-3);

/// Line search of J along T + s * direction.
LineSearchResult line_search(const ScalarField& T, const ScalarField& direction,
                             const ObjectiveFn& J, double bracket);

/// Working state a sweep descends on.
class DescentState {
public:
    virtual ~DescentState() = default;
    virtual std::span<const double> field() const = 0;
    virtual double value() const = 0;
    virtual void prepare(const Direction& d) = 0;
    /// Objective at field + s * d, without changing the state.
    virtual double trial(double s) = 0;
    /// Moves to field + s * d if that strictly lowers the objective.
    virtual bool commit(double s) = 0;
};

/// Descent on the residual objective with local re-evaluation around each direction.
class IncrementalState final : public DescentState {
public:
    IncrementalState(const Objective& J, std::vector<double> T0);

    std::span<const double> field() const override { return T_; }
    double value() const override;
    void prepare(const Direction& d) override;
    double trial(double s) override;
    bool commit(double s) override;

private:
    void displace(double s);
    void restore();

    const Objective* J_;
    std::vector<double> T_;
    PairwiseSum res_, pen_;
    const Direction* dir_ = nullptr;
    std::vector<double> base_;
    std::vector<std::size_t> affected_;
    std::vector<double> scratch_res_, scratch_pen_;
    std::vector<std::size_t> mark_;
    std::size_t epoch_ = 0;
};

/// Descent on an arbitrary objective closure, evaluated on the whole field.
class ClosureState final : public DescentState {
public:
    ClosureState(ObjectiveFn J, std::vector<double> T0);

    std::span<const double> field() const override { return T_; }
    double value() const override { return value_; }
    void prepare(const Direction& d) override { dir_ = &d; }
    double trial(double s) override;
    bool commit(double s) override;

private:
    ObjectiveFn J_;
    std::vector<double> T_;
    double value_;
    const Direction* dir_ = nullptr;
};

/// Tolerance for constraint drift and for projected-direction leakage.
inline constexpr double kConstraintTolerance = 1e-10;

/// One pass over every anchor of the level in row-major order. Throws Error if
/// the constraint drifts beyond kConstraintTolerance.
void sweep(DescentState& state, const ConstraintSystem& c, std::size_t step, double bracket,
           FitReport& report, std::size_t level = 0);

ScalarField sweep(const ScalarField& T, std::size_t step, const ConstraintSystem& c,
                  const ObjectiveFn& J, double bracket);

/// Line-search bracket for a level step.
double level_bracket(const ConstraintSystem& c, const LevelSchedule& sched, std::size_t step);

FitResult multiscale_fit(const ScalarField& T0, const ConstraintSystem& c, const RosModel& ros,
                         const ObjectiveConfig& cfg, const LevelSchedule& sched);

/// Same schedule on a caller-supplied objective (e.g. residual minus likelihood).
FitResult multiscale_fit(const ScalarField& T0, const ConstraintSystem& c, const ObjectiveFn& J,
                         const LevelSchedule& sched);

}  // namespace firefit
