#include "firefit/optimizer.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace firefit {

std::vector<std::size_t> LevelSchedule::steps() const {
    std::vector<std::size_t> out;
    for (std::size_t s = coarsest_step; s >= 1; s /= 2) out.push_back(s);
    return out;
}

void LevelSchedule::validate() const {
    if (coarsest_step == 0 || !std::has_single_bit(coarsest_step)) {
        throw InvalidArgument("coarsest step must be a power of two");
    }
    const auto levels = static_cast<std::size_t>(std::bit_width(coarsest_step));
    if (sweeps.size() != levels) {
        std::ostringstream msg;
        msg << "schedule has " << levels << " levels but " << sweeps.size() << " sweep counts";
        throw InvalidArgument(msg.str());
    }
    if (std::any_of(sweeps.begin(), sweeps.end(), [](std::size_t s) { return s == 0; })) {
        throw InvalidArgument("sweep counts must be positive");
    }
    if (bracket_scale && !(*bracket_scale > 0.0)) {
        throw InvalidArgument("bracket scale must be positive");
    }
}

double Direction::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

std::vector<std::size_t> coarse_lattice(std::size_t n, std::size_t step) {
    if (step == 0) throw InvalidArgument("coarse step must be at least 1");
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < n; k += step) out.push_back(k);
    if (out.back() != n - 1) out.push_back(n - 1);
    return out;
}

namespace {

void require_anchor(const Grid& grid, std::size_t step, std::size_t ai, std::size_t aj) {
    const auto lx = coarse_lattice(grid.nx, step);
    const auto ly = coarse_lattice(grid.ny, step);
    if (!std::binary_search(lx.begin(), lx.end(), ai) ||
        !std::binary_search(ly.begin(), ly.end(), aj)) {
        std::ostringstream msg;
        msg << "anchor (" << ai << ", " << aj << ") is not on the step-" << step << " lattice";
        throw InvalidArgument(msg.str());
    }
}

double hat(std::size_t k, std::size_t anchor, std::size_t step) {
    const double d = std::abs(static_cast<double>(k) - static_cast<double>(anchor));
    return std::max(0.0, 1.0 - d / static_cast<double>(step));
}

/// Rows touched by d and their products (H d)_r.
std::vector<double> sparse_apply(const ConstraintSystem& c, const Direction& d, bool& any) {
    std::vector<double> y(c.rows(), 0.0);
    any = false;
    for (std::size_t n = 0; n < d.nodes.size(); ++n) {
        for (std::size_t r : c.rows_of(d.nodes[n])) {
            const auto row = c.row(r);
            const auto it = std::lower_bound(
                row.begin(), row.end(), d.nodes[n],
                [](const ConstraintSystem::Entry& e, std::size_t k) { return e.node < k; });
            y[r] += it->coef * d.values[n];
            any = true;
        }
    }
    return y;
}

Direction subtract_transpose(const ConstraintSystem& c, const Direction& d,
                             std::span<const double> y) {
    std::vector<std::pair<std::size_t, double>> acc;
    acc.reserve(d.nodes.size() + 8 * c.rows());
    for (std::size_t n = 0; n < d.nodes.size(); ++n) acc.emplace_back(d.nodes[n], d.values[n]);
    for (std::size_t r = 0; r < c.rows(); ++r) {
        if (y[r] == 0.0) continue;
        for (const auto& e : c.row(r)) acc.emplace_back(e.node, -e.coef * y[r]);
    }
    std::stable_sort(acc.begin(), acc.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    Direction out;
    for (const auto& [k, v] : acc) {
        if (!out.nodes.empty() && out.nodes.back() == k) {
            out.values.back() += v;
        } else {
            out.nodes.push_back(k);
            out.values.push_back(v);
        }
    }
    return out;
}

double direction_leak(const ConstraintSystem& c, const Direction& d) {
    bool any = false;
    const auto y = sparse_apply(c, d, any);
    double m = 0.0;
    for (double v : y) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

ScalarField coarse_basis(const Grid& grid, std::size_t step, std::size_t ai, std::size_t aj) {
    const Direction d = coarse_direction(grid, step, ai, aj);
    ScalarField f(grid);
    for (std::size_t n = 0; n < d.nodes.size(); ++n) f[d.nodes[n]] = d.values[n];
    return f;
}

Direction coarse_direction(const Grid& grid, std::size_t step, std::size_t ai, std::size_t aj) {
    require_anchor(grid, step, ai, aj);
    Direction d;
    const std::size_t i0 = ai >= step ? ai - step + 1 : 0;
    const std::size_t j0 = aj >= step ? aj - step + 1 : 0;
    const std::size_t i1 = std::min(grid.nx - 1, ai + step - 1);
    const std::size_t j1 = std::min(grid.ny - 1, aj + step - 1);
    for (std::size_t j = j0; j <= j1; ++j) {
        const double wy = hat(j, aj, step);
        for (std::size_t i = i0; i <= i1; ++i) {
            d.nodes.push_back(grid.index(i, j));
            d.values.push_back(hat(i, ai, step) * wy);
        }
    }
    return d;
}

Direction project_direction(const ConstraintSystem& c, const Direction& d) {
    Direction out = d;
    for (int pass = 0; pass < 2; ++pass) {
        bool any = false;
        auto y = sparse_apply(c, out, any);
        if (!any || std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; })) break;
        c.solve_gram(y);
        out = subtract_transpose(c, out, y);
    }
    return out;
}

LineSearchResult golden_section(const std::function<double(double)>& phi, double value_at_zero,
                                double bracket, double rel_width) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = -bracket, b = bracket;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = phi(x1), f2 = phi(x2);
    std::size_t evals = 2;
    while (b - a > rel_width * bracket) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = phi(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = phi(x2);
        }
        ++evals;
    }
    const bool left = f1 <= f2;
    const double best_x = left ? x1 : x2;
    const double best_f = left ? f1 : f2;
    if (best_f < value_at_zero) return {best_x, best_f, evals};
    return {0.0, value_at_zero, evals};
}

LineSearchResult line_search(const ScalarField& T, const ScalarField& direction,
                             const ObjectiveFn& J, double bracket) {
    require_same_grid(T.grid(), direction.grid(), "line_search");
    std::vector<double> work(T.size());
    auto phi = [&](double s) {
        for (std::size_t k = 0; k < work.size(); ++k) work[k] = T[k] + s * direction[k];
        return J(work);
    };
    return golden_section(phi, J(T.values()), bracket);
}

IncrementalState::IncrementalState(const Objective& J, std::vector<double> T0)
    : J_(&J), T_(std::move(T0)), mark_(T_.size(), 0) {
    if (T_.size() != J.grid().size()) throw ShapeMismatch("initial field does not match objective");
    const auto [res, pen] = J.terms(T_);
    res_ = PairwiseSum(res);
    pen_ = PairwiseSum(pen);
}

double IncrementalState::value() const { return J_->combine(res_.total(), pen_.total()); }

void IncrementalState::prepare(const Direction& d) {
    dir_ = &d;
    base_.resize(d.nodes.size());
    for (std::size_t n = 0; n < d.nodes.size(); ++n) base_[n] = T_[d.nodes[n]];
    ++epoch_;
    affected_.clear();
    const Grid& g = J_->grid();
    auto add = [&](std::size_t k) {
        if (mark_[k] != epoch_) {
            mark_[k] = epoch_;
            affected_.push_back(k);
        }
    };
    for (std::size_t k : d.nodes) {
        add(k);
        const std::size_t i = g.col(k), j = g.row(k);
        if (i > 0) add(k - 1);
        if (i + 1 < g.nx) add(k + 1);
        if (j > 0) add(k - g.nx);
        if (j + 1 < g.ny) add(k + g.nx);
    }
    std::sort(affected_.begin(), affected_.end());
    scratch_res_.resize(affected_.size());
    scratch_pen_.resize(affected_.size());
}

void IncrementalState::displace(double s) {
    for (std::size_t n = 0; n < base_.size(); ++n) {
        T_[dir_->nodes[n]] = base_[n] + s * dir_->values[n];
    }
}

void IncrementalState::restore() {
    for (std::size_t n = 0; n < base_.size(); ++n) T_[dir_->nodes[n]] = base_[n];
}

double IncrementalState::trial(double s) {
    displace(s);
    double dres = 0.0, dpen = 0.0;
    for (std::size_t k : affected_) {
        dres += J_->residual_term(T_, k) - res_.leaf(k);
        dpen += J_->penalty_term(T_, k) - pen_.leaf(k);
    }
    restore();
    return J_->combine(res_.total() + dres, pen_.total() + dpen);
}

bool IncrementalState::commit(double s) {
    const double before = value();
    displace(s);
    for (std::size_t n = 0; n < affected_.size(); ++n) {
        const std::size_t k = affected_[n];
        scratch_res_[n] = res_.leaf(k);
        scratch_pen_[n] = pen_.leaf(k);
        res_.set(k, J_->residual_term(T_, k));
        pen_.set(k, J_->penalty_term(T_, k));
    }
    if (value() < before) {
        for (std::size_t n = 0; n < base_.size(); ++n) base_[n] = T_[dir_->nodes[n]];
        return true;
    }
    for (std::size_t n = 0; n < affected_.size(); ++n) {
        res_.set(affected_[n], scratch_res_[n]);
        pen_.set(affected_[n], scratch_pen_[n]);
    }
    restore();
    return false;
}

ClosureState::ClosureState(ObjectiveFn J, std::vector<double> T0)
    : J_(std::move(J)), T_(std::move(T0)), value_(J_(T_)) {}

double ClosureState::trial(double s) {
    std::vector<double> work = T_;
    for (std::size_t n = 0; n < dir_->nodes.size(); ++n) {
        work[dir_->nodes[n]] += s * dir_->values[n];
    }
    return J_(work);
}

bool ClosureState::commit(double s) {
    std::vector<double> work = T_;
    for (std::size_t n = 0; n < dir_->nodes.size(); ++n) {
        work[dir_->nodes[n]] += s * dir_->values[n];
    }
    const double v = J_(work);
    if (!(v < value_)) return false;
    T_ = std::move(work);
    value_ = v;
    return true;
}

void sweep(DescentState& state, const ConstraintSystem& c, std::size_t step, double bracket,
           FitReport& report, std::size_t level) {
    const Grid& g = c.grid();
    if (report.searches_per_level.size() <= level) report.searches_per_level.resize(level + 1, 0);
    for (std::size_t aj : coarse_lattice(g.ny, step)) {
        for (std::size_t ai : coarse_lattice(g.nx, step)) {
            const Direction pd = project_direction(c, coarse_direction(g, step, ai, aj));
            const double size = pd.max_abs();
            if (size < 1e-12) {
                ++report.skipped_directions;
                continue;
            }
            const double leak = direction_leak(c, pd) / size;
            report.max_direction_leak = std::max(report.max_direction_leak, leak);
            state.prepare(pd);
            const auto ls = golden_section([&](double s) { return state.trial(s); },
                                           state.value(), bracket);
            if (ls.step != 0.0 && state.commit(ls.step)) {
                ++report.accepted;
                const double v = c.relative_violation(state.field());
                report.max_violation = std::max(report.max_violation, v);
                if (v > kConstraintTolerance) {
                    std::ostringstream msg;
                    msg << "constraint drift " << v << " after a step at level " << step;
                    throw Error(msg.str());
                }
            }
            ++report.searches_per_level[level];
            report.history.push_back({report.history.size() + 1, level, step, state.value()});
        }
    }
}

ScalarField sweep(const ScalarField& T, std::size_t step, const ConstraintSystem& c,
                  const ObjectiveFn& J, double bracket) {
    require_same_grid(c.grid(), T.grid(), "sweep");
    ClosureState state(J, T.data());
    FitReport report;
    sweep(state, c, step, bracket, report);
    return ScalarField(T.grid(), std::vector<double>(state.field().begin(), state.field().end()));
}

double level_bracket(const ConstraintSystem& c, const LevelSchedule& sched, std::size_t step) {
    double scale = 1.0;
    if (sched.bracket_scale) {
        scale = *sched.bracket_scale;
    } else {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t r = 0; r < c.rows(); ++r) {
            const double t = c.rhs()[r] / static_cast<double>(c.counts()[r]);
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
        if (hi > lo) scale = hi - lo;
    }
    const auto extent = static_cast<double>(std::max(c.grid().nx, c.grid().ny) - 1);
    return std::max(1.0, scale * static_cast<double>(step) / extent);
}

namespace {

FitResult run_schedule(DescentState& state, const ConstraintSystem& c, const LevelSchedule& sched) {
    sched.validate();
    const auto start = std::chrono::steady_clock::now();
    FitReport report;
    report.initial_objective = state.value();
    report.initial_violation = c.relative_violation(state.field());
    report.max_violation = report.initial_violation;
    const auto steps = sched.steps();
    report.searches_per_level.assign(steps.size(), 0);
    for (std::size_t cycle = 0; cycle < sched.cycles; ++cycle) {
        for (std::size_t level = 0; level < steps.size(); ++level) {
            const double bracket = level_bracket(c, sched, steps[level]);
            for (std::size_t s = 0; s < sched.sweeps[level]; ++s) {
                sweep(state, c, steps[level], bracket, report, level);
            }
        }
    }
    report.final_violation = c.relative_violation(state.field());
    report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ScalarField T(c.grid(), std::vector<double>(state.field().begin(), state.field().end()));
    return {std::move(T), std::move(report)};
}

}  // namespace

FitResult multiscale_fit(const ScalarField& T0, const ConstraintSystem& c, const RosModel& ros,
                         const ObjectiveConfig& cfg, const LevelSchedule& sched) {
    require_same_grid(c.grid(), T0.grid(), "multiscale_fit");
    require_same_grid(c.grid(), ros.grid(), "multiscale_fit rates");
    const Objective J(ros, cfg, c.constrained_nodes());
    IncrementalState state(J, T0.data());
    return run_schedule(state, c, sched);
}

FitResult multiscale_fit(const ScalarField& T0, const ConstraintSystem& c, const ObjectiveFn& J,
                         const LevelSchedule& sched) {
    require_same_grid(c.grid(), T0.grid(), "multiscale_fit");
    ClosureState state(J, T0.data());
    return run_schedule(state, c, sched);
}

}  // namespace firefit
