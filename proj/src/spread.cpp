#include "firefit/spread.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace firefit {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_factor(double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) {
        std::ostringstream msg;
        msg << "Rothermel " << name << " must be finite and non-negative, got " << v;
        throw InvalidArgument(msg.str());
    }
}

}  // namespace

double rothermel_rate(const RothermelInputs& in) {
    check_factor(in.r0, "r0");
    check_factor(in.phi_w, "phi_w");
    check_factor(in.phi_s, "phi_s");
    return in.r0 * (1.0 + in.phi_w + in.phi_s);
}

void SectorSpec::validate() const {
    if (boundaries.empty() || boundaries.size() != rates.size()) {
        throw InvalidArgument("sector spec needs one rate per sector boundary");
    }
    for (std::size_t s = 0; s < boundaries.size(); ++s) {
        if (!std::isfinite(boundaries[s])) throw InvalidArgument("sector boundary not finite");
        if (s > 0 && !(boundaries[s] > boundaries[s - 1])) {
            throw InvalidArgument("sector boundaries must be strictly increasing");
        }
        if (!(rates[s] > 0.0) || !std::isfinite(rates[s])) {
            throw InvalidArgument("sector rates must be positive");
        }
    }
    if (!(boundaries.back() - boundaries.front() < 2.0 * std::numbers::pi)) {
        throw InvalidArgument("sector boundaries must span less than a full turn");
    }
    if (!std::isfinite(cx) || !std::isfinite(cy)) throw InvalidArgument("sector centre not finite");
}

std::size_t SectorSpec::sector_of(double px, double py) const {
    const double ex = px - cx;
    const double ey = py - cy;
    if (ex == 0.0 && ey == 0.0) return 0;
    constexpr double turn = 2.0 * std::numbers::pi;
    double theta = std::atan2(ey, ex);
    const double base = boundaries.front();
    theta = base + std::fmod(std::fmod(theta - base, turn) + turn, turn);
    if (theta >= base + turn) theta -= turn;
    const auto it = std::upper_bound(boundaries.begin(), boundaries.end(), theta);
    return static_cast<std::size_t>(std::distance(boundaries.begin(), it)) - 1;
}

ScalarField sectored_ros_field(const Grid& grid, const SectorSpec& spec) {
    spec.validate();
    ScalarField f(grid);
    for (std::size_t j = 0; j < grid.ny; ++j) {
        for (std::size_t i = 0; i < grid.nx; ++i) {
            f.at(i, j) = spec.rate_at(grid.x(i), grid.y(j));
        }
    }
    return f;
}

RosModel::RosModel(const Grid& grid, Backend backend, double floor)
    : grid_(grid), backend_(std::move(backend)), floor_(floor) {
    if (!(floor_ > 0.0) || !std::isfinite(floor_)) {
        throw InvalidArgument("rate floor must be positive");
    }
}

RosModel RosModel::uniform(const Grid& grid, double rate, double floor) {
    if (!std::isfinite(rate) || rate < 0.0) throw InvalidArgument("uniform rate must be >= 0");
    return RosModel(grid, Uniform{rate}, floor);
}

RosModel RosModel::sectored(const Grid& grid, SectorSpec spec, double floor) {
    spec.validate();
    return RosModel(grid, Sectored{std::move(spec)}, floor);
}

RosModel RosModel::field(ScalarField rates, double floor) {
    return field_stack({0.0}, {std::move(rates)}, floor);
}

RosModel RosModel::field_stack(std::vector<double> times, std::vector<ScalarField> frames,
                               double floor) {
    if (frames.empty() || times.size() != frames.size()) {
        throw InvalidArgument("field stack needs one time per frame");
    }
    for (std::size_t n = 1; n < times.size(); ++n) {
        if (!(times[n] > times[n - 1])) throw InvalidArgument("frame times must increase");
        require_same_grid(frames.front().grid(), frames[n].grid(), "rate frame");
    }
    for (const auto& f : frames) {
        if (!f.all_finite()) throw InvalidArgument("rate field has non-finite values");
    }
    const Grid g = frames.front().grid();
    return RosModel(g, FieldStack{std::move(times), std::move(frames)}, floor);
}

RosModel RosModel::rothermel(RothermelField in, double floor) {
    const Grid g = in.r0.grid();
    require_same_grid(g, in.phi_w.grid(), "phi_w");
    require_same_grid(g, in.phi_s.grid(), "phi_s");
    if (in.heading_x.has_value() != in.heading_y.has_value()) {
        throw InvalidArgument("heading needs both components");
    }
    for (std::size_t k = 0; k < g.size(); ++k) {
        rothermel_rate({in.r0[k], in.phi_w[k], in.phi_s[k]});
    }
    return RosModel(g, std::move(in), floor);
}

bool RosModel::time_invariant() const {
    if (const auto* s = std::get_if<FieldStack>(&backend_)) return s->frames.size() == 1;
    return true;
}

double RosModel::clamp(double r) const { return std::max(r, floor_); }

double RosModel::raw_at_node(std::size_t k, double t) const {
    return std::visit(
        overloaded{
            [](const Uniform& u) { return u.rate; },
            [&](const Sectored& s) {
                return s.spec.rate_at(grid_.x(grid_.col(k)), grid_.y(grid_.row(k)));
            },
            [&](const FieldStack& s) {
                const auto& ts = s.times;
                if (ts.size() == 1 || t <= ts.front()) return s.frames.front()[k];
                if (t >= ts.back()) return s.frames.back()[k];
                const auto n = static_cast<std::size_t>(
                    std::distance(ts.begin(), std::upper_bound(ts.begin(), ts.end(), t)));
                const double w = (t - ts[n - 1]) / (ts[n] - ts[n - 1]);
                return (1 - w) * s.frames[n - 1][k] + w * s.frames[n][k];
            },
            [&](const RothermelField& r) {
                return r.r0[k] * (1.0 + r.phi_w[k] + r.phi_s[k]);
            },
        },
        backend_);
}

double RosModel::at_node(std::size_t k, double t) const {
    if (k >= grid_.size()) throw OutOfDomain("node index outside the grid");
    return clamp(raw_at_node(k, t));
}

double RosModel::evaluate(double px, double py, double t, std::optional<Vec2> direction) const {
    if (!grid_.contains(px, py)) {
        std::ostringstream msg;
        msg << "rate of spread requested outside the grid at (" << px << ", " << py << ")";
        throw OutOfDomain(msg.str());
    }
    const double r = std::visit(
        overloaded{
            [](const Uniform& u) { return u.rate; },
            [&](const Sectored& s) { return s.spec.rate_at(px, py); },
            [&](const FieldStack& s) {
                const auto& ts = s.times;
                if (ts.size() == 1 || t <= ts.front()) return bilinear(s.frames.front(), px, py);
                if (t >= ts.back()) return bilinear(s.frames.back(), px, py);
                const auto n = static_cast<std::size_t>(
                    std::distance(ts.begin(), std::upper_bound(ts.begin(), ts.end(), t)));
                const double w = (t - ts[n - 1]) / (ts[n] - ts[n - 1]);
                return (1 - w) * bilinear(s.frames[n - 1], px, py) +
                       w * bilinear(s.frames[n], px, py);
            },
            [&](const RothermelField& rf) {
                double phi_w = bilinear(rf.phi_w, px, py);
                double phi_s = bilinear(rf.phi_s, px, py);
                if (direction && rf.heading_x) {
                    const double proj = direction->x * bilinear(*rf.heading_x, px, py) +
                                        direction->y * bilinear(*rf.heading_y, px, py);
                    const double scale = std::max(0.0, proj);
                    phi_w *= scale;
                    phi_s *= scale;
                }
                return bilinear(rf.r0, px, py) * (1.0 + phi_w + phi_s);
            },
        },
        backend_);
    return clamp(r);
}

ScalarField RosModel::sample(double t) const {
    ScalarField f(grid_);
    for (std::size_t k = 0; k < grid_.size(); ++k) f[k] = at_node(k, t);
    return f;
}

}  // namespace firefit
