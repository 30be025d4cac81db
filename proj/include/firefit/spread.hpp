#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "firefit/grid.hpp"

namespace firefit {

inline constexpr double kDefaultRateFloor = 1e-6;  // m/s

struct RothermelInputs {
    double r0 = 0.0;     // omnidirectional rate
    double phi_w = 0.0;  // wind factor
    double phi_s = 0.0;  // slope factor
};

/// R = r0 (1 + phi_w + phi_s). Throws InvalidArgument on negative or non-finite inputs.
double rothermel_rate(const RothermelInputs& in);

/// Angular sectors around a centre. Sector s spans [boundaries[s], boundaries[s+1]),
/// the last one wraps to boundaries[0] + 2*pi.
struct SectorSpec {
    double cx = 0.0;
    double cy = 0.0;
    std::vector<double> boundaries;
    std::vector<double> rates;

    void validate() const;
    std::size_t sector_of(double px, double py) const;
    double rate_at(double px, double py) const { return rates[sector_of(px, py)]; }
};

ScalarField sectored_ros_field(const Grid& grid, const SectorSpec& spec);

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

/// Spread rate R(x, y, t, direction). Immutable after construction; every
/// evaluation is clamped to at least the configured floor.
class RosModel {
public:
    struct Uniform {
        double rate;
    };
    struct Sectored {
        SectorSpec spec;
    };
    /// Time-indexed field stack, linear in time between frames, clamped at the ends.
    struct FieldStack {
        std::vector<double> times;
        std::vector<ScalarField> frames;
    };
    /// Per-node Rothermel inputs. When heading fields are present the wind and
    /// slope factors are scaled by max(0, direction . heading).
    struct RothermelField {
        ScalarField r0, phi_w, phi_s;
        std::optional<ScalarField> heading_x, heading_y;
    };

    static RosModel uniform(const Grid& grid, double rate, double floor = kDefaultRateFloor);
    static RosModel sectored(const Grid& grid, SectorSpec spec, double floor = kDefaultRateFloor);
    static RosModel field(ScalarField rates, double floor = kDefaultRateFloor);
    static RosModel field_stack(std::vector<double> times, std::vector<ScalarField> frames,
                                double floor = kDefaultRateFloor);
    static RosModel rothermel(RothermelField inputs, double floor = kDefaultRateFloor);

    const Grid& grid() const { return grid_; }
    double floor() const { return floor_; }
    bool time_invariant() const;

    /// Throws OutOfDomain outside the grid bounding box.
    double evaluate(double px, double py, double t, std::optional<Vec2> direction = {}) const;
    /// Node evaluation without interpolation.
    double at_node(std::size_t k, double t) const;
    /// Samples at every node at a fixed time.
    ScalarField sample(double t = 0.0) const;

private:
    using Backend = std::variant<Uniform, Sectored, FieldStack, RothermelField>;
    RosModel(const Grid& grid, Backend backend, double floor);

    double raw_at_node(std::size_t k, double t) const;
    double clamp(double r) const;

    Grid grid_;
    Backend backend_;
    double floor_;
};

}  // namespace firefit
