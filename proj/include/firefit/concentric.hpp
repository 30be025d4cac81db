#pragma once

#include <vector>

#include "firefit/constraint.hpp"
#include "firefit/spread.hpp"

namespace firefit {

/// Idealized case: sectored spread rates around a centre ignition, two circular
/// perimeters, and the fast-marched arrival field as the exact solution.
struct ConcentricSpec {
    Grid grid = make_grid(100, 100, 1.0, 1.0);
    double cx = 50.0;
    double cy = 50.0;
    double ignition_time = 0.0;
    std::vector<double> sector_boundaries;  // default: evenly spaced from 0
    std::vector<double> sector_rates;       // default: default_sector_rates(4)
    /// Nominal perimeter times; each radius is time x first sector rate unless set.
    std::vector<double> times{16.0, 40.0};
    std::vector<double> radii;
    std::size_t points_per_circle = 128;

    /// Fills defaults and checks geometry. Throws InvalidArgument.
    void resolve();
};

/// 1 + 0.25 sin(2 pi k / n), k = 0..n-1.
std::vector<double> default_sector_rates(std::size_t n);

struct ConcentricCase {
    ConcentricSpec spec;
    SectorSpec sectors;
    ScalarField rates;
    ScalarField exact;
    std::size_t ignition_node = 0;
    /// Ignition first, then one perimeter per circle, times read off `exact`.
    std::vector<Perimeter> perimeters;
};

ConcentricCase make_concentric_case(ConcentricSpec spec);

/// Relative RMS difference over nodes strictly between the two circles.
double annulus_relative_rms(const ConcentricCase& c, const ScalarField& T);

}  // namespace firefit
