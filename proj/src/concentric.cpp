#include "firefit/concentric.hpp"

#include <cmath>
#include <numbers>

#include "firefit/objective.hpp"

namespace firefit {

std::vector<double> default_sector_rates(std::size_t n) {
    std::vector<double> r(n);
    for (std::size_t k = 0; k < n; ++k) {
        r[k] = 1.0 + 0.25 * std::sin(2.0 * std::numbers::pi * static_cast<double>(k) /
                                     static_cast<double>(n));
    }
    return r;
}

void ConcentricSpec::resolve() {
    if (sector_rates.empty()) {
        sector_rates = default_sector_rates(sector_boundaries.empty() ? 4 : sector_boundaries.size());
    }
    if (sector_boundaries.empty()) {
        const std::size_t n = sector_rates.size();
        for (std::size_t k = 0; k < n; ++k) {
            sector_boundaries.push_back(2.0 * std::numbers::pi * static_cast<double>(k) /
                                        static_cast<double>(n));
        }
    }
    if (times.size() != 2) throw InvalidArgument("concentric case needs exactly two perimeter times");
    if (!(times[0] > ignition_time) || !(times[0] < times[1])) {
        throw InvalidArgument("perimeter times must satisfy ignition < T1 < T2");
    }
    if (radii.empty()) radii = {times[0] * sector_rates.front(), times[1] * sector_rates.front()};
    if (radii.size() != 2 || !(radii[0] > 0.0) || !(radii[0] < radii[1])) {
        throw InvalidArgument("radii must satisfy 0 < inner < outer");
    }
    if (points_per_circle == 0) throw InvalidArgument("points_per_circle must be positive");
    if (!grid.contains(cx - radii[1], cy - radii[1]) || !grid.contains(cx + radii[1], cy + radii[1])) {
        throw InvalidArgument("outer circle does not fit inside the grid");
    }
    SectorSpec{cx, cy, sector_boundaries, sector_rates}.validate();
}

ConcentricCase make_concentric_case(ConcentricSpec spec) {
    spec.resolve();
    ConcentricCase c{spec, SectorSpec{spec.cx, spec.cy, spec.sector_boundaries, spec.sector_rates},
                     ScalarField(), ScalarField(), 0, {}};
    const Grid& g = spec.grid;
    c.rates = sectored_ros_field(g, c.sectors);
    const auto ci = static_cast<std::size_t>(std::lround((spec.cx - g.x0) / g.dx));
    const auto cj = static_cast<std::size_t>(std::lround((spec.cy - g.y0) / g.dy));
    if (std::abs(g.x(ci) - spec.cx) > 1e-9 * g.dx || std::abs(g.y(cj) - spec.cy) > 1e-9 * g.dy) {
        throw InvalidArgument("ignition centre must be a grid node");
    }
    c.ignition_node = g.index(ci, cj);
    const FmmSource src{c.ignition_node, spec.ignition_time};
    c.exact = fast_march(g, c.rates, std::span<const FmmSource>(&src, 1));
    c.perimeters.push_back(Perimeter::ignition(spec.cx, spec.cy, spec.ignition_time));
    for (double r : spec.radii) {
        Perimeter per;
        for (std::size_t n = 0; n < spec.points_per_circle; ++n) {
            const double th = 2.0 * std::numbers::pi * static_cast<double>(n) /
                              static_cast<double>(spec.points_per_circle);
            const double px = spec.cx + r * std::cos(th);
            const double py = spec.cy + r * std::sin(th);
            per.points.push_back({px, py, bilinear(c.exact, px, py)});
        }
        c.perimeters.push_back(std::move(per));
    }
    return c;
}

double annulus_relative_rms(const ConcentricCase& c, const ScalarField& T) {
    const Grid& g = c.spec.grid;
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            const double r = std::hypot(g.x(i) - c.spec.cx, g.y(j) - c.spec.cy);
            if (r <= c.spec.radii[0] || r >= c.spec.radii[1]) continue;
            const double e = c.exact.at(i, j);
            num += (T.at(i, j) - e) * (T.at(i, j) - e);
            den += e * e;
        }
    }
    return std::sqrt(num / den);
}

}  // namespace firefit
