#include "firefit/detection.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace firefit {

DetectionFlag parse_flag(const std::string& s) {
    if (s == "fire") return DetectionFlag::fire;
    if (s == "nofire") return DetectionFlag::nofire;
    if (s == "missing") return DetectionFlag::missing;
    throw InvalidArgument("unknown detection flag '" + s + "'");
}

const char* flag_name(DetectionFlag f) {
    switch (f) {
        case DetectionFlag::fire: return "fire";
        case DetectionFlag::nofire: return "nofire";
        case DetectionFlag::missing: return "missing";
    }
    return "missing";
}

void DetectionConfig::validate() const {
    if (!(sigma > 0.0) || !(tau > 0.0)) throw InvalidArgument("sigma and tau must be positive");
    if (!(p_false > 0.0 && p_false < p_max && p_max < 1.0)) {
        throw InvalidArgument("need 0 < p_false < p_max < 1");
    }
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(lambda)) {
        throw InvalidArgument("logistic parameters must be finite");
    }
}

double heat_proxy(double arrival, double t_obs, double tau) {
    if (t_obs < arrival) return 0.0;
    return std::exp(-(t_obs - arrival) / tau);
}

double heat_proxy(const ScalarField& T, std::size_t node, double t_obs, const DetectionConfig& cfg) {
    return heat_proxy(T[node], t_obs, cfg.tau);
}

double detect_prob(double proxy, const DetectionConfig& cfg) {
    const double z = cfg.a + cfg.b * proxy;
    const double logistic = z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    const double p = cfg.p_false + (cfg.p_max - cfg.p_false) * logistic;
    return std::clamp(p, cfg.p_false, cfg.p_max);
}

namespace {

void require_coverage(const Grid& g, const DetectionRecord& rec, double sigma) {
    const double pad = 3.0 * sigma;
    if (!(rec.x >= g.x0 - pad && rec.x <= g.x_max() + pad && rec.y >= g.y0 - pad &&
          rec.y <= g.y_max() + pad)) {
        std::ostringstream msg;
        msg << "detection at (" << rec.x << ", " << rec.y << ") is outside the padded grid";
        throw OutOfDomain(msg.str());
    }
}

std::size_t axis_lo(double c, double origin, double h, std::size_t n) {
    const double u = std::ceil((c - origin) / h);
    return static_cast<std::size_t>(std::clamp(u, 0.0, static_cast<double>(n - 1)));
}

std::size_t axis_hi(double c, double origin, double h, std::size_t n) {
    const double u = std::floor((c - origin) / h);
    return static_cast<std::size_t>(std::clamp(u, 0.0, static_cast<double>(n - 1)));
}

double pixel_prob(const Grid& g, std::span<const double> T, const DetectionRecord& rec,
                  const DetectionConfig& cfg) {
    require_coverage(g, rec, cfg.sigma);
    const double r = 3.0 * cfg.sigma;
    const double inv_s2 = 1.0 / (cfg.sigma * cfg.sigma);
    const std::size_t i0 = axis_lo(rec.x - r, g.x0, g.dx, g.nx);
    const std::size_t i1 = axis_hi(rec.x + r, g.x0, g.dx, g.nx);
    const std::size_t j0 = axis_lo(rec.y - r, g.y0, g.dy, g.ny);
    const std::size_t j1 = axis_hi(rec.y + r, g.y0, g.dy, g.ny);
    double wsum = 0.0, psum = 0.0;
    for (std::size_t j = j0; j <= j1; ++j) {
        const double ey = g.y(j) - rec.y;
        for (std::size_t i = i0; i <= i1; ++i) {
            const double ex = g.x(i) - rec.x;
            const double d2 = ex * ex + ey * ey;
            if (d2 > r * r) continue;
            const double w = std::exp(-d2 * inv_s2);
            const std::size_t k = g.index(i, j);
            wsum += w;
            psum += w * detect_prob(heat_proxy(T[k], rec.t, cfg.tau), cfg);
        }
    }
    if (wsum > 0.0) return std::clamp(psum / wsum, cfg.p_false, cfg.p_max);
    const auto ni = static_cast<std::size_t>(std::clamp(
        std::round((rec.x - g.x0) / g.dx), 0.0, static_cast<double>(g.nx - 1)));
    const auto nj = static_cast<std::size_t>(std::clamp(
        std::round((rec.y - g.y0) / g.dy), 0.0, static_cast<double>(g.ny - 1)));
    return detect_prob(heat_proxy(T[g.index(ni, nj)], rec.t, cfg.tau), cfg);
}

double record_term(double p, DetectionFlag flag) {
    switch (flag) {
        case DetectionFlag::fire: return std::log(p);
        case DetectionFlag::nofire: return std::log1p(-p);
        case DetectionFlag::missing: return 0.0;
    }
    return 0.0;
}

double log_likelihood(const Grid& g, std::span<const double> T,
                      std::span<const DetectionRecord> recs, const DetectionConfig& cfg) {
    std::vector<double> terms(recs.size(), 0.0);
    const auto n = static_cast<std::ptrdiff_t>(recs.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t r = 0; r < n; ++r) {
        const auto& rec = recs[static_cast<std::size_t>(r)];
        if (rec.flag == DetectionFlag::missing) continue;
        terms[static_cast<std::size_t>(r)] = record_term(pixel_prob(g, T, rec, cfg), rec.flag);
    }
    double s = 0.0;
    for (double t : terms) s += t;
    return s;
}

}  // namespace

double pixel_fire_prob(const ScalarField& T, const DetectionRecord& rec,
                       const DetectionConfig& cfg) {
    return pixel_prob(T.grid(), T.values(), rec, cfg);
}

double pixel_fire_prob_untruncated(const ScalarField& T, const DetectionRecord& rec,
                                   const DetectionConfig& cfg) {
    const Grid& g = T.grid();
    double wsum = 0.0, psum = 0.0;
    for (std::size_t j = 0; j < g.ny; ++j) {
        for (std::size_t i = 0; i < g.nx; ++i) {
            const double d2 = std::pow(g.x(i) - rec.x, 2) + std::pow(g.y(j) - rec.y, 2);
            const double w = std::exp(-d2 / (cfg.sigma * cfg.sigma));
            wsum += w;
            psum += w * detect_prob(heat_proxy(T.at(i, j), rec.t, cfg.tau), cfg);
        }
    }
    return psum / wsum;
}

double data_log_likelihood(const ScalarField& T, std::span<const DetectionRecord> recs,
                           const DetectionConfig& cfg) {
    cfg.validate();
    return log_likelihood(T.grid(), T.values(), recs, cfg);
}

namespace serial {

double data_log_likelihood(const ScalarField& T, std::span<const DetectionRecord> recs,
                           const DetectionConfig& cfg) {
    double s = 0.0;
    for (const auto& rec : recs) {
        if (rec.flag == DetectionFlag::missing) continue;
        s += record_term(pixel_fire_prob(T, rec, cfg), rec.flag);
    }
    return s;
}

}  // namespace serial

ScalarField ignition_arrival(const RosModel& ros, const IgnitionCandidate& cand) {
    const ScalarField rates = ros.sample(cand.t);
    const auto sources = point_sources(rates, cand.x, cand.y, cand.t);
    return fast_march(ros.grid(), rates, sources);
}

std::vector<RankedIgnition> ignition_search(std::span<const IgnitionCandidate> candidates,
                                            std::span<const DetectionRecord> recs,
                                            const RosModel& ros, const DetectionConfig& cfg) {
    cfg.validate();
    for (const auto& c : candidates) {
        if (!ros.grid().contains(c.x, c.y)) {
            std::ostringstream msg;
            msg << "ignition candidate (" << c.x << ", " << c.y << ") is outside the grid";
            throw OutOfDomain(msg.str());
        }
    }
    for (const auto& r : recs) {
        if (r.flag != DetectionFlag::missing) require_coverage(ros.grid(), r, cfg.sigma);
    }
    std::vector<RankedIgnition> out(candidates.size());
    const auto n = static_cast<std::ptrdiff_t>(candidates.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t c = 0; c < n; ++c) {
        const auto u = static_cast<std::size_t>(c);
        const ScalarField T = ignition_arrival(ros, candidates[u]);
        out[u] = {u, candidates[u], log_likelihood(T.grid(), T.values(), recs, cfg)};
    }
    std::stable_sort(out.begin(), out.end(), [](const RankedIgnition& a, const RankedIgnition& b) {
        return a.log_likelihood > b.log_likelihood;
    });
    return out;
}

std::vector<IgnitionCandidate> candidate_lattice(double x_lo, double x_hi, std::size_t nx,
                                                 double y_lo, double y_hi, std::size_t ny,
                                                 std::span<const double> times) {
    if (nx == 0 || ny == 0 || times.empty()) throw InvalidArgument("empty candidate lattice");
    auto at = [](double lo, double hi, std::size_t n, std::size_t k) {
        return n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    };
    std::vector<IgnitionCandidate> out;
    for (double t : times)
        for (std::size_t j = 0; j < ny; ++j)
            for (std::size_t i = 0; i < nx; ++i)
                out.push_back({at(x_lo, x_hi, nx, i), at(y_lo, y_hi, ny, j), t});
    return out;
}

std::vector<DetectionRecord> sample_detections(const ScalarField& T, std::size_t count,
                                               double t_lo, double t_hi,
                                               const DetectionConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const Grid& g = T.grid();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(g.x0, g.x_max()), uy(g.y0, g.y_max()),
        ut(t_lo, t_hi), u01(0.0, 1.0);
    std::vector<DetectionRecord> out;
    out.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        DetectionRecord rec;
        rec.x = ux(rng);
        rec.y = uy(rng);
        rec.t = ut(rng);
        const double p = pixel_fire_prob(T, rec, cfg);
        rec.flag = u01(rng) < p ? DetectionFlag::fire : DetectionFlag::nofire;
        out.push_back(rec);
    }
    return out;
}

ObjectiveFn combined_objective(const Objective& J, std::vector<DetectionRecord> recs,
                               const DetectionConfig& cfg) {
    cfg.validate();
    return [&J, recs = std::move(recs), cfg](std::span<const double> T) {
        return J.value(T) - cfg.lambda * log_likelihood(J.grid(), T, recs, cfg);
    };
}

}  // namespace firefit
