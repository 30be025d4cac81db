#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "firefit/objective.hpp"
#include "firefit/optimizer.hpp"

namespace firefit {

enum class DetectionFlag { fire, nofire, missing };

DetectionFlag parse_flag(const std::string& s);
const char* flag_name(DetectionFlag f);

struct DetectionRecord {
    double x = 0.0;
    double y = 0.0;
    double t = 0.0;
    DetectionFlag flag = DetectionFlag::missing;
    double half_width = 0.0;  // sensor footprint scale, informational
};

struct DetectionConfig {
    double sigma = 500.0;  // position error scale, 3 sigma = 1.5 km
    double a = -6.0;       // logistic intercept
    double b = 12.0;       // logistic slope
    double p_false = 0.05;
    double p_max = 0.95;
    double tau = 3600.0;    // heat proxy decay time
    double lambda = 1.0;    // likelihood weight in the combined objective

    void validate() const;
};

/// 0 before arrival, exp(-(t_obs - T)/tau) after.
double heat_proxy(const ScalarField& T, std::size_t node, double t_obs, const DetectionConfig& cfg);
double heat_proxy(double arrival, double t_obs, double tau);

/// p_false + (p_max - p_false) * logistic(a + b * proxy), clamped to [p_false, p_max].
double detect_prob(double proxy, const DetectionConfig& cfg);

/// Detection probability at a pixel: nodes within 3 sigma of the nominal centre
/// weighted by exp(-d^2/sigma^2), weights normalized. Falls back to the nearest
/// node when no node lies inside the window. Throws OutOfDomain for records
/// beyond the grid box padded by 3 sigma.
double pixel_fire_prob(const ScalarField& T, const DetectionRecord& rec, const DetectionConfig& cfg);

/// Same sum over every grid node, without truncation (reference).
double pixel_fire_prob_untruncated(const ScalarField& T, const DetectionRecord& rec,
                                   const DetectionConfig& cfg);

/// Sum of ln p over fire records and ln(1 - p) over nofire records.
double data_log_likelihood(const ScalarField& T, std::span<const DetectionRecord> recs,
                           const DetectionConfig& cfg);

struct IgnitionCandidate {
    double x = 0.0;
    double y = 0.0;
    double t = 0.0;
};

struct RankedIgnition {
    std::size_t index;  // position in the candidate list
    IgnitionCandidate candidate;
    double log_likelihood;
};

/// Arrival field for an ignition, by fast marching over the rates at the candidate time.
ScalarField ignition_arrival(const RosModel& ros, const IgnitionCandidate& cand);

/// Scores every candidate and sorts by log-likelihood, ties by candidate index.
std::vector<RankedIgnition> ignition_search(std::span<const IgnitionCandidate> candidates,
                                            std::span<const DetectionRecord> recs,
                                            const RosModel& ros, const DetectionConfig& cfg);

/// nx x ny lattice of candidates over a box at each listed time.
std::vector<IgnitionCandidate> candidate_lattice(double x_lo, double x_hi, std::size_t nx,
                                                 double y_lo, double y_hi, std::size_t ny,
                                                 std::span<const double> times);

/// Draws records uniformly over the grid box and [t_lo, t_hi], flags sampled
/// from pixel_fire_prob under T. Deterministic for a given seed.
std::vector<DetectionRecord> sample_detections(const ScalarField& T, std::size_t count,
                                               double t_lo, double t_hi,
                                               const DetectionConfig& cfg, std::uint64_t seed);

/// J(T) - lambda * log-likelihood, as an objective closure for the optimizer.
ObjectiveFn combined_objective(const Objective& J, std::vector<DetectionRecord> recs,
                               const DetectionConfig& cfg);

namespace serial {
double data_log_likelihood(const ScalarField& T, std::span<const DetectionRecord> recs,
                           const DetectionConfig& cfg);
}  // namespace serial

}  // namespace firefit
