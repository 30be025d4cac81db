#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "firefit/constraint.hpp"
#include "firefit/detection.hpp"
#include "firefit/optimizer.hpp"

namespace firefit {

/// Header `x,y,time` (perimeters are runs of equal time) or
/// `x,y,time,perimeter_id` (perimeters grouped by id, ascending).
std::vector<Perimeter> read_perimeters_csv(std::istream& is);
std::vector<Perimeter> read_perimeters_csv(const std::filesystem::path& path);
/// Always writes the perimeter_id column.
void write_perimeters_csv(std::ostream& os, const std::vector<Perimeter>& perimeters);

/// Header `x,y,t,flag`, flag in {fire, nofire, missing}.
std::vector<DetectionRecord> read_detections_csv(std::istream& is);
std::vector<DetectionRecord> read_detections_csv(const std::filesystem::path& path);
void write_detections_csv(std::ostream& os, const std::vector<DetectionRecord>& recs);

/// `iteration,level,step,objective`
void write_fit_report_csv(std::ostream& os, const FitReport& report);
/// `rank,x,y,t,loglik`
void write_ignition_csv(std::ostream& os, const std::vector<RankedIgnition>& ranked);

}  // namespace firefit
