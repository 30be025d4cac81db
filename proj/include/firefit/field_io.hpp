#pragma once

#include <filesystem>
#include <iosfwd>

#include "firefit/grid.hpp"

namespace firefit {

inline constexpr double kNoData = -9999.0;

/// ESRI ASCII grid. Nodes are written as cell centres, so XLLCORNER = x0 - dx/2.
/// Rows go north to south. Non-finite values are written as NODATA_VALUE.
/// Throws InvalidArgument when dx != dy (the format has a single CELLSIZE).
void write_esri_ascii(std::ostream& os, const ScalarField& f);
ScalarField read_esri_ascii(std::istream& is);

/// Fallback for anisotropic grids: header `i,j,x,y,value`, one row per node.
void write_field_csv(std::ostream& os, const ScalarField& f);
ScalarField read_field_csv(std::istream& is);

/// Writes ESRI ASCII when dx == dy, otherwise CSV next to `path` with a .csv
/// extension. Returns the path actually written.
std::filesystem::path save_field(const std::filesystem::path& path, const ScalarField& f);

/// Dispatches on extension (.csv or anything else as ESRI ASCII).
ScalarField load_field(const std::filesystem::path& path);

}  // namespace firefit
