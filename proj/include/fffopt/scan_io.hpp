#pragma once

// Scan CSV:    layer_index,position_mm,height_um   (rows grouped by layer)
// Raster CSV:  pass_index,x_1,...,x_M  then  i,h_1,...,h_M

#include <filesystem>
#include <iosfwd>

#include "fffopt/profile.hpp"

namespace fffopt {

/// Throws ParseError naming the 1-based line of the first malformed row.
PartScan read_scan_csv(std::istream& in);
PartScan read_scan_csv(const std::filesystem::path& path);

void write_scan_csv(std::ostream& out, const PartScan& part);
void write_scan_csv(const std::filesystem::path& path, const PartScan& part);

void write_raster_csv(std::ostream& out, const RasterGrid& grid);

}  // namespace fffopt
