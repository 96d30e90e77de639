#pragma once

// Roughness metrics over single laser passes.
//
// A pass is an ordered sequence of (position, height) samples recorded while the
// head crosses one layer section perpendicular to the print lines. Heights are in
// micrometers, positions in millimeters.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace fffopt {

/// One laser pass over a single layer.
///
/// Positions are stored strictly increasing. A pass recorded right-to-left
/// (strictly decreasing positions) is accepted and stored in reversed order,
/// so both scan directions yield the same profile.
class ScanProfile {
 public:
  ScanProfile(int layer_index, std::vector<double> positions_mm, std::vector<double> heights_um);

  int layer_index() const noexcept { return layer_index_; }
  std::span<const double> positions() const noexcept { return positions_; }
  std::span<const double> heights() const noexcept { return heights_; }
  std::size_t size() const noexcept { return heights_.size(); }

 private:
  int layer_index_;
  std::vector<double> positions_;
  std::vector<double> heights_;
};

/// All layer profiles of one part. Layers are sorted on construction and must
/// then be numbered 1..N without gaps.
class PartScan {
 public:
  explicit PartScan(std::vector<ScanProfile> profiles);

  std::span<const ScanProfile> profiles() const noexcept { return profiles_; }
  std::size_t layer_count() const noexcept { return profiles_.size(); }

 private:
  std::vector<ScanProfile> profiles_;
};

/// Arithmetic mean absolute deviation of the heights from their mean.
/// Positions are ignored. Throws InvalidInput for fewer than two samples.
double compute_ra(std::span<const double> heights_um);
double compute_ra(const ScanProfile& profile);

/// Mean of the per-layer Ra values.
double global_roughness(const PartScan& part);

struct StatsSummary {
  double minimum = 0.0;
  double maximum = 0.0;
  double mean = 0.0;
  double std = 0.0;  // population (divide by n)
  double cv = 0.0;   // std / mean; NaN when mean == 0 and std > 0
};

StatsSummary profile_stats(std::span<const double> values_um);

/// Passes resampled onto one shared cross-scan grid; row i is pass i.
class RasterGrid {
 public:
  RasterGrid(double pass_spacing_mm, std::vector<double> cross_positions_mm, std::size_t rows,
             std::vector<double> heights_row_major);

  double pass_spacing() const noexcept { return pass_spacing_; }
  std::span<const double> cross_positions() const noexcept { return cross_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cross_.size(); }
  double at(std::size_t row, std::size_t col) const { return heights_[row * cols() + col]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(heights_).subspan(r * cols(), cols());
  }

 private:
  double pass_spacing_;
  std::vector<double> cross_;
  std::size_t rows_;
  std::vector<double> heights_;
};

/// Joins neighboring passes into a surface. The shared grid spans the
/// intersection of all pass ranges at the median sample spacing; each pass is
/// linearly interpolated onto it, nothing is extrapolated.
RasterGrid reconstruct_raster(std::span<const ScanProfile> passes, double pass_spacing_mm);

struct PairComparison {
  double max_abs_dev = 0.0;
  double mean_dev = 0.0;
  double mean_abs_dev = 0.0;
};

/// Deviation statistics of (reference, measured) roughness pairs, deviation = measured - reference.
PairComparison compare_roughness_pairs(std::span<const std::pair<double, double>> pairs);

}  // namespace fffopt
