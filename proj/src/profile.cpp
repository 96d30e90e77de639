#include "fffopt/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fffopt/error.hpp"

namespace fffopt {

ScanProfile::ScanProfile(int layer_index, std::vector<double> positions_mm,
                         std::vector<double> heights_um)
    : layer_index_(layer_index), positions_(std::move(positions_mm)), heights_(std::move(heights_um)) {
  if (layer_index_ < 1) throw InvalidInput("layer_index must be >= 1");
  if (positions_.size() != heights_.size())
    throw InvalidInput("positions and heights differ in length");
  if (heights_.size() < 2) throw InvalidInput("a profile needs at least 2 samples");
  for (double v : positions_)
    if (!std::isfinite(v)) throw InvalidInput("non-finite position");
  for (double v : heights_)
    if (!std::isfinite(v)) throw InvalidInput("non-finite height");

  if (positions_[1] < positions_[0]) {
    std::reverse(positions_.begin(), positions_.end());
    std::reverse(heights_.begin(), heights_.end());
  }
  for (std::size_t i = 1; i < positions_.size(); ++i) {
    if (!(positions_[i] > positions_[i - 1]))
      throw InvalidInput("positions of layer " + std::to_string(layer_index_) +
                         " are not strictly monotone");
  }
}

PartScan::PartScan(std::vector<ScanProfile> profiles) : profiles_(std::move(profiles)) {
  std::stable_sort(profiles_.begin(), profiles_.end(),
                   [](const ScanProfile& a, const ScanProfile& b) {
                     return a.layer_index() < b.layer_index();
                   });
  for (std::size_t i = 0; i < profiles_.size(); ++i) {
    if (profiles_[i].layer_index() != static_cast<int>(i) + 1)
      throw InvalidInput("layer indices must be 1..N without gaps or duplicates");
  }
}

double compute_ra(std::span<const double> heights_um) {
  if (heights_um.size() < 2) throw InvalidInput("Ra needs at least 2 samples");
  const double n = static_cast<double>(heights_um.size());
  const double mean = std::accumulate(heights_um.begin(), heights_um.end(), 0.0) / n;
  double sum = 0.0;
  for (double z : heights_um) sum += std::abs(z - mean);
  return sum / n;
}

double compute_ra(const ScanProfile& profile) { return compute_ra(profile.heights()); }

double global_roughness(const PartScan& part) {
  if (part.layer_count() == 0) throw InvalidInput("part scan has no layers");
  double sum = 0.0;
  for (const auto& layer : part.profiles()) sum += compute_ra(layer);
  return sum / static_cast<double>(part.layer_count());
}

StatsSummary profile_stats(std::span<const double> values_um) {
  if (values_um.empty()) throw InvalidInput("statistics need at least one value");
  StatsSummary s;
  const auto [lo, hi] = std::minmax_element(values_um.begin(), values_um.end());
  s.minimum = *lo;
  s.maximum = *hi;
  const double n = static_cast<double>(values_um.size());
  s.mean = std::accumulate(values_um.begin(), values_um.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values_um) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / n);
  if (s.std == 0.0)
    s.cv = 0.0;
  else if (s.mean == 0.0)
    s.cv = std::numeric_limits<double>::quiet_NaN();
  else
    s.cv = s.std / s.mean;
  // Rounding can put the mean a hair outside [min, max] for near-constant input.
  s.mean = std::clamp(s.mean, s.minimum, s.maximum);
  return s;
}

RasterGrid::RasterGrid(double pass_spacing_mm, std::vector<double> cross_positions_mm,
                       std::size_t rows, std::vector<double> heights_row_major)
    : pass_spacing_(pass_spacing_mm),
      cross_(std::move(cross_positions_mm)),
      rows_(rows),
      heights_(std::move(heights_row_major)) {
  if (heights_.size() != rows_ * cross_.size())
    throw InvalidInput("raster matrix does not match rows x cross positions");
}

namespace {

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    m = 0.5 * (m + lower);
  }
  return m;
}

// Piecewise-linear interpolation; x must lie inside [pos.front(), pos.back()].
double interpolate(std::span<const double> pos, std::span<const double> h, double x) {
  auto it = std::upper_bound(pos.begin(), pos.end(), x);
  if (it == pos.begin()) return h.front();
  if (it == pos.end()) return h.back();
  const auto j = static_cast<std::size_t>(it - pos.begin());
  const double t = (x - pos[j - 1]) / (pos[j] - pos[j - 1]);
  return h[j - 1] + t * (h[j] - h[j - 1]);
}

}  // namespace

RasterGrid reconstruct_raster(std::span<const ScanProfile> passes, double pass_spacing_mm) {
  if (passes.size() < 2) throw InvalidInput("a raster needs at least 2 passes");
  if (!(pass_spacing_mm > 0.0)) throw InvalidInput("pass spacing must be positive");

  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  std::vector<double> spacings;
  for (const auto& p : passes) {
    const auto pos = p.positions();
    lo = std::max(lo, pos.front());
    hi = std::min(hi, pos.back());
    for (std::size_t i = 1; i < pos.size(); ++i) spacings.push_back(pos[i] - pos[i - 1]);
  }
  if (!(lo < hi)) throw InvalidInput("pass position ranges do not overlap");

  const double step = median(std::move(spacings));
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (std::size_t j = 0; j < count; ++j) grid[j] = std::min(lo + static_cast<double>(j) * step, hi);

  std::vector<double> heights;
  heights.reserve(passes.size() * count);
  for (const auto& p : passes)
    for (double x : grid) heights.push_back(interpolate(p.positions(), p.heights(), x));

  return RasterGrid(pass_spacing_mm, std::move(grid), passes.size(), std::move(heights));
}

PairComparison compare_roughness_pairs(std::span<const std::pair<double, double>> pairs) {
  if (pairs.empty()) throw InvalidInput("no roughness pairs to compare");
  PairComparison c;
  double sum = 0.0;
  double sum_abs = 0.0;
  for (const auto& [reference, measured] : pairs) {
    const double d = measured - reference;
    sum += d;
    sum_abs += std::abs(d);
    c.max_abs_dev = std::max(c.max_abs_dev, std::abs(d));
  }
  const double n = static_cast<double>(pairs.size());
  c.mean_dev = sum / n;
  c.mean_abs_dev = sum_abs / n;
  return c;
}

}  // namespace fffopt
