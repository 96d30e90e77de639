#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "fffopt/error.hpp"
#include "fffopt/gp.hpp"
#include "fffopt/random.hpp"

namespace fffopt::gp {

namespace {

using LogHyper = std::array<double, 4>;  // log l_vp, log l_em, log signal, log noise

const LogHyper kLogLower{std::log(HyperparameterBox::length_min), std::log(HyperparameterBox::length_min),
                             std::log(HyperparameterBox::signal_min), std::log(HyperparameterBox::noise_min)};
const LogHyper kLogUpper{std::log(HyperparameterBox::length_max), std::log(HyperparameterBox::length_max),
                             std::log(HyperparameterBox::signal_max), std::log(HyperparameterBox::noise_max)};

LogHyper to_log(const Hyperparameters& h) {
  return {std::log(h.length_scales[0]), std::log(h.length_scales[1]), std::log(h.signal_variance),
          std::log(h.noise_variance)};
}

Hyperparameters from_log(const LogHyper& t) {
  return {{std::exp(t[0]), std::exp(t[1])}, std::exp(t[2]), std::exp(t[3])};
}

LogHyper clamp_box(LogHyper t) {
  for (std::size_t d = 0; d < 4; ++d) t[d] = std::clamp(t[d], kLogLower[d], kLogUpper[d]);
  return t;
}

double radical_inverse(std::uint64_t index, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

class Objective {
 public:
  Objective(std::span<const TrainingPoint> data, const ParameterBox& bounds, int budget)
      : data_(data), bounds_(bounds), budget_(budget) {}

  bool exhausted() const noexcept { return used_ >= budget_; }

  double operator()(const LogHyper& t) {
    ++used_;
    try {
      return GpModel::fit(data_, from_log(t), bounds_).log_marginal_likelihood();
    } catch (const NumericalError&) {
      return -std::numeric_limits<double>::infinity();
    }
  }

 private:
  std::span<const TrainingPoint> data_;
  const ParameterBox& bounds_;
  int budget_;
  int used_ = 0;
};

struct Candidate {
  LogHyper point;
  double value;
};

// Compass search: probe +/- step along each coordinate, halve the step after a
// sweep without improvement.
Candidate refine(Candidate start, Objective& f, int budget) {
  double step = 0.5;
  int used = 0;
  while (step > 0.01 && used < budget && !f.exhausted()) {
    bool improved = false;
    for (std::size_t d = 0; d < 4 && used < budget && !f.exhausted(); ++d) {
      for (double sign : {1.0, -1.0}) {
        if (used >= budget || f.exhausted()) break;
        LogHyper trial = start.point;
        trial[d] += sign * step;
        trial = clamp_box(trial);
        if (trial == start.point) continue;
        const double v = f(trial);
        ++used;
        if (v > start.value) {
          start = {trial, v};
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
  return start;
}

}  // namespace

Hyperparameters select_hyperparameters(std::span<const TrainingPoint> data, const ParameterBox& bounds,
                                       const std::optional<Hyperparameters>& previous,
                                       std::uint64_t seed) {
  const Hyperparameters fallback = previous.value_or(default_hyperparameters());
  if (data.size() < 2) return fallback;

  Objective f(data, bounds, SearchSettings::kMaxEvaluations);

  // Starts: the defaults plus low-discrepancy (Halton, seed-rotated) offsets
  // spread over the box, plus the previous optimum when there is one.
  const LogHyper center = to_log(default_hyperparameters());
  std::array<double, 4> shift{};
  for (std::size_t d = 0; d < 4; ++d)
    shift[d] = static_cast<double>(derive_seed(seed, "hyper-start", d) >> 11) * 0x1.0p-53;
  constexpr std::array<std::uint64_t, 4> kBases{2, 3, 5, 7};

  std::vector<LogHyper> starts{center};
  for (int j = 1; j < SearchSettings::kStarts; ++j) {
    LogHyper t{};
    for (std::size_t d = 0; d < 4; ++d) {
      double u = radical_inverse(static_cast<std::uint64_t>(j), kBases[d]) + shift[d];
      u -= std::floor(u);
      const double half = 0.5 * (kLogUpper[d] - kLogLower[d]);
      t[d] = center[d] + (2.0 * u - 1.0) * half;
    }
    starts.push_back(clamp_box(t));
  }
  if (previous && HyperparameterBox::contains(*previous)) starts.push_back(to_log(*previous));

  std::vector<Candidate> evaluated;
  for (const auto& s : starts) evaluated.push_back({s, f(s)});
  std::stable_sort(evaluated.begin(), evaluated.end(),
                   [](const Candidate& a, const Candidate& b) { return a.value > b.value; });

  if (!std::isfinite(evaluated.front().value)) return fallback;

  constexpr int kRefined = 2;
  const int remaining = SearchSettings::kMaxEvaluations - static_cast<int>(starts.size());
  Candidate best = evaluated.front();
  for (int r = 0; r < kRefined && r < static_cast<int>(evaluated.size()); ++r) {
    if (!std::isfinite(evaluated[static_cast<std::size_t>(r)].value)) break;
    const Candidate c = refine(evaluated[static_cast<std::size_t>(r)], f, remaining / kRefined);
    if (c.value > best.value) best = c;
  }
  return from_log(best.point);
}

}  // namespace fffopt::gp
