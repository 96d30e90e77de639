#pragma once

// Gaussian-process model of log-roughness over the normalized parameter box.
//
// Inputs are min-max normalized to [0,1]^2 by the box; targets are log(R),
// standardized to zero mean and unit (population) variance. The kernel is a
// squared exponential with one length scale per input dimension.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fffopt/params.hpp"

namespace fffopt::gp {

struct Hyperparameters {
  std::array<double, 2> length_scales{0.3, 0.3};  // normalized-input units
  double signal_variance = 1.0;                   // standardized units^2
  double noise_variance = 0.01;                   // standardized units^2

  friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;
};

/// Search box for hyperparameter selection.
struct HyperparameterBox {
  static constexpr double length_min = 0.05, length_max = 2.0;
  static constexpr double signal_min = 0.1, signal_max = 10.0;
  static constexpr double noise_min = 1e-4, noise_max = 1.0;

  static bool contains(const Hyperparameters& h) noexcept;
};

Hyperparameters default_hyperparameters() noexcept;

/// Throws InvalidInput unless every value is finite and strictly positive.
void validate(const Hyperparameters& h);

double kernel(const UnitPoint& a, const UnitPoint& b, const Hyperparameters& hyper) noexcept;

struct TrainingPoint {
  PrintParameters params;
  double roughness_um = 0.0;
};

struct Prediction {
  double mean_log = 0.0;  // log(um)
  double std_log = 0.0;
};

/// Jitter ladder tried, in order, when K + noise*I is not numerically positive definite.
inline constexpr std::array<double, 4> kJitterLadder{0.0, 1e-10, 1e-8, 1e-6};

class GpModel {
 public:
  /// Throws InvalidInput for empty data, R <= 0 or points outside the box, and
  /// NumericalError when the factorization fails at every jitter level.
  static GpModel fit(std::span<const TrainingPoint> data, const Hyperparameters& hyper,
                     const ParameterBox& bounds);

  /// Posterior of log-roughness at x (latent function, without observation noise).
  Prediction predict(const PrintParameters& x) const;
  Prediction predict_unit(const UnitPoint& u) const;

  /// Prior standard deviation of log-roughness, y_std * sqrt(signal_variance).
  double prior_std_log() const noexcept;

  /// Gaussian log evidence of the standardized targets.
  double log_marginal_likelihood() const noexcept;

  const Hyperparameters& hyperparameters() const noexcept { return hyper_; }
  const ParameterBox& bounds() const noexcept { return bounds_; }
  std::span<const UnitPoint> train_inputs() const noexcept { return inputs_; }
  const Eigen::VectorXd& train_targets() const noexcept { return targets_; }
  const Eigen::VectorXd& alpha() const noexcept { return alpha_; }
  const Eigen::MatrixXd& factor() const noexcept { return factor_; }
  double y_mean() const noexcept { return y_mean_; }
  double y_std() const noexcept { return y_std_; }
  double jitter() const noexcept { return jitter_; }

 private:
  GpModel() = default;

  std::vector<UnitPoint> inputs_;
  Eigen::VectorXd targets_;
  Hyperparameters hyper_;
  ParameterBox bounds_;
  Eigen::MatrixXd factor_;  // lower Cholesky factor of K + (noise + jitter) I
  Eigen::VectorXd alpha_;
  double y_mean_ = 0.0;
  double y_std_ = 1.0;
  double jitter_ = 0.0;
};

double standard_normal_cdf(double z) noexcept;

/// Probability that log R <= log lambda under a Gaussian posterior.
double probability_of_feasibility(const Prediction& prediction, double lambda_um);
double probability_of_feasibility(const GpModel& model, const PrintParameters& x, double lambda_um);

/// Multi-start coordinate search over log-hyperparameters maximizing the log
/// marginal likelihood, at most kMaxEvaluations fits. Fewer than two points
/// returns `previous` (or the defaults) untouched, as does a search in which
/// every candidate fails to factorize.
struct SearchSettings {
  static constexpr int kStarts = 8;
  static constexpr int kMaxEvaluations = 200;
};

Hyperparameters select_hyperparameters(std::span<const TrainingPoint> data, const ParameterBox& bounds,
                                       const std::optional<Hyperparameters>& previous,
                                       std::uint64_t seed);

}  // namespace fffopt::gp
