#include "fffopt/gp.hpp"

#include <cmath>
#include <numbers>

#include "fffopt/error.hpp"

namespace fffopt::gp {

bool HyperparameterBox::contains(const Hyperparameters& h) noexcept {
  for (double l : h.length_scales)
    if (!(l >= length_min && l <= length_max)) return false;
  return h.signal_variance >= signal_min && h.signal_variance <= signal_max &&
         h.noise_variance >= noise_min && h.noise_variance <= noise_max;
}

Hyperparameters default_hyperparameters() noexcept { return Hyperparameters{}; }

void validate(const Hyperparameters& h) {
  auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!ok(h.length_scales[0]) || !ok(h.length_scales[1]))
    throw InvalidInput("length scales must be positive");
  if (!ok(h.signal_variance)) throw InvalidInput("signal variance must be positive");
  if (!ok(h.noise_variance)) throw InvalidInput("noise variance must be positive");
}

double kernel(const UnitPoint& a, const UnitPoint& b, const Hyperparameters& hyper) noexcept {
  double r2 = 0.0;
  for (std::size_t d = 0; d < 2; ++d) {
    const double t = (a[d] - b[d]) / hyper.length_scales[d];
    r2 += t * t;
  }
  return hyper.signal_variance * std::exp(-0.5 * r2);
}

GpModel GpModel::fit(std::span<const TrainingPoint> data, const Hyperparameters& hyper,
                     const ParameterBox& bounds) {
  if (data.empty()) throw InvalidInput("GP fit needs at least one observation");
  validate(hyper);
  bounds.validate();

  GpModel m;
  m.hyper_ = hyper;
  m.bounds_ = bounds;
  const auto n = static_cast<Eigen::Index>(data.size());
  m.inputs_.reserve(data.size());
  Eigen::VectorXd logs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = data[static_cast<std::size_t>(i)];
    if (!(p.roughness_um > 0.0) || !std::isfinite(p.roughness_um))
      throw InvalidInput("roughness must be positive for the log transform");
    if (!bounds.contains(p.params)) throw InvalidInput("training point outside the parameter box");
    m.inputs_.push_back(bounds.normalize(p.params));
    logs[i] = std::log(p.roughness_um);
  }

  m.y_mean_ = logs.mean();
  m.y_std_ = 1.0;
  if (n >= 2) {
    const double sd = std::sqrt((logs.array() - m.y_mean_).square().sum() / static_cast<double>(n));
    if (sd > 0.0) m.y_std_ = sd;
  }
  m.targets_ = (logs.array() - m.y_mean_) / m.y_std_;

  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      gram(i, j) = gram(j, i) = kernel(m.inputs_[static_cast<std::size_t>(i)],
                                       m.inputs_[static_cast<std::size_t>(j)], hyper);

  for (double jitter : kJitterLadder) {
    Eigen::MatrixXd a = gram;
    a.diagonal().array() += hyper.noise_variance + jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) continue;
    Eigen::MatrixXd lower = llt.matrixL();
    if (!lower.diagonal().allFinite() || (lower.diagonal().array() <= 0.0).any()) continue;
    m.factor_ = std::move(lower);
    m.alpha_ = llt.solve(m.targets_);
    m.jitter_ = jitter;
    return m;
  }
  throw NumericalError("Cholesky factorization failed after jitter retries");
}

Prediction GpModel::predict_unit(const UnitPoint& u) const {
  const auto n = static_cast<Eigen::Index>(inputs_.size());
  Eigen::VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i) k[i] = kernel(u, inputs_[static_cast<std::size_t>(i)], hyper_);
  const double mean_std = k.dot(alpha_);
  const Eigen::VectorXd v = factor_.triangularView<Eigen::Lower>().solve(k);
  const double var_std = std::max(0.0, hyper_.signal_variance - v.squaredNorm());
  return {y_mean_ + y_std_ * mean_std, y_std_ * std::sqrt(var_std)};
}

Prediction GpModel::predict(const PrintParameters& x) const { return predict_unit(bounds_.normalize(x)); }

double GpModel::prior_std_log() const noexcept { return y_std_ * std::sqrt(hyper_.signal_variance); }

double GpModel::log_marginal_likelihood() const noexcept {
  const double n = static_cast<double>(targets_.size());
  return -0.5 * targets_.dot(alpha_) - factor_.diagonal().array().log().sum() -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

double standard_normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double probability_of_feasibility(const Prediction& prediction, double lambda_um) {
  if (!(lambda_um > 0.0)) throw InvalidInput("lambda must be positive");
  const double bound = std::log(lambda_um);
  if (prediction.std_log == 0.0) return prediction.mean_log <= bound ? 1.0 : 0.0;
  return standard_normal_cdf((bound - prediction.mean_log) / prediction.std_log);
}

double probability_of_feasibility(const GpModel& model, const PrintParameters& x, double lambda_um) {
  return probability_of_feasibility(model.predict(x), lambda_um);
}

}  // namespace fffopt::gp
