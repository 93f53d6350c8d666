#include "drl/nn/adam.hpp"

#include <cmath>

#include "drl/core/errors.hpp"

namespace drl::nn {

double global_norm(std::span<const double> values) {
  double sq = 0.0;
  for (double v : values) sq += v * v;
  return std::sqrt(sq);
}

Adam::Adam(std::size_t n_params, AdamConfig config) : config_(config), m_(n_params, 0.0), v_(n_params, 0.0) {
  require(config_.lr > 0.0, "adam: learning rate must be positive");
  require(config_.beta1 >= 0.0 && config_.beta1 < 1.0 && config_.beta2 >= 0.0 && config_.beta2 < 1.0,
          "adam: betas must lie in [0, 1)");
}

void Adam::restore(std::int64_t steps, std::vector<double> m, std::vector<double> v) {
  require(m.size() == m_.size() && v.size() == v_.size(), "adam: restored moments have the wrong shape");
  t_ = steps;
  m_ = std::move(m);
  v_ = std::move(v);
}

double Adam::step(std::span<double> params, std::span<const double> grads) {
  require(params.size() == m_.size() && grads.size() == m_.size(), "adam: shape mismatch");
  const double norm = global_norm(grads);
  if (!std::isfinite(norm)) throw TrainingError("adam: non-finite gradient");
  const double scale = (config_.clip_norm > 0.0 && norm > config_.clip_norm) ? config_.clip_norm / norm : 1.0;
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i] * scale;
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * g;
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * g * g;
    params[i] -= config_.lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + config_.eps);
  }
  return norm;
}

void Adam::set_learning_rate(double lr) {
  require(lr > 0.0, "adam: learning rate must be positive");
  config_.lr = lr;
}

}  // namespace drl::nn
