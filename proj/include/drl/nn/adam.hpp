#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace drl::nn {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double clip_norm = 5.0;  // global-norm clip; <= 0 disables
};

/// Adam with bias correction. Moment vectors mirror the flat parameter
/// vector.
class Adam {
 public:
  Adam(std::size_t n_params, AdamConfig config);

  const AdamConfig& config() const { return config_; }
  void set_learning_rate(double lr);
  std::int64_t steps() const { return t_; }
  const std::vector<double>& first_moment() const { return m_; }
  const std::vector<double>& second_moment() const { return v_; }
  void restore(std::int64_t steps, std::vector<double> m, std::vector<double> v);

  /// Clips `grads` to the configured global norm, then updates `params`.
  /// Returns the gradient norm before clipping. Non-finite gradients raise
  /// TrainingError and leave parameters untouched.
  double step(std::span<double> params, std::span<const double> grads);

 private:
  AdamConfig config_;
  std::int64_t t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

double global_norm(std::span<const double> values);

}  // namespace drl::nn
