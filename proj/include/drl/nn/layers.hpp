#pragma once

#include <string>
#include <vector>

#include "drl/core/rng.hpp"
#include "drl/nn/params.hpp"

namespace drl::nn {

enum class Activation { identity, tanh, relu, sigmoid };

Activation parse_activation(const std::string& name);

/// y = act(W x + b), W stored column-major (out x in).
class Dense {
 public:
  Dense(ParamLayout& layout, int in, int out, Activation act);

  int in() const { return in_; }
  int out() const { return out_; }
  Activation activation() const { return act_; }
  std::size_t weight_offset() const { return w_; }
  std::size_t bias_offset() const { return b_; }
  std::size_t param_count() const { return static_cast<std::size_t>(in_ * out_ + out_); }

  /// Scaled-uniform fan-in init: W ~ U(-1/sqrt(in), 1/sqrt(in)), b = 0.
  void init(MutParams params, RngStream& rng) const;

  void forward(ConstParams params, const Vec& x, Vec& y) const;
  /// Accumulates dL/dW and dL/db into `grads`; writes dL/dx when `dx` is set.
  /// `y` is the forward output (activation derivatives are taken from it).
  void backward(ConstParams params, const Vec& x, const Vec& y, const Vec& dy, MutParams grads,
                Vec* dx) const;

 private:
  int in_;
  int out_;
  Activation act_;
  std::size_t w_;
  std::size_t b_;
};

/// Stack of dense layers: hidden layers share one activation, the output
/// layer has its own.
class Mlp {
 public:
  struct Cache {
    std::vector<Vec> acts;  // acts[0] = input, acts[i + 1] = output of layer i
    const Vec& output() const { return acts.back(); }
  };

  Mlp(ParamLayout& layout, int in, const std::vector<int>& hidden, int out, Activation hidden_act,
      Activation out_act);

  int in() const { return layers_.front().in(); }
  int out() const { return layers_.back().out(); }
  const std::vector<Dense>& layers() const { return layers_; }

  void init(MutParams params, RngStream& rng) const;
  const Vec& forward(ConstParams params, const Vec& x, Cache& cache) const;
  /// Returns dL/dinput; parameter gradients are accumulated into `grads`.
  Vec backward(ConstParams params, const Cache& cache, const Vec& dy, MutParams grads) const;

 private:
  std::vector<Dense> layers_;
};

void apply_activation(Activation act, Vec& v);
/// Multiplies `grad` in place by act'(pre-activation), expressed through the
/// activation output y.
void activation_backward(Activation act, const Vec& y, Vec& grad);

}  // namespace drl::nn
