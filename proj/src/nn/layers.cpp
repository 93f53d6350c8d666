#include "drl/nn/layers.hpp"

#include <cmath>

#include "drl/core/errors.hpp"

namespace drl::nn {

Activation parse_activation(const std::string& name) {
  if (name == "identity") return Activation::identity;
  if (name == "tanh") return Activation::tanh;
  if (name == "relu") return Activation::relu;
  if (name == "sigmoid") return Activation::sigmoid;
  throw UsageError("unknown activation '" + name + "'");
}

void apply_activation(Activation act, Vec& v) {
  switch (act) {
    case Activation::identity: break;
    case Activation::tanh: v = v.array().tanh(); break;
    case Activation::relu: v = v.array().max(0.0); break;
    case Activation::sigmoid: v = (1.0 + (-v.array()).exp()).inverse(); break;
  }
}

void activation_backward(Activation act, const Vec& y, Vec& grad) {
  switch (act) {
    case Activation::identity: break;
    case Activation::tanh: grad.array() *= 1.0 - y.array().square(); break;
    case Activation::relu: grad.array() *= (y.array() > 0.0).cast<double>(); break;
    case Activation::sigmoid: grad.array() *= y.array() * (1.0 - y.array()); break;
  }
}

Dense::Dense(ParamLayout& layout, int in, int out, Activation act) : in_(in), out_(out), act_(act) {
  require(in > 0 && out > 0, "dense: dimensions must be positive");
  w_ = layout.allocate(static_cast<std::size_t>(in) * out);
  b_ = layout.allocate(static_cast<std::size_t>(out));
}

void Dense::init(MutParams params, RngStream& rng) const {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_));
  auto w = matrix_view(params, w_, out_, in_);
  for (int c = 0; c < in_; ++c) {
    for (int r = 0; r < out_; ++r) w(r, c) = rng.uniform(-bound, bound);
  }
  vector_view(params, b_, out_).setZero();
}

void Dense::forward(ConstParams params, const Vec& x, Vec& y) const {
  require(x.size() == in_, "dense: input has " + std::to_string(x.size()) + " features, expected " +
                               std::to_string(in_));
  y.noalias() = matrix_view(params, w_, out_, in_) * x;
  y += vector_view(params, b_, out_);
  apply_activation(act_, y);
}

void Dense::backward(ConstParams params, const Vec& x, const Vec& y, const Vec& dy, MutParams grads,
                     Vec* dx) const {
  require(dy.size() == out_ && x.size() == in_, "dense: backward dimension mismatch");
  Vec dz = dy;
  activation_backward(act_, y, dz);
  matrix_view(grads, w_, out_, in_).noalias() += dz * x.transpose();
  vector_view(grads, b_, out_) += dz;
  if (dx != nullptr) dx->noalias() = matrix_view(params, w_, out_, in_).transpose() * dz;
}

Mlp::Mlp(ParamLayout& layout, int in, const std::vector<int>& hidden, int out, Activation hidden_act,
         Activation out_act) {
  int prev = in;
  for (int h : hidden) {
    layers_.emplace_back(layout, prev, h, hidden_act);
    prev = h;
  }
  layers_.emplace_back(layout, prev, out, out_act);
}

void Mlp::init(MutParams params, RngStream& rng) const {
  for (const auto& l : layers_) l.init(params, rng);
}

const Vec& Mlp::forward(ConstParams params, const Vec& x, Cache& cache) const {
  cache.acts.resize(layers_.size() + 1);
  cache.acts[0] = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) layers_[i].forward(params, cache.acts[i], cache.acts[i + 1]);
  return cache.acts.back();
}

Vec Mlp::backward(ConstParams params, const Cache& cache, const Vec& dy, MutParams grads) const {
  require(cache.acts.size() == layers_.size() + 1, "mlp: backward without a cached forward pass");
  Vec grad = dy;
  Vec dx;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    layers_[i].backward(params, cache.acts[i], cache.acts[i + 1], grad, grads, &dx);
    grad.swap(dx);
  }
  return grad;
}

}  // namespace drl::nn
