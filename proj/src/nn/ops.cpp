#include "drl/nn/ops.hpp"

#include <cmath>

#include "drl/core/errors.hpp"

namespace drl::nn {

Vec log_softmax(const Vec& logits) {
  require(logits.size() > 0, "log_softmax: empty input");
  const double m = logits.maxCoeff();
  const double lse = m + std::log((logits.array() - m).exp().sum());
  return (logits.array() - lse).matrix();
}

Vec softmax(const Vec& logits) {
  require(logits.size() > 0, "softmax: empty input");
  Vec e = (logits.array() - logits.maxCoeff()).exp().matrix();
  return e / e.sum();
}

double entropy_from_logits(const Vec& logits) {
  const Vec lp = log_softmax(logits);
  return -(lp.array().exp() * lp.array()).sum();
}

Vec softmax_backward(const Vec& probs, const Vec& dprobs) {
  return probs.cwiseProduct(dprobs - Vec::Constant(probs.size(), probs.dot(dprobs)));
}

double cross_entropy(const Vec& logits, int target, Vec* dlogits) {
  require(target >= 0 && target < logits.size(), "cross_entropy: target out of range");
  const Vec lp = log_softmax(logits);
  if (dlogits != nullptr) {
    *dlogits = lp.array().exp().matrix();
    (*dlogits)(target) -= 1.0;
  }
  return -lp(target);
}

}  // namespace drl::nn
