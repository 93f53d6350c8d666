#pragma once

#include "drl/nn/params.hpp"

namespace drl::nn {

Vec softmax(const Vec& logits);
Vec log_softmax(const Vec& logits);
/// Shannon entropy (nats) of softmax(logits).
double entropy_from_logits(const Vec& logits);

/// Backward through p = softmax(l): returns dL/dl given dL/dp.
Vec softmax_backward(const Vec& probs, const Vec& dprobs);

/// Cross-entropy -log softmax(logits)[target] and its gradient w.r.t. logits.
double cross_entropy(const Vec& logits, int target, Vec* dlogits);

}  // namespace drl::nn
