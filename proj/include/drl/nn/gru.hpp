#pragma once

#include "drl/core/rng.hpp"
#include "drl/nn/params.hpp"

namespace drl::nn {

/// Gated recurrent unit.
///
///   z  = sigmoid(Wz x + Uz h + bz)
///   r  = sigmoid(Wr x + Ur h + br)
///   c  = tanh(Wc x + Uc (r * h) + bc)
///   h' = (1 - z) * h + z * c
///
/// The cell output equals h'. Input weights are stacked [Wz; Wr; Wc]
/// (3H x in), recurrent weights [Uz; Ur] (2H x H) and Uc (H x H), biases
/// [bz; br; bc].
class GruCell {
 public:
  struct Cache {
    Vec x, h, z, r, c, h_next;
  };

  GruCell(ParamLayout& layout, int in, int hidden);

  int in() const { return in_; }
  int hidden() const { return hidden_; }
  std::size_t bias_offset() const { return b_; }

  /// Fan-in uniform input weights, orthogonal recurrent blocks, zero biases.
  void init(MutParams params, RngStream& rng) const;

  void forward(ConstParams params, const Vec& x, const Vec& h, Cache& cache) const;
  /// Given dL/dh', accumulates parameter gradients and writes dL/dx, dL/dh.
  void backward(ConstParams params, const Cache& cache, const Vec& dh_next, MutParams grads, Vec& dx,
                Vec& dh) const;

 private:
  int in_;
  int hidden_;
  std::size_t wx_;   // 3H x in
  std::size_t uzr_;  // 2H x H
  std::size_t uc_;   // H x H
  std::size_t b_;    // 3H
};

}  // namespace drl::nn
