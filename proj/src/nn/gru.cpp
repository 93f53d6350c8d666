#include "drl/nn/gru.hpp"

#include <cmath>

#include "drl/core/errors.hpp"

namespace drl::nn {
namespace {

Mat orthogonal(int n, RngStream& rng) {
  Mat a(n, n);
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) a(r, c) = rng.normal();
  }
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  // Sign fix makes the distribution uniform over the orthogonal group.
  const Mat rmat = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < n; ++c) {
    if (rmat(c, c) < 0.0) q.col(c) *= -1.0;
  }
  return q;
}

Vec sigmoid(const Vec& v) { return (1.0 + (-v.array()).exp()).inverse().matrix(); }

}  // namespace

GruCell::GruCell(ParamLayout& layout, int in, int hidden) : in_(in), hidden_(hidden) {
  require(in > 0 && hidden > 0, "gru: dimensions must be positive");
  wx_ = layout.allocate(static_cast<std::size_t>(3 * hidden) * in);
  uzr_ = layout.allocate(static_cast<std::size_t>(2 * hidden) * hidden);
  uc_ = layout.allocate(static_cast<std::size_t>(hidden) * hidden);
  b_ = layout.allocate(static_cast<std::size_t>(3 * hidden));
}

void GruCell::init(MutParams params, RngStream& rng) const {
  const int H = hidden_;
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_));
  auto wx = matrix_view(params, wx_, 3 * H, in_);
  for (int c = 0; c < in_; ++c) {
    for (int r = 0; r < 3 * H; ++r) wx(r, c) = rng.uniform(-bound, bound);
  }
  auto uzr = matrix_view(params, uzr_, 2 * H, H);
  uzr.topRows(H) = orthogonal(H, rng);
  uzr.bottomRows(H) = orthogonal(H, rng);
  matrix_view(params, uc_, H, H) = orthogonal(H, rng);
  vector_view(params, b_, 3 * H).setZero();
}

void GruCell::forward(ConstParams params, const Vec& x, const Vec& h, Cache& cache) const {
  const int H = hidden_;
  require(x.size() == in_, "gru: input has " + std::to_string(x.size()) + " features, expected " +
                               std::to_string(in_));
  require(h.size() == H, "gru: hidden state size mismatch");
  cache.x = x;
  cache.h = h;
  Vec gx = matrix_view(params, wx_, 3 * H, in_) * x + vector_view(params, b_, 3 * H);
  Vec zr = sigmoid(gx.head(2 * H) + matrix_view(params, uzr_, 2 * H, H) * h);
  cache.z = zr.head(H);
  cache.r = zr.tail(H);
  const Vec rh = cache.r.cwiseProduct(h);
  cache.c = (gx.tail(H) + matrix_view(params, uc_, H, H) * rh).array().tanh().matrix();
  cache.h_next = (1.0 - cache.z.array()) * h.array() + cache.z.array() * cache.c.array();
}

void GruCell::backward(ConstParams params, const Cache& cache, const Vec& dh_next, MutParams grads, Vec& dx,
                       Vec& dh) const {
  const int H = hidden_;
  require(dh_next.size() == H && cache.h_next.size() == H, "gru: backward without a cached forward pass");
  const Vec dz = dh_next.cwiseProduct(cache.c - cache.h);
  const Vec dc = dh_next.cwiseProduct(cache.z);
  dh = dh_next.cwiseProduct(Vec::Ones(H) - cache.z);

  Vec dgx(3 * H);
  dgx.tail(H) = dc.array() * (1.0 - cache.c.array().square());
  const Vec rh = cache.r.cwiseProduct(cache.h);
  const auto dac = dgx.tail(H);
  matrix_view(grads, uc_, H, H).noalias() += dac * rh.transpose();
  const Vec drh = matrix_view(params, uc_, H, H).transpose() * dac;
  const Vec dr = drh.cwiseProduct(cache.h);
  dh += drh.cwiseProduct(cache.r);

  dgx.head(H) = dz.array() * cache.z.array() * (1.0 - cache.z.array());
  dgx.segment(H, H) = dr.array() * cache.r.array() * (1.0 - cache.r.array());
  const auto dzr = dgx.head(2 * H);
  matrix_view(grads, uzr_, 2 * H, H).noalias() += dzr * cache.h.transpose();
  dh.noalias() += matrix_view(params, uzr_, 2 * H, H).transpose() * dzr;

  matrix_view(grads, wx_, 3 * H, in_).noalias() += dgx * cache.x.transpose();
  vector_view(grads, b_, 3 * H) += dgx;
  dx.noalias() = matrix_view(params, wx_, 3 * H, in_).transpose() * dgx;
}

}  // namespace drl::nn
