#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Dense>

namespace drl::nn {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Read-only view of a network's flat parameter vector.
using ConstParams = std::span<const double>;
/// Writable view, also used for gradient accumulators of the same layout.
using MutParams = std::span<double>;

/// Hands out contiguous slices of one flat parameter vector. Layers remember
/// their offsets, so a whole agent (policy, value, predictor) lives in a
/// single std::vector<double> that can be copied as a snapshot, fed to Adam,
/// or perturbed element-wise by a finite-difference check.
class ParamLayout {
 public:
  std::size_t allocate(std::size_t n) {
    const std::size_t offset = size_;
    size_ += n;
    return offset;
  }
  std::size_t size() const { return size_; }

 private:
  std::size_t size_ = 0;
};

inline Eigen::Map<const Mat> matrix_view(ConstParams p, std::size_t offset, int rows, int cols) {
  return Eigen::Map<const Mat>(p.data() + offset, rows, cols);
}
inline Eigen::Map<Mat> matrix_view(MutParams p, std::size_t offset, int rows, int cols) {
  return Eigen::Map<Mat>(p.data() + offset, rows, cols);
}
inline Eigen::Map<const Vec> vector_view(ConstParams p, std::size_t offset, int n) {
  return Eigen::Map<const Vec>(p.data() + offset, n);
}
inline Eigen::Map<Vec> vector_view(MutParams p, std::size_t offset, int n) {
  return Eigen::Map<Vec>(p.data() + offset, n);
}

}  // namespace drl::nn
