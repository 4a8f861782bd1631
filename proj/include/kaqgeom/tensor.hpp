#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace kaqgeom {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;

/// Dense cubic array of doubles, row-major over its indices.
///
/// All indices share one extent `n`, which is the only shape curvature code
/// ever needs (every slot runs over the Lie algebra directions).
template <std::size_t Rank>
class DenseTensor
{
public:
  DenseTensor() = default;
  explicit DenseTensor(int n) : n_(n), data_(volume(n), 0.0) {}

  int extent() const { return n_; }
  std::size_t size() const { return data_.size(); }

  template <typename... I>
  double & operator()(I... idx)
  {
    static_assert(sizeof...(I) == Rank);
    return data_[offset(idx...)];
  }

  template <typename... I>
  double operator()(I... idx) const
  {
    static_assert(sizeof...(I) == Rank);
    return data_[offset(idx...)];
  }

  double * data() { return data_.data(); }
  const double * data() const { return data_.data(); }

  double max_abs() const
  {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  double squared_norm() const
  {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return s;
  }

  /// Max-norm distance to another tensor of equal extent.
  double max_abs_diff(const DenseTensor & other) const
  {
    assert(other.n_ == n_);
    double m = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) m = std::max(m, std::abs(data_[i] - other.data_[i]));
    return m;
  }

  /// View with the first index as rows and the remaining indices flattened as columns.
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> leading_rows() const
  {
    return {data_.data(), n_, static_cast<Eigen::Index>(data_.size() / static_cast<std::size_t>(n_))};
  }

private:
  static std::size_t volume(int n)
  {
    std::size_t v = 1;
    for (std::size_t r = 0; r < Rank; ++r) v *= static_cast<std::size_t>(n);
    return v;
  }

  template <typename... I>
  std::size_t offset(I... idx) const
  {
    std::size_t off = 0;
    ((off = off * static_cast<std::size_t>(n_) + static_cast<std::size_t>(idx)), ...);
    return off;
  }

  int n_ = 0;
  std::vector<double> data_;
};

using Tensor3 = DenseTensor<3>;
using Tensor4 = DenseTensor<4>;

}  // namespace kaqgeom
