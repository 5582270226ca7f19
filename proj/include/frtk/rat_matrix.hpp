#pragma once

#include <utility>
#include <vector>

#include "frtk/errors.hpp"
#include "frtk/rational.hpp"

namespace frtk {

// Dense row-major matrix of exact rationals. Only the handful of operations
// the reduction engines need.
class RatMatrix {
 public:
  RatMatrix() = default;
  RatMatrix(int rows, int cols)
      : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols) {
    if (rows < 0 || cols < 0) throw DimensionMismatch("negative matrix shape");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Rational& at(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
  const Rational& at(int r, int c) const {
    return data_[static_cast<size_t>(r) * cols_ + c];
  }

  // y^T A for y of length rows(); result has length cols().
  RatVec tmul(const RatVec& y) const {
    if (static_cast<int>(y.size()) != rows_)
      throw DimensionMismatch("tmul: vector length != rows");
    RatVec out(cols_, Rational(0));
    for (int r = 0; r < rows_; ++r) {
      if (sgn(y[r]) == 0) continue;
      for (int c = 0; c < cols_; ++c) {
        const Rational& a = at(r, c);
        if (sgn(a) != 0) out[c] += y[r] * a;
      }
    }
    return out;
  }

  // A x for x of length cols(); result has length rows().
  RatVec mul(const RatVec& x) const {
    if (static_cast<int>(x.size()) != cols_)
      throw DimensionMismatch("mul: vector length != cols");
    RatVec out(rows_, Rational(0));
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) {
        const Rational& a = at(r, c);
        if (sgn(a) != 0 && sgn(x[c]) != 0) out[r] += a * x[c];
      }
    return out;
  }

 private:
  int rows_ = 0;
  int cols_ = 0;
  RatVec data_;
};

}  // namespace frtk
