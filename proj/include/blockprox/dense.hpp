#ifndef BLOCKPROX_DENSE_HPP_
#define BLOCKPROX_DENSE_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "blockprox/errors.hpp"

namespace blockprox {

/// Dense column-major matrix. Column views are contiguous spans, which is the
/// access pattern the factorization kernels are built around.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& at(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }
  double at(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }

  std::span<double> col(std::size_t c) {
    return std::span<double>(data_.data() + c * rows_, rows_);
  }
  std::span<const double> col(std::size_t c) const {
    return std::span<const double>(data_.data() + c * rows_, rows_);
  }

  std::span<double> flat() { return data_; }
  std::span<const double> flat() const { return data_; }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

}  // namespace blockprox

#endif  // BLOCKPROX_DENSE_HPP_
