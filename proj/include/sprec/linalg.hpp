// include/sprec/linalg.hpp

// Copyright 2026  The sprec authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SPREC_LINALG_HPP_
#define SPREC_LINALG_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace sprec {

// Dense row-major matrix of doubles. Everything this project touches is tiny
// (cepstral dimension <= ~20, frame counts in the thousands), so a flat
// std::vector with spans over rows is all we need.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  static Matrix identity(std::size_t n);

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::size_t size() const { return data_.size(); }

  void append_row(std::span<const double> values);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Lower Cholesky factor of a symmetric positive-definite matrix.
// Throws DataError if the factorization hits a non-positive pivot.
Matrix cholesky(const Matrix& a);

// Inverse of a symmetric positive-definite matrix via its Cholesky factor.
Matrix invert_spd(const Matrix& a);

// tr(a * b).
double trace_product(const Matrix& a, const Matrix& b);

// Largest |a(i,j) - a(j,i)|.
double max_asymmetry(const Matrix& a);

}  // namespace sprec

#endif  // SPREC_LINALG_HPP_
