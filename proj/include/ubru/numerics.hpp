// Copyright 2026 The ubru Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef UBRU_NUMERICS_HPP_
#define UBRU_NUMERICS_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace ubru {

// Every probability produced by the library lies in [kProbEps, 1 - kProbEps].
inline constexpr double kProbEps = 1e-12;

using Vector = std::vector<double>;

// Dense row-major matrix of doubles. Element (r, c) lives at data[r*cols + c];
// there is no padding, so the raw buffer is the on-disk layout as well.
class Tensor2 {
 public:
  Tensor2() = default;
  Tensor2(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  // Takes ownership of a row-major buffer; throws DimensionError if its
  // length is not rows*cols.
  Tensor2(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  const std::vector<double>& storage() const { return data_; }

  Tensor2 transposed() const;
  bool all_finite() const;

  friend bool operator==(const Tensor2&, const Tensor2&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Clamps p into [kProbEps, 1 - kProbEps].
double clamp_prob(double p);

// Logistic function, evaluated without overflow and clamped to the
// probability range. Total on finite input.
double sigmoid(double x);

// log(p / (1 - p)). Throws DomainError when p is NaN or outside [0, 1];
// inputs in [0, 1] are clamped to the probability range first.
double logit(double p);

// Scores s_t = W^T x_t + b for every column x_t of X.
// W is F x H, b has H entries, X is F x T; the result is T x H.
Tensor2 affine_scores(const Tensor2& W, std::span<const double> b, const Tensor2& X);

// log(sum(exp(v))) with max-shift; v must be non-empty.
double log_sum_exp(std::span<const double> v);

// In-place log-softmax of one row.
void log_softmax_inplace(std::span<double> v);

// Reverses the time axis of an F x T input (columns).
Tensor2 reverse_columns(const Tensor2& X);
// Reverses the time axis of a T x H sequence buffer (rows).
Tensor2 reverse_rows(const Tensor2& M);

bool all_finite(std::span<const double> v);

}  // namespace ubru

#endif  // UBRU_NUMERICS_HPP_
