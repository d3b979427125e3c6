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

#include "ubru/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ubru/error.hpp"

namespace ubru {

Tensor2::Tensor2(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("Tensor2: buffer of length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(rows_) + "x" +
                         std::to_string(cols_));
  }
}

Tensor2 Tensor2::transposed() const {
  Tensor2 out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  return out;
}

bool Tensor2::all_finite() const { return ubru::all_finite(data_); }

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double clamp_prob(double p) { return std::clamp(p, kProbEps, 1.0 - kProbEps); }

double sigmoid(double x) {
  // Only exponentiate non-positive arguments.
  double s;
  if (x >= 0.0) {
    s = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    s = e / (1.0 + e);
  }
  return clamp_prob(s);
}

double logit(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("logit: argument " + std::to_string(p) + " outside [0, 1]");
  }
  p = clamp_prob(p);
  return std::log(p) - std::log1p(-p);
}

Tensor2 affine_scores(const Tensor2& W, std::span<const double> b, const Tensor2& X) {
  const std::size_t F = W.rows(), H = W.cols(), T = X.cols();
  if (b.size() != H || X.rows() != F) {
    throw DimensionError("affine_scores: W is " + std::to_string(F) + "x" +
                         std::to_string(H) + ", b has " + std::to_string(b.size()) +
                         " entries, X has " + std::to_string(X.rows()) + " rows");
  }
  Tensor2 out(T, H);
  for (std::size_t t = 0; t < T; ++t) {
    auto s = out.row(t);
    std::copy(b.begin(), b.end(), s.begin());
    for (std::size_t f = 0; f < F; ++f) {
      const double x = X(f, t);
      const auto w = W.row(f);
      for (std::size_t i = 0; i < H; ++i) s[i] += w[i] * x;
    }
  }
  return out;
}

double log_sum_exp(std::span<const double> v) {
  const double m = *std::max_element(v.begin(), v.end());
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - m);
  return m + std::log(acc);
}

void log_softmax_inplace(std::span<double> v) {
  const double lse = log_sum_exp(v);
  for (double& x : v) x -= lse;
}

Tensor2 reverse_columns(const Tensor2& X) {
  Tensor2 out(X.rows(), X.cols());
  const std::size_t T = X.cols();
  for (std::size_t r = 0; r < X.rows(); ++r)
    for (std::size_t t = 0; t < T; ++t) out(r, t) = X(r, T - 1 - t);
  return out;
}

Tensor2 reverse_rows(const Tensor2& M) {
  Tensor2 out(M.rows(), M.cols());
  const std::size_t T = M.rows();
  for (std::size_t t = 0; t < T; ++t) {
    auto src = M.row(T - 1 - t);
    std::copy(src.begin(), src.end(), out.row(t).begin());
  }
  return out;
}

}  // namespace ubru
