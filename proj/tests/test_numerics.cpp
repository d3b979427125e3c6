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

#include <cmath>
#include <limits>

#include "doctest.h"
#include "ubru/error.hpp"
#include "ubru/numerics.hpp"
#include "ubru/random.hpp"

using namespace ubru;

namespace {

Tensor2 random_tensor(Rng& rng, std::size_t rows, std::size_t cols) {
  Tensor2 out(rows, cols);
  for (double& v : out.data()) v = rng.normal();
  return out;
}

// Straightforward triple loop, kept independent of affine_scores.
Tensor2 naive_scores(const Tensor2& W, const Vector& b, const Tensor2& X) {
  Tensor2 out(X.cols(), W.cols());
  for (std::size_t t = 0; t < X.cols(); ++t)
    for (std::size_t h = 0; h < W.cols(); ++h) {
      double acc = b[h];
      for (std::size_t f = 0; f < W.rows(); ++f) acc += W(f, h) * X(f, t);
      out(t, h) = acc;
    }
  return out;
}

}  // namespace

TEST_CASE("sigmoid reference values") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(sigmoid(-745.0) == kProbEps);
  CHECK(sigmoid(-1e6) == kProbEps);
  CHECK(sigmoid(1e6) == 1.0 - kProbEps);
  CHECK(std::isfinite(sigmoid(-800.0)));
}

TEST_CASE("logit reference values") {
  CHECK(logit(0.5) == 0.0);
  CHECK(logit(0.75) == doctest::Approx(std::log(3.0)).epsilon(1e-15));
  CHECK(std::abs(logit(sigmoid(7.3)) - 7.3) < 1e-10);
  // Endpoints are clamped rather than infinite.
  CHECK(logit(0.0) == doctest::Approx(std::log(kProbEps)).epsilon(1e-9));
  CHECK(std::isfinite(logit(1.0)));
}

TEST_CASE("logit rejects arguments outside the unit interval") {
  CHECK_THROWS_AS(logit(-0.1), DomainError);
  CHECK_THROWS_AS(logit(1.5), DomainError);
  CHECK_THROWS_AS(logit(std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST_CASE("sigmoid is monotone and antisymmetric on random pairs") {
  Rng rng(11);
  for (int k = 0; k < 10000; ++k) {
    const double x = rng.uniform(-40.0, 40.0), y = rng.uniform(-40.0, 40.0);
    const double lo = std::min(x, y), hi = std::max(x, y);
    CHECK(sigmoid(lo) <= sigmoid(hi));
    if (std::abs(x) < 27.0) CHECK(std::abs(sigmoid(x) + sigmoid(-x) - 1.0) <= 1e-15);
  }
}

TEST_CASE("logit inverts sigmoid") {
  // Near p = 1 the double nearest sigmoid(x) carries an absolute error of
  // about 2^-53, which logit amplifies by 1/(1-p) ~ e^x. Up to x = 13 this
  // stays below 1e-10; beyond it the round trip is limited by that bound.
  Rng rng(12);
  for (int k = 0; k < 10000; ++k) {
    const double x = rng.uniform(-20.0, 13.0);
    CHECK(std::abs(logit(sigmoid(x)) - x) < 1e-10);
  }
  for (int k = 0; k < 2000; ++k) {
    const double x = rng.uniform(13.0, 20.0);
    const double bound = 2.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::exp(x));
    CHECK(std::abs(logit(sigmoid(x)) - x) <= bound);
  }
}

TEST_CASE("affine_scores small cases") {
  SUBCASE("zero map") {
    Rng rng(1);
    const Tensor2 X = random_tensor(rng, 3, 7);
    const Tensor2 s = affine_scores(Tensor2(3, 2), Vector(2, 0.0), X);
    CHECK(s.rows() == 7);
    CHECK(s.cols() == 2);
    for (double v : s.data()) CHECK(v == 0.0);
  }
  SUBCASE("scalar") {
    const Tensor2 s = affine_scores(Tensor2(1, 1, 2.0), Vector{-1.0}, Tensor2(1, 1, 3.0));
    CHECK(s(0, 0) == 5.0);
  }
}

TEST_CASE("affine_scores matches a triple loop") {
  Rng rng(2);
  const Tensor2 W = random_tensor(rng, 3, 4);
  const Tensor2 X = random_tensor(rng, 3, 5);
  const Vector b{0.5, -1.0, 2.0, 0.25};
  CHECK(affine_scores(W, b, X) == naive_scores(W, b, X));
}

TEST_CASE("affine_scores is linear in the input") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const Tensor2 W = random_tensor(rng, 4, 3);
    const Vector b{rng.normal(), rng.normal(), rng.normal()};
    const Tensor2 X1 = random_tensor(rng, 4, 6), X2 = random_tensor(rng, 4, 6);
    Tensor2 sum(4, 6);
    for (std::size_t k = 0; k < sum.size(); ++k) sum.data()[k] = X1.data()[k] + X2.data()[k];
    const Tensor2 lhs = affine_scores(W, b, sum);
    const Tensor2 a = affine_scores(W, b, X1), c = affine_scores(W, Vector(3, 0.0), X2);
    for (std::size_t k = 0; k < lhs.size(); ++k)
      CHECK(std::abs(lhs.data()[k] - a.data()[k] - c.data()[k]) < 1e-12);
  }
}

TEST_CASE("affine_scores rejects mismatched shapes") {
  CHECK_THROWS_AS(affine_scores(Tensor2(3, 2), Vector(3), Tensor2(3, 4)), DimensionError);
  CHECK_THROWS_AS(affine_scores(Tensor2(3, 2), Vector(2), Tensor2(2, 4)), DimensionError);
}

TEST_CASE("log_sum_exp and log_softmax are stable") {
  const Vector v{1000.0, 1000.0};
  CHECK(log_sum_exp(v) == doctest::Approx(1000.0 + std::log(2.0)));
  Vector w{-1000.0, 0.0, 3.0};
  log_softmax_inplace(w);
  double total = 0.0;
  for (double x : w) total += std::exp(x);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(w[0] < -1000.0);
}

TEST_CASE("tensor helpers") {
  Tensor2 m(2, 3, std::vector<double>{1, 2, 3, 4, 5, 6});
  CHECK(m(1, 0) == 4.0);
  CHECK(m.transposed()(2, 1) == 6.0);
  CHECK(reverse_columns(m)(0, 0) == 3.0);
  CHECK(reverse_rows(m)(0, 2) == 6.0);
  CHECK(reverse_rows(reverse_rows(m)) == m);
  CHECK_THROWS_AS(Tensor2(2, 2, std::vector<double>{1, 2, 3}), DimensionError);
  m(0, 1) = std::numeric_limits<double>::infinity();
  CHECK_FALSE(m.all_finite());
}

TEST_CASE("rng streams are reproducible and derived seeds differ") {
  Rng a(42), b(42);
  for (int k = 0; k < 100; ++k) CHECK(a.normal() == b.normal());
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  Rng c(5);
  for (int k = 0; k < 1000; ++k) {
    const auto v = c.uniform_int(-3, 3);
    CHECK(v >= -3);
    CHECK(v <= 3);
  }
}
