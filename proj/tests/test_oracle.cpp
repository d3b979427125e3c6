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


#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ubru/error.hpp"
#include "ubru/oracle.hpp"
#include "ubru/random.hpp"

using namespace ubru;

namespace {

// Full multivariate normal density, evaluated with an explicit inverse and
// determinant.
double gaussian_density(const Vector& x, const Vector& mean, const Tensor2& cov) {
  const auto F = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd S(F, F);
  Eigen::VectorXd d(F);
  for (Eigen::Index i = 0; i < F; ++i) {
    d(i) = x[i] - mean[i];
    for (Eigen::Index j = 0; j < F; ++j) S(i, j) = cov(i, j);
  }
  const double quad = d.dot(S.inverse() * d);
  const double norm = std::pow(2.0 * std::numbers::pi, 0.5 * F) * std::sqrt(S.determinant());
  return std::exp(-0.5 * quad) / norm;
}

double ratio_from_params(const UnitEmissionParams& p, const Vector& x) {
  double s = p.b;
  for (std::size_t f = 0; f < x.size(); ++f) s += p.W[f] * x[f];
  return std::exp(-s);
}

ChainSpec random_chain(Rng& rng) {
  return ChainSpec{rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)};
}

Vector random_ratios(Rng& rng, std::size_t T) {
  Vector r(T);
  for (double& v : r) v = std::exp(rng.uniform(-3.0, 3.0));
  return r;
}

}  // namespace

TEST_CASE("identical emission distributions give a zero weight vector") {
  Tensor2 sigma(2, 2);
  sigma(0, 0) = 2.0;
  sigma(1, 1) = 1.0;
  sigma(0, 1) = sigma(1, 0) = 0.3;
  const GaussianEmissionModel model{{0.4, -1.0}, {0.4, -1.0}, sigma};
  const UnitEmissionParams p = params_from_gaussian(model);
  CHECK(p.W == Vector{0.0, 0.0});
  CHECK(p.b == doctest::Approx(0.0));
}

TEST_CASE("one-dimensional emission model reproduces the density ratio") {
  const GaussianEmissionModel model{{1.0}, {-1.0}, Tensor2(1, 1, 1.0)};
  const UnitEmissionParams p = params_from_gaussian(model);
  // N(x; -1, 1) / N(x; 1, 1) = exp(-2x), so W = 2 and b = 0.
  CHECK(p.W[0] == doctest::Approx(2.0));
  CHECK(std::abs(p.b) < 1e-15);
  Rng rng(1);
  for (int k = 0; k < 10; ++k) {
    const Vector x{rng.uniform(-3.0, 3.0)};
    const double expected = gaussian_density(x, model.nu, model.sigma) /
                            gaussian_density(x, model.mu, model.sigma);
    CHECK(ratio_from_params(p, x) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("random three-dimensional model reproduces the density ratio") {
  Rng rng(2);
  for (int model_idx = 0; model_idx < 5; ++model_idx) {
    Eigen::Matrix3d A;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) A(i, j) = rng.normal();
    const Eigen::Matrix3d S = A * A.transpose() + 0.5 * Eigen::Matrix3d::Identity();
    GaussianEmissionModel model{Vector(3), Vector(3), Tensor2(3, 3)};
    for (int i = 0; i < 3; ++i) {
      model.mu[i] = rng.uniform(-1.0, 1.0);
      model.nu[i] = rng.uniform(-1.0, 1.0);
      for (int j = 0; j < 3; ++j) model.sigma(i, j) = S(i, j);
    }
    const UnitEmissionParams p = params_from_gaussian(model);
    for (int k = 0; k < 100; ++k) {
      const Vector x{rng.normal(), rng.normal(), rng.normal()};
      const double expected = gaussian_density(x, model.nu, model.sigma) /
                              gaussian_density(x, model.mu, model.sigma);
      CHECK(ratio_from_params(p, x) == doctest::Approx(expected).epsilon(1e-9));
      CHECK(std::exp(model.log_likelihood_ratio(x)) == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("invalid emission models are rejected") {
  Tensor2 asym(2, 2);
  asym(0, 0) = asym(1, 1) = 1.0;
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(params_from_gaussian({{0, 0}, {1, 1}, asym}), DomainError);
  Tensor2 indefinite(2, 2);
  indefinite(0, 0) = 1.0;
  indefinite(1, 1) = -1.0;
  CHECK_THROWS_AS(params_from_gaussian({{0, 0}, {1, 1}, indefinite}), DomainError);
  CHECK_THROWS_AS(params_from_gaussian({{0, 0}, {1}, Tensor2(2, 2)}), DimensionError);
}

TEST_CASE("single Bayes update") {
  const ChainSpec chain{0.5, 0.5, 0.5};
  const Vector r{1.0 / 3.0};
  CHECK(enumerate_posterior(chain, r, PosteriorMode::kFiltered)[0] == doctest::Approx(0.75));
  CHECK(enumerate_posterior(chain, r, PosteriorMode::kSmoothed)[0] == doctest::Approx(0.75));
  const auto fb = scaled_forward_backward(chain, {{1.0}, {1.0 / 3.0}});
  CHECK(fb.filtered[0] == doctest::Approx(0.75));
}

TEST_CASE("uninformative evidence gives the chain marginals") {
  Rng rng(3);
  for (int k = 0; k < 20; ++k) {
    const ChainSpec chain = random_chain(rng);
    const Vector m = chain_marginals(chain, 10);
    double expect = chain.rho0;
    for (std::size_t t = 0; t < 10; ++t) {
      expect = chain.tau11 * expect + chain.tau01 * (1.0 - expect);
      CHECK(m[t] == doctest::Approx(expect).epsilon(1e-14));
    }
    const Vector smooth = enumerate_posterior(chain, Vector(10, 1.0), PosteriorMode::kSmoothed);
    const auto fb = scaled_forward_backward(chain, {Vector(10, 0.2), Vector(10, 0.2)});
    for (std::size_t t = 0; t < 10; ++t) {
      CHECK(smooth[t] == doctest::Approx(m[t]).epsilon(1e-12));
      CHECK(fb.smoothed[t] == doctest::Approx(m[t]).epsilon(1e-12));
    }
  }
}

TEST_CASE("enumeration and forward-backward agree") {
  Rng rng(4);
  for (int k = 0; k < 50; ++k) {
    const ChainSpec chain = random_chain(rng);
    const auto T = static_cast<std::size_t>(rng.uniform_int(1, 12));
    const Vector r = random_ratios(rng, T);
    const Vector filt = enumerate_posterior(chain, r, PosteriorMode::kFiltered);
    const Vector smooth = enumerate_posterior(chain, r, PosteriorMode::kSmoothed);
    const auto fb = scaled_forward_backward(chain, {Vector(T, 1.0), r});
    for (std::size_t t = 0; t < T; ++t) {
      CHECK(std::abs(filt[t] - fb.filtered[t]) < 1e-10);
      CHECK(std::abs(smooth[t] - fb.smoothed[t]) < 1e-10);
    }
  }
}

TEST_CASE("posteriors depend only on the likelihood ratio") {
  Rng rng(5);
  for (int k = 0; k < 20; ++k) {
    const ChainSpec chain = random_chain(rng);
    const Vector r = random_ratios(rng, 15);
    EmissionLikelihoods scaled{Vector(15), Vector(15)};
    for (std::size_t t = 0; t < 15; ++t) {
      const double c = std::exp(rng.uniform(-5.0, 5.0));
      scaled.b1[t] = c;
      scaled.b2[t] = c * r[t];
    }
    const auto a = scaled_forward_backward(chain, {Vector(15, 1.0), r});
    const auto b = scaled_forward_backward(chain, scaled);
    for (std::size_t t = 0; t < 15; ++t) {
      CHECK(std::abs(a.filtered[t] - b.filtered[t]) < 1e-12);
      CHECK(std::abs(a.smoothed[t] - b.smoothed[t]) < 1e-12);
    }
  }
}

TEST_CASE("oracle error paths") {
  const ChainSpec chain{0.5, 0.9, 0.1};
  CHECK_THROWS_AS(scaled_forward_backward(chain, {{1.0, 0.0}, {0.0, 1.0}}),
                  DegenerateEvidenceError);
  CHECK_THROWS_AS(scaled_forward_backward(chain, {{1.0, -1.0}, {1.0, 1.0}}),
                  DegenerateEvidenceError);
  CHECK_THROWS_AS(scaled_forward_backward(chain, {{1.0}, {1.0, 1.0}}), DimensionError);
  CHECK_THROWS_AS(enumerate_posterior(chain, Vector(kMaxEnumerationSteps + 1, 1.0),
                                      PosteriorMode::kSmoothed),
                  LimitError);
  CHECK_THROWS_AS(enumerate_posterior({0.5, 1.5, 0.1}, Vector(3, 1.0), PosteriorMode::kSmoothed),
                  DomainError);
}
