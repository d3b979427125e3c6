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

// Ground truth for a single two-state chain, computed without any of the
// recurrences in layer.hpp: exhaustive enumeration over hidden paths, the
// textbook rescaled forward-backward algorithm, and the closed-form map from
// a shared-covariance Gaussian emission model to the unit's (W, b).
//
// The oracles use the emission convention b1 = 1, b2 = r_t. Posteriors only
// depend on the ratio, so this loses nothing.

#ifndef UBRU_ORACLE_HPP_
#define UBRU_ORACLE_HPP_

#include <cstddef>
#include <span>

#include "ubru/numerics.hpp"

namespace ubru {

// Emissions for one unit: x | on ~ N(mu, sigma), x | off ~ N(nu, sigma).
struct GaussianEmissionModel {
  Vector mu;
  Vector nu;
  Tensor2 sigma;  // F x F, symmetric positive definite

  std::size_t dim() const { return mu.size(); }
  // Throws DimensionError on shape mismatch and DomainError when sigma is
  // not symmetric (within 1e-12) or not positive definite.
  void validate() const;
  // log p(x | off) - log p(x | on).
  double log_likelihood_ratio(std::span<const double> x) const;
};

struct ChainSpec {
  double rho0 = 0.5;
  double tau11 = 0.5;
  double tau01 = 0.5;

  // Throws DomainError unless every probability is in [kProbEps, 1 - kProbEps].
  void validate() const;
};

// Per-timestep likelihoods p(x_t | on) and p(x_t | off).
struct EmissionLikelihoods {
  Vector b1;
  Vector b2;
};

struct UnitEmissionParams {
  Vector W;  // F
  double b = 0.0;
};

// (W, b) such that exp(-W^T x - b) = N(x; nu, sigma) / N(x; mu, sigma):
//   W = sigma^{-1} (mu - nu),  b = (nu' sigma^{-1} nu - mu' sigma^{-1} mu) / 2.
UnitEmissionParams params_from_gaussian(const GaussianEmissionModel& model);

enum class PosteriorMode { kFiltered, kSmoothed };

inline constexpr std::size_t kMaxEnumerationSteps = 16;

// P(on_t | x_1..t) or P(on_t | x_1..T) by summing over all 2^(T+1) hidden
// paths s_0..s_T. r[t] is the likelihood ratio of observation t. Throws
// LimitError when T exceeds kMaxEnumerationSteps.
Vector enumerate_posterior(const ChainSpec& chain, std::span<const double> r,
                           PosteriorMode mode);

struct ForwardBackwardResult {
  Vector filtered;
  Vector smoothed;
};

// Classical two-state forward-backward with per-step normalization. Throws
// DegenerateEvidenceError if a likelihood is not strictly positive.
ForwardBackwardResult scaled_forward_backward(const ChainSpec& chain,
                                              const EmissionLikelihoods& emis);

// Marginals m_t = P(on_t) of the chain with no observations, t = 1..steps.
Vector chain_marginals(const ChainSpec& chain, std::size_t steps);

}  // namespace ubru

#endif  // UBRU_ORACLE_HPP_
