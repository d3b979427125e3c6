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

// The unit-wise Bayesian recurrent unit. Each of the H hidden units tracks
// one binary feature that follows its own two-state Markov chain:
//
//   P(on at t | on at t-1)  = tau11      P(on at 0) = rho0
//   P(on at t | off at t-1) = tau01
//
// and the observation x_t enters only through the likelihood ratio
// r_t = p(x_t | off) / p(x_t | on) = exp(-(W^T x_t + b)).
//
// forward_filter computes the filtered posteriors alpha_t = P(on_t | x_1..t);
// backward_kalman and backward_hmm turn them into smoothed posteriors
// gamma_t = P(on_t | x_1..T). The two backward recursions are algebraically
// identical; the Kalman form is the production path.
//
// Sequences are indexed 0..T-1 here; row t of every T x H buffer holds the
// quantities for observation x_{t+1} in 1-based notation. The initial state
// alpha_0 = rho0 lives outside the buffers, in FilterState::alpha0.

#ifndef UBRU_LAYER_HPP_
#define UBRU_LAYER_HPP_

#include <cstddef>
#include <string_view>

#include "ubru/numerics.hpp"

namespace ubru {

enum class BackwardMode { kNone, kKalman, kHmm };

std::string_view to_string(BackwardMode mode);
// Accepts "none", "kalman" and "hmm"; throws ConfigError otherwise.
BackwardMode parse_backward_mode(std::string_view name);

// Trainable tensors of one layer. Transition and initial probabilities are
// stored as unconstrained logits and mapped through the sigmoid.
struct UbruParams {
  Tensor2 W;       // F x H
  Vector b;        // H
  Vector u_tau11;  // H
  Vector u_tau01;  // H
  Vector u_rho0;   // H

  static UbruParams zeros(std::size_t input_dim, std::size_t hidden_dim);

  std::size_t input_dim() const { return W.rows(); }
  std::size_t hidden_dim() const { return W.cols(); }
  std::size_t num_scalars() const { return W.size() + 4 * b.size(); }

  double tau11(std::size_t i) const { return sigmoid(u_tau11[i]); }
  double tau01(std::size_t i) const { return sigmoid(u_tau01[i]); }
  double rho0(std::size_t i) const { return sigmoid(u_rho0[i]); }

  // Throws DimensionError on inconsistent shapes, NonFiniteError on NaN/Inf.
  void validate() const;

  // Visits every scalar in a fixed order: W (row-major), b, u_tau11,
  // u_tau01, u_rho0.
  template <typename Fn>
  void for_each_scalar(Fn&& fn) {
    for (double& v : W.data()) fn(v);
    for (auto* vec : {&b, &u_tau11, &u_tau01, &u_rho0})
      for (double& v : *vec) fn(v);
  }

  friend bool operator==(const UbruParams&, const UbruParams&) = default;
};

// Per-timestep forward quantities, kept for the backward passes and adjoints.
struct FilterState {
  Tensor2 scores;  // T x H, s_t = W^T x_t + b
  Tensor2 priors;  // T x H, p_t = P(on_t | x_1..t-1)
  Tensor2 alphas;  // T x H, alpha_t = P(on_t | x_1..t)
  Vector alpha0;   // H, equals rho0

  std::size_t steps() const { return alphas.rows(); }
  std::size_t units() const { return alphas.cols(); }
};

struct SmoothedPosteriors {
  Tensor2 gammas;  // T x H
};

// Normalized backward variables of the classical recursion, conditioned on
// the feature being on (betas) or off (betas_bar).
struct BetaPair {
  Tensor2 betas;
  Tensor2 betas_bar;
};

struct HmmSmoothing {
  BetaPair betas;
  SmoothedPosteriors posteriors;
  // Number of scores whose magnitude exceeded kMaxRatioExponent and were
  // clamped before exponentiation.
  std::size_t clamp_events = 0;
};

inline constexpr double kMaxRatioExponent = 700.0;

struct LayerConfig {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  bool bidirectional = false;
  BackwardMode backward_mode = BackwardMode::kKalman;

  std::size_t output_dim() const { return bidirectional ? 2 * hidden_dim : hidden_dim; }
  friend bool operator==(const LayerConfig&, const LayerConfig&) = default;
};

// X is F x T with T >= 1. Throws DimensionError on shape mismatch or T == 0,
// NonFiniteError on non-finite input.
FilterState forward_filter(const UbruParams& params, const Tensor2& X);

SmoothedPosteriors backward_kalman(const UbruParams& params, const FilterState& fs);

HmmSmoothing backward_hmm(const UbruParams& params, const FilterState& fs);

// Forward filter followed by the requested backward pass. kNone returns the
// filtered posteriors unchanged.
SmoothedPosteriors smooth_sequence(const UbruParams& params, const Tensor2& X,
                                   BackwardMode mode);

// T x 2H: columns [0, H) run forward in time with `fwd`, columns [H, 2H) run
// `rev` over the time-reversed input and are flipped back.
Tensor2 bidirectional_smooth(const UbruParams& fwd, const UbruParams& rev,
                             const Tensor2& X, BackwardMode mode);

}  // namespace ubru

#endif  // UBRU_LAYER_HPP_
