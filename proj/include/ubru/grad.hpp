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

// Reverse-mode gradients through forward_filter and backward_kalman.
//
// The computation graph is fixed, so the adjoints are written out by hand:
// first the Kalman recursion is reversed (sweeping t = 0 .. T-1, the
// opposite direction of the smoother), then the filter recursion is
// reversed (sweeping t = T-1 .. 0). Memory is O(T*H).
//
// Clamped probabilities have zero local derivative. The prior
// p_t = tau11*a + tau01*(1-a) is a convex combination of in-range values and
// is treated as never clamped.

#ifndef UBRU_GRAD_HPP_
#define UBRU_GRAD_HPP_

#include <functional>
#include <optional>

#include "ubru/layer.hpp"

namespace ubru {

struct GradientBundle {
  Tensor2 dW;
  Vector db;
  Vector du_tau11;
  Vector du_tau01;
  Vector du_rho0;

  static GradientBundle zeros_like(const UbruParams& params);

  // Same order as UbruParams::for_each_scalar.
  template <typename Fn>
  void for_each_scalar(Fn&& fn) const {
    for (double v : dW.data()) fn(v);
    for (const auto* vec : {&db, &du_tau11, &du_tau01, &du_rho0})
      for (double v : *vec) fn(v);
  }
  template <typename Fn>
  void for_each_scalar(Fn&& fn) {
    for (double& v : dW.data()) fn(v);
    for (auto* vec : {&db, &du_tau11, &du_tau01, &du_rho0})
      for (double& v : *vec) fn(v);
  }

  GradientBundle& operator+=(const GradientBundle& other);
  friend bool operator==(const GradientBundle&, const GradientBundle&) = default;
};

// Stores the forward quantities of one sequence so the adjoint pass can be
// run against them.
class Workspace {
 public:
  Workspace() = default;

  // Runs the forward computation. Throws ConfigError for BackwardMode::kHmm:
  // that recursion is for inference and verification only.
  static Workspace run(const UbruParams& params, const Tensor2& X, BackwardMode mode);

  bool has_state() const { return state_.has_value(); }
  // Layer output: gammas for kKalman, alphas for kNone.
  const Tensor2& output() const;
  const FilterState& filter_state() const;

  struct Adjoint {
    GradientBundle grads;
    Tensor2 d_input;  // F x T, dL/dX
  };
  // Throws ContractError if the workspace holds no forward state.
  Adjoint backward(const Tensor2& dL_doutput) const;

 private:
  struct State {
    UbruParams params;
    Tensor2 X;
    BackwardMode mode;
    FilterState fs;
    Tensor2 gammas;
  };
  std::optional<State> state_;
};

// dL/dtheta for a loss whose gradient with respect to the layer output is
// `dL_dgamma` (T x H).
GradientBundle backprop(const UbruParams& params, const Tensor2& X, BackwardMode mode,
                        const Tensor2& dL_dgamma);

using SequenceLoss = std::function<double(const Tensor2& gammas)>;

// Central differences (L(theta + h) - L(theta - h)) / 2h per scalar.
GradientBundle finite_diff_grad(const UbruParams& params, const Tensor2& X, BackwardMode mode,
                                const SequenceLoss& loss, double step);

}  // namespace ubru

#endif  // UBRU_GRAD_HPP_
