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

#include "ubru/layer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "layer_internal.hpp"
#include "ubru/error.hpp"

namespace ubru {

std::string_view to_string(BackwardMode mode) {
  switch (mode) {
    case BackwardMode::kNone:
      return "none";
    case BackwardMode::kKalman:
      return "kalman";
    case BackwardMode::kHmm:
      return "hmm";
  }
  return "unknown";
}

BackwardMode parse_backward_mode(std::string_view name) {
  if (name == "none") return BackwardMode::kNone;
  if (name == "kalman") return BackwardMode::kKalman;
  if (name == "hmm") return BackwardMode::kHmm;
  throw ConfigError("unknown backward mode '" + std::string(name) +
                    "' (expected none, kalman or hmm)");
}

UbruParams UbruParams::zeros(std::size_t input_dim, std::size_t hidden_dim) {
  return UbruParams{Tensor2(input_dim, hidden_dim), Vector(hidden_dim, 0.0),
                    Vector(hidden_dim, 0.0), Vector(hidden_dim, 0.0),
                    Vector(hidden_dim, 0.0)};
}

void UbruParams::validate() const {
  const std::size_t H = hidden_dim();
  if (b.size() != H || u_tau11.size() != H || u_tau01.size() != H || u_rho0.size() != H) {
    throw DimensionError("UbruParams: W has " + std::to_string(H) +
                         " columns but vector parameters have lengths " +
                         std::to_string(b.size()) + "/" + std::to_string(u_tau11.size()) +
                         "/" + std::to_string(u_tau01.size()) + "/" +
                         std::to_string(u_rho0.size()));
  }
  if (!W.all_finite() || !all_finite(b) || !all_finite(u_tau11) || !all_finite(u_tau01) ||
      !all_finite(u_rho0)) {
    throw NonFiniteError("UbruParams: non-finite parameter value");
  }
}

namespace detail {

FilterState forward_filter(const UbruParams& params, const Tensor2& X, Fault fault) {
  params.validate();
  if (X.rows() != params.input_dim()) {
    throw DimensionError("forward_filter: input has " + std::to_string(X.rows()) +
                         " features, layer expects " + std::to_string(params.input_dim()));
  }
  if (X.cols() == 0) throw DimensionError("forward_filter: empty sequence");
  if (!X.all_finite()) throw NonFiniteError("forward_filter: non-finite input");

  const std::size_t T = X.cols(), H = params.hidden_dim();
  FilterState fs;
  fs.scores = affine_scores(params.W, params.b, X);
  fs.priors = Tensor2(T, H);
  fs.alphas = Tensor2(T, H);
  fs.alpha0.resize(H);

  for (std::size_t i = 0; i < H; ++i) {
    const double tau11 = params.tau11(i);
    const double tau01 = fault == Fault::kTau01Sign ? -params.tau01(i) : params.tau01(i);
    double prev = params.rho0(i);
    fs.alpha0[i] = prev;
    for (std::size_t t = 0; t < T; ++t) {
      const double p = clamp_prob(tau11 * prev + tau01 * (1.0 - prev));
      const double a = sigmoid(fs.scores(t, i) + logit(p));
      fs.priors(t, i) = p;
      fs.alphas(t, i) = a;
      prev = a;
    }
  }
  return fs;
}

SmoothedPosteriors smooth_sequence(const UbruParams& params, const Tensor2& X,
                                   BackwardMode mode, Fault fault) {
  FilterState fs = forward_filter(params, X, fault);
  switch (mode) {
    case BackwardMode::kNone:
      return SmoothedPosteriors{std::move(fs.alphas)};
    case BackwardMode::kKalman:
      return backward_kalman(params, fs);
    case BackwardMode::kHmm:
      return backward_hmm(params, fs).posteriors;
  }
  throw ConfigError("smooth_sequence: invalid backward mode");
}

}  // namespace detail

FilterState forward_filter(const UbruParams& params, const Tensor2& X) {
  return detail::forward_filter(params, X, detail::Fault::kNone);
}

namespace {

void check_filter_state(const UbruParams& params, const FilterState& fs, const char* who) {
  const std::size_t T = fs.alphas.rows(), H = params.hidden_dim();
  if (T == 0 || fs.alphas.cols() != H || fs.priors.rows() != T || fs.priors.cols() != H ||
      fs.scores.rows() != T || fs.scores.cols() != H || fs.alpha0.size() != H) {
    throw DimensionError(std::string(who) + ": filter state does not match parameters");
  }
}

}  // namespace

SmoothedPosteriors backward_kalman(const UbruParams& params, const FilterState& fs) {
  check_filter_state(params, fs, "backward_kalman");
  const std::size_t T = fs.steps(), H = fs.units();
  Tensor2 gammas(T, H);
  for (std::size_t i = 0; i < H; ++i) {
    const double tau11 = params.tau11(i);
    double next = fs.alphas(T - 1, i);
    gammas(T - 1, i) = next;
    for (std::size_t t = T - 1; t-- > 0;) {
      const double p = fs.priors(t + 1, i);
      const double g = fs.alphas(t, i) *
                       (tau11 * next / p + (1.0 - tau11) * (1.0 - next) / (1.0 - p));
      next = clamp_prob(g);
      gammas(t, i) = next;
    }
  }
  return SmoothedPosteriors{std::move(gammas)};
}

HmmSmoothing backward_hmm(const UbruParams& params, const FilterState& fs) {
  check_filter_state(params, fs, "backward_hmm");
  const std::size_t T = fs.steps(), H = fs.units();
  HmmSmoothing out;
  out.betas.betas = Tensor2(T, H, 1.0);
  out.betas.betas_bar = Tensor2(T, H, 1.0);
  out.posteriors.gammas = Tensor2(T, H);
  auto& beta = out.betas.betas;
  auto& beta_bar = out.betas.betas_bar;
  auto& gammas = out.posteriors.gammas;

  for (std::size_t i = 0; i < H; ++i) {
    const double tau11 = params.tau11(i), tau01 = params.tau01(i);
    gammas(T - 1, i) = fs.alphas(T - 1, i);
    for (std::size_t t = T - 1; t-- > 0;) {
      double s = fs.scores(t + 1, i);
      if (std::abs(s) > kMaxRatioExponent) {
        s = std::clamp(s, -kMaxRatioExponent, kMaxRatioExponent);
        ++out.clamp_events;
      }
      const double r = std::exp(-s);
      const double p = fs.priors(t + 1, i);
      const double denom = p + r * (1.0 - p);
      const double on = beta(t + 1, i), off = beta_bar(t + 1, i);
      beta(t, i) = (tau11 * on + r * (1.0 - tau11) * off) / denom;
      beta_bar(t, i) = (tau01 * on + r * (1.0 - tau01) * off) / denom;
      gammas(t, i) = clamp_prob(fs.alphas(t, i) * beta(t, i));
    }
  }
  return out;
}

SmoothedPosteriors smooth_sequence(const UbruParams& params, const Tensor2& X,
                                   BackwardMode mode) {
  return detail::smooth_sequence(params, X, mode, detail::Fault::kNone);
}

Tensor2 bidirectional_smooth(const UbruParams& fwd, const UbruParams& rev,
                             const Tensor2& X, BackwardMode mode) {
  if (fwd.input_dim() != rev.input_dim() || fwd.hidden_dim() != rev.hidden_dim()) {
    throw DimensionError("bidirectional_smooth: forward and reverse parameters differ in shape");
  }
  const Tensor2 ahead = smooth_sequence(fwd, X, mode).gammas;
  const Tensor2 behind = reverse_rows(smooth_sequence(rev, reverse_columns(X), mode).gammas);
  const std::size_t T = X.cols(), H = fwd.hidden_dim();
  Tensor2 out(T, 2 * H);
  for (std::size_t t = 0; t < T; ++t) {
    auto dst = out.row(t);
    std::copy_n(ahead.row(t).begin(), H, dst.begin());
    std::copy_n(behind.row(t).begin(), H, dst.begin() + H);
  }
  return out;
}

}  // namespace ubru
