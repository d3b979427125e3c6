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

#include "ubru/grad.hpp"

#include <string>

#include "ubru/error.hpp"

namespace ubru {

namespace {

bool at_clamp(double p) { return p <= kProbEps || p >= 1.0 - kProbEps; }

// Derivative of a clamped sigmoid, given its output.
double sigmoid_slope(double s) { return at_clamp(s) ? 0.0 : s * (1.0 - s); }

}  // namespace

GradientBundle GradientBundle::zeros_like(const UbruParams& params) {
  const std::size_t H = params.hidden_dim();
  return GradientBundle{Tensor2(params.input_dim(), H), Vector(H, 0.0), Vector(H, 0.0),
                        Vector(H, 0.0), Vector(H, 0.0)};
}

GradientBundle& GradientBundle::operator+=(const GradientBundle& other) {
  if (dW.rows() != other.dW.rows() || dW.cols() != other.dW.cols() ||
      db.size() != other.db.size()) {
    throw DimensionError("GradientBundle: cannot add bundles of different shapes");
  }
  auto dst = dW.data();
  auto src = other.dW.data();
  for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
  for (std::size_t i = 0; i < db.size(); ++i) {
    db[i] += other.db[i];
    du_tau11[i] += other.du_tau11[i];
    du_tau01[i] += other.du_tau01[i];
    du_rho0[i] += other.du_rho0[i];
  }
  return *this;
}

Workspace Workspace::run(const UbruParams& params, const Tensor2& X, BackwardMode mode) {
  if (mode == BackwardMode::kHmm) {
    throw ConfigError("gradients are available for backward modes none and kalman only");
  }
  Workspace ws;
  FilterState fs = forward_filter(params, X);
  Tensor2 gammas = mode == BackwardMode::kKalman ? backward_kalman(params, fs).gammas
                                                 : fs.alphas;
  ws.state_ = State{params, X, mode, std::move(fs), std::move(gammas)};
  return ws;
}

const Tensor2& Workspace::output() const {
  if (!state_) throw ContractError("Workspace: no stored forward state");
  return state_->gammas;
}

const FilterState& Workspace::filter_state() const {
  if (!state_) throw ContractError("Workspace: no stored forward state");
  return state_->fs;
}

Workspace::Adjoint Workspace::backward(const Tensor2& dL_doutput) const {
  if (!state_) throw ContractError("Workspace::backward called before a forward run");
  const State& st = *state_;
  const FilterState& fs = st.fs;
  const std::size_t T = fs.steps(), H = fs.units(), F = st.params.input_dim();
  if (dL_doutput.rows() != T || dL_doutput.cols() != H) {
    throw DimensionError("Workspace::backward: output gradient must be " + std::to_string(T) +
                         "x" + std::to_string(H));
  }
  if (!dL_doutput.all_finite()) throw NonFiniteError("Workspace::backward: non-finite gradient");

  Adjoint out{GradientBundle::zeros_like(st.params), Tensor2(F, T)};
  Tensor2 d_scores(T, H);
  Vector g_bar(T), a_bar(T), p_bar(T);

  for (std::size_t i = 0; i < H; ++i) {
    const double tau11 = st.params.tau11(i), tau01 = st.params.tau01(i);
    const double rho0 = st.params.rho0(i);
    double tau11_bar = 0.0, tau01_bar = 0.0, rho0_bar = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      g_bar[t] = dL_doutput(t, i);
      a_bar[t] = 0.0;
      p_bar[t] = 0.0;
    }

    if (st.mode == BackwardMode::kKalman) {
      // g_t = a_t * K_t with K_t = tau11 g'/p' + (1 - tau11)(1 - g')/(1 - p'),
      // primes denoting step t + 1.
      for (std::size_t t = 0; t + 1 < T; ++t) {
        const double a = fs.alphas(t, i);
        const double p = fs.priors(t + 1, i);
        const double g = st.gammas(t + 1, i);
        const double k = tau11 * g / p + (1.0 - tau11) * (1.0 - g) / (1.0 - p);
        if (at_clamp(a * k)) continue;
        a_bar[t] += g_bar[t] * k;
        const double k_bar = g_bar[t] * a;
        g_bar[t + 1] += k_bar * (tau11 / p - (1.0 - tau11) / (1.0 - p));
        p_bar[t + 1] += k_bar * (-tau11 * g / (p * p) +
                                 (1.0 - tau11) * (1.0 - g) / ((1.0 - p) * (1.0 - p)));
        tau11_bar += k_bar * (g / p - (1.0 - g) / (1.0 - p));
      }
      a_bar[T - 1] += g_bar[T - 1];
    } else {
      for (std::size_t t = 0; t < T; ++t) a_bar[t] = g_bar[t];
    }

    // a_t = sigmoid(s_t + logit(p_t)), p_t = tau11 a_{t-1} + tau01 (1 - a_{t-1}).
    for (std::size_t t = T; t-- > 0;) {
      const double a = fs.alphas(t, i);
      const double p = fs.priors(t, i);
      const double z_bar = a_bar[t] * sigmoid_slope(a);
      d_scores(t, i) = z_bar;
      p_bar[t] += z_bar / (p * (1.0 - p));
      const double prev = t > 0 ? fs.alphas(t - 1, i) : fs.alpha0[i];
      tau11_bar += p_bar[t] * prev;
      tau01_bar += p_bar[t] * (1.0 - prev);
      const double prev_bar = p_bar[t] * (tau11 - tau01);
      if (t > 0) {
        a_bar[t - 1] += prev_bar;
      } else {
        rho0_bar += prev_bar;
      }
    }

    out.grads.du_tau11[i] = tau11_bar * sigmoid_slope(tau11);
    out.grads.du_tau01[i] = tau01_bar * sigmoid_slope(tau01);
    out.grads.du_rho0[i] = rho0_bar * sigmoid_slope(rho0);
  }

  for (std::size_t t = 0; t < T; ++t) {
    const auto ds = d_scores.row(t);
    for (std::size_t i = 0; i < H; ++i) out.grads.db[i] += ds[i];
    for (std::size_t f = 0; f < F; ++f) {
      const double x = st.X(f, t);
      auto dw = out.grads.dW.row(f);
      const auto w = st.params.W.row(f);
      double dx = 0.0;
      for (std::size_t i = 0; i < H; ++i) {
        dw[i] += x * ds[i];
        dx += w[i] * ds[i];
      }
      out.d_input(f, t) = dx;
    }
  }
  return out;
}

GradientBundle backprop(const UbruParams& params, const Tensor2& X, BackwardMode mode,
                        const Tensor2& dL_dgamma) {
  return Workspace::run(params, X, mode).backward(dL_dgamma).grads;
}

GradientBundle finite_diff_grad(const UbruParams& params, const Tensor2& X, BackwardMode mode,
                                const SequenceLoss& loss, double step) {
  if (!(step > 0.0)) throw DomainError("finite_diff_grad: step must be positive");
  UbruParams probe = params;
  std::vector<double*> slots;
  probe.for_each_scalar([&](double& v) { slots.push_back(&v); });

  Vector values;
  values.reserve(slots.size());
  for (double* slot : slots) {
    const double saved = *slot;
    *slot = saved + step;
    const double up = loss(smooth_sequence(probe, X, mode).gammas);
    *slot = saved - step;
    const double down = loss(smooth_sequence(probe, X, mode).gammas);
    *slot = saved;
    values.push_back((up - down) / (2.0 * step));
  }

  GradientBundle out = GradientBundle::zeros_like(params);
  std::size_t k = 0;
  out.for_each_scalar([&](double& v) { v = values[k++]; });
  return out;
}

}  // namespace ubru
