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

#include "ubru/oracle.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "ubru/error.hpp"

namespace ubru {

namespace {

Eigen::MatrixXd to_eigen(const Tensor2& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c);
  return out;
}

Eigen::Map<const Eigen::VectorXd> view(std::span<const double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

Eigen::LLT<Eigen::MatrixXd> factorize(const GaussianEmissionModel& model) {
  model.validate();
  return Eigen::LLT<Eigen::MatrixXd>(to_eigen(model.sigma));
}

void check_prob(double p, const char* name) {
  if (!(p >= kProbEps && p <= 1.0 - kProbEps)) {
    throw DomainError(std::string("ChainSpec: ") + name + " = " + std::to_string(p) +
                      " outside the probability range");
  }
}

}  // namespace

void GaussianEmissionModel::validate() const {
  const std::size_t F = mu.size();
  if (nu.size() != F || sigma.rows() != F || sigma.cols() != F) {
    throw DimensionError("GaussianEmissionModel: inconsistent dimensions");
  }
  for (std::size_t r = 0; r < F; ++r)
    for (std::size_t c = 0; c < r; ++c)
      if (std::abs(sigma(r, c) - sigma(c, r)) > 1e-12)
        throw DomainError("GaussianEmissionModel: covariance is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(to_eigen(sigma));
  if (llt.info() != Eigen::Success)
    throw DomainError("GaussianEmissionModel: covariance is not positive definite");
}

double GaussianEmissionModel::log_likelihood_ratio(std::span<const double> x) const {
  const auto llt = factorize(*this);
  if (x.size() != dim()) throw DimensionError("log_likelihood_ratio: wrong input size");
  const Eigen::VectorXd dx_on = view(x) - view(mu);
  const Eigen::VectorXd dx_off = view(x) - view(nu);
  // Normalizers cancel because the covariance is shared.
  return -0.5 * dx_off.dot(llt.solve(dx_off)) + 0.5 * dx_on.dot(llt.solve(dx_on));
}

void ChainSpec::validate() const {
  check_prob(rho0, "rho0");
  check_prob(tau11, "tau11");
  check_prob(tau01, "tau01");
}

UnitEmissionParams params_from_gaussian(const GaussianEmissionModel& model) {
  const auto llt = factorize(model);
  const Eigen::VectorXd mu = view(model.mu);
  const Eigen::VectorXd nu = view(model.nu);
  const Eigen::VectorXd inv_mu = llt.solve(mu);
  const Eigen::VectorXd inv_nu = llt.solve(nu);
  const Eigen::VectorXd w = inv_mu - inv_nu;

  UnitEmissionParams out;
  out.W.assign(w.data(), w.data() + w.size());
  out.b = 0.5 * (nu.dot(inv_nu) - mu.dot(inv_mu));
  return out;
}

Vector enumerate_posterior(const ChainSpec& chain, std::span<const double> r,
                           PosteriorMode mode) {
  chain.validate();
  const std::size_t T = r.size();
  if (T > kMaxEnumerationSteps) {
    throw LimitError("enumerate_posterior: T = " + std::to_string(T) +
                     " exceeds the enumeration limit of " +
                     std::to_string(kMaxEnumerationSteps));
  }
  // trans[prev][next]
  const std::array<std::array<double, 2>, 2> trans = {
      {{1.0 - chain.tau01, chain.tau01}, {1.0 - chain.tau11, chain.tau11}}};

  // Sums over paths s_0..s_last, with observations 1..last included.
  // Bit k of `path` is s_k.
  auto marginals = [&](std::size_t last, Vector& on_mass) -> double {
    on_mass.assign(last + 1, 0.0);
    double total = 0.0;
    const std::uint64_t paths = std::uint64_t{1} << (last + 1);
    for (std::uint64_t path = 0; path < paths; ++path) {
      int prev = static_cast<int>(path & 1U);
      double w = prev ? chain.rho0 : 1.0 - chain.rho0;
      for (std::size_t k = 1; k <= last; ++k) {
        const int cur = static_cast<int>((path >> k) & 1U);
        w *= trans[prev][cur];
        if (!cur) w *= r[k - 1];
        prev = cur;
      }
      total += w;
      for (std::size_t k = 0; k <= last; ++k)
        if ((path >> k) & 1U) on_mass[k] += w;
    }
    return total;
  };

  Vector out(T);
  Vector on_mass;
  if (mode == PosteriorMode::kSmoothed) {
    const double total = marginals(T, on_mass);
    for (std::size_t t = 0; t < T; ++t) out[t] = on_mass[t + 1] / total;
  } else {
    for (std::size_t t = 0; t < T; ++t) {
      const double total = marginals(t + 1, on_mass);
      out[t] = on_mass[t + 1] / total;
    }
  }
  return out;
}

ForwardBackwardResult scaled_forward_backward(const ChainSpec& chain,
                                              const EmissionLikelihoods& emis) {
  chain.validate();
  const std::size_t T = emis.b1.size();
  if (emis.b2.size() != T) throw DimensionError("scaled_forward_backward: b1/b2 length differ");
  if (T == 0) throw DimensionError("scaled_forward_backward: empty sequence");
  for (std::size_t t = 0; t < T; ++t) {
    if (!(emis.b1[t] > 0.0) || !(emis.b2[t] > 0.0)) {
      throw DegenerateEvidenceError("scaled_forward_backward: non-positive likelihood at t = " +
                                    std::to_string(t));
    }
  }

  // State 0 = on, state 1 = off. A[i][j] = P(next = j | prev = i).
  const double A[2][2] = {{chain.tau11, 1.0 - chain.tau11},
                          {chain.tau01, 1.0 - chain.tau01}};
  std::vector<std::array<double, 2>> alpha(T), beta(T);
  Vector scale(T);

  std::array<double, 2> prev = {chain.rho0, 1.0 - chain.rho0};
  for (std::size_t t = 0; t < T; ++t) {
    const double pred_on = prev[0] * A[0][0] + prev[1] * A[1][0];
    const double pred_off = prev[0] * A[0][1] + prev[1] * A[1][1];
    const double a_on = emis.b1[t] * pred_on;
    const double a_off = emis.b2[t] * pred_off;
    const double c = a_on + a_off;
    if (!(c > 0.0)) throw DegenerateEvidenceError("scaled_forward_backward: zero evidence");
    scale[t] = c;
    alpha[t] = {a_on / c, a_off / c};
    prev = alpha[t];
  }

  beta[T - 1] = {1.0, 1.0};
  for (std::size_t t = T - 1; t-- > 0;) {
    const double e_on = emis.b1[t + 1] * beta[t + 1][0];
    const double e_off = emis.b2[t + 1] * beta[t + 1][1];
    for (int i = 0; i < 2; ++i) beta[t][i] = (A[i][0] * e_on + A[i][1] * e_off) / scale[t + 1];
  }

  ForwardBackwardResult out;
  out.filtered.resize(T);
  out.smoothed.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    out.filtered[t] = alpha[t][0];
    const double on = alpha[t][0] * beta[t][0];
    const double off = alpha[t][1] * beta[t][1];
    out.smoothed[t] = on / (on + off);
  }
  return out;
}

Vector chain_marginals(const ChainSpec& chain, std::size_t steps) {
  Vector out(steps);
  double m = chain.rho0;
  for (std::size_t t = 0; t < steps; ++t) {
    m = chain.tau11 * m + chain.tau01 * (1.0 - m);
    out[t] = m;
  }
  return out;
}

}  // namespace ubru
