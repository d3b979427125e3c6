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

#include "ubru/check.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "layer_internal.hpp"
#include "ubru/error.hpp"
#include "ubru/grad.hpp"
#include "ubru/oracle.hpp"

namespace ubru {

namespace {

detail::Fault to_detail(InjectedFault fault) {
  return fault == InjectedFault::kTau01Sign ? detail::Fault::kTau01Sign : detail::Fault::kNone;
}

std::string format_error(const char* what, double err) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s %.3e", what, err);
  return buf;
}

}  // namespace

CheckSuite parse_check_suite(std::string_view name) {
  if (name == "grads") return CheckSuite::kGrads;
  if (name == "equivalence") return CheckSuite::kEquivalence;
  if (name == "oracle") return CheckSuite::kOracle;
  if (name == "all") return CheckSuite::kAll;
  throw ConfigError("unknown check suite '" + std::string(name) +
                    "' (expected grads, equivalence, oracle or all)");
}

std::string_view to_string(CheckSuite suite) {
  switch (suite) {
    case CheckSuite::kGrads:
      return "grads";
    case CheckSuite::kEquivalence:
      return "equivalence";
    case CheckSuite::kOracle:
      return "oracle";
    case CheckSuite::kAll:
      return "all";
  }
  return "unknown";
}

InjectedFault parse_injected_fault(std::string_view name) {
  if (name == "none") return InjectedFault::kNone;
  if (name == "tau01-sign") return InjectedFault::kTau01Sign;
  throw ConfigError("unknown fault '" + std::string(name) + "' (expected none or tau01-sign)");
}

double relative_error(double a, double b, double abs_floor) {
  const double diff = std::abs(a - b);
  if (diff <= abs_floor) return 0.0;
  return diff / std::max(std::abs(a), std::abs(b));
}

RandomInstance sample_instance(Rng& rng, std::size_t max_T, std::size_t max_H,
                               std::size_t max_F) {
  const auto T = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(max_T)));
  const auto H = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(max_H)));
  const auto F = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(max_F)));
  RandomInstance inst{UbruParams::zeros(F, H), Tensor2(F, T)};
  for (double& w : inst.params.W.data()) w = rng.uniform(-2.0, 2.0);
  for (double& v : inst.params.b) v = rng.uniform(-2.0, 2.0);
  for (auto* logits : {&inst.params.u_tau11, &inst.params.u_tau01, &inst.params.u_rho0})
    for (double& v : *logits) v = rng.uniform(-3.0, 3.0);
  for (double& x : inst.X.data()) x = rng.normal();
  return inst;
}

TrialOutcome equivalence_trial(std::uint64_t seed, InjectedFault fault) {
  Rng rng(seed);
  const RandomInstance inst = sample_instance(rng, 50, 8, 5);
  const FilterState fs = detail::forward_filter(inst.params, inst.X, to_detail(fault));
  const Tensor2 kalman = backward_kalman(inst.params, fs).gammas;
  const HmmSmoothing hmm = backward_hmm(inst.params, fs);

  double gap = 0.0, identity = 0.0;
  for (std::size_t t = 0; t < fs.steps(); ++t) {
    for (std::size_t i = 0; i < fs.units(); ++i) {
      gap = std::max(gap, std::abs(kalman(t, i) - hmm.posteriors.gammas(t, i)));
      const double lhs = (1.0 - fs.alphas(t, i)) * hmm.betas.betas_bar(t, i);
      identity = std::max(identity, std::abs(lhs - (1.0 - kalman(t, i))));
    }
  }
  TrialOutcome out{CheckSuite::kEquivalence, 0, seed, false, std::max(gap, identity), {}};
  out.passed = gap < kEquivalenceTol && identity < kEquivalenceTol;
  out.detail = format_error("kalman-vs-hmm", gap) + ", " + format_error("identity", identity);
  return out;
}

TrialOutcome oracle_trial(std::uint64_t seed, InjectedFault fault) {
  Rng rng(seed);
  const RandomInstance inst = sample_instance(rng, 12, 8, 5);
  const UbruParams& p = inst.params;
  const FilterState fs = detail::forward_filter(p, inst.X, to_detail(fault));
  const Tensor2 kalman = backward_kalman(p, fs).gammas;
  const Tensor2 hmm = backward_hmm(p, fs).posteriors.gammas;
  const std::size_t T = fs.steps();

  double filt_err = 0.0, smooth_err = 0.0;
  for (std::size_t i = 0; i < fs.units(); ++i) {
    const ChainSpec chain{p.rho0(i), p.tau11(i), p.tau01(i)};
    Vector r(T);
    EmissionLikelihoods emis{Vector(T, 1.0), Vector(T)};
    for (std::size_t t = 0; t < T; ++t) r[t] = emis.b2[t] = std::exp(-fs.scores(t, i));
    const Vector filtered = enumerate_posterior(chain, r, PosteriorMode::kFiltered);
    const Vector smoothed = enumerate_posterior(chain, r, PosteriorMode::kSmoothed);
    const ForwardBackwardResult fb = scaled_forward_backward(chain, emis);
    for (std::size_t t = 0; t < T; ++t) {
      filt_err = std::max({filt_err, relative_error(fs.alphas(t, i), filtered[t], 0.0),
                           relative_error(fs.alphas(t, i), fb.filtered[t], 0.0)});
      smooth_err = std::max({smooth_err, relative_error(kalman(t, i), smoothed[t], 0.0),
                             relative_error(kalman(t, i), fb.smoothed[t], 0.0),
                             relative_error(hmm(t, i), smoothed[t], 0.0)});
    }
  }
  TrialOutcome out{CheckSuite::kOracle, 0, seed, false, std::max(filt_err, smooth_err), {}};
  out.passed = filt_err < kOracleRelTol && smooth_err < kOracleRelTol;
  out.detail = format_error("filtered", filt_err) + ", " + format_error("smoothed", smooth_err);
  return out;
}

TrialOutcome grads_trial(std::uint64_t seed) {
  Rng rng(seed);
  const RandomInstance inst = sample_instance(rng, 20, 4, 5);
  const SequenceLoss loss = [](const Tensor2& g) {
    double acc = 0.0;
    for (double v : g.data()) acc += v * v;
    return acc;
  };
  double worst = 0.0, worst_abs = 0.0;
  for (BackwardMode mode : {BackwardMode::kNone, BackwardMode::kKalman}) {
    const Tensor2 gammas = smooth_sequence(inst.params, inst.X, mode).gammas;
    Tensor2 d_gamma(gammas.rows(), gammas.cols());
    for (std::size_t k = 0; k < gammas.size(); ++k) d_gamma.data()[k] = 2.0 * gammas.data()[k];
    const GradientBundle analytic = backprop(inst.params, inst.X, mode, d_gamma);
    const GradientBundle numeric = finite_diff_grad(inst.params, inst.X, mode, loss, kGradStep);
    Vector a, n;
    analytic.for_each_scalar([&](double v) { a.push_back(v); });
    numeric.for_each_scalar([&](double v) { n.push_back(v); });
    for (std::size_t k = 0; k < a.size(); ++k) {
      worst = std::max(worst, relative_error(a[k], n[k], kGradAbsFloor));
      worst_abs = std::max(worst_abs, std::abs(a[k] - n[k]));
    }
  }
  TrialOutcome out{CheckSuite::kGrads, 0, seed, worst < kGradRelTol, worst, {}};
  out.detail = format_error("backprop-vs-fd rel", worst) + ", " + format_error("abs", worst_abs);
  return out;
}

CheckSummary run_check(CheckSuite suite, std::size_t trials, std::uint64_t seed,
                       InjectedFault fault, const TrialCallback& on_trial) {
  CheckSummary summary;
  const CheckSuite all[] = {CheckSuite::kEquivalence, CheckSuite::kOracle, CheckSuite::kGrads};
  for (CheckSuite s : all) {
    if (suite != CheckSuite::kAll && suite != s) continue;
    for (std::size_t k = 0; k < trials; ++k) {
      // Suites draw from disjoint seed streams.
      const std::uint64_t trial_seed = derive_seed(seed + 1000003ULL * static_cast<int>(s), k);
      TrialOutcome out;
      switch (s) {
        case CheckSuite::kEquivalence:
          out = equivalence_trial(trial_seed, fault);
          break;
        case CheckSuite::kOracle:
          out = oracle_trial(trial_seed, fault);
          break;
        default:
          // The planted prior defect lives in the forward filter, which the
          // gradient suite differentiates consistently; it is not a target.
          out = grads_trial(trial_seed);
          break;
      }
      out.index = k;
      ++summary.trials;
      summary.max_error = std::max(summary.max_error, out.max_error);
      if (!out.passed && summary.failures++ == 0) summary.first_failing_seed = out.seed;
      if (on_trial) on_trial(out);
    }
  }
  return summary;
}

}  // namespace ubru
