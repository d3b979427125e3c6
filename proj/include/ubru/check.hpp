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

// Randomized verification suites behind `ubru check`.
//
// Every trial draws its own instance from a seed derived from the master
// seed and the trial index, so a failing trial can be replayed alone.
// Instance sampling: logits ~ U[-3, 3], W and b ~ U[-2, 2], x ~ N(0, 1),
// H ~ U{1..8}, F ~ U{1..5}; T ~ U{1..50} (equivalence), U{1..12} (oracle),
// U{1..20} with H <= 4 (grads).

#ifndef UBRU_CHECK_HPP_
#define UBRU_CHECK_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "ubru/layer.hpp"
#include "ubru/random.hpp"

namespace ubru {

enum class CheckSuite { kGrads, kEquivalence, kOracle, kAll };

// Deliberate defects for mutation testing of the suites themselves.
enum class InjectedFault { kNone, kTau01Sign };

CheckSuite parse_check_suite(std::string_view name);
std::string_view to_string(CheckSuite suite);
InjectedFault parse_injected_fault(std::string_view name);

// Thresholds.
inline constexpr double kEquivalenceTol = 1e-10;
inline constexpr double kOracleRelTol = 1e-8;
inline constexpr double kGradRelTol = 1e-5;
inline constexpr double kGradAbsFloor = 1e-8;
inline constexpr double kGradStep = 1e-5;

struct TrialOutcome {
  CheckSuite suite;
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool passed = false;
  double max_error = 0.0;
  std::string detail;
};

struct CheckSummary {
  std::size_t trials = 0;
  std::size_t failures = 0;
  double max_error = 0.0;
  std::uint64_t first_failing_seed = 0;
  bool passed() const { return failures == 0; }
};

using TrialCallback = std::function<void(const TrialOutcome&)>;

// Runs `trials` trials of one suite (or of each suite for kAll).
CheckSummary run_check(CheckSuite suite, std::size_t trials, std::uint64_t seed,
                       InjectedFault fault = InjectedFault::kNone,
                       const TrialCallback& on_trial = {});

// Single trials, exposed for the acceptance suite and tests.
TrialOutcome equivalence_trial(std::uint64_t seed, InjectedFault fault = InjectedFault::kNone);
TrialOutcome oracle_trial(std::uint64_t seed, InjectedFault fault = InjectedFault::kNone);
TrialOutcome grads_trial(std::uint64_t seed);

// Instance generator shared by the suites.
struct RandomInstance {
  UbruParams params;
  Tensor2 X;
};
RandomInstance sample_instance(Rng& rng, std::size_t max_T, std::size_t max_H,
                               std::size_t max_F);

// |a - b| <= floor passes outright; otherwise |a - b| / max(|a|, |b|).
double relative_error(double a, double b, double abs_floor);

}  // namespace ubru

#endif  // UBRU_CHECK_HPP_
