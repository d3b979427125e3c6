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

#include "doctest.h"
#include "ubru/check.hpp"
#include "ubru/error.hpp"

using namespace ubru;

TEST_CASE("relative error with an absolute floor") {
  CHECK(relative_error(1.0, 1.0 + 1e-9, 1e-8) == 0.0);
  CHECK(relative_error(2.0, 1.0, 0.0) == doctest::Approx(0.5));
  CHECK(relative_error(0.0, 1e-3, 1e-8) == doctest::Approx(1.0));
  CHECK(relative_error(0.0, 0.0, 0.0) == 0.0);
}

TEST_CASE("sampled instances respect the requested bounds") {
  Rng rng(3);
  for (int k = 0; k < 200; ++k) {
    const RandomInstance inst = sample_instance(rng, 50, 8, 5);
    CHECK(inst.X.cols() >= 1);
    CHECK(inst.X.cols() <= 50);
    CHECK(inst.params.hidden_dim() <= 8);
    CHECK(inst.params.input_dim() <= 5);
    for (double w : inst.params.W.data()) CHECK(std::abs(w) <= 2.0);
    for (double u : inst.params.u_tau11) CHECK(std::abs(u) <= 3.0);
  }
}

TEST_CASE("all suites pass on the correct implementation") {
  std::size_t seen = 0;
  const CheckSummary s = run_check(CheckSuite::kAll, 10, 17, InjectedFault::kNone,
                                   [&](const TrialOutcome& t) {
                                     ++seen;
                                     CHECK(t.passed);
                                     CHECK_FALSE(t.detail.empty());
                                   });
  CHECK(s.passed());
  CHECK(s.trials == 30);
  CHECK(seen == 30);
  CHECK(s.max_error < 1e-5);
}

TEST_CASE("the planted prior defect is caught") {
  for (CheckSuite suite : {CheckSuite::kEquivalence, CheckSuite::kOracle}) {
    const CheckSummary s = run_check(suite, 20, 1, InjectedFault::kTau01Sign);
    CHECK_FALSE(s.passed());
    CHECK(s.failures > 0);
    // The reported seed replays the failure on its own.
    const TrialOutcome replay = suite == CheckSuite::kOracle
                                    ? oracle_trial(s.first_failing_seed, InjectedFault::kTau01Sign)
                                    : equivalence_trial(s.first_failing_seed,
                                                        InjectedFault::kTau01Sign);
    CHECK_FALSE(replay.passed);
    CHECK(replay.max_error <= s.max_error);
  }
}

TEST_CASE("trial seeds are a pure function of the master seed") {
  std::vector<std::uint64_t> a, b;
  run_check(CheckSuite::kEquivalence, 5, 9, InjectedFault::kNone,
            [&](const TrialOutcome& t) { a.push_back(t.seed); });
  run_check(CheckSuite::kEquivalence, 5, 9, InjectedFault::kNone,
            [&](const TrialOutcome& t) { b.push_back(t.seed); });
  CHECK(a == b);
  CHECK(equivalence_trial(a[2]).max_error == equivalence_trial(a[2]).max_error);
}

TEST_CASE("suite and fault names") {
  CHECK(parse_check_suite("oracle") == CheckSuite::kOracle);
  CHECK(to_string(CheckSuite::kGrads) == "grads");
  CHECK(parse_injected_fault("tau01-sign") == InjectedFault::kTau01Sign);
  CHECK_THROWS_AS(parse_check_suite("fast"), ConfigError);
  CHECK_THROWS_AS(parse_injected_fault("sign"), ConfigError);
}
