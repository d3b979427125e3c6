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

#ifndef UBRU_SRC_LAYER_INTERNAL_HPP_
#define UBRU_SRC_LAYER_INTERNAL_HPP_

#include "ubru/layer.hpp"

namespace ubru::detail {

// Planted defects used to demonstrate that the verification suites catch
// real bugs. Never enabled outside `ubru check --inject-fault`.
enum class Fault {
  kNone,
  // Prior computed as tau11*alpha - tau01*(1-alpha).
  kTau01Sign,
};

FilterState forward_filter(const UbruParams& params, const Tensor2& X, Fault fault);

SmoothedPosteriors smooth_sequence(const UbruParams& params, const Tensor2& X,
                                   BackwardMode mode, Fault fault);

}  // namespace ubru::detail

#endif  // UBRU_SRC_LAYER_INTERNAL_HPP_
