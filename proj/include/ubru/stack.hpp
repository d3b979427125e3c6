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

#ifndef UBRU_STACK_HPP_
#define UBRU_STACK_HPP_

#include <optional>
#include <span>
#include <vector>

#include "ubru/layer.hpp"
#include "ubru/random.hpp"

namespace ubru {

// One recurrent layer of a stack. Bidirectional layers carry a second,
// fully independent parameter set for the reversed direction.
struct StackLayer {
  LayerConfig config;
  UbruParams forward;
  std::optional<UbruParams> reverse;

  void validate() const;
  // X is input_dim x T; returns T x output_dim.
  Tensor2 apply(const Tensor2& X) const;
  Tensor2 apply(const Tensor2& X, BackwardMode mode) const;

  friend bool operator==(const StackLayer&, const StackLayer&) = default;
};

// Affine map to class scores followed by log-softmax.
struct Head {
  Tensor2 W;  // C x D
  Vector b;   // C

  std::size_t num_classes() const { return W.rows(); }
  std::size_t input_dim() const { return W.cols(); }

  // features is T x D; returns T x C log-probabilities.
  Tensor2 log_probs(const Tensor2& features) const;

  friend bool operator==(const Head&, const Head&) = default;
};

struct Model {
  std::vector<StackLayer> layers;
  Head head;

  // Checks that every layer consumes the previous layer's output and that
  // the head matches the last layer.
  void validate() const;
  std::size_t input_dim() const { return layers.front().config.input_dim; }
  std::size_t num_classes() const { return head.num_classes(); }

  // W ~ U[-k, k] with k = sqrt(6 / (fan_in + fan_out)); biases zero;
  // transition and initial logits zero.
  static Model initialize(std::span<const LayerConfig> configs, std::size_t num_classes,
                          Rng& rng);

  template <typename Fn>
  void for_each_scalar(Fn&& fn) {
    for (auto& layer : layers) {
      layer.forward.for_each_scalar(fn);
      if (layer.reverse) layer.reverse->for_each_scalar(fn);
    }
    for (double& v : head.W.data()) fn(v);
    for (double& v : head.b) fn(v);
  }

  friend bool operator==(const Model&, const Model&) = default;
};

// Output of the last recurrent layer (T x D), optionally forcing every layer
// into `mode`.
Tensor2 stack_features(std::span<const StackLayer> layers, const Tensor2& X,
                       std::optional<BackwardMode> mode = std::nullopt);

// T x C per-timestep log-probabilities.
Tensor2 stack_forward(std::span<const StackLayer> layers, const Head& head, const Tensor2& X);

}  // namespace ubru

#endif  // UBRU_STACK_HPP_
