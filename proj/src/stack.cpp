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

#include "ubru/stack.hpp"

#include <cmath>
#include <string>

#include "ubru/error.hpp"

namespace ubru {

namespace {

UbruParams init_params(std::size_t F, std::size_t H, Rng& rng) {
  UbruParams p = UbruParams::zeros(F, H);
  const double k = std::sqrt(6.0 / static_cast<double>(F + H));
  for (double& w : p.W.data()) w = rng.uniform(-k, k);
  return p;
}

void check_params_shape(const UbruParams& p, const LayerConfig& cfg, std::size_t index) {
  p.validate();
  if (p.input_dim() != cfg.input_dim || p.hidden_dim() != cfg.hidden_dim) {
    throw DimensionError("layer " + std::to_string(index) + ": parameters are " +
                         std::to_string(p.input_dim()) + "x" + std::to_string(p.hidden_dim()) +
                         ", config says " + std::to_string(cfg.input_dim) + "x" +
                         std::to_string(cfg.hidden_dim));
  }
}

}  // namespace

void StackLayer::validate() const {
  check_params_shape(forward, config, 0);
  if (config.bidirectional != reverse.has_value()) {
    throw DimensionError("StackLayer: reverse parameters must be present iff bidirectional");
  }
  if (reverse) check_params_shape(*reverse, config, 0);
}

Tensor2 StackLayer::apply(const Tensor2& X) const { return apply(X, config.backward_mode); }

Tensor2 StackLayer::apply(const Tensor2& X, BackwardMode mode) const {
  if (reverse) return bidirectional_smooth(forward, *reverse, X, mode);
  return smooth_sequence(forward, X, mode).gammas;
}

Tensor2 Head::log_probs(const Tensor2& features) const {
  if (features.cols() != input_dim() || b.size() != num_classes()) {
    throw DimensionError("Head: expected " + std::to_string(input_dim()) +
                         " features per step, got " + std::to_string(features.cols()));
  }
  const std::size_t T = features.rows(), C = num_classes(), D = input_dim();
  Tensor2 out(T, C);
  for (std::size_t t = 0; t < T; ++t) {
    const auto x = features.row(t);
    auto row = out.row(t);
    for (std::size_t c = 0; c < C; ++c) {
      const auto w = W.row(c);
      double acc = b[c];
      for (std::size_t d = 0; d < D; ++d) acc += w[d] * x[d];
      row[c] = acc;
    }
    log_softmax_inplace(row);
  }
  return out;
}

void Model::validate() const {
  if (layers.empty()) throw DimensionError("Model: no recurrent layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    layers[l].validate();
    if (l > 0 && layers[l].config.input_dim != layers[l - 1].config.output_dim()) {
      throw DimensionError("Model: layer " + std::to_string(l) + " expects " +
                           std::to_string(layers[l].config.input_dim) + " inputs, previous " +
                           "layer produces " + std::to_string(layers[l - 1].config.output_dim()));
    }
  }
  if (head.input_dim() != layers.back().config.output_dim() ||
      head.b.size() != head.num_classes() || head.num_classes() == 0) {
    throw DimensionError("Model: head shape does not match the last layer");
  }
  if (!head.W.all_finite() || !all_finite(head.b)) {
    throw NonFiniteError("Model: non-finite head parameter");
  }
}

Model Model::initialize(std::span<const LayerConfig> configs, std::size_t num_classes,
                        Rng& rng) {
  Model m;
  for (const LayerConfig& cfg : configs) {
    StackLayer layer{cfg, init_params(cfg.input_dim, cfg.hidden_dim, rng), std::nullopt};
    if (cfg.bidirectional) layer.reverse = init_params(cfg.input_dim, cfg.hidden_dim, rng);
    m.layers.push_back(std::move(layer));
  }
  const std::size_t D = configs.empty() ? 0 : configs.back().output_dim();
  m.head.W = Tensor2(num_classes, D);
  const double k = std::sqrt(6.0 / static_cast<double>(D + num_classes));
  for (double& w : m.head.W.data()) w = rng.uniform(-k, k);
  m.head.b.assign(num_classes, 0.0);
  m.validate();
  return m;
}

Tensor2 stack_features(std::span<const StackLayer> layers, const Tensor2& X,
                       std::optional<BackwardMode> mode) {
  if (layers.empty()) throw DimensionError("stack_features: no layers");
  Tensor2 input = X;
  Tensor2 out;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    out = layers[l].apply(input, mode.value_or(layers[l].config.backward_mode));
    if (l + 1 < layers.size()) input = out.transposed();
  }
  return out;
}

Tensor2 stack_forward(std::span<const StackLayer> layers, const Head& head, const Tensor2& X) {
  return head.log_probs(stack_features(layers, X));
}

}  // namespace ubru
