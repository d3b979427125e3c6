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

// Framewise cross-entropy training of a UBRU stack.
//
// Loss of a sequence is the mean over its frames of -log P(y_t); the loss of
// a batch or dataset is the mean over sequences. Sequences are processed one
// at a time (no padding), and batch gradients are summed in batch order, so
// a given (config, data) pair always yields the same checkpoint.

#ifndef UBRU_TRAIN_HPP_
#define UBRU_TRAIN_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ubru/data.hpp"
#include "ubru/stack.hpp"

namespace ubru {

enum class OptimizerKind { kSgd, kAdam };

struct TrainConfig {
  // input_dim of the first layer may be 0, meaning "take it from the data";
  // later input_dims are derived from the previous layer.
  std::vector<LayerConfig> layers;
  std::size_t num_classes = 2;
  double learning_rate = 0.01;
  std::size_t epochs = 10;
  std::size_t batch_size = 1;
  std::uint64_t seed = 0;
  OptimizerKind optimizer = OptimizerKind::kSgd;

  // Throws ConfigError. Training accepts backward modes none and kalman.
  void validate() const;
  // Copy with every layer's input_dim filled in.
  TrainConfig resolved(std::size_t input_dim) const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct TrainingMeta {
  std::size_t epochs_completed = 0;
  std::vector<double> loss_history;  // full-data loss after each epoch

  friend bool operator==(const TrainingMeta&, const TrainingMeta&) = default;
};

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  int version = kCheckpointVersion;
  TrainConfig config;
  Model model;
  TrainingMeta meta;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

using EpochCallback = std::function<void(std::size_t epoch, double loss)>;

// Throws DimensionError if the data does not fit the config and
// NonFiniteError if the loss diverges.
Checkpoint train_model(const TrainConfig& cfg, const Dataset& data,
                       const EpochCallback& on_epoch = {});

// Same loop starting from an existing model (used by tests and by
// oracle-initialized experiments).
Checkpoint train_from(Model model, const TrainConfig& cfg, const Dataset& data,
                      const EpochCallback& on_epoch = {});

struct Metrics {
  double accuracy = 0.0;
  double mean_cross_entropy = 0.0;
  std::size_t frames = 0;
  std::size_t correct = 0;
  // confusion[true][predicted]
  std::vector<std::vector<std::uint64_t>> confusion;
};

Metrics evaluate(const Model& model, const Dataset& data);

// Mean over sequences of the per-sequence mean cross-entropy.
double dataset_loss(const Model& model, const Dataset& data);

// Labels of a sequence; derived from the binary states when "y" is absent.
std::vector<int> sequence_labels(const Sequence& seq);

// JSON form of TrainConfig, shared by the CLI config file and checkpoints.
TrainConfig parse_train_config(const std::string& json_text);
std::string train_config_to_json(const TrainConfig& cfg);

std::string_view to_string(OptimizerKind kind);

// Throws IoError, FormatError, VersionError or ShapeError. Loading never
// returns a partially filled checkpoint.
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);
std::string checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const std::string& text);

// One {"gamma": [[...] x T]} line per sequence holding the output of the
// model's last recurrent layer; `mode` overrides every layer's mode.
std::string smoothed_to_jsonl(const Model& model, const Dataset& data,
                              std::optional<BackwardMode> mode = std::nullopt);
void save_smoothed(const Model& model, const Dataset& data, const std::string& path,
                   std::optional<BackwardMode> mode = std::nullopt);

}  // namespace ubru

#endif  // UBRU_TRAIN_HPP_
