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

// Synthetic sequences drawn from H independent two-state Markov chains.
//
// Observation model: x_t = M * l(s_t) + noise * eps_t with eps_t ~ N(0, I),
// where l_i = +1 when unit i is on and -1 when it is off, and M is F x H.
// The default M assigns feature f to unit f mod H (entry 1), so every unit
// owns a disjoint block of features and its emissions are exactly the
// shared-covariance Gaussians of unit_emission_model().
//
// Each frame is labeled with the joint state class y_t = sum_i s_{t,i} 2^i.

#ifndef UBRU_DATA_HPP_
#define UBRU_DATA_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "ubru/layer.hpp"
#include "ubru/oracle.hpp"

namespace ubru {

struct SyntheticSpec {
  std::size_t num_units = 4;
  std::size_t feature_dim = 8;
  std::vector<ChainSpec> chains;  // one per unit
  Tensor2 mixing;                 // F x H
  double noise = 1.0;
  std::size_t seq_len = 50;
  std::size_t num_seqs = 100;
  std::uint64_t seed = 0;

  // Same chain for every unit and block mixing.
  static SyntheticSpec uniform(std::size_t num_units, std::size_t feature_dim,
                               const ChainSpec& chain, double noise, std::size_t seq_len,
                               std::size_t num_seqs, std::uint64_t seed);

  // Throws ConfigError or DimensionError on inconsistent fields.
  void validate() const;
};

// Feature f belongs to unit f mod H. Requires F >= H.
Tensor2 block_mixing(std::size_t feature_dim, std::size_t num_units);

struct Sequence {
  Tensor2 x;                // F x T
  std::vector<int> labels;  // T class ids, or empty
  Tensor2 states;           // T x H binary states, or empty

  std::size_t length() const { return x.cols(); }
  friend bool operator==(const Sequence&, const Sequence&) = default;
};

struct Dataset {
  std::vector<Sequence> sequences;

  std::size_t feature_dim() const {
    return sequences.empty() ? 0 : sequences.front().x.rows();
  }
  std::size_t num_frames() const;
  friend bool operator==(const Dataset&, const Dataset&) = default;
};

Dataset generate(const SyntheticSpec& spec);

// Exact emission model of unit i. Throws ConfigError unless column i of the
// mixing matrix shares no nonzero row with any other column.
GaussianEmissionModel unit_emission_model(const SyntheticSpec& spec, std::size_t unit);

// Layer parameters that make the UBRU the exact Bayesian smoother of `spec`.
UbruParams ground_truth_params(const SyntheticSpec& spec);

int joint_class(std::span<const double> states_row);

// JSON-lines; one {"x": [[F] x T], "y": [T], "states": [[H] x T]} per line.
// Throws IoError, FormatError or ShapeError.
void save_dataset(const Dataset& data, const std::string& path);
Dataset load_dataset(const std::string& path);
std::string dataset_to_jsonl(const Dataset& data);
Dataset dataset_from_jsonl(const std::string& text);

}  // namespace ubru

#endif  // UBRU_DATA_HPP_
