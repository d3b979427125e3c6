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

#include "ubru/data.hpp"

#include <cmath>
#include <sstream>

#include "json_io.hpp"
#include "ubru/error.hpp"
#include "ubru/random.hpp"

namespace ubru {

using nlohmann::json;

SyntheticSpec SyntheticSpec::uniform(std::size_t num_units, std::size_t feature_dim,
                                     const ChainSpec& chain, double noise,
                                     std::size_t seq_len, std::size_t num_seqs,
                                     std::uint64_t seed) {
  SyntheticSpec spec;
  spec.num_units = num_units;
  spec.feature_dim = feature_dim;
  spec.chains.assign(num_units, chain);
  spec.mixing = block_mixing(feature_dim, num_units);
  spec.noise = noise;
  spec.seq_len = seq_len;
  spec.num_seqs = num_seqs;
  spec.seed = seed;
  return spec;
}

void SyntheticSpec::validate() const {
  if (num_units == 0 || feature_dim == 0 || seq_len == 0) {
    throw ConfigError("SyntheticSpec: units, features and length must be positive");
  }
  if (chains.size() != num_units) throw DimensionError("SyntheticSpec: one chain per unit");
  if (mixing.rows() != feature_dim || mixing.cols() != num_units) {
    throw DimensionError("SyntheticSpec: mixing must be features x units");
  }
  if (!(noise > 0.0) || !std::isfinite(noise)) {
    throw ConfigError("SyntheticSpec: noise must be positive");
  }
  for (const ChainSpec& c : chains) c.validate();
}

Tensor2 block_mixing(std::size_t feature_dim, std::size_t num_units) {
  if (feature_dim < num_units) {
    throw ConfigError("block mixing needs at least one feature per unit (" +
                      std::to_string(feature_dim) + " features, " +
                      std::to_string(num_units) + " units)");
  }
  Tensor2 m(feature_dim, num_units);
  for (std::size_t f = 0; f < feature_dim; ++f) m(f, f % num_units) = 1.0;
  return m;
}

std::size_t Dataset::num_frames() const {
  std::size_t n = 0;
  for (const auto& s : sequences) n += s.length();
  return n;
}

int joint_class(std::span<const double> states_row) {
  int y = 0;
  for (std::size_t i = 0; i < states_row.size(); ++i)
    if (states_row[i] > 0.5) y |= 1 << i;
  return y;
}

Dataset generate(const SyntheticSpec& spec) {
  spec.validate();
  const std::size_t H = spec.num_units, F = spec.feature_dim, T = spec.seq_len;
  Rng rng(spec.seed);
  Dataset data;
  data.sequences.reserve(spec.num_seqs);
  for (std::size_t n = 0; n < spec.num_seqs; ++n) {
    Sequence seq{Tensor2(F, T), std::vector<int>(T), Tensor2(T, H)};
    for (std::size_t i = 0; i < H; ++i) {
      const ChainSpec& c = spec.chains[i];
      bool on = rng.bernoulli(c.rho0);
      for (std::size_t t = 0; t < T; ++t) {
        on = rng.bernoulli(on ? c.tau11 : c.tau01);
        seq.states(t, i) = on ? 1.0 : 0.0;
      }
    }
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t f = 0; f < F; ++f) {
        double mean = 0.0;
        for (std::size_t i = 0; i < H; ++i)
          mean += spec.mixing(f, i) * (seq.states(t, i) > 0.5 ? 1.0 : -1.0);
        seq.x(f, t) = mean + spec.noise * rng.normal();
      }
      seq.labels[t] = joint_class(seq.states.row(t));
    }
    data.sequences.push_back(std::move(seq));
  }
  return data;
}

GaussianEmissionModel unit_emission_model(const SyntheticSpec& spec, std::size_t unit) {
  spec.validate();
  if (unit >= spec.num_units) throw DimensionError("unit_emission_model: unit out of range");
  const std::size_t F = spec.feature_dim;
  for (std::size_t f = 0; f < F; ++f) {
    if (spec.mixing(f, unit) == 0.0) continue;
    for (std::size_t j = 0; j < spec.num_units; ++j) {
      if (j != unit && spec.mixing(f, j) != 0.0) {
        throw ConfigError("unit_emission_model: feature " + std::to_string(f) +
                          " is shared between units; emissions are not Gaussian per unit");
      }
    }
  }
  GaussianEmissionModel model{Vector(F), Vector(F), Tensor2(F, F)};
  for (std::size_t f = 0; f < F; ++f) {
    model.mu[f] = spec.mixing(f, unit);
    model.nu[f] = -spec.mixing(f, unit);
    model.sigma(f, f) = spec.noise * spec.noise;
  }
  return model;
}

UbruParams ground_truth_params(const SyntheticSpec& spec) {
  UbruParams p = UbruParams::zeros(spec.feature_dim, spec.num_units);
  for (std::size_t i = 0; i < spec.num_units; ++i) {
    const UnitEmissionParams e = params_from_gaussian(unit_emission_model(spec, i));
    for (std::size_t f = 0; f < spec.feature_dim; ++f) p.W(f, i) = e.W[f];
    p.b[i] = e.b;
    p.u_tau11[i] = logit(spec.chains[i].tau11);
    p.u_tau01[i] = logit(spec.chains[i].tau01);
    p.u_rho0[i] = logit(spec.chains[i].rho0);
  }
  return p;
}

std::string dataset_to_jsonl(const Dataset& data) {
  std::string out;
  for (const Sequence& seq : data.sequences) {
    const std::size_t T = seq.length(), F = seq.x.rows();
    json obj;
    json x = json::array();
    for (std::size_t t = 0; t < T; ++t) {
      json row = json::array();
      for (std::size_t f = 0; f < F; ++f) row.push_back(seq.x(f, t));
      x.push_back(std::move(row));
    }
    obj["x"] = std::move(x);
    if (!seq.labels.empty()) obj["y"] = seq.labels;
    if (!seq.states.empty()) {
      json states = json::array();
      for (std::size_t t = 0; t < seq.states.rows(); ++t) {
        json row = json::array();
        for (double v : seq.states.row(t)) row.push_back(v > 0.5 ? 1 : 0);
        states.push_back(std::move(row));
      }
      obj["states"] = std::move(states);
    }
    out += detail::dump_json(obj);
    out += '\n';
  }
  return out;
}

namespace {

Sequence parse_sequence(const json& obj, std::size_t line_no) {
  const std::string where = "dataset line " + std::to_string(line_no);
  if (!obj.is_object() || !obj.contains("x") || !obj["x"].is_array()) {
    throw FormatError(where + ": expected an object with an array field \"x\"");
  }
  const json& x = obj["x"];
  const std::size_t T = x.size();
  if (T == 0) throw ShapeError(where + ": empty sequence");
  const std::size_t F = x[0].is_array() ? x[0].size() : 0;
  if (F == 0) throw ShapeError(where + ": observations must be non-empty arrays");
  Sequence seq{Tensor2(F, T), {}, {}};
  for (std::size_t t = 0; t < T; ++t) {
    if (!x[t].is_array()) throw FormatError(where + ": x[" + std::to_string(t) + "] not an array");
    if (x[t].size() != F) throw ShapeError(where + ": ragged observation vectors");
    for (std::size_t f = 0; f < F; ++f) {
      if (!x[t][f].is_number()) throw FormatError(where + ": non-numeric observation");
      seq.x(f, t) = x[t][f].get<double>();
    }
  }
  if (obj.contains("y")) {
    const json& y = obj["y"];
    if (!y.is_array()) throw FormatError(where + ": \"y\" must be an array");
    if (y.size() != T) throw ShapeError(where + ": label count differs from sequence length");
    for (const json& v : y) {
      if (!v.is_number_integer()) throw FormatError(where + ": labels must be integers");
      seq.labels.push_back(v.get<int>());
    }
  }
  if (obj.contains("states")) {
    const json& s = obj["states"];
    if (!s.is_array()) throw FormatError(where + ": \"states\" must be an array");
    if (s.size() != T) throw ShapeError(where + ": state rows differ from sequence length");
    const std::size_t H = s[0].is_array() ? s[0].size() : 0;
    seq.states = Tensor2(T, H);
    for (std::size_t t = 0; t < T; ++t) {
      if (!s[t].is_array() || s[t].size() != H) throw ShapeError(where + ": ragged states");
      for (std::size_t i = 0; i < H; ++i) {
        if (!s[t][i].is_number_integer()) throw FormatError(where + ": states must be 0 or 1");
        seq.states(t, i) = s[t][i].get<int>() != 0 ? 1.0 : 0.0;
      }
    }
  }
  return seq;
}

}  // namespace

Dataset dataset_from_jsonl(const std::string& text) {
  Dataset data;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError("dataset line " + std::to_string(line_no) + ": " + e.what());
    }
    Sequence seq = parse_sequence(obj, line_no);
    if (!data.sequences.empty() && seq.x.rows() != data.feature_dim()) {
      throw ShapeError("dataset line " + std::to_string(line_no) +
                       ": feature dimension differs from earlier sequences");
    }
    data.sequences.push_back(std::move(seq));
  }
  return data;
}

void save_dataset(const Dataset& data, const std::string& path) {
  detail::write_file(path, dataset_to_jsonl(data));
}

Dataset load_dataset(const std::string& path) { return dataset_from_jsonl(detail::read_file(path)); }

}  // namespace ubru
