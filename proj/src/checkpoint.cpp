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

// JSON forms of TrainConfig and Checkpoint.

#include <string>

#include "json_io.hpp"
#include "ubru/error.hpp"
#include "ubru/train.hpp"

namespace ubru {

using nlohmann::json;

namespace {

template <typename T>
T field(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw FormatError(where + ": missing field \"" + key + "\"");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw FormatError(where + ": field \"" + key + "\" has the wrong type");
  }
}

template <typename T>
T field_or(const json& obj, const char* key, T fallback, const std::string& where) {
  return obj.contains(key) ? field<T>(obj, key, where) : fallback;
}

std::size_t count_field(const json& obj, const char* key, const std::string& where) {
  if (obj.contains(key) && obj.at(key).is_number_integer() && obj.at(key).get<long long>() < 0) {
    throw FormatError(where + ": field \"" + key + "\" must be non-negative");
  }
  return field<std::size_t>(obj, key, where);
}

json layer_config_json(const LayerConfig& l) {
  return json{{"input_dim", l.input_dim},
              {"hidden_dim", l.hidden_dim},
              {"bidirectional", l.bidirectional},
              {"backward_mode", std::string(to_string(l.backward_mode))}};
}

json config_json(const TrainConfig& cfg) {
  json layers = json::array();
  for (const LayerConfig& l : cfg.layers) layers.push_back(layer_config_json(l));
  return json{{"layers", layers},
              {"num_classes", cfg.num_classes},
              {"learning_rate", cfg.learning_rate},
              {"epochs", cfg.epochs},
              {"batch_size", cfg.batch_size},
              {"seed", cfg.seed},
              {"optimizer", std::string(to_string(cfg.optimizer))}};
}

LayerConfig layer_config_from(const json& obj, const std::string& where) {
  if (!obj.is_object()) throw FormatError(where + ": layer entry must be an object");
  LayerConfig l;
  l.input_dim = obj.contains("input_dim") ? count_field(obj, "input_dim", where) : 0;
  l.hidden_dim = count_field(obj, "hidden_dim", where);
  l.bidirectional = field_or<bool>(obj, "bidirectional", false, where);
  try {
    l.backward_mode = parse_backward_mode(
        field_or<std::string>(obj, "backward_mode", std::string("kalman"), where));
  } catch (const ConfigError& e) {
    throw FormatError(where + ": " + e.what());
  }
  return l;
}

TrainConfig config_from(const json& obj, const std::string& where) {
  if (!obj.is_object()) throw FormatError(where + ": expected a JSON object");
  TrainConfig cfg;
  if (!obj.contains("layers") || !obj["layers"].is_array()) {
    throw FormatError(where + ": missing array field \"layers\"");
  }
  for (const json& l : obj["layers"]) cfg.layers.push_back(layer_config_from(l, where));
  cfg.num_classes = count_field(obj, "num_classes", where);
  cfg.learning_rate = field_or<double>(obj, "learning_rate", cfg.learning_rate, where);
  cfg.epochs = obj.contains("epochs") ? count_field(obj, "epochs", where) : cfg.epochs;
  cfg.batch_size =
      obj.contains("batch_size") ? count_field(obj, "batch_size", where) : cfg.batch_size;
  cfg.seed = field_or<std::uint64_t>(obj, "seed", cfg.seed, where);
  const auto opt = field_or<std::string>(obj, "optimizer", "sgd", where);
  if (opt == "sgd") {
    cfg.optimizer = OptimizerKind::kSgd;
  } else if (opt == "adam") {
    cfg.optimizer = OptimizerKind::kAdam;
  } else {
    throw FormatError(where + ": unknown optimizer '" + opt + "' (expected sgd or adam)");
  }
  return cfg;
}

json params_json(const UbruParams& p) {
  return json{{"W", p.W.storage()},
              {"b", p.b},
              {"u_tau11", p.u_tau11},
              {"u_tau01", p.u_tau01},
              {"u_rho0", p.u_rho0}};
}

Vector float_array(const json& obj, const char* key, std::size_t expected,
                   const std::string& where) {
  if (!obj.contains(key) || !obj.at(key).is_array()) {
    throw FormatError(where + ": missing array \"" + key + "\"");
  }
  const json& arr = obj.at(key);
  Vector out;
  out.reserve(arr.size());
  for (const json& v : arr) {
    if (!v.is_number()) throw FormatError(where + ": non-numeric entry in \"" + key + "\"");
    out.push_back(v.get<double>());
  }
  if (out.size() != expected) {
    throw ShapeError(where + ": \"" + key + "\" has " + std::to_string(out.size()) +
                     " entries, expected " + std::to_string(expected));
  }
  return out;
}

UbruParams params_from(const json& obj, std::size_t F, std::size_t H, const std::string& where) {
  if (!obj.is_object()) throw FormatError(where + ": parameters must be an object");
  UbruParams p;
  p.W = Tensor2(F, H, float_array(obj, "W", F * H, where));
  p.b = float_array(obj, "b", H, where);
  p.u_tau11 = float_array(obj, "u_tau11", H, where);
  p.u_tau01 = float_array(obj, "u_tau01", H, where);
  p.u_rho0 = float_array(obj, "u_rho0", H, where);
  return p;
}

}  // namespace

TrainConfig parse_train_config(const std::string& json_text) {
  json obj;
  try {
    obj = json::parse(json_text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("train config: ") + e.what());
  }
  TrainConfig cfg = config_from(obj, "train config");
  cfg.validate();
  return cfg;
}

std::string train_config_to_json(const TrainConfig& cfg) {
  return detail::dump_json(config_json(cfg));
}

std::string checkpoint_to_json(const Checkpoint& ckpt) {
  json layers = json::array();
  std::vector<std::string> modes;
  for (const StackLayer& layer : ckpt.model.layers) {
    json entry = layer_config_json(layer.config);
    entry.update(params_json(layer.forward));
    if (layer.reverse) entry["reverse"] = params_json(*layer.reverse);
    layers.push_back(std::move(entry));
    modes.emplace_back(to_string(layer.config.backward_mode));
  }
  const Head& head = ckpt.model.head;
  json doc{{"version", ckpt.version},
           {"config", config_json(ckpt.config)},
           {"layers", std::move(layers)},
           {"head",
            {{"num_classes", head.num_classes()},
             {"input_dim", head.input_dim()},
             {"W", head.W.storage()},
             {"b", head.b}}},
           {"meta",
            {{"epochs_completed", ckpt.meta.epochs_completed},
             {"loss_history", ckpt.meta.loss_history},
             {"backward_modes", modes}}}};
  return detail::dump_json(doc) + "\n";
}

Checkpoint checkpoint_from_json(const std::string& text) {
  const std::string where = "checkpoint";
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(where + ": malformed file (" + e.what() + ")");
  }
  if (!doc.is_object()) throw FormatError(where + ": expected a JSON object");
  if (!doc.contains("version") || !doc["version"].is_number_integer()) {
    throw FormatError(where + ": missing integer field \"version\"");
  }
  const int version = doc["version"].get<int>();
  if (version != kCheckpointVersion) throw VersionError(version, kCheckpointVersion);

  Checkpoint ckpt;
  ckpt.version = version;
  if (!doc.contains("config")) throw FormatError(where + ": missing field \"config\"");
  ckpt.config = config_from(doc["config"], where + " config");

  if (!doc.contains("layers") || !doc["layers"].is_array() || doc["layers"].empty()) {
    throw FormatError(where + ": missing non-empty array \"layers\"");
  }
  for (std::size_t l = 0; l < doc["layers"].size(); ++l) {
    const json& entry = doc["layers"][l];
    const std::string lw = where + " layer " + std::to_string(l);
    StackLayer layer;
    layer.config = layer_config_from(entry, lw);
    const std::size_t F = layer.config.input_dim, H = layer.config.hidden_dim;
    layer.forward = params_from(entry, F, H, lw);
    if (layer.config.bidirectional) {
      if (!entry.contains("reverse")) throw FormatError(lw + ": bidirectional layer lacks \"reverse\"");
      layer.reverse = params_from(entry["reverse"], F, H, lw + " reverse");
    } else if (entry.contains("reverse")) {
      throw ShapeError(lw + ": unidirectional layer carries reverse parameters");
    }
    ckpt.model.layers.push_back(std::move(layer));
  }

  if (!doc.contains("head") || !doc["head"].is_object()) {
    throw FormatError(where + ": missing object \"head\"");
  }
  const json& head = doc["head"];
  const std::size_t C = count_field(head, "num_classes", where + " head");
  const std::size_t D = count_field(head, "input_dim", where + " head");
  ckpt.model.head.W = Tensor2(C, D, float_array(head, "W", C * D, where + " head"));
  ckpt.model.head.b = float_array(head, "b", C, where + " head");

  if (!doc.contains("meta") || !doc["meta"].is_object()) {
    throw FormatError(where + ": missing object \"meta\"");
  }
  const json& meta = doc["meta"];
  ckpt.meta.epochs_completed = count_field(meta, "epochs_completed", where + " meta");
  if (!meta.contains("loss_history") || !meta["loss_history"].is_array()) {
    throw FormatError(where + " meta: missing array \"loss_history\"");
  }
  ckpt.meta.loss_history =
      float_array(meta, "loss_history", meta["loss_history"].size(), where + " meta");

  try {
    ckpt.model.validate();
    if (ckpt.config.layers.size() != ckpt.model.layers.size() ||
        ckpt.config.num_classes != ckpt.model.num_classes()) {
      throw DimensionError("config and stored parameters disagree");
    }
  } catch (const DimensionError& e) {
    throw ShapeError(where + ": inconsistent shapes: " + e.what());
  } catch (const NonFiniteError& e) {
    throw FormatError(where + ": " + e.what());
  }
  return ckpt;
}

std::string smoothed_to_jsonl(const Model& model, const Dataset& data,
                              std::optional<BackwardMode> mode) {
  model.validate();
  std::string out;
  for (const Sequence& seq : data.sequences) {
    if (seq.x.rows() != model.input_dim()) {
      throw DimensionError("smooth: data has " + std::to_string(seq.x.rows()) +
                           " features, model expects " + std::to_string(model.input_dim()));
    }
    const Tensor2 gammas = stack_features(model.layers, seq.x, mode);
    json rows = json::array();
    for (std::size_t t = 0; t < gammas.rows(); ++t) {
      const auto r = gammas.row(t);
      rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    out += detail::dump_json(json{{"gamma", std::move(rows)}});
    out += '\n';
  }
  return out;
}

void save_smoothed(const Model& model, const Dataset& data, const std::string& path,
                   std::optional<BackwardMode> mode) {
  detail::write_file(path, smoothed_to_jsonl(model, data, mode));
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  detail::write_file(path, checkpoint_to_json(ckpt));
}

Checkpoint load_checkpoint(const std::string& path) {
  return checkpoint_from_json(detail::read_file(path));
}

}  // namespace ubru
