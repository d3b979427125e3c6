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

#include "ubru/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ubru/error.hpp"
#include "ubru/grad.hpp"

namespace ubru {

namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

Model zeros_like(const Model& m) {
  Model z = m;
  z.for_each_scalar([](double& v) { v = 0.0; });
  return z;
}

void add_into(UbruParams& dst, const GradientBundle& g) {
  auto w = dst.W.data();
  auto gw = g.dW.data();
  for (std::size_t k = 0; k < w.size(); ++k) w[k] += gw[k];
  for (std::size_t i = 0; i < dst.b.size(); ++i) {
    dst.b[i] += g.db[i];
    dst.u_tau11[i] += g.du_tau11[i];
    dst.u_tau01[i] += g.du_tau01[i];
    dst.u_rho0[i] += g.du_rho0[i];
  }
}

void check_labels(const std::vector<int>& labels, std::size_t T, std::size_t C) {
  if (labels.size() != T) throw DimensionError("label count differs from sequence length");
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= C) {
      throw DimensionError("label " + std::to_string(y) + " outside [0, " + std::to_string(C) +
                           ")");
    }
  }
}

double sequence_loss(const Tensor2& log_probs, const std::vector<int>& labels) {
  double acc = 0.0;
  for (std::size_t t = 0; t < log_probs.rows(); ++t) acc -= log_probs(t, labels[t]);
  return acc / static_cast<double>(log_probs.rows());
}

// Adds dL/dtheta of one sequence's loss into `grad` and returns the loss.
double accumulate_sequence(const Model& model, const Tensor2& X, const std::vector<int>& labels,
                           Model& grad) {
  const std::size_t L = model.layers.size();
  std::vector<Workspace> ahead(L), behind(L);
  Tensor2 input = X;
  Tensor2 features;
  for (std::size_t l = 0; l < L; ++l) {
    const StackLayer& layer = model.layers[l];
    const BackwardMode mode = layer.config.backward_mode;
    ahead[l] = Workspace::run(layer.forward, input, mode);
    if (layer.reverse) {
      behind[l] = Workspace::run(*layer.reverse, reverse_columns(input), mode);
      const Tensor2& a = ahead[l].output();
      const Tensor2 b = reverse_rows(behind[l].output());
      const std::size_t H = layer.config.hidden_dim;
      features = Tensor2(a.rows(), 2 * H);
      for (std::size_t t = 0; t < a.rows(); ++t) {
        std::copy_n(a.row(t).begin(), H, features.row(t).begin());
        std::copy_n(b.row(t).begin(), H, features.row(t).begin() + H);
      }
    } else {
      features = ahead[l].output();
    }
    if (l + 1 < L) input = features.transposed();
  }

  const Head& head = model.head;
  const Tensor2 log_probs = head.log_probs(features);
  const std::size_t T = log_probs.rows(), C = head.num_classes(), D = head.input_dim();
  check_labels(labels, T, C);
  const double loss = sequence_loss(log_probs, labels);

  Tensor2 d_features(T, D);
  const double inv_T = 1.0 / static_cast<double>(T);
  for (std::size_t t = 0; t < T; ++t) {
    const auto x = features.row(t);
    auto dx = d_features.row(t);
    for (std::size_t c = 0; c < C; ++c) {
      double d_logit = std::exp(log_probs(t, c));
      if (static_cast<int>(c) == labels[t]) d_logit -= 1.0;
      d_logit *= inv_T;
      grad.head.b[c] += d_logit;
      auto gw = grad.head.W.row(c);
      const auto w = head.W.row(c);
      for (std::size_t d = 0; d < D; ++d) {
        gw[d] += d_logit * x[d];
        dx[d] += d_logit * w[d];
      }
    }
  }

  for (std::size_t l = L; l-- > 0;) {
    const StackLayer& layer = model.layers[l];
    const std::size_t H = layer.config.hidden_dim;
    Tensor2 d_input;
    if (layer.reverse) {
      Tensor2 d_ahead(T, H), d_behind(T, H);
      for (std::size_t t = 0; t < T; ++t) {
        std::copy_n(d_features.row(t).begin(), H, d_ahead.row(t).begin());
        std::copy_n(d_features.row(t).begin() + H, H, d_behind.row(t).begin());
      }
      auto adj_a = ahead[l].backward(d_ahead);
      auto adj_b = behind[l].backward(reverse_rows(d_behind));
      add_into(grad.layers[l].forward, adj_a.grads);
      add_into(*grad.layers[l].reverse, adj_b.grads);
      d_input = std::move(adj_a.d_input);
      const Tensor2 back = reverse_columns(adj_b.d_input);
      for (std::size_t k = 0; k < d_input.size(); ++k) d_input.data()[k] += back.data()[k];
    } else {
      auto adj = ahead[l].backward(d_features);
      add_into(grad.layers[l].forward, adj.grads);
      d_input = std::move(adj.d_input);
    }
    if (l > 0) d_features = d_input.transposed();
  }
  return loss;
}

class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double lr, std::size_t n)
      : kind_(kind), lr_(lr), m_(n, 0.0), v_(n, 0.0) {}

  void step(Model& model, Model& grad) {
    std::vector<double*> theta;
    std::vector<double> g;
    model.for_each_scalar([&](double& v) { theta.push_back(&v); });
    grad.for_each_scalar([&](double& v) { g.push_back(v); });
    if (kind_ == OptimizerKind::kSgd) {
      for (std::size_t k = 0; k < theta.size(); ++k) *theta[k] -= lr_ * g[k];
      return;
    }
    ++t_;
    const double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(t_));
    for (std::size_t k = 0; k < theta.size(); ++k) {
      m_[k] = kAdamBeta1 * m_[k] + (1.0 - kAdamBeta1) * g[k];
      v_[k] = kAdamBeta2 * v_[k] + (1.0 - kAdamBeta2) * g[k] * g[k];
      *theta[k] -= lr_ * (m_[k] / c1) / (std::sqrt(v_[k] / c2) + kAdamEps);
    }
  }

 private:
  OptimizerKind kind_;
  double lr_;
  std::vector<double> m_, v_;
  std::uint64_t t_ = 0;
};

std::size_t count_scalars(Model& m) {
  std::size_t n = 0;
  m.for_each_scalar([&](double&) { ++n; });
  return n;
}

void check_data(const Model& model, const Dataset& data) {
  if (data.sequences.empty()) throw DimensionError("training data is empty");
  for (const Sequence& seq : data.sequences) {
    if (seq.x.rows() != model.input_dim()) {
      throw DimensionError("data has " + std::to_string(seq.x.rows()) +
                           " features, model expects " + std::to_string(model.input_dim()));
    }
    check_labels(sequence_labels(seq), seq.length(), model.num_classes());
  }
}

}  // namespace

std::string_view to_string(OptimizerKind kind) {
  return kind == OptimizerKind::kAdam ? "adam" : "sgd";
}

void TrainConfig::validate() const {
  if (layers.empty()) throw ConfigError("TrainConfig: at least one layer is required");
  for (const LayerConfig& l : layers) {
    if (l.hidden_dim == 0) throw ConfigError("TrainConfig: hidden_dim must be positive");
    if (l.backward_mode == BackwardMode::kHmm) {
      throw ConfigError(
          "TrainConfig: training supports backward modes none and kalman; hmm is an "
          "inference-only recursion (use kalman, which computes the same posteriors)");
    }
  }
  if (num_classes == 0) throw ConfigError("TrainConfig: num_classes must be positive");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("TrainConfig: learning_rate must be finite and non-negative");
  }
  if (epochs == 0) throw ConfigError("TrainConfig: epochs must be at least 1");
  if (batch_size == 0) throw ConfigError("TrainConfig: batch_size must be at least 1");
}

TrainConfig TrainConfig::resolved(std::size_t input_dim) const {
  validate();
  TrainConfig out = *this;
  std::size_t expected = input_dim;
  for (std::size_t l = 0; l < out.layers.size(); ++l) {
    LayerConfig& cfg = out.layers[l];
    if (cfg.input_dim == 0) cfg.input_dim = expected;
    if (cfg.input_dim != expected) {
      throw DimensionError("layer " + std::to_string(l) + " declares input_dim " +
                           std::to_string(cfg.input_dim) + " but receives " +
                           std::to_string(expected));
    }
    expected = cfg.output_dim();
  }
  return out;
}

std::vector<int> sequence_labels(const Sequence& seq) {
  if (!seq.labels.empty()) return seq.labels;
  if (seq.states.empty()) throw DimensionError("sequence has neither labels nor states");
  std::vector<int> labels(seq.states.rows());
  for (std::size_t t = 0; t < labels.size(); ++t) labels[t] = joint_class(seq.states.row(t));
  return labels;
}

double dataset_loss(const Model& model, const Dataset& data) {
  if (data.sequences.empty()) throw DimensionError("dataset_loss: empty dataset");
  double acc = 0.0;
  for (const Sequence& seq : data.sequences) {
    const Tensor2 lp = stack_forward(model.layers, model.head, seq.x);
    const auto labels = sequence_labels(seq);
    check_labels(labels, seq.length(), model.num_classes());
    acc += sequence_loss(lp, labels);
  }
  return acc / static_cast<double>(data.sequences.size());
}

Checkpoint train_from(Model model, const TrainConfig& cfg, const Dataset& data,
                      const EpochCallback& on_epoch) {
  cfg.validate();
  model.validate();
  check_data(model, data);

  Checkpoint ckpt;
  ckpt.config = cfg.resolved(model.input_dim());
  Rng rng(derive_seed(cfg.seed, 1));
  Optimizer opt(cfg.optimizer, cfg.learning_rate, count_scalars(model));

  std::vector<std::size_t> order(data.sequences.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
      Model grad = zeros_like(model);
      for (std::size_t k = start; k < stop; ++k) {
        const Sequence& seq = data.sequences[order[k]];
        accumulate_sequence(model, seq.x, sequence_labels(seq), grad);
      }
      const double scale = 1.0 / static_cast<double>(stop - start);
      grad.for_each_scalar([&](double& v) { v *= scale; });
      opt.step(model, grad);
    }
    const double loss = dataset_loss(model, data);
    if (!std::isfinite(loss)) {
      throw NonFiniteError("training diverged: loss is " + std::to_string(loss) +
                           " after epoch " + std::to_string(epoch) +
                           "; lower the learning rate");
    }
    ckpt.meta.loss_history.push_back(loss);
    ckpt.meta.epochs_completed = epoch;
    if (on_epoch) on_epoch(epoch, loss);
  }
  ckpt.model = std::move(model);
  return ckpt;
}

Checkpoint train_model(const TrainConfig& cfg, const Dataset& data,
                       const EpochCallback& on_epoch) {
  cfg.validate();
  if (data.sequences.empty()) throw DimensionError("training data is empty");
  const TrainConfig full = cfg.resolved(data.feature_dim());
  Rng init_rng(cfg.seed);
  Model model = Model::initialize(full.layers, full.num_classes, init_rng);
  return train_from(std::move(model), full, data, on_epoch);
}

Metrics evaluate(const Model& model, const Dataset& data) {
  model.validate();
  if (data.sequences.empty()) throw DimensionError("evaluate: empty dataset");
  const std::size_t C = model.num_classes();
  Metrics m;
  m.confusion.assign(C, std::vector<std::uint64_t>(C, 0));
  double loss = 0.0;
  for (const Sequence& seq : data.sequences) {
    if (seq.x.rows() != model.input_dim()) {
      throw DimensionError("evaluate: data has " + std::to_string(seq.x.rows()) +
                           " features, model expects " + std::to_string(model.input_dim()));
    }
    const Tensor2 lp = stack_forward(model.layers, model.head, seq.x);
    const auto labels = sequence_labels(seq);
    check_labels(labels, seq.length(), C);
    loss += sequence_loss(lp, labels);
    for (std::size_t t = 0; t < lp.rows(); ++t) {
      const auto row = lp.row(t);
      const auto pred = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) -
                                                 row.begin());
      ++m.confusion[labels[t]][pred];
      if (static_cast<int>(pred) == labels[t]) ++m.correct;
      ++m.frames;
    }
  }
  m.mean_cross_entropy = loss / static_cast<double>(data.sequences.size());
  m.accuracy = static_cast<double>(m.correct) / static_cast<double>(m.frames);
  return m;
}

}  // namespace ubru
