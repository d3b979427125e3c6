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
#include "ubru/error.hpp"
#include "ubru/oracle.hpp"
#include "ubru/train.hpp"

using namespace ubru;

namespace {

TrainConfig basic_config(std::size_t H, std::size_t C, BackwardMode mode) {
  TrainConfig cfg;
  cfg.layers = {LayerConfig{0, H, false, mode}};
  cfg.num_classes = C;
  cfg.learning_rate = 0.05;
  cfg.epochs = 3;
  cfg.batch_size = 4;
  cfg.seed = 5;
  cfg.optimizer = OptimizerKind::kAdam;
  return cfg;
}

Dataset small_data(std::uint64_t seed, std::size_t H = 2, std::size_t F = 4) {
  return generate(SyntheticSpec::uniform(H, F, {0.5, 0.9, 0.1}, 1.0, 15, 12, seed));
}

// Head whose argmax is the joint class of the units thresholded at 1/2.
Head threshold_head(std::size_t H) {
  const std::size_t C = std::size_t{1} << H;
  Head head{Tensor2(C, H), Vector(C, 0.0)};
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t i = 0; i < H; ++i) {
      const double sign = (c >> i) & 1 ? 1.0 : -1.0;
      head.W(c, i) = sign;
      head.b[c] -= 0.5 * sign;
    }
  return head;
}

// Framewise accuracy of the exact smoother, using the Gaussian likelihoods
// and the forward-backward oracle.
double exact_smoother_accuracy(const SyntheticSpec& spec, const Dataset& data) {
  std::size_t correct = 0, frames = 0;
  for (const Sequence& seq : data.sequences) {
    const std::size_t T = seq.length();
    std::vector<int> pred(T, 0);
    for (std::size_t i = 0; i < spec.num_units; ++i) {
      const GaussianEmissionModel g = unit_emission_model(spec, i);
      EmissionLikelihoods emis{Vector(T, 1.0), Vector(T)};
      for (std::size_t t = 0; t < T; ++t) {
        Vector x(seq.x.rows());
        for (std::size_t f = 0; f < x.size(); ++f) x[f] = seq.x(f, t);
        emis.b2[t] = std::exp(g.log_likelihood_ratio(x));
      }
      const Vector post = scaled_forward_backward(spec.chains[i], emis).smoothed;
      for (std::size_t t = 0; t < T; ++t)
        if (post[t] > 0.5) pred[t] |= 1 << i;
    }
    for (std::size_t t = 0; t < T; ++t) correct += pred[t] == seq.labels[t];
    frames += T;
  }
  return static_cast<double>(correct) / static_cast<double>(frames);
}

}  // namespace

TEST_CASE("a zero learning rate leaves the model untouched") {
  const Dataset d = small_data(1);
  for (OptimizerKind opt : {OptimizerKind::kSgd, OptimizerKind::kAdam}) {
    TrainConfig cfg = basic_config(2, 4, BackwardMode::kKalman);
    cfg.learning_rate = 0.0;
    cfg.optimizer = opt;
    cfg.epochs = 4;
    const Checkpoint ck = train_model(cfg, d);
    Rng rng(cfg.seed);
    const Model init = Model::initialize(ck.config.layers, 4, rng);
    CHECK(ck.model == init);
    for (double l : ck.meta.loss_history) CHECK(l == ck.meta.loss_history.front());
  }
}

TEST_CASE("a separable single-unit task is learned") {
  const Dataset d = generate(SyntheticSpec::uniform(1, 1, {0.5, 0.9, 0.1}, 0.3, 100, 1, 11));
  TrainConfig cfg = basic_config(1, 2, BackwardMode::kKalman);
  cfg.optimizer = OptimizerKind::kSgd;
  cfg.learning_rate = 0.5;
  cfg.epochs = 200;
  cfg.batch_size = 1;
  cfg.seed = 3;
  const Checkpoint ck = train_model(cfg, d);
  // Reference run: 0.0296 nats after 200 epochs.
  CHECK(ck.meta.loss_history.back() < 0.1);
  CHECK(ck.meta.loss_history.back() < 0.05);
  CHECK(ck.meta.loss_history.back() < ck.meta.loss_history.front());
}

TEST_CASE("evaluation reproduces the final training loss") {
  const Dataset d = small_data(2);
  const Checkpoint ck = train_model(basic_config(2, 4, BackwardMode::kKalman), d);
  const Metrics m = evaluate(ck.model, d);
  CHECK(std::abs(m.mean_cross_entropy - ck.meta.loss_history.back()) <= 1e-12);
  CHECK(m.frames == d.num_frames());
  std::uint64_t total = 0, diag = 0;
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) {
      total += m.confusion[r][c];
      if (r == c) diag += m.confusion[r][c];
    }
  CHECK(total == m.frames);
  CHECK(diag == m.correct);
}

TEST_CASE("an untrained model on labels it cannot see is at chance") {
  // Zero mixing: observations carry no information about the balanced labels.
  SyntheticSpec spec = SyntheticSpec::uniform(1, 2, {0.5, 0.5, 0.5}, 1.0, 100, 100, 21);
  spec.mixing = Tensor2(2, 1);
  const Dataset d = generate(spec);
  Rng rng(22);
  const LayerConfig cfg{2, 3, false, BackwardMode::kKalman};
  const Model m = Model::initialize(std::span(&cfg, 1), 2, rng);
  const Metrics metrics = evaluate(m, d);
  const double n = static_cast<double>(metrics.frames);
  CHECK(std::abs(metrics.accuracy - 0.5) < 3.0 * std::sqrt(0.25 / n));
}

TEST_CASE("ground-truth parameters reach the exact smoother accuracy") {
  const SyntheticSpec spec = SyntheticSpec::uniform(3, 6, {0.5, 0.9, 0.1}, 1.2, 50, 60, 31);
  const Dataset d = generate(spec);
  Model model;
  model.layers.push_back(StackLayer{LayerConfig{6, 3, false, BackwardMode::kKalman},
                                    ground_truth_params(spec), std::nullopt});
  model.head = threshold_head(3);
  const double oracle = exact_smoother_accuracy(spec, d);
  const double layer = evaluate(model, d).accuracy;
  CHECK(std::abs(layer - oracle) <= 0.005);
  CHECK(oracle > 0.6);
}

TEST_CASE("training gradients match central differences of the dataset loss") {
  // One SGD step on a single sequence moves every scalar by -lr * gradient.
  Rng rng(41);
  const Dataset full = small_data(41, 2, 3);
  const Dataset one{{full.sequences[0]}};
  const LayerConfig cfgs[] = {{3, 2, true, BackwardMode::kKalman},
                              {4, 3, false, BackwardMode::kNone}};
  Model model = Model::initialize(cfgs, 4, rng);
  model.for_each_scalar([&](double& v) { v += rng.uniform(-0.3, 0.3); });

  TrainConfig cfg;
  cfg.layers.assign(std::begin(cfgs), std::end(cfgs));
  cfg.num_classes = 4;
  cfg.learning_rate = 1e-3;
  cfg.epochs = 1;
  cfg.batch_size = 1;
  cfg.optimizer = OptimizerKind::kSgd;
  const Checkpoint ck = train_from(model, cfg, one);

  std::vector<double*> before, after;
  model.for_each_scalar([&](double& v) { before.push_back(&v); });
  Model moved = ck.model;
  moved.for_each_scalar([&](double& v) { after.push_back(&v); });
  REQUIRE(before.size() == after.size());

  const double h = 1e-6;
  std::size_t checked = 0;
  for (std::size_t k = 0; k < before.size(); ++k) {
    const double analytic = (*before[k] - *after[k]) / cfg.learning_rate;
    const double saved = *before[k];
    *before[k] = saved + h;
    const double up = dataset_loss(model, one);
    *before[k] = saved - h;
    const double down = dataset_loss(model, one);
    *before[k] = saved;
    const double numeric = (up - down) / (2.0 * h);
    INFO("scalar " << k << " analytic " << analytic << " numeric " << numeric);
    CHECK(std::abs(analytic - numeric) <= 1e-6 + 1e-4 * std::abs(numeric));
    ++checked;
  }
  CHECK(checked > 50);
}

TEST_CASE("training is bitwise deterministic") {
  const Dataset d = small_data(3);
  TrainConfig cfg = basic_config(2, 4, BackwardMode::kKalman);
  cfg.layers.front().bidirectional = true;
  const Checkpoint a = train_model(cfg, d), b = train_model(cfg, d);
  CHECK(a == b);
  CHECK(checkpoint_to_json(a) == checkpoint_to_json(b));
  cfg.seed = 6;
  CHECK_FALSE(train_model(cfg, d) == a);
}

TEST_CASE("epoch callback sees every epoch") {
  const Dataset d = small_data(4);
  std::vector<double> seen;
  const Checkpoint ck = train_model(basic_config(2, 4, BackwardMode::kNone), d,
                                    [&](std::size_t epoch, double loss) {
                                      CHECK(epoch == seen.size() + 1);
                                      seen.push_back(loss);
                                    });
  CHECK(seen == ck.meta.loss_history);
  CHECK(ck.meta.epochs_completed == 3);
}

TEST_CASE("invalid training setups are rejected") {
  const Dataset d = small_data(5);
  TrainConfig cfg = basic_config(2, 4, BackwardMode::kHmm);
  CHECK_THROWS_AS(train_model(cfg, d), ConfigError);
  cfg = basic_config(2, 4, BackwardMode::kKalman);
  cfg.learning_rate = -1.0;
  CHECK_THROWS_AS(train_model(cfg, d), ConfigError);
  cfg = basic_config(2, 4, BackwardMode::kKalman);
  cfg.epochs = 0;
  CHECK_THROWS_AS(train_model(cfg, d), ConfigError);
  cfg = basic_config(2, 2, BackwardMode::kKalman);
  CHECK_THROWS_AS(train_model(cfg, d), DimensionError);
  cfg = basic_config(2, 4, BackwardMode::kKalman);
  cfg.layers.front().input_dim = 7;
  CHECK_THROWS_AS(train_model(cfg, d), DimensionError);
  CHECK_THROWS_AS(train_model(basic_config(2, 4, BackwardMode::kKalman), Dataset{}),
                  DimensionError);
}

TEST_CASE("a diverging run reports a non-finite loss") {
  const Dataset d = small_data(6);
  TrainConfig cfg = basic_config(2, 4, BackwardMode::kKalman);
  cfg.optimizer = OptimizerKind::kSgd;
  cfg.learning_rate = 1e300;
  CHECK_THROWS_AS(train_model(cfg, d), NonFiniteError);
}

TEST_CASE("training config JSON") {
  const TrainConfig cfg = parse_train_config(
      R"({"layers": [{"hidden_dim": 3, "bidirectional": true}, {"hidden_dim": 2, "backward_mode": "none"}],
          "num_classes": 4, "learning_rate": 0.1, "epochs": 7, "batch_size": 2, "seed": 9,
          "optimizer": "adam"})");
  CHECK(cfg.layers.size() == 2);
  CHECK(cfg.layers[0].bidirectional);
  CHECK(cfg.layers[0].backward_mode == BackwardMode::kKalman);
  CHECK(cfg.layers[1].backward_mode == BackwardMode::kNone);
  CHECK(cfg.optimizer == OptimizerKind::kAdam);
  CHECK(parse_train_config(train_config_to_json(cfg)) == cfg);
  CHECK(cfg.resolved(5).layers[1].input_dim == 6);

  CHECK(parse_train_config(R"({"layers": [{"hidden_dim": 1}], "num_classes": 2})").optimizer ==
        OptimizerKind::kSgd);
  CHECK_THROWS_AS(parse_train_config("{"), FormatError);
  CHECK_THROWS_AS(parse_train_config(R"({"num_classes": 2})"), FormatError);
  CHECK_THROWS_AS(parse_train_config(R"({"layers": [{"hidden_dim": 1}], "num_classes": 2,
                                         "optimizer": "adadelta"})"),
                  FormatError);
  CHECK_THROWS_AS(parse_train_config(R"({"layers": [{"hidden_dim": "x"}], "num_classes": 2})"),
                  FormatError);
  CHECK_THROWS_AS(parse_train_config(R"({"layers": [{"hidden_dim": 1, "backward_mode": "hmm"}],
                                         "num_classes": 2})"),
                  ConfigError);
}
