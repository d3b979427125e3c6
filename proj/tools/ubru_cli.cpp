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

// ubru: data generation, training, evaluation, smoothing and self-checks.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or I/O error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ubru/ubru.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerify = 1;
constexpr int kExitUsage = 2;

struct DatasetDeleter {
  void operator()(ubru_dataset* d) const { ubru_dataset_free(d); }
};
struct ModelDeleter {
  void operator()(ubru_model* m) const { ubru_model_free(m); }
};
using DatasetPtr = std::unique_ptr<ubru_dataset, DatasetDeleter>;
using ModelPtr = std::unique_ptr<ubru_model, ModelDeleter>;

// Thrown to unwind a subcommand after a library error has been reported.
struct Failure {
  int code;
};

void require(ubru_status status, const char* action) {
  if (status == UBRU_OK) return;
  std::fprintf(stderr, "ubru: %s failed: %s (%s)\n", action, ubru_last_error(),
               ubru_status_string(status));
  throw Failure{kExitUsage};
}

DatasetPtr load_data(const std::string& path) {
  ubru_dataset* raw = nullptr;
  require(ubru_dataset_load(path.c_str(), &raw), "loading dataset");
  return DatasetPtr(raw);
}

ModelPtr load_model(const std::string& path) {
  ubru_model* raw = nullptr;
  require(ubru_model_load(path.c_str(), &raw), "loading checkpoint");
  return ModelPtr(raw);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::fprintf(stderr, "ubru: cannot open %s\n", path.c_str());
    throw Failure{kExitUsage};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct GenDataFlags {
  std::string out;
  ubru_synthetic_options opts = ubru_synthetic_defaults();
};

int run_gen_data(const GenDataFlags& f) {
  ubru_dataset* raw = nullptr;
  require(ubru_dataset_generate(&f.opts, &raw), "generating data");
  DatasetPtr data(raw);
  require(ubru_dataset_save(data.get(), f.out.c_str()), "writing dataset");
  std::printf("wrote %zu sequences x %zu steps (features %zu, units %zu, classes %zu, "
              "seed %llu) to %s\n",
              f.opts.num_seqs, f.opts.seq_len, f.opts.features, f.opts.hidden,
              static_cast<std::size_t>(1) << f.opts.hidden,
              static_cast<unsigned long long>(f.opts.seed), f.out.c_str());
  return kExitOk;
}

struct TrainFlags {
  std::string data, config, out;
};

int run_train(const TrainFlags& f) {
  const DatasetPtr data = load_data(f.data);
  const std::string config = read_text(f.config);
  const ubru_epoch_fn on_epoch = [](size_t epoch, double loss, void*) {
    std::printf("epoch %zu loss %.10f\n", epoch, loss);
    std::fflush(stdout);
  };
  ubru_model* raw = nullptr;
  require(ubru_train(data.get(), config.c_str(), on_epoch, nullptr, &raw), "training");
  const ModelPtr model(raw);
  require(ubru_model_save(model.get(), f.out.c_str()), "writing checkpoint");
  std::printf("saved checkpoint to %s\n", f.out.c_str());
  return kExitOk;
}

struct EvalFlags {
  std::string data, ckpt;
};

int run_eval(const EvalFlags& f) {
  const DatasetPtr data = load_data(f.data);
  const ModelPtr model = load_model(f.ckpt);
  const std::size_t C = ubru_model_num_classes(model.get());
  std::vector<std::uint64_t> confusion(C * C);
  ubru_metrics m{};
  require(ubru_evaluate(model.get(), data.get(), &m, confusion.data(), confusion.size()),
          "evaluating");
  std::printf("frames %zu\ncorrect %zu\naccuracy %.6f\ncross_entropy %.6f\n", m.frames,
              m.correct, m.accuracy, m.mean_cross_entropy);
  std::printf("confusion (rows: true class, columns: predicted)\n");
  for (std::size_t r = 0; r < C; ++r) {
    std::printf("%4zu |", r);
    for (std::size_t c = 0; c < C; ++c)
      std::printf(" %6llu", static_cast<unsigned long long>(confusion[r * C + c]));
    std::printf("\n");
  }
  return kExitOk;
}

struct SmoothFlags {
  std::string data, ckpt, out;
  int mode = -1;
};

int run_smooth(const SmoothFlags& f) {
  const DatasetPtr data = load_data(f.data);
  const ModelPtr model = load_model(f.ckpt);
  require(ubru_smooth_dataset(model.get(), data.get(), f.mode, f.out.c_str()), "smoothing");
  std::printf("wrote posteriors for %zu sequences (width %zu) to %s\n",
              ubru_dataset_size(data.get()), ubru_model_output_dim(model.get()), f.out.c_str());
  return kExitOk;
}

struct CheckFlags {
  ubru_check_suite suite = UBRU_CHECK_ALL;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  ubru_fault fault = UBRU_FAULT_NONE;
};

int run_check(const CheckFlags& f) {
  const ubru_trial_fn on_trial = [](const ubru_trial_report* r, void*) {
    std::printf("%s %s #%zu seed %llu: %s\n", r->passed ? "PASS" : "FAIL", r->suite, r->index,
                static_cast<unsigned long long>(r->seed), r->detail);
  };
  ubru_check_summary s{};
  require(ubru_check_run(f.suite, f.trials, f.seed, f.fault, on_trial, nullptr, &s), "check");
  std::printf("summary: %zu trials, %zu failures, max error %.3e\n", s.trials, s.failures,
              s.max_error);
  if (s.failures == 0) return kExitOk;
  std::printf("FAILED: first offending seed %llu, max error %.3e\n",
              static_cast<unsigned long long>(s.first_failing_seed), s.max_error);
  return kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unit-wise Bayesian recurrent unit toolkit"};
  app.require_subcommand(1);
  const CLI::Validator positive(
      [](std::string& v) {
        const bool digits = !v.empty() && v.find_first_not_of("0123456789") == std::string::npos;
        if (digits && v.find_first_not_of('0') != std::string::npos) return std::string();
        return "must be a positive integer, got '" + v + "'";
      },
      "POSITIVE");

  GenDataFlags gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic dataset");
  gen_cmd->add_option("--out", gen.out, "Output JSON-lines file")->required();
  gen_cmd->add_option("--num-seq", gen.opts.num_seqs, "Number of sequences")
      ->required()
      ->check(positive);
  gen_cmd->add_option("--len", gen.opts.seq_len, "Steps per sequence")
      ->required()
      ->check(positive);
  gen_cmd->add_option("--features", gen.opts.features, "Observation dimension")
      ->required()
      ->check(positive);
  gen_cmd->add_option("--hidden", gen.opts.hidden, "Number of binary units")
      ->required()
      ->check(CLI::Range(1, 16));
  gen_cmd->add_option("--seed", gen.opts.seed, "Random seed")->required();
  gen_cmd->add_option("--tau11", gen.opts.tau11, "P(on -> on)")->capture_default_str();
  gen_cmd->add_option("--tau01", gen.opts.tau01, "P(off -> on)")->capture_default_str();
  gen_cmd->add_option("--rho0", gen.opts.rho0, "Initial on-probability")->capture_default_str();
  gen_cmd->add_option("--noise", gen.opts.noise, "Observation noise std")->capture_default_str();

  TrainFlags train;
  auto* train_cmd = app.add_subcommand("train", "Train a model");
  train_cmd->add_option("--data", train.data, "Training dataset")->required();
  train_cmd->add_option("--config", train.config, "JSON training config")->required();
  train_cmd->add_option("--out", train.out, "Checkpoint path")->required();

  EvalFlags eval;
  auto* eval_cmd = app.add_subcommand("eval", "Framewise accuracy and confusion matrix");
  eval_cmd->add_option("--data", eval.data, "Dataset")->required();
  eval_cmd->add_option("--ckpt", eval.ckpt, "Checkpoint")->required();

  SmoothFlags smooth;
  const std::map<std::string, int> modes{
      {"none", UBRU_BACKWARD_NONE}, {"kalman", UBRU_BACKWARD_KALMAN}, {"hmm", UBRU_BACKWARD_HMM}};
  auto* smooth_cmd = app.add_subcommand("smooth", "Write posteriors of the last recurrent layer");
  smooth_cmd->add_option("--data", smooth.data, "Dataset")->required();
  smooth_cmd->add_option("--ckpt", smooth.ckpt, "Checkpoint")->required();
  smooth_cmd->add_option("--out", smooth.out, "Output JSON-lines file")->required();
  smooth_cmd->add_option("--mode", smooth.mode, "Backward mode (default: as trained)")
      ->transform(CLI::CheckedTransformer(modes));

  CheckFlags check;
  const std::map<std::string, ubru_check_suite> suites{{"grads", UBRU_CHECK_GRADS},
                                                        {"equivalence", UBRU_CHECK_EQUIVALENCE},
                                                        {"oracle", UBRU_CHECK_ORACLE},
                                                        {"all", UBRU_CHECK_ALL}};
  const std::map<std::string, ubru_fault> faults{{"none", UBRU_FAULT_NONE},
                                                 {"tau01-sign", UBRU_FAULT_TAU01_SIGN}};
  auto* check_cmd = app.add_subcommand("check", "Run randomized verification suites");
  check_cmd->add_option("--suite", check.suite, "grads, equivalence, oracle or all")
      ->required()
      ->transform(CLI::CheckedTransformer(suites));
  check_cmd->add_option("--trials", check.trials, "Trials per suite")->capture_default_str();
  check_cmd->add_option("--seed", check.seed, "Master seed")->capture_default_str();
  check_cmd->add_option("--inject-fault", check.fault, "Planted defect for mutation testing")
      ->transform(CLI::CheckedTransformer(faults));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return run_gen_data(gen);
    if (*train_cmd) return run_train(train);
    if (*eval_cmd) return run_eval(eval);
    if (*smooth_cmd) return run_smooth(smooth);
    if (*check_cmd) return run_check(check);
  } catch (const Failure& f) {
    return f.code;
  }
  return kExitUsage;
}
