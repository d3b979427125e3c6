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

#include "ubru/ubru.h"

#include <algorithm>
#include <exception>
#include <new>
#include <string>

#include "ubru/check.hpp"
#include "ubru/error.hpp"
#include "ubru/grad.hpp"
#include "ubru/train.hpp"

struct ubru_params {
  ubru::UbruParams value;
};

struct ubru_dataset {
  ubru::Dataset value;
};

struct ubru_model {
  ubru::Checkpoint value;
};

namespace {

thread_local std::string g_last_error;

ubru_status fail(ubru_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
ubru_status guarded(Fn&& fn) {
  try {
    fn();
    return UBRU_OK;
  } catch (const ubru::DimensionError& e) {
    return fail(UBRU_ERR_DIMENSION, e.what());
  } catch (const ubru::DomainError& e) {
    return fail(UBRU_ERR_DOMAIN, e.what());
  } catch (const ubru::NonFiniteError& e) {
    return fail(UBRU_ERR_NON_FINITE, e.what());
  } catch (const ubru::ConfigError& e) {
    return fail(UBRU_ERR_CONFIG, e.what());
  } catch (const ubru::IoError& e) {
    return fail(UBRU_ERR_IO, e.what());
  } catch (const ubru::FormatError& e) {
    return fail(UBRU_ERR_MALFORMED, e.what());
  } catch (const ubru::VersionError& e) {
    return fail(UBRU_ERR_VERSION, e.what());
  } catch (const ubru::ShapeError& e) {
    return fail(UBRU_ERR_SHAPE, e.what());
  } catch (const ubru::LimitError& e) {
    return fail(UBRU_ERR_LIMIT, e.what());
  } catch (const ubru::DegenerateEvidenceError& e) {
    return fail(UBRU_ERR_DEGENERATE, e.what());
  } catch (const ubru::Error& e) {
    return fail(UBRU_ERR_INTERNAL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(UBRU_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(UBRU_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(UBRU_ERR_INTERNAL, "unknown error");
  }
}

template <typename... Ptrs>
bool any_null(Ptrs... ptrs) {
  return ((ptrs == nullptr) || ...);
}

ubru::BackwardMode to_mode(int mode) {
  switch (mode) {
    case UBRU_BACKWARD_NONE:
      return ubru::BackwardMode::kNone;
    case UBRU_BACKWARD_KALMAN:
      return ubru::BackwardMode::kKalman;
    case UBRU_BACKWARD_HMM:
      return ubru::BackwardMode::kHmm;
    default:
      throw ubru::ConfigError("invalid backward mode " + std::to_string(mode));
  }
}

std::vector<double>* select(ubru::UbruParams& p, ubru_param_kind kind) {
  switch (kind) {
    case UBRU_PARAM_B:
      return &p.b;
    case UBRU_PARAM_U_TAU11:
      return &p.u_tau11;
    case UBRU_PARAM_U_TAU01:
      return &p.u_tau01;
    case UBRU_PARAM_U_RHO0:
      return &p.u_rho0;
    default:
      return nullptr;
  }
}

std::span<double> param_span(ubru::UbruParams& p, ubru_param_kind kind) {
  if (kind == UBRU_PARAM_W) return p.W.data();
  if (auto* v = select(p, kind)) return *v;
  throw ubru::ConfigError("invalid parameter kind " + std::to_string(static_cast<int>(kind)));
}

ubru::Tensor2 input_matrix(const double* x, std::size_t F, std::size_t T) {
  return ubru::Tensor2(F, T, std::vector<double>(x, x + F * T));
}

}  // namespace

extern "C" {

const char* ubru_version(void) { return "1.0.0"; }

const char* ubru_last_error(void) { return g_last_error.c_str(); }

const char* ubru_status_string(ubru_status status) {
  switch (status) {
    case UBRU_OK:
      return "ok";
    case UBRU_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case UBRU_ERR_DIMENSION:
      return "dimension mismatch";
    case UBRU_ERR_DOMAIN:
      return "domain error";
    case UBRU_ERR_NON_FINITE:
      return "non-finite value";
    case UBRU_ERR_CONFIG:
      return "invalid configuration";
    case UBRU_ERR_IO:
      return "i/o error";
    case UBRU_ERR_MALFORMED:
      return "malformed file";
    case UBRU_ERR_VERSION:
      return "version mismatch";
    case UBRU_ERR_SHAPE:
      return "shape inconsistency";
    case UBRU_ERR_LIMIT:
      return "limit exceeded";
    case UBRU_ERR_DEGENERATE:
      return "degenerate evidence";
    case UBRU_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

ubru_status ubru_params_create(size_t input_dim, size_t hidden_dim, ubru_params** out) {
  if (out == nullptr) return fail(UBRU_ERR_INVALID_ARGUMENT, "out is null");
  if (input_dim == 0 || hidden_dim == 0) {
    return fail(UBRU_ERR_DIMENSION, "input_dim and hidden_dim must be positive");
  }
  return guarded([&] { *out = new ubru_params{ubru::UbruParams::zeros(input_dim, hidden_dim)}; });
}

void ubru_params_free(ubru_params* params) { delete params; }

ubru_status ubru_params_dims(const ubru_params* params, size_t* input_dim, size_t* hidden_dim) {
  if (any_null(params, input_dim, hidden_dim)) {
    return fail(UBRU_ERR_INVALID_ARGUMENT, "null argument");
  }
  *input_dim = params->value.input_dim();
  *hidden_dim = params->value.hidden_dim();
  return UBRU_OK;
}

ubru_status ubru_params_set(ubru_params* params, ubru_param_kind kind, const double* data,
                            size_t len) {
  if (any_null(params, data)) return fail(UBRU_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto dst = param_span(params->value, kind);
    if (dst.size() != len) {
      throw ubru::DimensionError("parameter has " + std::to_string(dst.size()) +
                                 " entries, got " + std::to_string(len));
    }
    if (!ubru::all_finite({data, len})) throw ubru::NonFiniteError("non-finite parameter value");
    std::copy_n(data, len, dst.begin());
  });
}

ubru_status ubru_params_get(const ubru_params* params, ubru_param_kind kind, double* data,
                            size_t len) {
  if (any_null(params, data)) return fail(UBRU_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto src = param_span(const_cast<ubru::UbruParams&>(params->value), kind);
    if (src.size() != len) {
      throw ubru::DimensionError("parameter has " + std::to_string(src.size()) +
                                 " entries, buffer holds " + std::to_string(len));
    }
    std::copy(src.begin(), src.end(), data);
  });
}

ubru_status ubru_smooth(const ubru_params* params, const double* x, size_t input_dim,
                        size_t steps, ubru_backward_mode mode, double* gamma_out) {
  if (any_null(params, x, gamma_out)) return fail(UBRU_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto gammas =
        ubru::smooth_sequence(params->value, input_matrix(x, input_dim, steps), to_mode(mode))
            .gammas;
    std::copy(gammas.data().begin(), gammas.data().end(), gamma_out);
  });
}

ubru_status ubru_backprop(const ubru_params* params, const double* x, size_t input_dim,
                          size_t steps, ubru_backward_mode mode, const double* d_gamma,
                          ubru_params* grads_out) {
  if (any_null(params, x, d_gamma, grads_out)) {
    return fail(UBRU_ERR_INVALID_ARGUMENT, "null argument");
  }
  return guarded([&] {
    const auto& p = params->value;
    if (grads_out->value.input_dim() != p.input_dim() ||
        grads_out->value.hidden_dim() != p.hidden_dim()) {
      throw ubru::DimensionError("grads_out must have the same dimensions as params");
    }
    const std::size_t H = p.hidden_dim();
    const ubru::Tensor2 dg(steps, H, std::vector<double>(d_gamma, d_gamma + steps * H));
    const auto g = ubru::backprop(p, input_matrix(x, input_dim, steps), to_mode(mode), dg);
    grads_out->value = ubru::UbruParams{g.dW, g.db, g.du_tau11, g.du_tau01, g.du_rho0};
  });
}

ubru_synthetic_options ubru_synthetic_defaults(void) {
  return ubru_synthetic_options{0, 0, 0, 0, 0, 0.9, 0.1, 0.5, 1.0};
}

ubru_status ubru_dataset_generate(const ubru_synthetic_options* opts, ubru_dataset** out) {
  if (any_null(opts, out)) return fail(UBRU_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const ubru::ChainSpec chain{opts->rho0, opts->tau11, opts->tau01};
    chain.validate();
    const auto spec = ubru::SyntheticSpec::uniform(opts->hidden, opts->features, chain,
                                                   opts->noise, opts->seq_len, opts->num_seqs,
                                                   opts->seed);
    *out = new ubru_dataset{ubru::generate(spec)};
  });
}

ubru_status ubru_dataset_load(const char* path, ubru_dataset** out) {
  if (any_null(path, out)) return fail(UBRU_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new ubru_dataset{ubru::load_dataset(path)}; });
}

ubru_status ubru_dataset_save(const ubru_dataset* data, const char* path) {
  if (any_null(data, path)) return fail(UBRU_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { ubru::save_dataset(data->value, path); });
}

void ubru_dataset_free(ubru_dataset* data) { delete data; }

size_t ubru_dataset_size(const ubru_dataset* data) {
  return data ? data->value.sequences.size() : 0;
}

size_t ubru_dataset_feature_dim(const ubru_dataset* data) {
  return data ? data->value.feature_dim() : 0;
}

size_t ubru_dataset_num_frames(const ubru_dataset* data) {
  return data ? data->value.num_frames() : 0;
}

ubru_status ubru_train(const ubru_dataset* data, const char* config_json, ubru_epoch_fn on_epoch,
                       void* user, ubru_model** out) {
  if (any_null(data, config_json, out)) return fail(UBRU_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const ubru::TrainConfig cfg = ubru::parse_train_config(config_json);
    ubru::EpochCallback cb;
    if (on_epoch) cb = [&](std::size_t epoch, double loss) { on_epoch(epoch, loss, user); };
    *out = new ubru_model{ubru::train_model(cfg, data->value, cb)};
  });
}

ubru_status ubru_model_load(const char* path, ubru_model** out) {
  if (any_null(path, out)) return fail(UBRU_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = new ubru_model{ubru::load_checkpoint(path)}; });
}

ubru_status ubru_model_save(const ubru_model* model, const char* path) {
  if (any_null(model, path)) return fail(UBRU_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { ubru::save_checkpoint(model->value, path); });
}

void ubru_model_free(ubru_model* model) { delete model; }

size_t ubru_model_num_classes(const ubru_model* model) {
  return model ? model->value.model.num_classes() : 0;
}

size_t ubru_model_output_dim(const ubru_model* model) {
  return model ? model->value.model.layers.back().config.output_dim() : 0;
}

double ubru_model_final_loss(const ubru_model* model) {
  if (!model || model->value.meta.loss_history.empty()) return 0.0;
  return model->value.meta.loss_history.back();
}

ubru_status ubru_evaluate(const ubru_model* model, const ubru_dataset* data, ubru_metrics* out,
                          uint64_t* confusion, size_t confusion_len) {
  if (any_null(model, data, out)) return fail(UBRU_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const ubru::Metrics m = ubru::evaluate(model->value.model, data->value);
    const std::size_t C = m.confusion.size();
    if (confusion != nullptr) {
      if (confusion_len < C * C) {
        throw ubru::DimensionError("confusion buffer needs " + std::to_string(C * C) +
                                   " entries");
      }
      for (std::size_t r = 0; r < C; ++r)
        std::copy(m.confusion[r].begin(), m.confusion[r].end(), confusion + r * C);
    }
    *out = ubru_metrics{m.accuracy, m.mean_cross_entropy, m.frames, m.correct};
  });
}

ubru_status ubru_smooth_dataset(const ubru_model* model, const ubru_dataset* data, int mode,
                                const char* out_path) {
  if (any_null(model, data, out_path)) return fail(UBRU_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::optional<ubru::BackwardMode> override;
    if (mode >= 0) override = to_mode(mode);
    ubru::save_smoothed(model->value.model, data->value, out_path, override);
  });
}

ubru_status ubru_check_run(ubru_check_suite suite, size_t trials, uint64_t seed, ubru_fault fault,
                           ubru_trial_fn on_trial, void* user, ubru_check_summary* out) {
  if (out == nullptr) return fail(UBRU_ERR_INVALID_ARGUMENT, "out is null");
  return guarded([&] {
    ubru::CheckSuite s;
    switch (suite) {
      case UBRU_CHECK_GRADS:
        s = ubru::CheckSuite::kGrads;
        break;
      case UBRU_CHECK_EQUIVALENCE:
        s = ubru::CheckSuite::kEquivalence;
        break;
      case UBRU_CHECK_ORACLE:
        s = ubru::CheckSuite::kOracle;
        break;
      case UBRU_CHECK_ALL:
        s = ubru::CheckSuite::kAll;
        break;
      default:
        throw ubru::ConfigError("invalid check suite");
    }
    if (fault != UBRU_FAULT_NONE && fault != UBRU_FAULT_TAU01_SIGN) {
      throw ubru::ConfigError("invalid fault selector");
    }
    const auto f =
        fault == UBRU_FAULT_TAU01_SIGN ? ubru::InjectedFault::kTau01Sign : ubru::InjectedFault::kNone;
    ubru::TrialCallback cb;
    if (on_trial) {
      cb = [&](const ubru::TrialOutcome& t) {
        const std::string name(ubru::to_string(t.suite));
        const ubru_trial_report report{name.c_str(), t.index,     t.seed,
                                       t.passed ? 1 : 0, t.max_error, t.detail.c_str()};
        on_trial(&report, user);
      };
    }
    const ubru::CheckSummary sum = ubru::run_check(s, trials, seed, f, cb);
    *out = ubru_check_summary{sum.trials, sum.failures, sum.max_error, sum.first_failing_seed};
  });
}

}  // extern "C"
