// Copyright 2026 The SRKD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "srkd/srkd.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "json.hpp"
#include "srkd/checkpoint.hpp"
#include "srkd/error.hpp"
#include "srkd/harness.hpp"
#include "srkd/json_codec.hpp"
#include "srkd/snn.hpp"
#include "srkd/version.hpp"

using json = nlohmann::json;

struct srkd_dataset {
  srkd::DatasetHandle data;
};

struct srkd_model {
  srkd::Checkpoint ckpt;
};

struct srkd_report {
  srkd::TrainReport report;
};

namespace {

thread_local std::string g_last_error;

srkd_status status_of(srkd::ErrorKind kind) {
  using srkd::ErrorKind;
  switch (kind) {
    case ErrorKind::kDimension: return SRKD_ERR_DIMENSION;
    case ErrorKind::kParameter: return SRKD_ERR_PARAMETER;
    case ErrorKind::kIndex: return SRKD_ERR_INDEX;
    case ErrorKind::kNumeric: return SRKD_ERR_NUMERIC;
    case ErrorKind::kDivergence: return SRKD_ERR_DIVERGENCE;
    case ErrorKind::kState: return SRKD_ERR_STATE;
    case ErrorKind::kConfig: return SRKD_ERR_CONFIG;
    case ErrorKind::kUsage: return SRKD_ERR_USAGE;
    case ErrorKind::kValidation: return SRKD_ERR_VALIDATION;
    case ErrorKind::kFormat: return SRKD_ERR_FORMAT;
    case ErrorKind::kIo: return SRKD_ERR_IO;
  }
  return SRKD_ERR_INTERNAL;
}

template <typename F>
srkd_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return SRKD_OK;
  } catch (const srkd::Error& e) {
    g_last_error = std::string(srkd::to_string(e.kind())) + ": " + e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SRKD_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = std::string("internal error: ") + e.what();
    return SRKD_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "internal error";
    return SRKD_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw srkd::Error(srkd::ErrorKind::kUsage, std::string(what) + " is NULL");
}

json parse_options(const char* text) {
  if (!text || !*text) return json::object();
  try {
    json j = json::parse(text);
    if (!j.is_object()) srkd::fail(srkd::ErrorKind::kUsage, "options must be a JSON object");
    return j;
  } catch (const json::exception& e) {
    srkd::fail(srkd::ErrorKind::kUsage, std::string("options are not valid JSON: ") + e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const srkd::DatasetSplit& split_of(const srkd::DatasetHandle& d, srkd_split split) {
  if (split == SRKD_SPLIT_TRAIN) return d.train;
  if (split == SRKD_SPLIT_TEST) return d.test;
  srkd::fail(srkd::ErrorKind::kUsage, "unknown split");
}

}  // namespace

extern "C" {

SRKD_API const char* srkd_version(void) { return srkd::kVersionString; }

SRKD_API const char* srkd_status_name(srkd_status status) {
  switch (status) {
    case SRKD_OK: return "ok";
    case SRKD_ERR_DIMENSION: return "dimension error";
    case SRKD_ERR_PARAMETER: return "parameter error";
    case SRKD_ERR_INDEX: return "index error";
    case SRKD_ERR_NUMERIC: return "numeric error";
    case SRKD_ERR_DIVERGENCE: return "divergence error";
    case SRKD_ERR_STATE: return "state error";
    case SRKD_ERR_CONFIG: return "configuration error";
    case SRKD_ERR_USAGE: return "usage error";
    case SRKD_ERR_VALIDATION: return "validation error";
    case SRKD_ERR_FORMAT: return "format error";
    case SRKD_ERR_IO: return "I/O error";
    case SRKD_ERR_NULL_ARGUMENT: return "null argument";
    case SRKD_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

SRKD_API int srkd_exit_code(srkd_status status) {
  switch (status) {
    case SRKD_OK: return 0;
    case SRKD_ERR_FORMAT:
    case SRKD_ERR_IO: return 2;
    case SRKD_ERR_NUMERIC:
    case SRKD_ERR_DIVERGENCE: return 3;
    default: return 1;
  }
}

SRKD_API const char* srkd_last_error(void) { return g_last_error.c_str(); }

SRKD_API void srkd_string_free(char* s) { std::free(s); }

SRKD_API srkd_status srkd_dataset_generate(const char* options_json, srkd_dataset** out) {
  if (!out) return SRKD_ERR_NULL_ARGUMENT;
  *out = nullptr;
  return guarded([&] {
    const srkd::ExperimentConfig cfg = srkd::ExperimentConfig::from_json(parse_options(options_json));
    cfg.validate();
    auto d = std::make_unique<srkd_dataset>();
    d->data = srkd::generate_dataset(cfg, cfg.has("seed") ? cfg.seed : cfg.data_seed);
    *out = d.release();
  });
}

SRKD_API srkd_status srkd_dataset_load(const char* path, srkd_dataset** out) {
  if (!out || !path) return SRKD_ERR_NULL_ARGUMENT;
  *out = nullptr;
  return guarded([&] {
    auto d = std::make_unique<srkd_dataset>();
    d->data = srkd::load_dataset(path);
    *out = d.release();
  });
}

SRKD_API srkd_status srkd_dataset_save(const srkd_dataset* data, const char* path) {
  if (!data || !path) return SRKD_ERR_NULL_ARGUMENT;
  return guarded([&] { srkd::save_dataset(data->data, path); });
}

SRKD_API srkd_status srkd_dataset_info(const srkd_dataset* data, char** out_json) {
  if (!data || !out_json) return SRKD_ERR_NULL_ARGUMENT;
  *out_json = nullptr;
  return guarded([&] {
    const auto& d = data->data;
    const json j = {{"classes", d.num_classes},
                    {"encoding", srkd::to_string(d.encoding)},
                    {"sample_shape", d.sample_shape},
                    {"train", d.train.size()},
                    {"test", d.test.size()},
                    {"natural_timesteps", d.natural_timesteps()},
                    {"source", json::parse(d.source)}};
    *out_json = dup_string(j.dump());
  });
}

SRKD_API srkd_status srkd_dataset_size(const srkd_dataset* data, srkd_split split, size_t* out) {
  if (!data || !out) return SRKD_ERR_NULL_ARGUMENT;
  return guarded([&] { *out = split_of(data->data, split).size(); });
}

SRKD_API void srkd_dataset_free(srkd_dataset* data) { delete data; }

SRKD_API srkd_status srkd_model_create(const srkd_dataset* data, const char* options_json, uint64_t seed,
                                       srkd_model** out) {
  if (!data || !out) return SRKD_ERR_NULL_ARGUMENT;
  *out = nullptr;
  return guarded([&] {
    const srkd::ExperimentConfig cfg = srkd::ExperimentConfig::from_json(parse_options(options_json));
    cfg.validate();
    auto m = std::make_unique<srkd_model>();
    m->ckpt.spec = srkd::build_network(cfg, data->data);
    m->ckpt.state = srkd::initial_state(m->ckpt.spec, seed);
    m->ckpt.seed = seed;
    m->ckpt.meta = json{{"preset", srkd::to_string(cfg.preset)}}.dump();
    *out = m.release();
  });
}

SRKD_API srkd_status srkd_model_load(const char* path, srkd_model** out) {
  if (!out || !path) return SRKD_ERR_NULL_ARGUMENT;
  *out = nullptr;
  return guarded([&] {
    auto m = std::make_unique<srkd_model>();
    m->ckpt = srkd::load_checkpoint(path);
    *out = m.release();
  });
}

SRKD_API srkd_status srkd_model_save(const srkd_model* model, const char* path) {
  if (!model || !path) return SRKD_ERR_NULL_ARGUMENT;
  return guarded([&] { srkd::save_checkpoint(model->ckpt, path); });
}

SRKD_API srkd_status srkd_model_info(const srkd_model* model, char** out_json) {
  if (!model || !out_json) return SRKD_ERR_NULL_ARGUMENT;
  *out_json = nullptr;
  return guarded([&] {
    const auto& c = model->ckpt;
    json j = {{"network", srkd::to_json(c.spec)},
              {"parameters", c.state.num_parameters()},
              {"classes", c.spec.num_classes()},
              {"timesteps", c.spec.timesteps},
              {"seed", c.seed},
              {"epoch", c.epoch},
              {"meta", json::parse(c.meta)}};
    if (c.mask) {
      const auto sp = srkd::sparsity_report(*c.mask, c.state);
      j["pruning"] = {{"ratio", c.mask->ratio},
                      {"scope", srkd::to_string(c.mask->scope)},
                      {"ranking", srkd::to_string(c.mask->ranking)},
                      {"sparsity", sp.overall},
                      {"weights", sp.total}};
    }
    *out_json = dup_string(j.dump());
  });
}

SRKD_API srkd_status srkd_model_clone(const srkd_model* model, srkd_model** out) {
  if (!model || !out) return SRKD_ERR_NULL_ARGUMENT;
  *out = nullptr;
  return guarded([&] { *out = new srkd_model(*model); });
}

SRKD_API srkd_status srkd_model_forward(const srkd_model* model, const srkd_dataset* data, srkd_split split,
                                        size_t index, double* logits, size_t num_classes) {
  if (!model || !data || !logits) return SRKD_ERR_NULL_ARGUMENT;
  return guarded([&] {
    const auto& s = split_of(data->data, split);
    if (index >= s.size()) srkd::fail(srkd::ErrorKind::kIndex, "sample index out of range");
    if (num_classes != model->ckpt.spec.num_classes()) {
      srkd::fail(srkd::ErrorKind::kDimension, "logit buffer size does not match the class count");
    }
    const srkd::Tensor out = srkd::forward_temporal(
        model->ckpt.state, model->ckpt.spec, data->data.network_input(s, index, model->ckpt.spec.timesteps));
    std::copy(out.data().begin(), out.data().end(), logits);
  });
}

SRKD_API srkd_status srkd_model_evaluate(const srkd_model* model, const srkd_dataset* data, srkd_split split,
                                         size_t threads, double* accuracy_percent) {
  if (!model || !data || !accuracy_percent) return SRKD_ERR_NULL_ARGUMENT;
  return guarded([&] {
    *accuracy_percent = srkd::evaluate(model->ckpt.state, model->ckpt.spec, data->data, split_of(data->data, split),
                                       threads ? threads : 1);
  });
}

SRKD_API srkd_status srkd_model_prune(srkd_model* model, double ratio, const char* scope, const char* ranking,
                                      double* sparsity) {
  if (!model) return SRKD_ERR_NULL_ARGUMENT;
  return guarded([&] {
    auto& c = model->ckpt;
    const srkd::PruneScope sc = srkd::resolve_prune_scope(scope ? scope : "auto", c.spec);
    const srkd::PruneRanking rk = srkd::prune_ranking_from_string(ranking ? ranking : "global");
    const srkd::PruneMask mask = srkd::compute_mask(c.spec, c.state, ratio, sc, rk);
    srkd::attach_mask(c.state, mask);
    c.mask = mask;
    if (sparsity) *sparsity = srkd::sparsity_report(mask, c.state).overall;
  });
}

SRKD_API void srkd_model_free(srkd_model* model) { delete model; }

SRKD_API srkd_status srkd_train(srkd_model* model, const srkd_dataset* data, const char* options_json,
                                srkd_report** out) {
  if (!model || !data || !out) return SRKD_ERR_NULL_ARGUMENT;
  *out = nullptr;
  return guarded([&] {
    const srkd::ExperimentConfig cfg = srkd::ExperimentConfig::from_json(parse_options(options_json));
    cfg.validate();
    srkd::TrainOptions opt{cfg.lr, cfg.momentum, cfg.batch_size, cfg.epochs, cfg.seed, cfg.threads};
    auto r = std::make_unique<srkd_report>();
    r->report = srkd::train_baseline(model->ckpt.state, model->ckpt.spec, data->data, opt);
    r->report.run_id = cfg.name.empty() ? "baseline" : cfg.name;
    model->ckpt.epoch += cfg.epochs;
    *out = r.release();
  });
}

SRKD_API srkd_status srkd_distill(srkd_model* student, const srkd_model* teacher, const srkd_dataset* data,
                                  const char* options_json, srkd_report** out) {
  if (!student || !data || !out) return SRKD_ERR_NULL_ARGUMENT;
  *out = nullptr;
  return guarded([&] {
    const srkd::ExperimentConfig cfg = srkd::ExperimentConfig::from_json(parse_options(options_json));
    cfg.validate();
    srkd::TrainOptions opt{cfg.lr, cfg.momentum, cfg.batch_size, cfg.epochs, cfg.seed, cfg.threads};
    srkd::Teacher t = srkd::VirtualTeacher{data->data.num_classes, cfg.teacher_alpha};
    if (cfg.kd.mode == srkd::KDMode::kSparse) {
      require(teacher, "teacher model");
      t = srkd::NetworkTeacher{&teacher->ckpt.spec, &teacher->ckpt.state,
                               teacher->ckpt.mask ? teacher->ckpt.mask->ratio : 0.0};
    }
    auto r = std::make_unique<srkd_report>();
    r->report = srkd::distill_train(student->ckpt.state, student->ckpt.spec, t, data->data, cfg.kd, opt);
    r->report.run_id = cfg.name.empty() ? srkd::to_string(cfg.kd.mode) : cfg.name;
    student->ckpt.epoch += cfg.epochs;
    *out = r.release();
  });
}

SRKD_API srkd_status srkd_report_json(const srkd_report* report, char** out) {
  if (!report || !out) return SRKD_ERR_NULL_ARGUMENT;
  *out = nullptr;
  return guarded([&] { *out = dup_string(report->report.to_json()); });
}

SRKD_API srkd_status srkd_report_csv(const srkd_report* report, char** out) {
  if (!report || !out) return SRKD_ERR_NULL_ARGUMENT;
  *out = nullptr;
  return guarded([&] { *out = dup_string(report->report.to_csv()); });
}

SRKD_API srkd_status srkd_report_final_accuracy(const srkd_report* report, double* accuracy_percent) {
  if (!report || !accuracy_percent) return SRKD_ERR_NULL_ARGUMENT;
  return guarded([&] { *accuracy_percent = report->report.final_test_accuracy(); });
}

SRKD_API void srkd_report_free(srkd_report* report) { delete report; }

SRKD_API srkd_status srkd_run_command(const char* command, const char* options_json, char** out_json) {
  if (!command || !out_json) return SRKD_ERR_NULL_ARGUMENT;
  *out_json = nullptr;
  return guarded([&] { *out_json = dup_string(srkd::run_command(command, parse_options(options_json)).dump()); });
}

SRKD_API const char* srkd_command_names(void) {
  static const std::string names = [] {
    std::string s;
    for (const auto& n : srkd::command_names()) {
      s += n;
      s.push_back('\0');
    }
    return s;
  }();
  return names.c_str();
}

}  // extern "C"
