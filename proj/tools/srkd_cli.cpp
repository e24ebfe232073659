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

// srkd command-line driver. Every subcommand turns its flags into a flat
// JSON option object (config file first, explicit flags on top) and hands
// it to the library through the C interface.

#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "srkd/srkd.h"

using json = nlohmann::json;

namespace {

enum class Kind { kText, kCount, kUInt, kReal, kFlag, kRealList, kUIntList };

struct Flag {
  std::string key;
  Kind kind;
  CLI::Option* option = nullptr;
  std::string value;
  bool set = false;
};

struct UsageError {
  std::string message;
};

class FlagTable {
 public:
  void add(CLI::App* app, const std::string& names, const std::string& key, Kind kind, const std::string& help) {
    flags_.push_back(std::make_unique<Flag>(Flag{key, kind, nullptr, {}, false}));
    Flag& f = *flags_.back();
    if (kind == Kind::kFlag) {
      f.option = app->add_flag(names, f.set, help);
    } else {
      f.option = app->add_option(names, f.value, help);
      if (kind == Kind::kCount || kind == Kind::kUInt) f.option->check(CLI::NonNegativeNumber);
      if (kind == Kind::kReal) f.option->check(CLI::Number);
    }
  }

  void apply(json& options) const {
    for (const auto& f : flags_) {
      if (f->option->count() == 0) continue;
      options[f->key] = convert(*f);
    }
  }

 private:
  static json convert(const Flag& f) {
    switch (f.kind) {
      case Kind::kText: return f.value;
      case Kind::kFlag: return f.set;
      case Kind::kCount:
      case Kind::kUInt: return parse_uint(f.key, f.value);
      case Kind::kReal: return parse_real(f.key, f.value);
      case Kind::kRealList:
      case Kind::kUIntList: {
        json list = json::array();
        std::stringstream ss(f.value);
        std::string item;
        while (std::getline(ss, item, ',')) {
          if (item.empty()) continue;
          list.push_back(f.kind == Kind::kRealList ? json(parse_real(f.key, item)) : json(parse_uint(f.key, item)));
        }
        return list;
      }
    }
    return nullptr;
  }

  static std::uint64_t parse_uint(const std::string& key, const std::string& text) {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(text, &used);
      if (used == text.size() && text.find('-') == std::string::npos) return v;
    } catch (const std::exception&) {
    }
    throw UsageError{"--" + key + " expects a non-negative integer, got '" + text + "'"};
  }

  static double parse_real(const std::string& key, const std::string& text) {
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError{"--" + key + " expects a number, got '" + text + "'"};
  }

  std::vector<std::unique_ptr<Flag>> flags_;
};

void dataset_flags(FlagTable& t, CLI::App* c) {
  t.add(c, "--kind", "kind", Kind::kText, "blobs, spike-patterns or events");
  t.add(c, "--classes", "classes", Kind::kCount, "number of classes");
  t.add(c, "--train-per-class", "train_per_class", Kind::kCount, "training samples per class");
  t.add(c, "--test-per-class", "test_per_class", Kind::kCount, "test samples per class");
  t.add(c, "--channels", "channels", Kind::kCount, "image channels (blobs)");
  t.add(c, "--height", "height", Kind::kCount, "sample height");
  t.add(c, "--width", "width", Kind::kCount, "sample width");
  t.add(c, "--noise", "noise", Kind::kReal, "additive noise level");
  t.add(c, "--frame-window", "frame_window", Kind::kCount, "microseconds per event frame");
  t.add(c, "--events-index", "events_index", Kind::kText, "CSV index of event streams (split,label,csv_path)");
}

void network_flags(FlagTable& t, CLI::App* c) {
  t.add(c, "--preset", "preset", Kind::kText, "mlp or small-conv");
  t.add(c, "--timesteps", "timesteps", Kind::kCount, "simulation steps (default 4 static, 16 event)");
  t.add(c, "--surrogate", "surrogate", Kind::kText, "rectangular or arctangent");
  t.add(c, "--surrogate-width", "surrogate_width", Kind::kReal, "rectangular window width");
  t.add(c, "--surrogate-slope", "surrogate_slope", Kind::kReal, "arctangent slope");
  t.add(c, "--v-threshold", "v_threshold", Kind::kReal, "firing threshold");
  t.add(c, "--v-reset", "v_reset", Kind::kReal, "reset potential");
}

void optimizer_flags(FlagTable& t, CLI::App* c) {
  t.add(c, "--lr", "lr", Kind::kReal, "learning rate");
  t.add(c, "--momentum", "momentum", Kind::kReal, "SGD momentum");
  t.add(c, "--epochs", "epochs", Kind::kCount, "training epochs (0 = evaluate only)");
  t.add(c, "--batch-size", "batch_size", Kind::kCount, "mini-batch size");
}

void kd_flags(FlagTable& t, CLI::App* c, bool with_mode) {
  if (with_mode) t.add(c, "--mode", "mode", Kind::kText, "sparse or default");
  t.add(c, "--temperature", "temperature", Kind::kReal, "softmax temperature");
  t.add(c, "--loss-alpha", "loss_alpha", Kind::kReal, "weight of the distillation term");
  t.add(c, "--kl-direction", "kl_direction", Kind::kText, "teacher-first or student-first");
  t.add(c, "--harmonized", "harmonized", Kind::kFlag, "use the temperature-scaled loss in default mode");
  t.add(c, "--teacher-alpha", "teacher_alpha", Kind::kReal, "virtual teacher target mass (> 0.9)");
}

json read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  json j = json::parse(ss.str(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw std::invalid_argument("config '" + path + "' is not a JSON object");
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse and teacher-default distillation for spiking networks"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string("srkd ") + srkd_version());

  FlagTable global, local;
  std::string config_path;
  bool print_json = false;
  app.add_option("--config", config_path, "JSON experiment config; explicit flags override it");
  global.add(&app, "--seed", "seed", Kind::kUInt, "random seed");
  global.add(&app, "--threads", "threads", Kind::kCount, "worker threads");
  global.add(&app, "--out-dir", "out_dir", Kind::kText, "directory for all outputs");
  app.add_flag("--json", print_json, "print the full JSON result");

  CLI::App* gen = app.add_subcommand("gen-data", "generate a synthetic dataset file");
  dataset_flags(local, gen);
  local.add(gen, "--timesteps", "timesteps", Kind::kCount, "event frames per sample");
  local.add(gen, "-o,--output", "output", Kind::kText, "output file (relative to --out-dir)");

  CLI::App* train = app.add_subcommand("train", "train a baseline network with cross-entropy");
  local.add(train, "--data", "data", Kind::kText, "dataset file");
  network_flags(local, train);
  optimizer_flags(local, train);
  local.add(train, "--name", "name", Kind::kText, "run name (default baseline)");
  local.add(train, "--resume", "resume", Kind::kFlag, "reuse a completed run");

  CLI::App* prune = app.add_subcommand("prune", "magnitude-prune a checkpoint");
  local.add(prune, "--model", "model", Kind::kText, "input checkpoint");
  local.add(prune, "--ratio", "ratio", Kind::kReal, "fraction of in-scope weights to zero");
  local.add(prune, "--scope", "prune_scope", Kind::kText, "auto, conv or all");
  local.add(prune, "--ranking", "prune_ranking", Kind::kText, "global or per-layer");
  local.add(prune, "--data", "data", Kind::kText, "dataset for reporting the pruned accuracy");
  local.add(prune, "-o,--output", "output", Kind::kText, "output checkpoint (relative to --out-dir)");

  CLI::App* distill = app.add_subcommand("distill", "train a student with sparse or default distillation");
  local.add(distill, "--data", "data", Kind::kText, "dataset file");
  local.add(distill, "--teacher", "teacher", Kind::kText, "pruned teacher checkpoint (sparse mode)");
  kd_flags(local, distill, true);
  network_flags(local, distill);
  optimizer_flags(local, distill);
  local.add(distill, "--name", "name", Kind::kText, "run name");
  local.add(distill, "--resume", "resume", Kind::kFlag, "reuse a completed run");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  local.add(eval, "--model", "model", Kind::kText, "checkpoint");
  local.add(eval, "--data", "data", Kind::kText, "dataset file");

  CLI::App* report = app.add_subcommand("report", "build the comparison table and plots for a run directory");
  local.add(report, "run_dir,--run-dir", "run_dir", Kind::kText, "directory holding the run reports");

  CLI::App* suite = app.add_subcommand("run-suite", "train, prune, distill and report over seeds and a grid");
  local.add(suite, "--data", "data", Kind::kText, "dataset file (default: generate the benchmark)");
  dataset_flags(local, suite);
  local.add(suite, "--data-seed", "data_seed", Kind::kUInt, "seed for the generated dataset");
  network_flags(local, suite);
  optimizer_flags(local, suite);
  kd_flags(local, suite, false);
  local.add(suite, "--grid", "grid", Kind::kRealList, "comma-separated teacher prune ratios");
  local.add(suite, "--seeds", "seeds", Kind::kUIntList, "comma-separated run seeds");
  local.add(suite, "--scope", "prune_scope", Kind::kText, "auto, conv or all");
  local.add(suite, "--ranking", "prune_ranking", Kind::kText, "global or per-layer");
  local.add(suite, "--resume", "resume", Kind::kFlag, "skip completed steps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  json options = json::object();
  try {
    if (!config_path.empty()) options = read_config(config_path);
    global.apply(options);
    local.apply(options);
  } catch (const UsageError& e) {
    std::cerr << "srkd: usage error: " << e.message << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "srkd: config error: " << e.what() << "\n";
    return 2;
  }

  char* result = nullptr;
  const srkd_status st = srkd_run_command(command.c_str(), options.dump().c_str(), &result);
  if (st != SRKD_OK) {
    std::cerr << "srkd: " << srkd_last_error() << "\n";
    return srkd_exit_code(st);
  }
  const json out = json::parse(result);
  srkd_string_free(result);
  if (print_json) {
    std::cout << out.dump(2) << "\n";
  } else {
    std::string text = out.value("text", std::string());
    if (!text.empty() && text.back() == '\n') text.pop_back();
    std::cout << text << "\n";
  }
  return 0;
}
