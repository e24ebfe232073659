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

#include "srkd/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "binary_io.hpp"
#include "srkd/checkpoint.hpp"
#include "srkd/error.hpp"
#include "srkd/events.hpp"
#include "srkd/json_codec.hpp"
#include "srkd/rng.hpp"
#include "srkd/svg.hpp"
#include "srkd/version.hpp"

namespace srkd {
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr std::uint64_t kInitStream = 0x1417;
constexpr const char* kManifestFile = "run-manifest.json";
constexpr const char* kBaselineName = "baseline";

std::mutex& manifest_mutex() {
  static std::mutex m;
  return m;
}

template <typename T>
T take(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::kUsage, "option '" + key + "' has the wrong type");
  }
}

std::size_t take_count(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (v.is_number_integer() && v.get<long long>() < 0) fail(ErrorKind::kUsage, "option '" + key + "' must be >= 0");
  if (!v.is_number_unsigned() && !v.is_number_integer()) {
    fail(ErrorKind::kUsage, "option '" + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

SurrogateKind surrogate_from_string(const std::string& s) {
  if (s == "rectangular") return SurrogateKind::kRectangular;
  if (s == "arctangent") return SurrogateKind::kArctangent;
  fail(ErrorKind::kUsage, "unknown surrogate '" + s + "' (expected rectangular or arctangent)");
}

std::string path_in(const std::string& dir, const std::string& file) {
  const fs::path p(file);
  if (p.is_absolute() || dir.empty()) return p.string();
  return (fs::path(dir) / p).lexically_normal().string();
}

void record_outputs(const std::string& out_dir, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& files) {
  std::lock_guard lock(manifest_mutex());
  const std::string mpath = path_in(out_dir, kManifestFile);
  json m = {{"tool", "srkd"}, {"version", kVersionString}, {"outputs", json::object()}};
  if (fs::exists(mpath)) {
    try {
      json old = json::parse(detail::read_file_text(mpath));
      if (old.contains("outputs") && old["outputs"].is_object()) m["outputs"] = old["outputs"];
    } catch (const json::exception&) {
      // an unreadable manifest is rebuilt from scratch
    }
  }
  for (const auto& [path, kind] : files) {
    std::string rel = fs::path(path).lexically_relative(fs::path(out_dir.empty() ? "." : out_dir)).string();
    if (rel.empty() || rel.rfind("..", 0) == 0) rel = path;
    m["outputs"][rel] = {{"command", command}, {"kind", kind}};
  }
  detail::write_file_text(mpath, m.dump(2) + "\n");
}

DatasetHandle load_data(const ExperimentConfig& cfg, const char* command) {
  if (cfg.data.empty()) fail(ErrorKind::kUsage, std::string(command) + " needs --data");
  return load_dataset(cfg.data);
}

std::string dataset_label(const json& source) {
  if (source.is_object() && source.contains("generator") && source["generator"].is_string()) {
    return source["generator"].get<std::string>();
  }
  return "dataset";
}

TrainOptions train_options(const ExperimentConfig& cfg) {
  TrainOptions o;
  o.lr = cfg.lr;
  o.momentum = cfg.momentum;
  o.epochs = cfg.epochs;
  o.batch_size = cfg.batch_size;
  o.seed = cfg.seed;
  o.threads = cfg.threads;
  o.validate();
  return o;
}

struct RunFiles {
  std::string ckpt, report_json, report_csv, timing;
};

RunFiles run_files(const std::string& dir, const std::string& name) {
  return {path_in(dir, name + ".ckpt"), path_in(dir, name + ".report.json"), path_in(dir, name + ".report.csv"),
          path_in(dir, name + ".timing.json")};
}

bool run_complete(const RunFiles& f) { return fs::exists(f.ckpt) && fs::exists(f.report_json); }

void write_run(const RunFiles& f, const Checkpoint& ckpt, const TrainReport& report, const std::string& out_dir,
               const std::string& command) {
  save_checkpoint(ckpt, f.ckpt);
  detail::write_file_text(f.report_json, report.to_json());
  detail::write_file_text(f.report_csv, report.to_csv());
  json timing = {{"run_id", report.run_id}, {"total_wall_seconds", report.total_wall_seconds()}};
  for (const auto& e : report.epochs) timing["epoch_wall_seconds"].push_back(e.wall_seconds);
  detail::write_file_text(f.timing, timing.dump(2) + "\n");
  record_outputs(out_dir, command,
                 {{f.ckpt, "checkpoint"}, {f.report_json, "report"}, {f.report_csv, "report-csv"},
                  {f.timing, "timing"}});
}

json run_summary(const TrainReport& r, const RunFiles& f, bool skipped) {
  json s = {{"run_id", r.run_id},
            {"kind", r.kind},
            {"checkpoint", f.ckpt},
            {"report", f.report_json},
            {"final_test_accuracy", r.final_test_accuracy()},
            {"best_test_accuracy", r.best_test_accuracy()},
            {"best_epoch", r.best_epoch()},
            {"skipped", skipped}};
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s %s: test accuracy %.2f%% (best %.2f%% at epoch %zu)%s", r.kind.c_str(),
                r.run_id.c_str(), r.final_test_accuracy(), r.best_test_accuracy(), r.best_epoch(),
                skipped ? " [resumed]" : "");
  s["text"] = std::string(buf);
  return s;
}

std::string ratio_tag(double r) { return format_number(r); }

DatasetHandle load_event_index(const ExperimentConfig& cfg) {
  std::ifstream in(cfg.events_index);
  if (!in) fail(ErrorKind::kIo, "cannot open event index '" + cfg.events_index + "'");
  const fs::path base = fs::path(cfg.events_index).parent_path();
  const std::size_t T = cfg.timesteps ? cfg.timesteps : kDefaultEventTimesteps;
  DatasetHandle d;
  d.encoding = Encoding::kEventFrames;
  std::size_t width = 0, height = 0, max_label = 0, lineno = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string split, label, path;
    if (!std::getline(ss, split, ',') || !std::getline(ss, label, ',') || !std::getline(ss, path)) {
      fail(ErrorKind::kFormat, cfg.events_index + ":" + std::to_string(lineno) + ": expected split,label,csv_path");
    }
    if (split == "split") continue;  // header
    std::uint32_t y = 0;
    auto res = std::from_chars(label.data(), label.data() + label.size(), y);
    if (res.ec != std::errc() || res.ptr != label.data() + label.size()) {
      fail(ErrorKind::kFormat, cfg.events_index + ":" + std::to_string(lineno) + ": bad label '" + label + "'");
    }
    const std::string csv = fs::path(path).is_absolute() ? path : (base / path).string();
    const EventStream stream = read_event_csv(csv);
    if (width == 0) {
      width = stream.width;
      height = stream.height;
    } else if (stream.width != width || stream.height != height) {
      fail(ErrorKind::kValidation, csv + ": sensor size differs from earlier streams");
    }
    DatasetSplit* target = split == "train" ? &d.train : split == "test" ? &d.test : nullptr;
    if (!target) fail(ErrorKind::kFormat, cfg.events_index + ":" + std::to_string(lineno) + ": split must be train or test");
    target->samples.push_back(integrate_events(stream.events, width, height, T, cfg.frame_window));
    target->labels.push_back(y);
    max_label = std::max<std::size_t>(max_label, y);
  }
  if (width == 0) fail(ErrorKind::kValidation, "event index '" + cfg.events_index + "' lists no streams");
  d.num_classes = cfg.has("classes") ? cfg.classes : max_label + 1;
  d.sample_shape = {T, 2, height, width};
  d.source = json{{"generator", "event-csv"},
                  {"index", fs::path(cfg.events_index).filename().string()},
                  {"timesteps", T},
                  {"window", cfg.frame_window}}
                 .dump();
  d.validate();
  return d;
}

}  // namespace

std::string format_number(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------- config

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::kUsage, "options must be a JSON object");
  ExperimentConfig c;
  for (const auto& [key, value] : j.items()) {
    if (value.is_null()) continue;
    c.given.insert(key);
    if (key == "data") c.data = take<std::string>(j, key);
    else if (key == "kind") c.kind = take<std::string>(j, key);
    else if (key == "classes") c.classes = take_count(j, key);
    else if (key == "train_per_class") c.train_per_class = take_count(j, key);
    else if (key == "test_per_class") c.test_per_class = take_count(j, key);
    else if (key == "channels") c.channels = take_count(j, key);
    else if (key == "height") c.height = take_count(j, key);
    else if (key == "width") c.width = take_count(j, key);
    else if (key == "noise") c.noise = take<double>(j, key);
    else if (key == "frame_window") c.frame_window = take_count(j, key);
    else if (key == "events_index") c.events_index = take<std::string>(j, key);
    else if (key == "data_seed") c.data_seed = take<std::uint64_t>(j, key);
    else if (key == "preset") c.preset = preset_from_string(take<std::string>(j, key));
    else if (key == "timesteps") c.timesteps = take_count(j, key);
    else if (key == "surrogate") c.neuron.surrogate = surrogate_from_string(take<std::string>(j, key));
    else if (key == "surrogate_width") c.neuron.surrogate_width = take<double>(j, key);
    else if (key == "surrogate_slope") c.neuron.surrogate_slope = take<double>(j, key);
    else if (key == "v_threshold") c.neuron.v_threshold = take<double>(j, key);
    else if (key == "v_reset") c.neuron.v_reset = take<double>(j, key);
    else if (key == "lr") c.lr = take<double>(j, key);
    else if (key == "momentum") c.momentum = take<double>(j, key);
    else if (key == "epochs") c.epochs = take_count(j, key);
    else if (key == "batch_size") c.batch_size = take_count(j, key);
    else if (key == "seed") c.seed = take<std::uint64_t>(j, key);
    else if (key == "threads") c.threads = take_count(j, key);
    else if (key == "mode") c.kd.mode = kd_mode_from_string(take<std::string>(j, key));
    else if (key == "temperature") c.kd.temperature = take<double>(j, key);
    else if (key == "loss_alpha") c.kd.loss_alpha = take<double>(j, key);
    else if (key == "kl_direction") c.kd.kl_direction = kl_direction_from_string(take<std::string>(j, key));
    else if (key == "harmonized") c.kd.harmonized = take<bool>(j, key);
    else if (key == "teacher_alpha") c.teacher_alpha = take<double>(j, key);
    else if (key == "teacher") c.teacher = take<std::string>(j, key);
    else if (key == "ratio") c.ratio = take<double>(j, key);
    else if (key == "grid") c.grid = take<std::vector<double>>(j, key);
    else if (key == "prune_scope") c.prune_scope = take<std::string>(j, key);
    else if (key == "prune_ranking") c.prune_ranking = prune_ranking_from_string(take<std::string>(j, key));
    else if (key == "seeds") c.seeds = take<std::vector<std::uint64_t>>(j, key);
    else if (key == "out_dir") c.out_dir = take<std::string>(j, key);
    else if (key == "output") c.output = take<std::string>(j, key);
    else if (key == "model") c.model = take<std::string>(j, key);
    else if (key == "name") c.name = take<std::string>(j, key);
    else if (key == "run_dir") c.run_dir = take<std::string>(j, key);
    else if (key == "resume") c.resume = take<bool>(j, key);
    else fail(ErrorKind::kUsage, "unknown option '" + key + "'");
  }
  return c;
}

json ExperimentConfig::to_json() const {
  json j = {{"kind", kind},
            {"classes", classes},
            {"train_per_class", train_per_class},
            {"test_per_class", test_per_class},
            {"channels", channels},
            {"height", height},
            {"width", width},
            {"noise", noise},
            {"frame_window", frame_window},
            {"data_seed", data_seed},
            {"preset", srkd::to_string(preset)},
            {"timesteps", timesteps},
            {"surrogate", neuron.surrogate == SurrogateKind::kArctangent ? "arctangent" : "rectangular"},
            {"surrogate_width", neuron.surrogate_width},
            {"surrogate_slope", neuron.surrogate_slope},
            {"v_threshold", neuron.v_threshold},
            {"v_reset", neuron.v_reset},
            {"lr", lr},
            {"momentum", momentum},
            {"epochs", epochs},
            {"batch_size", batch_size},
            {"seed", seed},
            {"threads", threads},
            {"mode", srkd::to_string(kd.mode)},
            {"temperature", kd.temperature},
            {"loss_alpha", kd.loss_alpha},
            {"kl_direction", srkd::to_string(kd.kl_direction)},
            {"harmonized", kd.harmonized},
            {"teacher_alpha", teacher_alpha},
            {"grid", grid},
            {"prune_scope", prune_scope},
            {"prune_ranking", srkd::to_string(prune_ranking)},
            {"seeds", seeds},
            {"out_dir", out_dir},
            {"resume", resume}};
  if (!data.empty()) j["data"] = data;
  if (!events_index.empty()) j["events_index"] = events_index;
  if (!teacher.empty()) j["teacher"] = teacher;
  if (ratio) j["ratio"] = *ratio;
  if (!output.empty()) j["output"] = output;
  if (!model.empty()) j["model"] = model;
  if (!name.empty()) j["name"] = name;
  if (!run_dir.empty()) j["run_dir"] = run_dir;
  return j;
}

void ExperimentConfig::validate() const {
  auto need_file = [](const std::string& path, const char* what) {
    if (!path.empty() && !fs::is_regular_file(path)) {
      fail(ErrorKind::kIo, std::string(what) + " '" + path + "' does not exist");
    }
  };
  need_file(data, "dataset");
  need_file(events_index, "event index");
  need_file(teacher, "teacher checkpoint");
  need_file(model, "model checkpoint");
  for (double g : grid) {
    if (!(g >= 0.0 && g <= 1.0)) fail(ErrorKind::kUsage, "grid value " + format_number(g) + " is outside [0, 1]");
  }
  if (grid.empty()) fail(ErrorKind::kUsage, "prune grid is empty");
  if (ratio && !(*ratio >= 0.0 && *ratio <= 1.0)) {
    fail(ErrorKind::kUsage, "prune ratio " + format_number(*ratio) + " is outside [0, 1]");
  }
  if (prune_scope != "auto" && prune_scope != "conv" && prune_scope != "all") {
    fail(ErrorKind::kUsage, "unknown prune scope '" + prune_scope + "' (expected auto, conv or all)");
  }
  if (kind != "blobs" && kind != "spike-patterns" && kind != "events") {
    fail(ErrorKind::kUsage, "unknown dataset kind '" + kind + "' (expected blobs, spike-patterns or events)");
  }
  if (seeds.empty()) fail(ErrorKind::kUsage, "seed list is empty");
  if (threads == 0) fail(ErrorKind::kUsage, "threads must be >= 1");
  if (out_dir.empty()) fail(ErrorKind::kUsage, "output directory is empty");
  neuron.validate();
  kd.validate();
}

// ---------------------------------------------------------------- rows

json ComparisonRow::to_json() const {
  json j = {{"dataset", dataset},
            {"model", model},
            {"mode", mode},
            {"run_id", run_id},
            {"teacher_prune_ratio", teacher_prune_ratio ? json(*teacher_prune_ratio) : json(nullptr)},
            {"teacher_accuracy", teacher_accuracy},
            {"baseline_accuracy", baseline_accuracy},
            {"kd_accuracy", kd_accuracy},
            {"improvement", improvement},
            {"baseline_best", baseline_best},
            {"kd_best", kd_best},
            {"improvement_best", improvement_best}};
  return j;
}

ComparisonRow make_row(const TrainReport& baseline, const TrainReport& kd) {
  ComparisonRow r;
  r.dataset = dataset_label(kd.config.value("dataset", json::object()));
  r.model = kd.config.value("preset", std::string("custom"));
  r.mode = kd.kind;
  r.run_id = kd.run_id;
  r.teacher_prune_ratio = kd.teacher_prune_ratio;
  r.teacher_accuracy = kd.teacher_accuracy.value_or(0.0);
  r.baseline_accuracy = baseline.final_test_accuracy();
  r.kd_accuracy = kd.final_test_accuracy();
  r.improvement = r.kd_accuracy - r.baseline_accuracy;
  r.baseline_best = baseline.best_test_accuracy();
  r.kd_best = kd.best_test_accuracy();
  r.improvement_best = r.kd_best - r.baseline_best;
  return r;
}

void sort_rows(std::vector<ComparisonRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ComparisonRow& a, const ComparisonRow& b) {
    if (a.model != b.model) return a.model < b.model;
    const bool av = !a.teacher_prune_ratio, bv = !b.teacher_prune_ratio;
    if (av != bv) return bv;
    if (!av && *a.teacher_prune_ratio != *b.teacher_prune_ratio) return *a.teacher_prune_ratio < *b.teacher_prune_ratio;
    return a.run_id < b.run_id;
  });
}

std::string rows_to_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream os;
  os << "dataset,model,mode,run_id,teacher_prune_ratio,teacher_acc,baseline_acc,kd_acc,improvement,"
        "baseline_best,kd_best,improvement_best\n";
  for (const auto& r : rows) {
    os << r.dataset << ',' << r.model << ',' << r.mode << ',' << r.run_id << ','
       << (r.teacher_prune_ratio ? format_number(*r.teacher_prune_ratio) : std::string("-")) << ','
       << format_number(r.teacher_accuracy) << ',' << format_number(r.baseline_accuracy) << ','
       << format_number(r.kd_accuracy) << ',' << format_number(r.improvement) << ','
       << format_number(r.baseline_best) << ',' << format_number(r.kd_best) << ','
       << format_number(r.improvement_best) << '\n';
  }
  return os.str();
}

std::string rows_to_text(const std::vector<ComparisonRow>& rows) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-14s %-10s %-8s %7s %9s %9s %9s %8s | %9s %9s %8s\n", "dataset", "model", "mode",
                "prune", "teacher%", "base%", "kd%", "improv", "best:base", "best:kd", "improv");
  os << buf;
  for (const auto& r : rows) {
    const std::string ratio = r.teacher_prune_ratio ? format_number(*r.teacher_prune_ratio) : "virtual";
    std::snprintf(buf, sizeof buf, "%-14s %-10s %-8s %7s %9.2f %9.2f %9.2f %+8.2f | %9.2f %9.2f %+8.2f\n",
                  r.dataset.c_str(), r.model.c_str(), r.mode.c_str(), ratio.c_str(), r.teacher_accuracy,
                  r.baseline_accuracy, r.kd_accuracy, r.improvement, r.baseline_best, r.kd_best,
                  r.improvement_best);
    os << buf;
  }
  return os.str();
}

// ---------------------------------------------------------------- helpers

NetworkSpec build_network(const ExperimentConfig& cfg, const DatasetHandle& data) {
  const std::size_t T = cfg.timesteps ? cfg.timesteps : data.natural_timesteps();
  if (data.encoding == Encoding::kEventFrames && T != data.natural_timesteps()) {
    fail(ErrorKind::kConfig, "event data has " + std::to_string(data.natural_timesteps()) +
                                 " frames but timesteps is " + std::to_string(T));
  }
  return make_preset(cfg.preset, data.step_shape(), data.num_classes, T, cfg.neuron);
}

NetworkState initial_state(const NetworkSpec& spec, std::uint64_t seed) {
  Rng rng(derive_seed(seed, kInitStream));
  return init_params(spec, rng);
}

PruneScope resolve_prune_scope(const std::string& scope, const NetworkSpec& spec) {
  if (scope == "conv") return PruneScope::kConvOnly;
  if (scope == "all") return PruneScope::kAllWeighted;
  if (scope != "auto") fail(ErrorKind::kUsage, "unknown prune scope '" + scope + "'");
  for (const LayerSpec& l : spec.layers) {
    if (l.kind == LayerKind::kConv2d) return PruneScope::kConvOnly;
  }
  return PruneScope::kAllWeighted;
}

DatasetHandle generate_dataset(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.kind == "events") {
    if (cfg.events_index.empty()) fail(ErrorKind::kUsage, "event data needs --events-index");
    return load_event_index(cfg);
  }
  SyntheticSpec s;
  s.kind = synthetic_kind_from_string(cfg.kind);
  s.num_classes = cfg.classes;
  s.train_per_class = cfg.train_per_class;
  s.test_per_class = cfg.test_per_class;
  s.channels = cfg.channels;
  s.height = cfg.height;
  s.width = cfg.width;
  s.noise = cfg.noise;
  s.timesteps = cfg.timesteps ? cfg.timesteps : kDefaultEventTimesteps;
  s.window = cfg.frame_window;
  Rng rng(seed);
  return gen_synthetic(s, rng);
}

// ---------------------------------------------------------------- commands

json cmd_gen_data(const ExperimentConfig& cfg) {
  cfg.validate();
  const DatasetHandle d = generate_dataset(cfg, cfg.has("seed") ? cfg.seed : cfg.data_seed);
  const std::string out = path_in(cfg.out_dir, cfg.output.empty() ? "data.srkd" : cfg.output);
  save_dataset(d, out);
  record_outputs(cfg.out_dir, "gen-data", {{out, "dataset"}});
  json s = {{"path", out},
            {"classes", d.num_classes},
            {"encoding", to_string(d.encoding)},
            {"sample_shape", d.sample_shape},
            {"train", d.train.size()},
            {"test", d.test.size()},
            {"natural_timesteps", d.natural_timesteps()},
            {"source", json::parse(d.source)}};
  s["text"] = "wrote " + out + ": " + std::to_string(d.train.size()) + " train / " + std::to_string(d.test.size()) +
              " test samples, " + std::to_string(d.num_classes) + " classes, shape " +
              shape_to_string(d.sample_shape) + ", " + to_string(d.encoding);
  return s;
}

json cmd_train(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::string name = cfg.name.empty() ? kBaselineName : cfg.name;
  const RunFiles files = run_files(cfg.out_dir, name);
  if (cfg.resume && run_complete(files)) {
    return run_summary(TrainReport::from_json(detail::read_file_text(files.report_json)), files, true);
  }
  const DatasetHandle data = load_data(cfg, "train");
  const NetworkSpec spec = build_network(cfg, data);
  const TrainOptions opt = train_options(cfg);
  NetworkState state = initial_state(spec, cfg.seed);
  TrainReport report = train_baseline(state, spec, data, opt);
  report.run_id = name;
  report.config["preset"] = to_string(cfg.preset);
  Checkpoint ckpt{spec, std::move(state), cfg.seed, cfg.epochs, std::nullopt, "{}"};
  ckpt.meta = json{{"command", "train"},
                   {"preset", to_string(cfg.preset)},
                   {"test_accuracy", report.final_test_accuracy()},
                   {"dataset", json::parse(data.source)}}
                  .dump();
  write_run(files, ckpt, report, cfg.out_dir, "train");
  return run_summary(report, files, false);
}

json cmd_prune(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.model.empty()) fail(ErrorKind::kUsage, "prune needs --model");
  if (!cfg.ratio) fail(ErrorKind::kUsage, "prune needs --ratio");
  const std::string out = path_in(cfg.out_dir, cfg.output.empty() ? "teacher-r" + ratio_tag(*cfg.ratio) + ".ckpt"
                                                                  : cfg.output);
  Checkpoint ckpt = load_checkpoint(cfg.model);
  const PruneScope scope = resolve_prune_scope(cfg.prune_scope, ckpt.spec);
  const PruneMask mask = compute_mask(ckpt.spec, ckpt.state, *cfg.ratio, scope, cfg.prune_ranking);
  attach_mask(ckpt.state, mask);
  ckpt.mask = mask;
  const SparsityReport sp = sparsity_report(mask, ckpt.state);
  json meta = json::parse(ckpt.meta);
  meta["command"] = "prune";
  meta["pruned_from"] = fs::path(cfg.model).filename().string();
  std::optional<double> acc;
  if (!cfg.data.empty()) {
    const DatasetHandle data = load_dataset(cfg.data);
    acc = evaluate(ckpt.state, ckpt.spec, data, data.test, cfg.threads);
    meta["test_accuracy"] = *acc;
  }
  ckpt.meta = meta.dump();
  save_checkpoint(ckpt, out);
  record_outputs(cfg.out_dir, "prune", {{out, "checkpoint"}});

  json s = {{"path", out},        {"ratio", *cfg.ratio},   {"scope", to_string(scope)},
            {"ranking", to_string(cfg.prune_ranking)}, {"total", sp.total}, {"pruned", sp.pruned},
            {"sparsity", sp.overall}};
  for (const auto& t : sp.tensors) {
    s["tensors"].push_back({{"name", t.name}, {"total", t.total}, {"pruned", t.pruned}, {"fraction", t.fraction}});
  }
  char buf[256];
  std::snprintf(buf, sizeof buf, "wrote %s: pruned %zu of %zu weights (%.4f, scope %s, %s ranking)", out.c_str(),
                sp.pruned, sp.total, sp.overall, to_string(scope), to_string(cfg.prune_ranking));
  std::string text = buf;
  if (acc) {
    s["test_accuracy"] = *acc;
    std::snprintf(buf, sizeof buf, ", test accuracy %.2f%%", *acc);
    text += buf;
  }
  s["text"] = text;
  return s;
}

json cmd_distill(const ExperimentConfig& cfg) {
  cfg.validate();
  const bool sparse = cfg.kd.mode == KDMode::kSparse;
  if (sparse && cfg.teacher.empty()) fail(ErrorKind::kUsage, "sparse distillation needs --teacher");
  if (!sparse) VirtualTeacher{2, cfg.teacher_alpha}.validate();

  std::optional<Checkpoint> teacher;
  double ratio = 0.0;
  if (sparse) {
    teacher = load_checkpoint(cfg.teacher);
    if (teacher->mask) ratio = teacher->mask->ratio;
  }
  const std::string name = !cfg.name.empty() ? cfg.name
                           : sparse          ? "sparse-r" + ratio_tag(ratio)
                                             : "default-a" + format_number(cfg.teacher_alpha);
  const RunFiles files = run_files(cfg.out_dir, name);
  if (cfg.resume && run_complete(files)) {
    return run_summary(TrainReport::from_json(detail::read_file_text(files.report_json)), files, true);
  }
  const DatasetHandle data = load_data(cfg, "distill");
  // The sparse-KD student is the teacher's own architecture unless a preset is requested.
  const NetworkSpec spec = sparse && !cfg.has("preset") ? teacher->spec : build_network(cfg, data);
  std::string preset_name = to_string(cfg.preset);
  if (sparse && !cfg.has("preset")) {
    preset_name = json::parse(teacher->meta).value("preset", std::string("custom"));
  }
  const TrainOptions opt = train_options(cfg);
  NetworkState student = initial_state(spec, cfg.seed);
  Teacher t = VirtualTeacher{data.num_classes, cfg.teacher_alpha};
  if (sparse) t = NetworkTeacher{&teacher->spec, &teacher->state, ratio};
  TrainReport report = distill_train(student, spec, t, data, cfg.kd, opt);
  report.run_id = name;
  report.config["preset"] = preset_name;
  if (sparse && teacher->mask) {
    report.config["teacher"]["prune_scope"] = to_string(teacher->mask->scope);
    report.config["teacher"]["prune_ranking"] = to_string(teacher->mask->ranking);
  }
  Checkpoint ckpt{spec, std::move(student), cfg.seed, cfg.epochs, std::nullopt, "{}"};
  ckpt.meta = json{{"command", "distill"},
                   {"preset", preset_name},
                   {"mode", to_string(cfg.kd.mode)},
                   {"test_accuracy", report.final_test_accuracy()},
                   {"dataset", json::parse(data.source)}}
                  .dump();
  write_run(files, ckpt, report, cfg.out_dir, "distill");
  return run_summary(report, files, false);
}

json cmd_eval(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.model.empty()) fail(ErrorKind::kUsage, "eval needs --model");
  const Checkpoint ckpt = load_checkpoint(cfg.model);
  const DatasetHandle data = load_data(cfg, "eval");
  const double train_acc = evaluate(ckpt.state, ckpt.spec, data, data.train, cfg.threads);
  const double test_acc = evaluate(ckpt.state, ckpt.spec, data, data.test, cfg.threads);
  json s = {{"model", cfg.model}, {"train_accuracy", train_acc}, {"test_accuracy", test_acc},
            {"parameters", ckpt.state.num_parameters()}};
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s: train accuracy %.2f%%, test accuracy %.2f%%", cfg.model.c_str(), train_acc,
                test_acc);
  std::string text = buf;
  if (ckpt.mask) {
    const SparsityReport sp = sparsity_report(*ckpt.mask, ckpt.state);
    s["sparsity"] = sp.overall;
    std::snprintf(buf, sizeof buf, ", sparsity %.4f", sp.overall);
    text += buf;
  }
  s["text"] = text;
  return s;
}

namespace {

struct ReportSet {
  TrainReport baseline;
  std::vector<TrainReport> kd;
};

ReportSet read_reports(const std::string& dir) {
  if (!fs::is_directory(dir)) fail(ErrorKind::kIo, "run directory '" + dir + "' does not exist");
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string fn = e.path().filename().string();
    const std::string suffix = ".report.json";
    if (e.is_regular_file() && fn.size() > suffix.size() && fn.compare(fn.size() - suffix.size(), suffix.size(), suffix) == 0) {
      files.push_back(fn);
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) fail(ErrorKind::kIo, "no training reports in '" + dir + "'");
  const std::string base_file = std::string(kBaselineName) + ".report.json";
  if (!std::binary_search(files.begin(), files.end(), base_file)) {
    fail(ErrorKind::kUsage, "missing baseline report '" + path_in(dir, base_file) + "'");
  }
  ReportSet rs;
  for (const std::string& fn : files) {
    TrainReport r = TrainReport::from_json(detail::read_file_text(path_in(dir, fn)));
    if (fn == base_file) {
      rs.baseline = std::move(r);
    } else if (r.kind == "sparse" || r.kind == "default") {
      rs.kd.push_back(std::move(r));
    }
  }
  if (rs.kd.empty()) fail(ErrorKind::kUsage, "no distilled reports in '" + dir + "'");
  return rs;
}

SvgLineChart accuracy_chart(const TrainReport& r) {
  SvgLineChart c(r.run_id + " accuracy", "epoch", "accuracy (%)");
  c.set_y_range(0, 100);
  SvgLineChart::Series train{"train", {}}, test{"test", {}};
  for (const auto& e : r.epochs) {
    train.points.emplace_back(static_cast<double>(e.epoch), e.train_accuracy);
    test.points.emplace_back(static_cast<double>(e.epoch), e.test_accuracy);
  }
  c.add_series(std::move(train));
  c.add_series(std::move(test));
  return c;
}

}  // namespace

json cmd_report(const ExperimentConfig& cfg) {
  const std::string dir = cfg.run_dir.empty() ? cfg.out_dir : cfg.run_dir;
  const ReportSet rs = read_reports(dir);
  std::vector<ComparisonRow> rows;
  for (const TrainReport& r : rs.kd) {
    if (r.config.value("network", json()) != rs.baseline.config.value("network", json())) {
      fail(ErrorKind::kValidation, "report '" + r.run_id + "' uses a different network than the baseline");
    }
    rows.push_back(make_row(rs.baseline, r));
  }
  sort_rows(rows);

  const std::string csv = path_in(dir, "comparison.csv"), txt = path_in(dir, "comparison.txt"),
                    js = path_in(dir, "comparison.json");
  json rows_json = json::array();
  for (const auto& r : rows) rows_json.push_back(r.to_json());
  const std::string text = rows_to_text(rows);
  detail::write_file_text(csv, rows_to_csv(rows));
  detail::write_file_text(txt, text);
  detail::write_file_text(js, json{{"baseline", rs.baseline.run_id}, {"rows", rows_json}}.dump(2) + "\n");
  std::vector<std::pair<std::string, std::string>> outputs{{csv, "comparison-csv"}, {txt, "comparison-text"},
                                                           {js, "comparison"}};

  SvgLineChart overall("test accuracy per epoch", "epoch", "test accuracy (%)");
  overall.set_y_range(0, 100);
  std::vector<const TrainReport*> all{&rs.baseline};
  for (const auto& r : rs.kd) all.push_back(&r);
  for (const TrainReport* r : all) {
    const std::string svg = path_in(dir, "plots/" + r->run_id + ".svg");
    detail::write_file_text(svg, accuracy_chart(*r).render());
    outputs.emplace_back(svg, "plot");
    SvgLineChart::Series s{r->run_id, {}};
    for (const auto& e : r->epochs) s.points.emplace_back(static_cast<double>(e.epoch), e.test_accuracy);
    overall.add_series(std::move(s));
  }
  const std::string overall_svg = path_in(dir, "plots/test-accuracy.svg");
  detail::write_file_text(overall_svg, overall.render());
  outputs.emplace_back(overall_svg, "plot");
  record_outputs(dir, "report", outputs);
  return {{"rows", rows_json}, {"csv", csv}, {"table", txt}, {"text", text}};
}

namespace {

struct Aggregate {
  std::string dataset, model, mode;
  std::optional<double> ratio;
  std::vector<double> improvement, improvement_best, baseline, kd;
};

std::pair<double, double> mean_std(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  return {m, sd};
}

json seed_pipeline(const ExperimentConfig& base, std::uint64_t seed, const std::string& data_path) {
  ExperimentConfig c = base;
  c.seed = seed;
  c.threads = 1;
  c.data = data_path;
  c.out_dir = path_in(base.out_dir, "seed-" + std::to_string(seed));
  c.name.clear();
  c.output.clear();
  c.teacher.clear();
  c.model.clear();
  c.given.erase("preset");
  json log = json::array();
  log.push_back(cmd_train(c));
  const std::string baseline_ckpt = run_files(c.out_dir, kBaselineName).ckpt;
  for (double r : base.grid) {
    ExperimentConfig p = c;
    p.model = baseline_ckpt;
    p.ratio = r;
    const std::string teacher = path_in(c.out_dir, "teacher-r" + ratio_tag(r) + ".ckpt");
    const RunFiles student = run_files(c.out_dir, "sparse-r" + ratio_tag(r));
    if (!(c.resume && fs::exists(teacher) && run_complete(student))) log.push_back(cmd_prune(p));
    ExperimentConfig d = c;
    d.kd.mode = KDMode::kSparse;
    d.teacher = teacher;
    log.push_back(cmd_distill(d));
  }
  ExperimentConfig d = c;
  d.kd.mode = KDMode::kDefault;
  log.push_back(cmd_distill(d));
  ExperimentConfig rep = c;
  rep.run_dir = c.out_dir;
  json report = cmd_report(rep);
  return {{"seed", seed}, {"rows", report["rows"]}, {"log", log}};
}

}  // namespace

json cmd_run_suite(const ExperimentConfig& cfg_in) {
  ExperimentConfig cfg = cfg_in;
  cfg.validate();
  std::string data_path = cfg.data;
  if (data_path.empty()) {
    data_path = path_in(cfg.out_dir, "data.srkd");
    if (!(cfg.resume && fs::exists(data_path))) {
      ExperimentConfig g = cfg;
      g.output = "data.srkd";
      g.given.erase("seed");
      cmd_gen_data(g);
    }
  }

  // Each seed is an independent pipeline; workers only change wall time.
  std::vector<json> per_seed(cfg.seeds.size());
  std::vector<std::exception_ptr> errors(cfg.seeds.size());
  const std::size_t workers = std::min(cfg.threads, cfg.seeds.size());
  auto work = [&](std::size_t w) {
    for (std::size_t i = w; i < cfg.seeds.size(); i += workers) {
      try {
        per_seed[i] = seed_pipeline(cfg, cfg.seeds[i], data_path);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<Aggregate> groups;
  json rows = json::array();
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
    for (const json& r : per_seed[i]["rows"]) {
      json row = r;
      row["seed"] = cfg.seeds[i];
      rows.push_back(row);
      std::optional<double> ratio;
      if (!r["teacher_prune_ratio"].is_null()) ratio = r["teacher_prune_ratio"].get<double>();
      auto it = std::find_if(groups.begin(), groups.end(), [&](const Aggregate& g) {
        return g.model == r["model"] && g.mode == r["mode"] && g.ratio == ratio;
      });
      if (it == groups.end()) {
        groups.push_back({r["dataset"], r["model"], r["mode"], ratio, {}, {}, {}, {}});
        it = std::prev(groups.end());
      }
      it->improvement.push_back(r["improvement"]);
      it->improvement_best.push_back(r["improvement_best"]);
      it->baseline.push_back(r["baseline_accuracy"]);
      it->kd.push_back(r["kd_accuracy"]);
    }
  }

  json agg = json::array();
  std::ostringstream csv, txt;
  csv << "dataset,model,mode,teacher_prune_ratio,seeds,baseline_mean,kd_mean,improvement_mean,improvement_std,"
         "improvement_best_mean,improvement_best_std\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-14s %-10s %-8s %7s %5s %9s %9s %18s %18s\n", "dataset", "model", "mode", "prune",
                "seeds", "base%", "kd%", "improv (final)", "improv (best)");
  txt << buf;
  for (const Aggregate& g : groups) {
    const auto [bm, bs] = mean_std(g.baseline);
    const auto [km, ks] = mean_std(g.kd);
    const auto [im, is] = mean_std(g.improvement);
    const auto [jm, js] = mean_std(g.improvement_best);
    (void)bs;
    (void)ks;
    agg.push_back({{"dataset", g.dataset},
                   {"model", g.model},
                   {"mode", g.mode},
                   {"teacher_prune_ratio", g.ratio ? json(*g.ratio) : json(nullptr)},
                   {"seeds", g.improvement.size()},
                   {"baseline_mean", bm},
                   {"kd_mean", km},
                   {"improvement_mean", im},
                   {"improvement_std", is},
                   {"improvement_best_mean", jm},
                   {"improvement_best_std", js}});
    const std::string ratio = g.ratio ? format_number(*g.ratio) : "virtual";
    csv << g.dataset << ',' << g.model << ',' << g.mode << ',' << (g.ratio ? ratio : "-") << ','
        << g.improvement.size() << ',' << format_number(bm) << ',' << format_number(km) << ','
        << format_number(im) << ',' << format_number(is) << ',' << format_number(jm) << ',' << format_number(js)
        << '\n';
    std::snprintf(buf, sizeof buf, "%-14s %-10s %-8s %7s %5zu %9.2f %9.2f %+9.2f ± %6.2f %+9.2f ± %6.2f\n",
                  g.dataset.c_str(), g.model.c_str(), g.mode.c_str(), ratio.c_str(), g.improvement.size(), bm, km,
                  im, is, jm, js);
    txt << buf;
  }

  // Echo only the options that shape results; paths and worker counts do not.
  json echo = cfg.to_json();
  for (const char* k : {"out_dir", "threads", "resume", "run_dir", "output", "model", "name", "teacher", "ratio",
                        "mode"}) {
    echo.erase(k);
  }
  if (!cfg.data.empty()) echo["data"] = fs::path(cfg.data).filename().string();
  const json suite = {{"config", echo}, {"rows", rows}, {"aggregate", agg}};
  const std::string sj = path_in(cfg.out_dir, "suite.json"), sc = path_in(cfg.out_dir, "suite.csv"),
                    st = path_in(cfg.out_dir, "suite.txt"), sv = path_in(cfg.out_dir, "plots/improvement.svg");
  detail::write_file_text(sj, suite.dump(2) + "\n");
  detail::write_file_text(sc, csv.str());
  detail::write_file_text(st, txt.str());

  SvgLineChart chart("sparse-KD improvement by teacher prune ratio", "teacher prune ratio", "improvement (points)");
  SvgLineChart::Series fin{"final epoch", {}}, best{"best epoch", {}};
  for (const json& a : agg) {
    if (a["teacher_prune_ratio"].is_null()) continue;
    fin.points.emplace_back(a["teacher_prune_ratio"].get<double>(), a["improvement_mean"].get<double>());
    best.points.emplace_back(a["teacher_prune_ratio"].get<double>(), a["improvement_best_mean"].get<double>());
  }
  auto by_x = [](const auto& p, const auto& q) { return p.first < q.first; };
  std::sort(fin.points.begin(), fin.points.end(), by_x);
  std::sort(best.points.begin(), best.points.end(), by_x);
  chart.add_series(std::move(fin));
  chart.add_series(std::move(best));
  detail::write_file_text(sv, chart.render());
  record_outputs(cfg.out_dir, "run-suite",
                 {{sj, "suite"}, {sc, "suite-csv"}, {st, "suite-text"}, {sv, "plot"}});

  return {{"suite", sj}, {"aggregate", agg}, {"rows", rows}, {"text", txt.str()}};
}

// ---------------------------------------------------------------- dispatch

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"gen-data", "train", "prune", "distill", "eval", "report", "run-suite"};
  return names;
}

json run_command(const std::string& command, const json& options) {
  const ExperimentConfig cfg = ExperimentConfig::from_json(options);
  if (command == "gen-data") return cmd_gen_data(cfg);
  if (command == "train") return cmd_train(cfg);
  if (command == "prune") return cmd_prune(cfg);
  if (command == "distill") return cmd_distill(cfg);
  if (command == "eval") return cmd_eval(cfg);
  if (command == "report") return cmd_report(cfg);
  if (command == "run-suite") return cmd_run_suite(cfg);
  fail(ErrorKind::kUsage, "unknown command '" + command + "'");
}

}  // namespace srkd
