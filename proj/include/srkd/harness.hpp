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

#ifndef SRKD_HARNESS_HPP_
#define SRKD_HARNESS_HPP_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "srkd/dataset.hpp"
#include "srkd/losses.hpp"
#include "srkd/network.hpp"
#include "srkd/pruning.hpp"
#include "srkd/synthetic.hpp"
#include "srkd/training.hpp"

namespace srkd {

// Flat option set shared by every command. JSON keys are the field names;
// the CLI maps `--some-flag` to `some_flag`.
struct ExperimentConfig {
  // dataset: a file, or generator parameters
  std::string data;
  std::string kind = "blobs";  // blobs | spike-patterns | events
  std::size_t classes = 4;
  std::size_t train_per_class = 200;
  std::size_t test_per_class = 100;
  std::size_t channels = 1;
  std::size_t height = 8;
  std::size_t width = 8;
  double noise = 0.1;
  std::size_t frame_window = 1000;  // microseconds per event frame
  std::string events_index;         // lines of `split,label,csv_path`
  std::uint64_t data_seed = 7;

  // network
  NetworkPreset preset = NetworkPreset::kMlp;
  std::size_t timesteps = 0;  // 0: dataset default (4 static, 16 event)
  IFConfig neuron{1.0, 0.0, SurrogateKind::kArctangent, 1.0, 2.0};

  // optimisation
  double lr = 0.1;
  double momentum = 0.9;
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  std::uint64_t seed = 7;
  std::size_t threads = 1;

  // distillation
  KDConfig kd{};
  double teacher_alpha = 0.91;
  std::string teacher;

  // pruning
  std::optional<double> ratio;
  std::vector<double> grid{0.0, 0.1, 0.3, 0.5, 0.7};
  std::string prune_scope = "auto";  // auto | conv | all
  PruneRanking prune_ranking = PruneRanking::kGlobal;

  // suite / io
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::string out_dir = ".";
  std::string output;
  std::string model;
  std::string name;
  std::string run_dir;
  bool resume = false;

  std::set<std::string> given;  // keys present in the source JSON

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
  bool has(const std::string& key) const { return given.count(key) != 0; }
};

struct ComparisonRow {
  std::string dataset;
  std::string model;
  std::string mode;  // sparse | default
  std::string run_id;
  std::optional<double> teacher_prune_ratio;
  double teacher_accuracy = 0.0;
  double baseline_accuracy = 0.0;  // final epoch
  double kd_accuracy = 0.0;
  double improvement = 0.0;
  double baseline_best = 0.0;  // best epoch
  double kd_best = 0.0;
  double improvement_best = 0.0;

  nlohmann::json to_json() const;
};

ComparisonRow make_row(const TrainReport& baseline, const TrainReport& kd);
// (model, prune ratio) with virtual-teacher rows after every ratio.
void sort_rows(std::vector<ComparisonRow>& rows);
std::string rows_to_csv(const std::vector<ComparisonRow>& rows);
std::string rows_to_text(const std::vector<ComparisonRow>& rows);

// Shortest round-trip decimal form.
std::string format_number(double v);

NetworkSpec build_network(const ExperimentConfig& cfg, const DatasetHandle& data);
PruneScope resolve_prune_scope(const std::string& scope, const NetworkSpec& spec);
// Parameters for a run seed; students and their baseline share this init.
NetworkState initial_state(const NetworkSpec& spec, std::uint64_t seed);
DatasetHandle generate_dataset(const ExperimentConfig& cfg, std::uint64_t seed);

nlohmann::json cmd_gen_data(const ExperimentConfig& cfg);
nlohmann::json cmd_train(const ExperimentConfig& cfg);
nlohmann::json cmd_prune(const ExperimentConfig& cfg);
nlohmann::json cmd_distill(const ExperimentConfig& cfg);
nlohmann::json cmd_eval(const ExperimentConfig& cfg);
nlohmann::json cmd_report(const ExperimentConfig& cfg);
nlohmann::json cmd_run_suite(const ExperimentConfig& cfg);

// Dispatches by subcommand name; the result always carries a "text" summary.
nlohmann::json run_command(const std::string& command, const nlohmann::json& options);
const std::vector<std::string>& command_names();

}  // namespace srkd

#endif  // SRKD_HARNESS_HPP_
