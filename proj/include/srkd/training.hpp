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

#ifndef SRKD_TRAINING_HPP_
#define SRKD_TRAINING_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "srkd/dataset.hpp"
#include "srkd/losses.hpp"
#include "srkd/network.hpp"

namespace srkd {

struct TrainOptions {
  double lr = 0.1;
  double momentum = 0.9;
  std::size_t batch_size = 32;
  std::size_t epochs = 30;
  std::uint64_t seed = 7;  // batch order stream; init is seeded by the caller
  // >1 fans evaluation out over threads; training itself is single-threaded.
  std::size_t threads = 1;

  void validate() const;
};

struct EpochMetrics {
  std::size_t epoch = 0;  // 0 is the evaluation before any update
  double train_loss = 0.0;
  double train_accuracy = 0.0;  // percent
  double test_accuracy = 0.0;   // percent
  double wall_seconds = 0.0;    // not serialized: breaks byte-identical reports

  friend bool operator==(const EpochMetrics&, const EpochMetrics&) = default;
};

struct TrainReport {
  std::string run_id;
  std::string kind;  // baseline | sparse | default
  nlohmann::json config = nlohmann::json::object();
  std::vector<EpochMetrics> epochs;
  std::optional<double> teacher_prune_ratio;
  std::optional<double> teacher_accuracy;  // percent

  double initial_test_accuracy() const;
  double final_test_accuracy() const;
  double final_train_accuracy() const;
  double best_test_accuracy() const;
  std::size_t best_epoch() const;  // earliest epoch reaching the best
  double total_wall_seconds() const;

  // Deterministic serializations (no wall-clock fields).
  std::string to_json() const;
  std::string to_csv() const;
  static TrainReport from_json(const std::string& text);
};

// Percent of samples whose argmax logit (lowest index on ties) matches the label.
double evaluate(const NetworkState& state, const NetworkSpec& spec, const DatasetHandle& data,
                const DatasetSplit& split, std::size_t threads = 1);

// Plain cross-entropy training (baseline / teacher pre-training).
TrainReport train_baseline(NetworkState& state, const NetworkSpec& spec, const DatasetHandle& data,
                           const TrainOptions& opt);

// A pruned (or unpruned) pre-trained network acting as teacher; read-only.
struct NetworkTeacher {
  const NetworkSpec* spec = nullptr;
  const NetworkState* state = nullptr;
  std::optional<double> prune_ratio;
};

using Teacher = std::variant<NetworkTeacher, VirtualTeacher>;

// Trains `student` against the mode-appropriate distillation loss. The
// teacher is never modified. In sparse mode the teacher must share the
// student's spec unless allow_heterogeneous is set.
TrainReport distill_train(NetworkState& student, const NetworkSpec& spec, const Teacher& teacher,
                          const DatasetHandle& data, const KDConfig& cfg, const TrainOptions& opt,
                          bool allow_heterogeneous = false);

}  // namespace srkd

#endif  // SRKD_TRAINING_HPP_
