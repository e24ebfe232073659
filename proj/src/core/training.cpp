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

#include "srkd/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "srkd/error.hpp"
#include "srkd/json_codec.hpp"
#include "srkd/snn.hpp"

namespace srkd {

using nlohmann::json;

void TrainOptions::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) fail(ErrorKind::kUsage, "learning rate must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) fail(ErrorKind::kUsage, "momentum must be in [0, 1)");
  if (batch_size == 0) fail(ErrorKind::kUsage, "batch size must be >= 1");
  if (threads == 0) fail(ErrorKind::kUsage, "threads must be >= 1");
}

double TrainReport::initial_test_accuracy() const {
  return epochs.empty() ? 0.0 : epochs.front().test_accuracy;
}

double TrainReport::final_test_accuracy() const { return epochs.empty() ? 0.0 : epochs.back().test_accuracy; }

double TrainReport::final_train_accuracy() const {
  return epochs.empty() ? 0.0 : epochs.back().train_accuracy;
}

double TrainReport::best_test_accuracy() const {
  double best = 0.0;
  for (const auto& e : epochs) best = std::max(best, e.test_accuracy);
  return best;
}

std::size_t TrainReport::best_epoch() const {
  const double best = best_test_accuracy();
  for (const auto& e : epochs) {
    if (e.test_accuracy == best) return e.epoch;
  }
  return 0;
}

double TrainReport::total_wall_seconds() const {
  double s = 0.0;
  for (const auto& e : epochs) s += e.wall_seconds;
  return s;
}

std::string TrainReport::to_json() const {
  json ep = json::array();
  for (const auto& e : epochs) {
    ep.push_back({{"epoch", e.epoch},
                  {"train_loss", e.train_loss},
                  {"train_acc", e.train_accuracy},
                  {"test_acc", e.test_accuracy}});
  }
  json j = {{"run_id", run_id},
            {"kind", kind},
            {"config", config},
            {"epochs", ep},
            {"final",
             {{"initial_test_acc", initial_test_accuracy()},
              {"final_test_acc", final_test_accuracy()},
              {"final_train_acc", final_train_accuracy()},
              {"best_test_acc", best_test_accuracy()},
              {"best_epoch", best_epoch()}}}};
  j["teacher"] = {{"prune_ratio", teacher_prune_ratio ? json(*teacher_prune_ratio) : json(nullptr)},
                  {"test_acc", teacher_accuracy ? json(*teacher_accuracy) : json(nullptr)}};
  return j.dump(2) + "\n";
}

std::string TrainReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "epoch,train_loss,train_acc,test_acc\n";
  for (const auto& e : epochs) {
    os << e.epoch << ',' << e.train_loss << ',' << e.train_accuracy << ',' << e.test_accuracy << '\n';
  }
  return os.str();
}

TrainReport TrainReport::from_json(const std::string& text) {
  TrainReport r;
  try {
    const json j = json::parse(text);
    r.run_id = j.at("run_id").get<std::string>();
    r.kind = j.at("kind").get<std::string>();
    r.config = j.value("config", json::object());
    for (const json& e : j.at("epochs")) {
      EpochMetrics m;
      m.epoch = e.at("epoch").get<std::size_t>();
      m.train_loss = e.at("train_loss").get<double>();
      m.train_accuracy = e.at("train_acc").get<double>();
      m.test_accuracy = e.at("test_acc").get<double>();
      r.epochs.push_back(m);
    }
    if (j.contains("teacher")) {
      const json& t = j.at("teacher");
      if (t.contains("prune_ratio") && !t.at("prune_ratio").is_null()) r.teacher_prune_ratio = t.at("prune_ratio").get<double>();
      if (t.contains("test_acc") && !t.at("test_acc").is_null()) r.teacher_accuracy = t.at("test_acc").get<double>();
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::kFormat, std::string("malformed train report: ") + e.what());
  }
  return r;
}

namespace {

std::size_t argmax(const Tensor& logits) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < logits.size(); ++i) {
    if (logits[i] > logits[best]) best = i;
  }
  return best;
}

double percent(std::size_t correct, std::size_t total) {
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(total);
}

void check_compatible(const NetworkSpec& spec, const DatasetHandle& data) {
  if (spec.input_shape != data.step_shape()) {
    fail(ErrorKind::kConfig, "network input " + shape_to_string(spec.input_shape) + " does not match data " +
                                 shape_to_string(data.step_shape()));
  }
  if (spec.num_classes() != data.num_classes) fail(ErrorKind::kConfig, "network and data class counts differ");
}

using LossFn = std::function<LossWithGrad(std::size_t sample, const Tensor& logits)>;

TrainReport run_training(NetworkState& state, const NetworkSpec& spec, const DatasetHandle& data,
                         const TrainOptions& opt, const LossFn& loss) {
  opt.validate();
  check_compatible(spec, data);
  using Clock = std::chrono::steady_clock;
  TrainReport report;
  const DatasetSplit& train = data.train;

  {
    const auto t0 = Clock::now();
    EpochMetrics m;
    double total = 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < train.size(); ++i) {
      const Tensor logits = forward_temporal(state, spec, data.network_input(train, i, spec.timesteps));
      total += loss(i, logits).value;
      correct += argmax(logits) == train.labels[i] ? 1 : 0;
    }
    m.train_loss = train.size() ? total / static_cast<double>(train.size()) : 0.0;
    m.train_accuracy = percent(correct, train.size());
    m.test_accuracy = evaluate(state, spec, data, data.test, opt.threads);
    m.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    report.epochs.push_back(m);
  }

  SgdOptimizer sgd(opt.lr, opt.momentum);
  ForwardTrace trace;
  for (std::size_t epoch = 1; epoch <= opt.epochs; ++epoch) {
    const auto t0 = Clock::now();
    const std::vector<std::size_t> order = epoch_order(train.size(), opt.seed, epoch);
    double total = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += opt.batch_size) {
      const std::size_t stop = std::min(order.size(), start + opt.batch_size);
      std::vector<Tensor> grads = zeros_like(state.params);
      for (std::size_t b = start; b < stop; ++b) {
        const std::size_t i = order[b];
        const Tensor logits =
            forward_temporal(state, spec, data.network_input(train, i, spec.timesteps), &trace);
        const LossWithGrad l = loss(i, logits);
        if (!std::isfinite(l.value)) fail(ErrorKind::kNumeric, "loss became non-finite in epoch " + std::to_string(epoch));
        total += l.value;
        correct += argmax(logits) == train.labels[i] ? 1 : 0;
        const std::vector<Tensor> g = backward_temporal(state, spec, trace, l.grad);
        for (std::size_t p = 0; p < grads.size(); ++p) add_inplace(grads[p], g[p]);
      }
      const double inv = 1.0 / static_cast<double>(stop - start);
      for (Tensor& g : grads) scale_inplace(g, inv);
      sgd.step(state, grads);
    }
    EpochMetrics m;
    m.epoch = epoch;
    m.train_loss = train.size() ? total / static_cast<double>(train.size()) : 0.0;
    m.train_accuracy = percent(correct, train.size());
    m.test_accuracy = evaluate(state, spec, data, data.test, opt.threads);
    m.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    report.epochs.push_back(m);
  }
  report.config["optimizer"] = {{"lr", opt.lr},
                                {"momentum", opt.momentum},
                                {"batch_size", opt.batch_size},
                                {"epochs", opt.epochs},
                                {"seed", opt.seed}};
  report.config["network"] = to_json(spec);
  report.config["dataset"] = json::parse(data.source);
  return report;
}

}  // namespace

double evaluate(const NetworkState& state, const NetworkSpec& spec, const DatasetHandle& data,
                const DatasetSplit& split, std::size_t threads) {
  check_compatible(spec, data);
  const std::size_t n = split.size();
  if (n == 0) return 0.0;
  auto count = [&](std::size_t lo, std::size_t hi) {
    std::size_t c = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      const Tensor logits = forward_temporal(state, spec, data.network_input(split, i, spec.timesteps));
      c += argmax(logits) == split.labels[i] ? 1 : 0;
    }
    return c;
  };
  std::size_t correct = 0;
  const std::size_t workers = std::min(std::max<std::size_t>(threads, 1), n);
  if (workers == 1) {
    correct = count(0, n);
  } else {
    std::vector<std::size_t> partial(workers, 0);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] { partial[w] = count(n * w / workers, n * (w + 1) / workers); });
    }
    for (auto& t : pool) t.join();
    for (std::size_t c : partial) correct += c;
  }
  return percent(correct, n);
}

TrainReport train_baseline(NetworkState& state, const NetworkSpec& spec, const DatasetHandle& data,
                           const TrainOptions& opt) {
  TrainReport r = run_training(state, spec, data, opt, [&](std::size_t i, const Tensor& logits) {
    return cross_entropy_loss(logits, data.train.labels[i]);
  });
  r.kind = "baseline";
  return r;
}

TrainReport distill_train(NetworkState& student, const NetworkSpec& spec, const Teacher& teacher,
                          const DatasetHandle& data, const KDConfig& cfg, const TrainOptions& opt,
                          bool allow_heterogeneous) {
  cfg.validate();
  TrainReport r;
  if (cfg.mode == KDMode::kSparse) {
    const auto* nt = std::get_if<NetworkTeacher>(&teacher);
    if (!nt || !nt->spec || !nt->state) fail(ErrorKind::kConfig, "sparse KD needs a network teacher");
    if (!allow_heterogeneous && !(*nt->spec == spec)) {
      fail(ErrorKind::kConfig, "sparse KD teacher and student must share the same network structure");
    }
    check_compatible(*nt->spec, data);
    // The teacher is frozen, so its logits per training sample are fixed.
    std::vector<Tensor> teacher_logits;
    teacher_logits.reserve(data.train.size());
    for (std::size_t i = 0; i < data.train.size(); ++i) {
      teacher_logits.push_back(
          forward_temporal(*nt->state, *nt->spec, data.network_input(data.train, i, nt->spec->timesteps)));
    }
    const double teacher_acc = evaluate(*nt->state, *nt->spec, data, data.test, opt.threads);
    r = run_training(student, spec, data, opt, [&](std::size_t i, const Tensor& logits) {
      return sparse_kd_loss_grad(logits, teacher_logits[i], data.train.labels[i], cfg);
    });
    r.teacher_prune_ratio = nt->prune_ratio.value_or(0.0);
    r.teacher_accuracy = teacher_acc;
    r.config["teacher"] = {{"type", "pruned-network"}, {"prune_ratio", r.teacher_prune_ratio.value()}};
  } else {
    const auto* vt = std::get_if<VirtualTeacher>(&teacher);
    if (!vt) fail(ErrorKind::kConfig, "default KD needs a virtual teacher");
    VirtualTeacher v = *vt;
    v.num_classes = data.num_classes;
    v.validate();
    std::vector<Tensor> dists;
    for (std::size_t c = 0; c < v.num_classes; ++c) dists.push_back(virtual_teacher_dist(v, c));
    r = run_training(student, spec, data, opt, [&](std::size_t i, const Tensor& logits) {
      const std::size_t y = data.train.labels[i];
      return default_kd_loss_grad(logits, dists[y], y, cfg);
    });
    r.teacher_accuracy = 100.0;  // the virtual teacher always ranks the true class first
    r.config["teacher"] = {{"type", "virtual"}, {"teacher_alpha", v.teacher_alpha}};
  }
  r.kind = to_string(cfg.mode);
  r.config["kd"] = to_json(cfg);
  return r;
}

}  // namespace srkd
