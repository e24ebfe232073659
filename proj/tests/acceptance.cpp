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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "srkd/events.hpp"
#include "srkd/gradcheck.hpp"
#include "srkd/harness.hpp"
#include "srkd/losses.hpp"
#include "srkd/ops.hpp"
#include "srkd/pruning.hpp"
#include "srkd/snn.hpp"
#include "support.hpp"

using namespace srkd;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome gradient_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  std::size_t nets = 0, largest = 0;
  for (std::size_t T : {1, 2, 4}) {
    for (int kind = 0; kind < 2; ++kind) {
      Rng rng(1000 + 10 * T + kind);
      const NetworkSpec s = kind == 0 ? testing::random_mlp_spec(rng, T) : testing::random_conv_spec(rng, T);
      NetworkState st = init_params(s, rng);
      testing::randomize_params(rng, st.params, kind == 0 ? 0.8 : 0.6);
      largest = std::max(largest, st.num_parameters());
      const Tensor x = testing::random_input(rng, s, 0, 1);
      const std::size_t y = rng.below(s.num_classes());
      ForwardTrace tr;
      const Tensor logits = forward_temporal(st, s, x, &tr, SpikeMode::kRelaxed);
      const auto grads = backward_temporal(st, s, tr, cross_entropy_loss(logits, y).grad);
      for (std::size_t p = 0; p < st.params.size(); ++p) {
        const auto fd = testing::ref_central_diff(
            [&](const std::vector<double>& w) {
              NetworkState tmp = st;
              tmp.params[p] = Tensor(st.params[p].shape(), w);
              return cross_entropy_loss(forward_temporal(tmp, s, x, nullptr, SpikeMode::kRelaxed), y).value;
            },
            st.params[p].values(), 1e-5);
        worst = std::max(worst, testing::ref_rel_error(grads[p].values(), fd));
      }
      ++nets;
    }
  }
  const double secs = seconds_since(t0);
  return {nets >= 5 && largest <= 1000 && worst < 1e-4 && secs < 60,
          fmt("%.0f networks, max relative error %.3g, %.1f s", static_cast<double>(nets), worst, secs) +
              fmt(", largest %.0f parameters", static_cast<double>(largest))};
}

Outcome loss_gradient_oracle() {
  Rng rng(2024);
  double worst = 0;
  for (int draw = 0; draw < 100; ++draw) {
    const std::size_t C = 2 + rng.below(9);
    KDConfig cfg;
    cfg.temperature = rng.uniform(0.5, 8.0);
    cfg.loss_alpha = rng.uniform();
    cfg.kl_direction = draw % 2 ? KLDirection::kStudentFirst : KLDirection::kTeacherFirst;
    cfg.harmonized = draw % 3 == 0;
    Tensor s({C}), t({C});
    for (double& v : s.data()) v = 2 * rng.normal();
    for (double& v : t.data()) v = 2 * rng.normal();
    const std::size_t y = rng.below(C);
    const Tensor p = virtual_teacher_dist({C, rng.uniform(0.91, 0.999)}, y);

    cfg.mode = KDMode::kSparse;
    const auto gs = sparse_kd_loss_grad(s, t, y, cfg);
    const auto fs_ = testing::ref_central_diff(
        [&](const std::vector<double>& z) { return sparse_kd_loss(Tensor({C}, z), t, y, cfg); }, s.values(), 1e-5);
    cfg.mode = KDMode::kDefault;
    const auto gd = default_kd_loss_grad(s, p, y, cfg);
    const auto fd = testing::ref_central_diff(
        [&](const std::vector<double>& z) { return default_kd_loss(Tensor({C}, z), p, y, cfg); }, s.values(), 1e-5);
    for (std::size_t i = 0; i < C; ++i) {
      worst = std::max(worst, std::fabs(gs.grad[i] - fs_[i]));
      worst = std::max(worst, std::fabs(gd.grad[i] - fd[i]));
    }
  }
  return {worst < 1e-6, fmt("100 draws, max abs deviation %.3g", worst)};
}

Outcome loss_identities() {
  Rng rng(77);
  bool ce_bitwise = true;
  double self_gap = 0, kl_ce_gap = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t C = 2 + rng.below(20);
    Tensor s({C}), t({C});
    for (double& v : s.data()) v = 3 * rng.normal();
    for (double& v : t.data()) v = 3 * rng.normal();
    const std::size_t y = rng.below(C);
    KDConfig cfg;
    cfg.temperature = rng.uniform(0.5, 8.0);
    cfg.loss_alpha = 0.0;
    ce_bitwise = ce_bitwise && sparse_kd_loss(s, t, y, cfg) == cross_entropy_loss(s, y).value;
    cfg.loss_alpha = 1.0;
    self_gap = std::max(self_gap, std::fabs(sparse_kd_loss(s, s, y, cfg)));
    Tensor onehot({C}, 0.0);
    onehot[y] = 1.0;
    const Tensor q = softmax_temperature(s, 1.0);
    kl_ce_gap = std::max(kl_ce_gap, std::fabs(kl_divergence(onehot, q) - cross_entropy(q, y)));
  }
  return {ce_bitwise && self_gap <= 1e-12 && kl_ce_gap <= 1e-12,
          std::string("alpha=0 equals CE bitwise: ") + (ce_bitwise ? "yes" : "no") +
              fmt(", self-distillation loss %.3g, KL/CE gap %.3g", self_gap, kl_ce_gap)};
}

Outcome virtual_teacher_exact() {
  std::size_t bad = 0, checked = 0;
  for (std::size_t C = 2; C <= 100; ++C)
    for (double a : {0.91, 0.95, 0.99})
      for (std::size_t target = 0; target < C; ++target) {
        const Tensor p = virtual_teacher_dist({C, a}, target);
        ++checked;
        bool ok = exact_sum(p.data()) == 1.0 && p[target] == a;
        const double off = p[target == 0 ? 1 : 0];
        for (std::size_t i = 0; i < C; ++i)
          if (i != target) ok = ok && p[i] == off;
        bad += !ok;
      }
  return {bad == 0, fmt("%.0f distributions, %.0f violations", static_cast<double>(checked), static_cast<double>(bad))};
}

Outcome pruning_exact() {
  const NetworkSpec spec = make_preset(NetworkPreset::kSmallConv, {1, 8, 8}, 4, 4);
  std::size_t combos = 0, failures = 0;
  for (double ratio : ExperimentConfig{}.grid)
    for (PruneScope scope : {PruneScope::kConvOnly, PruneScope::kAllWeighted})
      for (PruneRanking ranking : {PruneRanking::kGlobal, PruneRanking::kPerLayer}) {
        ++combos;
        Rng rng(300 + combos);
        NetworkState st = init_params(spec, rng);
        const PruneMask m = compute_mask(spec, st, ratio, scope, ranking);
        bool ok = true;
        std::size_t zeros = 0, total = 0, expect = 0;
        for (const auto& e : m.entries) {
          std::size_t z = 0;
          for (double v : e.mask.data()) z += v == 0.0;
          zeros += z;
          total += e.mask.size();
          if (ranking == PruneRanking::kPerLayer)
            expect += static_cast<std::size_t>(std::floor(ratio * static_cast<double>(e.mask.size())));
        }
        if (ranking == PruneRanking::kGlobal) expect = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(total)));
        ok = ok && zeros == expect;

        NetworkState masked = st, pre = st;
        attach_mask(masked, m);
        for (const auto& e : m.entries) pre.params[e.param_index] = apply_mask(st.params[e.param_index], e.mask);
        for (int i = 0; i < 3; ++i) {
          const Tensor x = testing::random_input(rng, spec, 0, 1);
          ok = ok && forward_temporal(masked, spec, x) == forward_temporal(pre, spec, x);
        }

        SgdOptimizer opt(0.1, 0.9);
        for (int step = 0; step < 100; ++step) {
          const Tensor x = testing::random_input(rng, spec, 0, 1);
          ForwardTrace tr;
          const Tensor logits = forward_temporal(masked, spec, x, &tr);
          opt.step(masked, backward_temporal(masked, spec, tr, cross_entropy_loss(logits, rng.below(4)).grad));
        }
        for (const auto& e : m.entries)
          for (std::size_t i = 0; i < e.mask.size(); ++i)
            if (e.mask[i] == 0.0) ok = ok && masked.params[e.param_index][i] == 0.0;
        failures += !ok;
      }
  return {failures == 0, fmt("%.0f (ratio, scope, ranking) combinations, %.0f failures", static_cast<double>(combos),
                             static_cast<double>(failures))};
}

Outcome if_rate_law() {
  const IFConfig cfg;
  std::string detail;
  bool ok = true;
  for (double c : {0.25, 0.5, 1.0}) {
    const int period = static_cast<int>(std::ceil(cfg.v_threshold / c));
    Tensor v = Tensor::vector({cfg.v_reset});
    int last = 0, count = 0;
    for (int t = 1; t <= 100; ++t) {
      const auto r = if_step(v, Tensor::vector({c}), cfg);
      v = r.v_new;
      if (r.spikes[0] == 1.0) {
        ok = ok && t - last == period;
        last = t;
        ++count;
      }
    }
    ok = ok && count == 100 / period;
    detail += (detail.empty() ? "" : ", ") + fmt("c=%g period %.0f", c, period * 1.0);
  }
  return {ok, detail + " over 100 steps"};
}

Outcome event_conservation() {
  Rng rng(555);
  std::size_t bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t w = 1 + rng.below(8), h = 1 + rng.below(8), T = 1 + rng.below(16);
    const std::uint64_t window = 1 + rng.below(500);
    const auto ev = testing::random_events(rng, w, h, rng.below(200), 2 * T * window);
    const Tensor f = integrate_events(ev, w, h, T, window, FrameNormalization::kRaw);
    std::size_t in_span = 0;
    for (const auto& e : ev) in_span += e.t < T * window;
    bad += exact_sum(f.data()) != static_cast<double>(in_span);
  }
  return {bad == 0, fmt("1000 streams, %.0f mismatches", static_cast<double>(bad))};
}

Outcome desk_experiment(const fs::path& work) {
  const fs::path dir = work / "desk";
  fs::remove_all(dir);
  const unsigned threads = std::max(1u, std::min(5u, std::thread::hardware_concurrency()));
  const json out = run_command("run-suite", {{"seeds", {1, 2, 3, 4, 5}},
                                             {"grid", {0.1}},
                                             {"teacher_alpha", 0.91},
                                             {"preset", "mlp"},
                                             {"timesteps", 4},
                                             {"epochs", 30},
                                             {"threads", threads},
                                             {"out_dir", dir.string()}});
  double min_base = 100, sparse_sum = 0, default_sum = 0, slowest = 0;
  std::size_t ns = 0, nd = 0;
  for (const json& r : out["rows"]) {
    min_base = std::min(min_base, r["baseline_accuracy"].get<double>());
    if (r["mode"] == "sparse") {
      sparse_sum += r["improvement"].get<double>();
      ++ns;
    } else {
      default_sum += r["improvement"].get<double>();
      ++nd;
    }
  }
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > 12 && name.substr(name.size() - 12) == ".timing.json")
      slowest = std::max(slowest, json::parse(read(entry.path()))["total_wall_seconds"].get<double>());
  }
  const double ms = ns ? sparse_sum / static_cast<double>(ns) : -100;
  const double md = nd ? default_sum / static_cast<double>(nd) : -100;
  const bool ok = ns == 5 && nd == 5 && min_base >= 90 && ms > -0.5 && md > -0.5 && slowest < 300;
  return {ok, fmt("min baseline %.2f%%, mean improvement sparse r=0.1 %+.2f, default a=0.91 %+.2f", min_base, ms, md) +
                  fmt(", slowest run %.1f s", slowest)};
}

Outcome suite_determinism(const fs::path& work) {
  const std::string flags =
      " run-suite --seeds 1,2 --grid 0,0.1 --epochs 2 --train-per-class 30 --test-per-class 15 --threads 2";
  std::vector<fs::path> dirs{work / "det-a", work / "det-b"};
  for (const fs::path& d : dirs) {
    fs::remove_all(d);
    const std::string cmd = std::string("'") + SRKD_CLI_PATH + "' --out-dir '" + d.string() + "'" + flags + " > /dev/null";
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return {false, "run-suite exited abnormally"};
  }
  std::size_t compared = 0, differ = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dirs[0])) {
    const std::string name = entry.path().filename().string();
    const bool report = name.ends_with(".json") || name.ends_with(".csv");
    if (!entry.is_regular_file() || !report || name.ends_with(".timing.json") || name == "run-manifest.json") continue;
    const fs::path other = dirs[1] / fs::relative(entry.path(), dirs[0]);
    ++compared;
    differ += !fs::exists(other) || read(entry.path()) != read(other);
  }
  return {compared > 0 && differ == 0,
          fmt("%.0f report files compared, %.0f differ", static_cast<double>(compared), static_cast<double>(differ))};
}

Outcome timestep_parity() {
  ExperimentConfig cfg;
  cfg.train_per_class = 2;
  cfg.test_per_class = 1;
  const std::size_t static_t = build_network(cfg, generate_dataset(cfg, 1)).timesteps;
  cfg.kind = "spike-patterns";
  const std::size_t event_t = build_network(cfg, generate_dataset(cfg, 1)).timesteps;
  return {static_t == 4 && event_t == 16,
          fmt("static %.0f, event %.0f", static_cast<double>(static_t), static_cast<double>(event_t))};
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / "srkd-acceptance";
  fs::create_directories(work);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient-oracle", gradient_oracle},
      {"loss-gradient-oracle", loss_gradient_oracle},
      {"loss-identities", loss_identities},
      {"virtual-teacher-exactness", virtual_teacher_exact},
      {"pruning-exactness", pruning_exact},
      {"if-rate-law", if_rate_law},
      {"event-conservation", event_conservation},
      {"desk-scale-experiment", [&] { return desk_experiment(work); }},
      {"run-suite-determinism", [&] { return suite_determinism(work); }},
      {"timestep-parity", timestep_parity},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
