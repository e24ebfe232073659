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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "srkd/checkpoint.hpp"
#include "srkd/harness.hpp"
#include "srkd/snn.hpp"
#include "srkd/svg.hpp"
#include "support.hpp"

using namespace srkd;
using srkd::testing::throws_kind;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("srkd-harness-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Small, quick dataset for command tests.
std::string small_data(const fs::path& dir) {
  run_command("gen-data", {{"train_per_class", 20}, {"test_per_class", 10}, {"out_dir", dir.string()},
                           {"output", "d.srkd"}});
  return (dir / "d.srkd").string();
}

TrainReport fake_report(const std::string& id, const std::string& kind, std::vector<double> test_acc,
                        std::optional<double> ratio = std::nullopt, const std::string& preset = "mlp") {
  TrainReport r;
  r.run_id = id;
  r.kind = kind;
  r.config = {{"preset", preset}, {"dataset", {{"generator", "blobs"}}}, {"network", "n"}};
  for (std::size_t e = 0; e < test_acc.size(); ++e) r.epochs.push_back({e, 1.0, test_acc[e], test_acc[e], 0});
  if (kind != "baseline") r.teacher_accuracy = 90.0;
  if (kind == "sparse") r.teacher_prune_ratio = ratio.value_or(0.0);
  return r;
}

void put(const fs::path& dir, const TrainReport& r) {
  std::ofstream(dir / (r.run_id + ".report.json")) << r.to_json();
}

}  // namespace

TEST_CASE("ExperimentConfig parsing and validation") {
  const ExperimentConfig d = ExperimentConfig::from_json(json::object());
  CHECK(d.grid == std::vector<double>{0.0, 0.1, 0.3, 0.5, 0.7});
  CHECK(d.lr == 0.1);
  CHECK(d.momentum == 0.9);
  CHECK(d.batch_size == 32);
  CHECK(d.epochs == 30);
  CHECK(d.kd.temperature == 4.0);
  CHECK(d.kd.loss_alpha == 0.9);
  CHECK(d.neuron.surrogate == SurrogateKind::kArctangent);
  CHECK(throws_kind([] { (void)ExperimentConfig::from_json({{"bogus", 1}}); }, ErrorKind::kUsage));
  CHECK(throws_kind([] { (void)ExperimentConfig::from_json({{"epochs", "many"}}); }, ErrorKind::kUsage));
  CHECK(throws_kind([] { ExperimentConfig::from_json({{"grid", {0.1, 1.5}}}).validate(); }, ErrorKind::kUsage));
  CHECK(throws_kind([] { ExperimentConfig::from_json({{"ratio", 1.5}}).validate(); }, ErrorKind::kUsage));
  CHECK(throws_kind([] { ExperimentConfig::from_json({{"data", "/nonexistent/x.srkd"}}).validate(); },
                    ErrorKind::kIo));
  const ExperimentConfig c = ExperimentConfig::from_json({{"seeds", {3, 4}}, {"preset", "small-conv"}});
  CHECK(c.seeds == std::vector<std::uint64_t>{3, 4});
  CHECK(c.has("preset"));
  CHECK(!c.has("seed"));
  CHECK(ExperimentConfig::from_json(c.to_json()).to_json() == c.to_json());
}

TEST_CASE("harness timesteps default to 4 for static data and 16 for event data") {
  ExperimentConfig cfg;
  cfg.train_per_class = 2;
  cfg.test_per_class = 1;
  const DatasetHandle blobs = generate_dataset(cfg, 1);
  CHECK(build_network(cfg, blobs).timesteps == 4);
  cfg.kind = "spike-patterns";
  const DatasetHandle ev = generate_dataset(cfg, 1);
  CHECK(build_network(cfg, ev).timesteps == 16);
  cfg.timesteps = 4;
  CHECK(throws_kind([&] { (void)build_network(cfg, ev); }, ErrorKind::kConfig));
}

TEST_CASE("prune scope auto follows the architecture") {
  const NetworkSpec mlp = make_preset(NetworkPreset::kMlp, {1, 8, 8}, 4, 4);
  const NetworkSpec conv = make_preset(NetworkPreset::kSmallConv, {1, 8, 8}, 4, 4);
  CHECK(resolve_prune_scope("auto", mlp) == PruneScope::kAllWeighted);
  CHECK(resolve_prune_scope("auto", conv) == PruneScope::kConvOnly);
  CHECK(resolve_prune_scope("all", conv) == PruneScope::kAllWeighted);
}

TEST_CASE("comparison rows: improvement arithmetic and ordering") {
  const TrainReport base = fake_report("baseline", "baseline", {25, 90, 87.5});
  const TrainReport kd = fake_report("sparse-r0.1", "sparse", {25, 91.25, 88.75}, 0.1);
  const ComparisonRow r = make_row(base, kd);
  CHECK(r.improvement == 88.75 - 87.5);
  CHECK(r.improvement_best == 91.25 - 90);
  CHECK(r.teacher_prune_ratio == 0.1);
  std::vector<ComparisonRow> rows{make_row(base, fake_report("default-a0.91", "default", {1, 2})),
                                  make_row(base, fake_report("s5", "sparse", {1, 2}, 0.5)),
                                  make_row(base, fake_report("s0", "sparse", {1, 2}, 0.0)),
                                  make_row(base, fake_report("c1", "sparse", {1, 2}, 0.1, "small-conv"))};
  sort_rows(rows);
  CHECK(rows[0].model == "mlp");
  CHECK(rows[0].run_id == "s0");
  CHECK(rows[1].run_id == "s5");
  CHECK(rows[2].mode == "default");
  CHECK(rows[3].model == "small-conv");
  CHECK(rows_to_csv(rows).rfind("dataset,model,mode,", 0) == 0);
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(87.5) == "87.5");
}

TEST_CASE("cmd_report examples") {
  SUBCASE("one baseline and one distilled run give one row") {
    const fs::path dir = scratch("report-one");
    put(dir, fake_report("baseline", "baseline", {25, 80}));
    put(dir, fake_report("default-a0.91", "default", {25, 82.5}));
    const json out = run_command("report", {{"run_dir", dir.string()}});
    REQUIRE(out["rows"].size() == 1);
    CHECK(out["rows"][0]["improvement"].get<double>() == 82.5 - 80);
    CHECK(fs::exists(dir / "comparison.csv"));
    CHECK(fs::exists(dir / "comparison.txt"));
    CHECK(fs::exists(dir / "plots" / "baseline.svg"));
    CHECK(fs::exists(dir / "plots" / "test-accuracy.svg"));
    CHECK(fs::exists(dir / "run-manifest.json"));
  }
  SUBCASE("full grid gives five rows in ratio order, improvement from the reports") {
    const fs::path dir = scratch("report-grid");
    put(dir, fake_report("baseline", "baseline", {25, 80}));
    const std::vector<double> grid{0.7, 0.0, 0.3, 0.1, 0.5};
    for (double g : grid) put(dir, fake_report("sparse-r" + format_number(g), "sparse", {25, 80 + 10 * g}, g));
    const json out = run_command("report", {{"run_dir", dir.string()}});
    REQUIRE(out["rows"].size() == 5);
    double prev = -1;
    for (const json& row : out["rows"]) {
      const double ratio = row["teacher_prune_ratio"].get<double>();
      CHECK(ratio > prev);
      prev = ratio;
      CHECK(row["improvement"].get<double>() == row["kd_accuracy"].get<double>() - row["baseline_accuracy"].get<double>());
    }
    const std::string first = read(dir / "comparison.csv");
    run_command("report", {{"run_dir", dir.string()}});
    CHECK(read(dir / "comparison.csv") == first);
  }
  SUBCASE("errors") {
    const fs::path empty = scratch("report-empty");
    CHECK(throws_kind([&] { (void)run_command("report", {{"run_dir", empty.string()}}); }, ErrorKind::kIo));
    CHECK(throws_kind([&] { (void)run_command("report", {{"run_dir", (empty / "missing").string()}}); }, ErrorKind::kIo));
    const fs::path nobase = scratch("report-nobase");
    put(nobase, fake_report("sparse-r0", "sparse", {25, 80}, 0.0));
    try {
      (void)run_command("report", {{"run_dir", nobase.string()}});
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kUsage);
      CHECK(std::string(e.what()).find("baseline.report.json") != std::string::npos);
    }
  }
}

TEST_CASE("svg output is deterministic and escaped") {
  SvgLineChart c("a < b & c", "x", "y");
  c.add_series({"s", {{0, 1}, {1, 2}}});
  const std::string svg = c.render();
  CHECK(svg.rfind("<svg ", 0) == 0);
  CHECK(svg.find("a &lt; b &amp; c") != std::string::npos);
  CHECK(svg == c.render());
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("gen-data: valid file, byte-identical repeats, usage errors") {
  const fs::path dir = scratch("gen");
  run_command("gen-data", {{"kind", "blobs"}, {"classes", 4}, {"seed", 7}, {"out_dir", dir.string()}, {"output", "a.srkd"}});
  run_command("gen-data", {{"kind", "blobs"}, {"classes", 4}, {"seed", 7}, {"out_dir", dir.string()}, {"output", "b.srkd"}});
  const std::string a = read(dir / "a.srkd");
  CHECK(a.substr(0, 4) == "SRKD");
  CHECK(a == read(dir / "b.srkd"));
  CHECK(throws_kind([&] { (void)run_command("gen-data", {{"classes", 1}, {"out_dir", dir.string()}}); },
                    ErrorKind::kUsage));
  CHECK(throws_kind([&] { (void)run_command("gen-data", {{"kind", "nope"}, {"out_dir", dir.string()}}); },
                    ErrorKind::kUsage));
}

TEST_CASE("gen-data imports event CSV streams through an index") {
  const fs::path dir = scratch("events");
  Rng rng(3);
  std::ofstream idx(dir / "index.csv");
  idx << "split,label,csv_path\n";
  for (int i = 0; i < 6; ++i) {
    const std::string name = "s" + std::to_string(i) + ".csv";
    write_event_csv({6, 5, srkd::testing::random_events(rng, 6, 5, 40, 16000)}, (dir / name).string());
    idx << (i < 4 ? "train" : "test") << "," << i % 2 << "," << name << "\n";
  }
  idx.close();
  const json out = run_command("gen-data", {{"kind", "events"},
                                            {"events_index", (dir / "index.csv").string()},
                                            {"out_dir", dir.string()},
                                            {"output", "ev.srkd"}});
  CHECK(out["train"] == 4);
  CHECK(out["test"] == 2);
  CHECK(out["natural_timesteps"] == 16);
  const DatasetHandle d = load_dataset((dir / "ev.srkd").string());
  CHECK(d.sample_shape == Shape{16, 2, 5, 6});
  CHECK(d.num_classes == 2);
}

TEST_CASE("train, prune, distill and eval commands") {
  const fs::path dir = scratch("pipeline");
  const std::string data = small_data(dir);
  const json common = {{"data", data}, {"out_dir", dir.string()}, {"epochs", 2}, {"seed", 3}};

  json o = common;
  o["epochs"] = 0;
  o["name"] = "eval-only";
  run_command("train", o);
  CHECK(TrainReport::from_json(read(dir / "eval-only.report.json")).epochs.size() == 1);

  run_command("train", common);
  const std::string first = read(dir / "baseline.report.json");
  CHECK(read(dir / "baseline.report.csv").rfind("epoch,", 0) == 0);
  run_command("train", common);
  CHECK(read(dir / "baseline.report.json") == first);
  CHECK(throws_kind([&] { (void)run_command("train", {{"data", (dir / "none.srkd").string()}}); }, ErrorKind::kIo));
  std::ofstream(dir / "garbage.srkd") << "not a dataset";
  CHECK(throws_kind([&] { (void)run_command("train", {{"data", (dir / "garbage.srkd").string()}}); },
                    ErrorKind::kFormat));

  const std::string base = (dir / "baseline.ckpt").string();
  run_command("prune", {{"model", base}, {"ratio", 0.0}, {"out_dir", dir.string()}});
  const Checkpoint ck = load_checkpoint(base), p0 = load_checkpoint((dir / "teacher-r0.ckpt").string());
  const DatasetHandle d = load_dataset(data);
  for (std::size_t i = 0; i < 10; ++i) {
    const Tensor x = d.network_input(d.test, i, ck.spec.timesteps);
    CHECK(forward_temporal(ck.state, ck.spec, x) == forward_temporal(p0.state, p0.spec, x));
  }
  const json half = run_command("prune", {{"model", base}, {"ratio", 0.5}, {"out_dir", dir.string()}});
  CHECK(std::fabs(half["sparsity"].get<double>() - 0.5) <= 1.0 / half["total"].get<double>());
  CHECK(throws_kind([&] { (void)run_command("prune", {{"model", base}, {"ratio", 1.5}}); }, ErrorKind::kUsage));

  json s = common;
  s["teacher"] = (dir / "teacher-r0.ckpt").string();
  const json sr = run_command("distill", s);
  CHECK(sr["run_id"] == "sparse-r0");
  const TrainReport srep = TrainReport::from_json(read(dir / "sparse-r0.report.json"));
  CHECK(srep.teacher_prune_ratio == 0.0);
  CHECK(srep.config["kd"]["mode"] == "sparse");
  CHECK(srep.config["optimizer"]["lr"] == 0.1);

  json m = common;
  m["mode"] = "sparse";
  CHECK(throws_kind([&] { (void)run_command("distill", m); }, ErrorKind::kUsage));

  json v = common;
  v["mode"] = "default";
  v["teacher_alpha"] = 0.91;
  run_command("distill", v);
  const TrainReport vrep = TrainReport::from_json(read(dir / "default-a0.91.report.json"));
  CHECK(vrep.config["teacher"]["teacher_alpha"] == 0.91);
  // the epoch-0 loss must be the mean default-KD loss against the closed-form teacher
  const NetworkSpec spec = build_network(ExperimentConfig::from_json(v), d);
  const NetworkState init = initial_state(spec, 3);
  KDConfig kd;
  kd.mode = KDMode::kDefault;
  double total = 0;
  for (std::size_t i = 0; i < d.train.size(); ++i) {
    const Tensor logits = forward_temporal(init, spec, d.network_input(d.train, i, spec.timesteps));
    total += default_kd_loss(logits, virtual_teacher_dist({4, 0.91}, d.train.labels[i]), d.train.labels[i], kd);
  }
  CHECK(vrep.epochs[0].train_loss == doctest::Approx(total / static_cast<double>(d.train.size())).epsilon(1e-12));
  v["teacher_alpha"] = 0.5;
  CHECK(throws_kind([&] { (void)run_command("distill", v); }, ErrorKind::kParameter));

  const json ev = run_command("eval", {{"model", (dir / "teacher-r0.5.ckpt").string()}, {"data", data}});
  CHECK(ev.contains("sparsity"));
  const json rep = run_command("report", {{"run_dir", dir.string()}});
  CHECK(rep["rows"].size() == 2);
}

TEST_CASE("run-suite composition, self-teacher grid and resume") {
  const fs::path dir = scratch("suite");
  const json opts = {{"seeds", {1, 2, 3}}, {"grid", {0, 0.1}}, {"epochs", 1},
                     {"train_per_class", 10}, {"test_per_class", 5}, {"out_dir", dir.string()}};
  const json out = run_command("run-suite", opts);
  CHECK(out["rows"].size() == 9);
  std::size_t sparse = 0, dflt = 0;
  for (const json& r : out["rows"]) (r["mode"] == "sparse" ? sparse : dflt) += 1;
  CHECK(sparse == 6);
  CHECK(dflt == 3);
  CHECK(out["aggregate"].size() == 3);
  for (const json& a : out["aggregate"]) CHECK(a["seeds"] == 3);
  const std::string suite = read(dir / "suite.json"), csv = read(dir / "suite.csv");

  fs::remove(dir / "seed-2" / "sparse-r0.1.report.json");
  fs::remove(dir / "seed-3" / "baseline.ckpt");
  json again = opts;
  again["resume"] = true;
  run_command("run-suite", again);
  CHECK(read(dir / "suite.json") == suite);
  CHECK(read(dir / "suite.csv") == csv);

  const fs::path self = scratch("suite-self");
  json g0 = opts;
  g0["grid"] = {0};
  g0["seeds"] = {1};
  g0["out_dir"] = self.string();
  const json o0 = run_command("run-suite", g0);
  for (const json& r : o0["rows"]) {
    if (r["mode"] == "sparse") CHECK(r["teacher_prune_ratio"] == 0.0);
  }
  CHECK(o0["rows"].size() == 2);
}
