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
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "srkd/srkd.h"

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  srkd_string_free(s);
  return out;
}

const char* kSmall = R"({"train_per_class": 10, "test_per_class": 5, "classes": 3})";

}  // namespace

TEST_CASE("status names and exit codes") {
  CHECK(std::string(srkd_version()) == "0.1.0");
  CHECK(std::string(srkd_status_name(SRKD_OK)) == "ok");
  CHECK(srkd_exit_code(SRKD_OK) == 0);
  CHECK(srkd_exit_code(SRKD_ERR_USAGE) == 1);
  CHECK(srkd_exit_code(SRKD_ERR_PARAMETER) == 1);
  CHECK(srkd_exit_code(SRKD_ERR_IO) == 2);
  CHECK(srkd_exit_code(SRKD_ERR_FORMAT) == 2);
  CHECK(srkd_exit_code(SRKD_ERR_NUMERIC) == 3);
  CHECK(srkd_exit_code(SRKD_ERR_DIVERGENCE) == 3);
  std::string names;
  for (const char* p = srkd_command_names(); *p; p += std::strlen(p) + 1) names += std::string(p) + " ";
  CHECK(names == "gen-data train prune distill eval report run-suite ");
}

TEST_CASE("null arguments and bad options are reported, not crashed on") {
  srkd_dataset* d = nullptr;
  CHECK(srkd_dataset_generate(kSmall, nullptr) == SRKD_ERR_NULL_ARGUMENT);
  CHECK(srkd_dataset_generate("{not json", &d) == SRKD_ERR_USAGE);
  CHECK(d == nullptr);
  CHECK(std::string(srkd_last_error()).find("JSON") != std::string::npos);
  CHECK(srkd_dataset_generate(R"({"classes": 1})", &d) == SRKD_ERR_USAGE);
  CHECK(srkd_dataset_load("/nonexistent/file.srkd", &d) == SRKD_ERR_IO);
  CHECK(std::strlen(srkd_last_error()) > 0);
  char* out = nullptr;
  CHECK(srkd_run_command("no-such-command", "{}", &out) == SRKD_ERR_USAGE);
  CHECK(out == nullptr);
  srkd_dataset_free(nullptr);
  srkd_model_free(nullptr);
  srkd_report_free(nullptr);
  srkd_string_free(nullptr);
}

TEST_CASE("dataset, model, train, prune and distill through handles") {
  srkd_dataset* d = nullptr;
  REQUIRE(srkd_dataset_generate(kSmall, &d) == SRKD_OK);
  size_t ntrain = 0, ntest = 0;
  REQUIRE(srkd_dataset_size(d, SRKD_SPLIT_TRAIN, &ntrain) == SRKD_OK);
  REQUIRE(srkd_dataset_size(d, SRKD_SPLIT_TEST, &ntest) == SRKD_OK);
  CHECK(ntrain == 30);
  CHECK(ntest == 15);
  char* info = nullptr;
  REQUIRE(srkd_dataset_info(d, &info) == SRKD_OK);
  CHECK(json::parse(take(info))["classes"] == 3);

  const fs::path dir = fs::temp_directory_path() / "srkd-capi";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string dpath = (dir / "d.srkd").string();
  REQUIRE(srkd_dataset_save(d, dpath.c_str()) == SRKD_OK);
  srkd_dataset* d2 = nullptr;
  REQUIRE(srkd_dataset_load(dpath.c_str(), &d2) == SRKD_OK);

  srkd_model* m = nullptr;
  REQUIRE(srkd_model_create(d, R"({"preset": "mlp"})", 5, &m) == SRKD_OK);
  std::vector<double> logits(3);
  REQUIRE(srkd_model_forward(m, d, SRKD_SPLIT_TEST, 0, logits.data(), logits.size()) == SRKD_OK);
  CHECK(srkd_model_forward(m, d, SRKD_SPLIT_TEST, 0, logits.data(), 2) == SRKD_ERR_DIMENSION);
  CHECK(srkd_model_forward(m, d, SRKD_SPLIT_TEST, ntest, logits.data(), 3) == SRKD_ERR_INDEX);

  srkd_report* rep = nullptr;
  REQUIRE(srkd_train(m, d, R"({"epochs": 3})", &rep) == SRKD_OK);
  double acc = -1, final_acc = -1;
  REQUIRE(srkd_model_evaluate(m, d2, SRKD_SPLIT_TEST, 1, &acc) == SRKD_OK);
  REQUIRE(srkd_report_final_accuracy(rep, &final_acc) == SRKD_OK);
  CHECK(acc == final_acc);
  char* csv = nullptr;
  REQUIRE(srkd_report_csv(rep, &csv) == SRKD_OK);
  CHECK(take(csv).rfind("epoch,", 0) == 0);
  srkd_report_free(rep);

  const std::string mpath = (dir / "m.ckpt").string();
  REQUIRE(srkd_model_save(m, mpath.c_str()) == SRKD_OK);
  srkd_model* loaded = nullptr;
  REQUIRE(srkd_model_load(mpath.c_str(), &loaded) == SRKD_OK);
  std::vector<double> a(3), b(3);
  REQUIRE(srkd_model_forward(m, d, SRKD_SPLIT_TEST, 1, a.data(), 3) == SRKD_OK);
  REQUIRE(srkd_model_forward(loaded, d, SRKD_SPLIT_TEST, 1, b.data(), 3) == SRKD_OK);
  CHECK(a == b);

  srkd_model* teacher = nullptr;
  REQUIRE(srkd_model_clone(m, &teacher) == SRKD_OK);
  double sparsity = -1;
  CHECK(srkd_model_prune(teacher, 1.5, "all", "global", &sparsity) == SRKD_ERR_PARAMETER);
  REQUIRE(srkd_model_prune(teacher, 0.5, "all", "global", &sparsity) == SRKD_OK);
  char* minfo = nullptr;
  REQUIRE(srkd_model_info(teacher, &minfo) == SRKD_OK);
  const json mj = json::parse(take(minfo));
  CHECK(std::fabs(sparsity - 0.5) <= 1.0 / mj["pruning"]["weights"].get<double>());

  srkd_model* student = nullptr;
  REQUIRE(srkd_model_create(d, "{}", 6, &student) == SRKD_OK);
  CHECK(srkd_distill(student, nullptr, d, R"({"mode": "sparse", "epochs": 1})", &rep) == SRKD_ERR_USAGE);
  REQUIRE(srkd_distill(student, teacher, d, R"({"mode": "sparse", "epochs": 1})", &rep) == SRKD_OK);
  char* rj = nullptr;
  REQUIRE(srkd_report_json(rep, &rj) == SRKD_OK);
  CHECK(json::parse(take(rj))["kind"] == "sparse");
  srkd_report_free(rep);
  CHECK(srkd_distill(student, nullptr, d, R"({"mode": "default", "teacher_alpha": 0.5, "epochs": 1})", &rep) ==
        SRKD_ERR_PARAMETER);
  REQUIRE(srkd_distill(student, nullptr, d, R"({"mode": "default", "epochs": 1})", &rep) == SRKD_OK);
  srkd_report_free(rep);

  srkd_model_free(student);
  srkd_model_free(teacher);
  srkd_model_free(loaded);
  srkd_model_free(m);
  srkd_dataset_free(d2);
  srkd_dataset_free(d);
}

TEST_CASE("run_command mirrors the CLI commands") {
  const fs::path dir = fs::temp_directory_path() / "srkd-capi-cmd";
  fs::remove_all(dir);
  char* out = nullptr;
  const json opts = {{"train_per_class", 5}, {"test_per_class", 2}, {"out_dir", dir.string()}};
  REQUIRE(srkd_run_command("gen-data", opts.dump().c_str(), &out) == SRKD_OK);
  CHECK(json::parse(take(out))["train"] == 20);
  CHECK(fs::exists(dir / "data.srkd"));
  const json bad = {{"data", (dir / "missing.srkd").string()}};
  CHECK(srkd_run_command("train", bad.dump().c_str(), &out) == SRKD_ERR_IO);
}
