/*
 * Copyright 2026 The rescore Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "commands.h"

namespace rescore::cli {
namespace {

namespace fs = std::filesystem;

Inputs Fixture(const std::string& name) {
  Inputs in;
  const std::string dir = std::string(RESCORE_DATA_DIR) + "/" + name;
  in.data = dir + "/data.csv";
  in.actions = dir + "/actions.json";
  in.model = dir + "/model.json";
  return in;
}

int Invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "rescore");
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  return run_main(static_cast<int>(argv.size()), argv.data());
}

fs::path TempDir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() /
                     ("rescore_cli_test_" + tag + "_" +
                      std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TEST(SampleSize, ReportsTableValue) {
  const auto r = run_samplesize(0.05, 0.01, "widest");
  EXPECT_EQ(r["n"], 9600);
  EXPECT_EQ(run_samplesize(0.01, 0.01, "shortest")["n"], 461);
  EXPECT_THROW(run_samplesize(0.05, 0.01, "narrow"), ValidationError);
}

TEST(Score, AgeSavingsDeniedRows) {
  const auto r = run_score(Fixture("age_savings"));
  // Three denied rows with two features each.
  ASSERT_EQ(r["records"].size(), 6u);
  for (const auto& rec : r["records"]) {
    const bool savings = rec["feature"] == "savings_ge_60k";
    const bool young = rec["row"] == 0;
    EXPECT_EQ(rec["estimate"].get<double>(), savings && young ? 1.0 : 0.0);
    EXPECT_EQ(rec["exact"], true);
  }
  EXPECT_EQ(r["provenance"]["mode"], "exact");
  EXPECT_EQ(r["provenance"]["spec_digest"].get<std::string>().size(), 64u);
}

TEST(Explain, WithholdsForFixedRows) {
  const auto r = run_explain(Fixture("age_savings"), {});
  ASSERT_EQ(r["records"].size(), 3u);
  EXPECT_EQ(r["records"][0]["features"], nlohmann::json::array({"savings_ge_60k"}));
  EXPECT_EQ(r["records"][0]["withheld"], false);
  for (int i : {1, 2}) {
    EXPECT_EQ(r["records"][i]["triage"], "fixed_prediction");
    EXPECT_EQ(r["records"][i]["withheld"], true);
    EXPECT_TRUE(r["records"][i]["features"].empty());
  }
  ExplainOptions shap;
  shap.method = "shap";
  shap.row = 2;
  const auto s = run_explain(Fixture("age_savings"), shap);
  ASSERT_EQ(s["records"].size(), 1u);
  EXPECT_EQ(s["records"][0]["row"], 2);
}

TEST(Audit, CreditSegments) {
  const auto r = run_audit(Fixture("credit"), {});
  EXPECT_EQ(r["n_rows"], 6);
  EXPECT_EQ(r["n_denied"], 4);
  EXPECT_EQ(r["pct_fixed"].get<double>(), 25.0);
  EXPECT_EQ(r["pct_1d"].get<double>(), 50.0);
  EXPECT_EQ(r["pct_nd"].get<double>(), 25.0);
  EXPECT_EQ(r["pct_undetermined"].get<double>(), 0.0);
  EXPECT_TRUE(r["warnings"].empty());
  ASSERT_EQ(r["methods"].size(), 5u);
  EXPECT_EQ(r["methods"][0]["method"], "resp");
  EXPECT_EQ(r["methods"][0]["pct_all_responsive"]["of_presented"].get<double>(), 100.0);
  EXPECT_EQ(r["rows"].size(), 4u);
}

TEST(Audit, SampledModeIsDeterministic) {
  Inputs in = Fixture("credit");
  in.sample = 200;
  in.seed = 12;
  const auto a = run_audit(in, {});
  const auto b = run_audit(in, {});
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_EQ(a["provenance"]["mode"], "sample");
}

TEST(Cache, ReusesAndRepairsEntries) {
  const fs::path dir = TempDir("cache");
  Inputs in = Fixture("credit");
  in.cache_dir = dir.string();
  const auto first = run_score(in);
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  ASSERT_FALSE(files.empty());
  for (const fs::path& f : files) EXPECT_EQ(f.extension(), ".csv");
  const auto second = run_score(in);
  EXPECT_EQ(first["records"].dump(), second["records"].dump());
  std::ofstream(files.front()) << "garbage";
  const auto third = run_score(in);
  EXPECT_EQ(first["records"].dump(), third["records"].dump());
  EXPECT_EQ(run_score(Fixture("credit"))["records"].dump(), first["records"].dump());
  fs::remove_all(dir);
}

TEST(ExitCodes, MapFailures) {
  const Inputs in = Fixture("credit");
  const fs::path dir = TempDir("exit");
  const std::string out = (dir / "report.json").string();
  EXPECT_EQ(Invoke({"samplesize", "--alpha", "0.05", "--half-width", "0.05", "--out", out}),
            kExitOk);
  EXPECT_TRUE(fs::exists(out));
  EXPECT_EQ(Invoke({}), kExitValidation);
  EXPECT_EQ(Invoke({"score", "--data", in.data}), kExitValidation);
  EXPECT_EQ(Invoke({"score", "--data", in.data + ".missing", "--actions", in.actions,
                 "--model", in.model}),
            kExitValidation);
  EXPECT_EQ(Invoke({"score", "--data", in.data, "--actions", in.actions, "--model",
                 in.model, "--alpha", "2"}),
            kExitValidation);
  EXPECT_EQ(Invoke({"explain", "--data", in.data, "--actions", in.actions, "--model",
                 in.model, "--method", "tea-leaves"}),
            kExitValidation);
  EXPECT_EQ(Invoke({"samplesize", "--alpha", "0.05", "--half-width", "1e-300"}),
            kExitResource);
  EXPECT_EQ(Invoke({"score", "--data", in.data, "--actions", in.actions, "--model",
                 in.model, "--out", out}),
            kExitOk);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace rescore::cli
