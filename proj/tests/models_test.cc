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

#include <random>
#include <string>

#include <gtest/gtest.h>

#include "rescore/actionability.h"
#include "rescore/models.h"

namespace rescore {
namespace {

ActionSet TwoInts() {
  return load_action_spec(R"({"features": [
    {"name": "a", "type": "integer", "lb": 0, "ub": 10, "actionable": true, "sign": null},
    {"name": "b", "type": "real", "lb": -5, "ub": 5, "actionable": true, "sign": null}
  ], "constraints": []})");
}

std::string ErrorPath(const std::string& doc, const ActionSet& set) {
  try {
    load_model(doc, set);
  } catch (const ValidationError& e) {
    return e.path();
  }
  return "<accepted>";
}

TEST(Linear, ThresholdIsInclusive) {
  const ActionSet set = TwoInts();
  const Classifier m = load_model(
      R"({"type": "linear", "coefficients": {"a": 1, "b": -2}, "intercept": 0.5, "threshold": 3})",
      set);
  EXPECT_TRUE(m.is_linear());
  EXPECT_DOUBLE_EQ(m.Score({4, 0.75}), 3.0);
  EXPECT_EQ(m.Predict({4, 0.75}), 1);
  EXPECT_EQ(m.Predict({4, 0.8}), 0);
  EXPECT_EQ(predict(m, {10, -5}), 1);
  EXPECT_THROW(m.Predict({1}), ValidationError);
}

TEST(Linear, CustomLabels) {
  const ActionSet set = TwoInts();
  const Classifier m = load_model(
      R"({"type": "linear", "coefficients": {"a": 1}, "intercept": 0, "threshold": 5,
          "positive_label": 7, "negative_label": -1})",
      set);
  EXPECT_EQ(m.Predict({6, 0}), 7);
  EXPECT_EQ(m.Predict({1, 0}), -1);
}

TEST(Trees, SingleStump) {
  const ActionSet set = TwoInts();
  const Classifier m = load_model(R"({"type": "tree_ensemble", "threshold": 0.5, "trees": [
    {"nodes": [{"feature": "a", "threshold": 3, "left": 1, "right": 2},
               {"leaf": 0}, {"leaf": 1}]}]})",
                                  set);
  EXPECT_EQ(m.Predict({2, 0}), 0);
  EXPECT_EQ(m.Predict({3, 0}), 1);  // x < t goes left
  EXPECT_EQ(m.Predict({9, 0}), 1);
}

TEST(Trees, TwoStumpsAreSummed) {
  const ActionSet set = TwoInts();
  const Classifier m = load_model(R"({"type": "tree_ensemble", "threshold": 1.5, "trees": [
    {"nodes": [{"feature": "a", "threshold": 3, "left": 1, "right": 2},
               {"leaf": 0}, {"leaf": 1}]},
    {"nodes": [{"feature": "b", "threshold": 0, "left": 1, "right": 2},
               {"leaf": 0}, {"leaf": 1}]}]})",
                                  set);
  EXPECT_DOUBLE_EQ(m.Score({5, 1}), 2.0);
  EXPECT_EQ(m.Predict({5, 1}), 1);
  EXPECT_EQ(m.Predict({5, -1}), 0);
  EXPECT_EQ(m.Predict({1, 1}), 0);
}

TEST(Loading, RejectsMalformedModels) {
  const ActionSet set = TwoInts();
  EXPECT_NE(ErrorPath(R"({"type": "forest"})", set), "<accepted>");
  EXPECT_NE(ErrorPath(R"({"coefficients": {}})", set), "<accepted>");
  EXPECT_EQ(ErrorPath(R"({"type": "linear", "coefficients": {"zz": 1}, "intercept": 0, "threshold": 0})",
                      set),
            "/coefficients/zz");
  EXPECT_NE(ErrorPath(R"({"type": "linear", "coefficients": {"a": 1}, "threshold": 0})", set),
            "<accepted>");
  EXPECT_NE(ErrorPath(R"({"type": "tree_ensemble", "threshold": 0, "trees": [
    {"nodes": [{"feature": "a", "threshold": 30, "left": 1, "right": 2},
               {"leaf": 0}, {"leaf": 1}]}]})",
                      set),
            "<accepted>");
  EXPECT_NE(ErrorPath(R"({"type": "tree_ensemble", "threshold": 0, "trees": [
    {"nodes": [{"leaf": 0}, {"feature": "a", "threshold": 3, "left": 0, "right": 0}]}]})",
                      set),
            "<accepted>");
  EXPECT_NE(ErrorPath("not json", set), "<accepted>");
}

TEST(Table, LooksUpExactPoints) {
  const ActionSet set =
      load_action_spec(read_file(RESCORE_DATA_DIR "/age_savings/actions.json"));
  const Classifier m =
      load_model(read_file(RESCORE_DATA_DIR "/age_savings/model.json"), set);
  EXPECT_EQ(m.Predict({0, 1}), 1);
  EXPECT_EQ(m.Predict({1, 1}), 0);
  EXPECT_THROW(m.Predict({0.5, 1}), ValidationError);
}

TEST(RoundTrip, PredictionsSurviveSerialization) {
  const ActionSet set = TwoInts();
  const Classifier trees = load_model(R"({"type": "tree_ensemble", "threshold": 0.7, "trees": [
    {"nodes": [{"feature": "a", "threshold": 4.5, "left": 1, "right": 2},
               {"leaf": 0.1},
               {"feature": "b", "threshold": -1.25, "left": 3, "right": 4},
               {"leaf": 0.3}, {"leaf": 0.9}]},
    {"nodes": [{"feature": "b", "threshold": 2, "left": 1, "right": 2},
               {"leaf": -0.2}, {"leaf": 0.4}]}]})",
                                      set);
  const Classifier linear = load_model(
      R"({"type": "linear", "coefficients": {"a": 0.3, "b": -1.7}, "intercept": 0.1, "threshold": 0.25})",
      set);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> a(0, 10);
  std::uniform_real_distribution<double> b(-5, 5);
  for (const Classifier* m : {&trees, &linear}) {
    const Classifier back = load_model(to_json(*m), set);
    EXPECT_EQ(to_json(back), to_json(*m));
    for (int i = 0; i < 1000; ++i) {
      const Vector x = {static_cast<double>(a(rng)), b(rng)};
      ASSERT_EQ(back.Predict(x), m->Predict(x));
      ASSERT_DOUBLE_EQ(back.Score(x), m->Score(x));
    }
  }
}

std::string DatasetError(const std::string& csv) {
  const ActionSet set = TwoInts();
  try {
    parse_dataset(csv, set, "label", 1);
  } catch (const ValidationError& e) {
    return e.path();
  }
  return "<accepted>";
}

TEST(Dataset, ParsesAndIgnoresExtraColumns) {
  const ActionSet set = TwoInts();
  const Dataset d = parse_dataset("id,b,a,label\nx,1.5,3,0\ny,-2,10,1\n", set, "label", 1);
  ASSERT_EQ(d.rows.size(), 2u);
  EXPECT_EQ(d.rows[0], (Vector{3, 1.5}));
  EXPECT_EQ(d.labels[1], 1);
  EXPECT_EQ(d.feature_names, (std::vector<std::string>{"a", "b"}));
}

TEST(Dataset, ReportsRowAndHeaderErrors) {
  EXPECT_EQ(DatasetError("a,label\n1,0\n"), "header");
  EXPECT_EQ(DatasetError("a,b\n1,0\n"), "header");
  EXPECT_EQ(DatasetError("a,b,label\n1,0,0\n11,0,0\n"), "row 2");
  EXPECT_EQ(DatasetError("a,b,label\n1.5,0,0\n"), "row 1");
  EXPECT_EQ(DatasetError("a,b,label\n1,zero,0\n"), "row 1");
  EXPECT_EQ(DatasetError("a,b,label\n1,0\n"), "row 1");
  EXPECT_EQ(DatasetError("a,b,label\n1,0,yes\n"), "row 1");
  EXPECT_EQ(DatasetError("a,b,label\n1,0,0\n"), "<accepted>");
}

TEST(Dataset, LoadsCreditFixture) {
  const ActionSet set =
      load_action_spec(read_file(RESCORE_DATA_DIR "/credit/actions.json"));
  const Classifier m =
      load_model(read_file(RESCORE_DATA_DIR "/credit/model.json"), set);
  const Dataset d = load_dataset(RESCORE_DATA_DIR "/credit/data.csv", set, "label", 1);
  ASSERT_EQ(d.rows.size(), 6u);
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    EXPECT_EQ(m.Predict(d.rows[i]), d.labels[i]);
  }
}

}  // namespace
}  // namespace rescore
