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

#include <algorithm>
#include <string>

#include <gtest/gtest.h>

#include "rescore/actionability.h"
#include "rescore/models.h"

namespace rescore {
namespace {

std::string Doc(const std::string& features, const std::string& constraints) {
  return "{\"features\": [" + features + "], \"constraints\": [" + constraints +
         "]}";
}

std::string Bin(const std::string& name, bool actionable = true,
                const std::string& sign = "null") {
  return "{\"name\": \"" + name +
         "\", \"type\": \"binary\", \"lb\": 0, \"ub\": 1, \"actionable\": " +
         (actionable ? "true" : "false") + ", \"sign\": " + sign + "}";
}

std::string Int(const std::string& name, int lb, int ub,
                const std::string& sign = "null") {
  return "{\"name\": \"" + name + "\", \"type\": \"integer\", \"lb\": " +
         std::to_string(lb) + ", \"ub\": " + std::to_string(ub) +
         ", \"actionable\": true, \"sign\": " + sign + "}";
}

std::string ErrorPath(const std::string& doc) {
  try {
    load_action_spec(doc);
  } catch (const ValidationError& e) {
    return e.path();
  }
  return "<accepted>";
}

TEST(ActionSpec, GermanCreditPartition) {
  const ActionSet set =
      load_action_spec(read_file(RESCORE_DATA_DIR "/german/actions.json"));
  EXPECT_EQ(set.size(), 36u);
  EXPECT_EQ(set.partition().size(), 32u);
  const auto age = *set.IndexOf("Age");
  const auto residence = *set.IndexOf("YearsAtResidence");
  const auto employed = *set.IndexOf("YearsEmployed>=1");
  EXPECT_EQ(set.PartOf(age), set.PartOf(residence));
  EXPECT_EQ(set.PartOf(age), set.PartOf(employed));
  EXPECT_EQ(set.PartContaining(age).size(), 3u);
}

TEST(ActionSpec, PartitionCoversEveryFeatureOnce) {
  const ActionSet set =
      load_action_spec(read_file(RESCORE_DATA_DIR "/german/actions.json"));
  std::vector<int> seen(set.size(), 0);
  for (std::size_t p = 0; p < set.partition().size(); ++p) {
    for (FeatureIndex k : set.partition()[p]) {
      ++seen[k];
      EXPECT_EQ(set.PartOf(k), p);
    }
  }
  EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
}

TEST(ActionSpec, RejectsMalformedDocuments) {
  EXPECT_EQ(ErrorPath("{"), "/");
  EXPECT_EQ(ErrorPath("{\"features\": 3, \"constraints\": []}"), "/features");
  EXPECT_EQ(ErrorPath(Doc("{\"name\": \"a\", \"type\": \"binary\", \"lb\": 0, "
                          "\"ub\": 1, \"actionable\": true}",
                          "")),
            "/features/0");
  EXPECT_EQ(ErrorPath(Doc("{\"name\": \"a\", \"type\": \"complex\", \"lb\": 0, "
                          "\"ub\": 1, \"actionable\": true, \"sign\": null}",
                          "")),
            "/features/0/type");
  EXPECT_EQ(ErrorPath(Doc(Int("a", 3, 1), "")), "/features/0/lb");
  EXPECT_EQ(ErrorPath(Doc(Bin("a") + "," + Bin("a"), "")), "/features/1/name");
  EXPECT_EQ(
      ErrorPath(Doc(Bin("a") + "," + Bin("b"),
                    "{\"kind\": \"thermometer\", \"members\": [\"a\", \"c\"], "
                    "\"params\": {\"direction\": \"increase\"}}")),
      "/constraints/0/members/1");
  EXPECT_NE(ErrorPath(Doc(Bin("a") + "," + Bin("b"),
                          "{\"kind\": \"teleport\", \"members\": [\"a\", \"b\"], "
                          "\"params\": {}}")),
            "<accepted>");
  EXPECT_NE(ErrorPath(Doc(Bin("a") + "," + Bin("b"),
                          "{\"kind\": \"thermometer\", \"members\": [\"a\", \"b\"], "
                          "\"params\": {\"direction\": \"up\"}}")),
            "<accepted>");
}

TEST(ActionSpec, RejectsLinkageCycles) {
  const std::string link_ab =
      "{\"kind\": \"directional_linkage\", \"members\": [\"a\", \"b\"], "
      "\"params\": {\"scales\": [1]}}";
  const std::string link_ba =
      "{\"kind\": \"directional_linkage\", \"members\": [\"b\", \"a\"], "
      "\"params\": {\"scales\": [1]}}";
  EXPECT_NO_THROW(load_action_spec(Doc(Int("a", 0, 3) + "," + Int("b", 0, 3), link_ab)));
  EXPECT_THROW(load_action_spec(Doc(Int("a", 0, 3) + "," + Int("b", 0, 3),
                                    link_ab + "," + link_ba)),
               ValidationError);
}

TEST(ActionSpec, JsonRoundTrip) {
  const ActionSet set =
      load_action_spec(read_file(RESCORE_DATA_DIR "/german/actions.json"));
  const std::string once = to_json(set);
  EXPECT_EQ(to_json(load_action_spec(once)), once);
}

TEST(Thermometer, IncreasingEncodingMovesUpOnly) {
  const ActionSet set = load_action_spec(
      Doc(Bin("t1") + "," + Bin("t2") + "," + Bin("t3"),
          "{\"kind\": \"thermometer\", \"members\": [\"t1\", \"t2\", \"t3\"], "
          "\"params\": {\"direction\": \"increase\"}}"));
  const Vector x = {1, 0, 0};
  EXPECT_TRUE(set.JointFeasible(x, {0, 1, 0}));
  EXPECT_TRUE(set.JointFeasible(x, {0, 1, 1}));
  EXPECT_FALSE(set.JointFeasible(x, {0, 0, 1}));   // 1,0,1 is not an encoding
  EXPECT_FALSE(set.JointFeasible(x, {-1, 0, 0}));  // wrong direction
  EXPECT_TRUE(set.JointFeasible(x, {0, 0, 0}));
}

TEST(Linkage, InducedChangeIsNotOwnChange) {
  // b is immutable in its own right, but follows a.
  const ActionSet set = load_action_spec(Doc(
      Int("a", 0, 5, "\"+\"") + "," +
          "{\"name\": \"b\", \"type\": \"integer\", \"lb\": 0, \"ub\": 10, "
          "\"actionable\": false, \"sign\": null}",
      "{\"kind\": \"directional_linkage\", \"members\": [\"a\", \"b\"], "
      "\"params\": {\"scales\": [2]}}"));
  const Vector x = {1, 3};
  EXPECT_DOUBLE_EQ(set.Induced(1, x, {2, 4}), 4.0);
  EXPECT_TRUE(set.JointFeasible(x, {2, 4}));
  EXPECT_FALSE(set.JointFeasible(x, {2, 3}));  // b moved on its own
  EXPECT_FALSE(set.JointFeasible(x, {0, 1}));
  EXPECT_FALSE(set.JointFeasible(x, {4, 8}));  // b leaves its bounds
}

TEST(Implication, GuardControlsConsequent) {
  const ActionSet set = load_action_spec(
      Doc(Bin("has_loan") + "," + Int("loan_amount", 0, 9),
          "{\"kind\": \"logical_implication\", \"members\": [\"has_loan\", "
          "\"loan_amount\"], \"params\": {\"bound\": 5}}"));
  EXPECT_TRUE(set.JointFeasible({0, 0}, {1, 4}));
  EXPECT_FALSE(set.JointFeasible({0, 0}, {1, 6}));
  EXPECT_FALSE(set.JointFeasible({0, 0}, {0, 2}));
  EXPECT_TRUE(set.JointFeasible({1, 3}, {-1, -3}));
}

TEST(Reachability, TransitionsRestrictMoves) {
  const ActionSet set = load_action_spec(
      Doc(Bin("a") + "," + Bin("b"),
          "{\"kind\": \"reachability\", \"members\": [\"a\", \"b\"], "
          "\"params\": {\"values\": [[0, 0], [1, 0], [1, 1]], "
          "\"transitions\": [[1, 1, 0], [0, 1, 1], [0, 0, 1]]}}"));
  EXPECT_TRUE(set.JointFeasible({0, 0}, {1, 0}));
  EXPECT_FALSE(set.JointFeasible({0, 0}, {1, 1}));
  EXPECT_FALSE(set.JointFeasible({0, 0}, {0, 1}));  // (0,1) not allowed
  EXPECT_TRUE(set.JointFeasible({1, 0}, {0, 1}));
}

TEST(InterventionGrid, RespectsSignAndBounds) {
  const ActionSet set = load_action_spec(
      Doc(Int("up", 0, 4, "\"+\"") + "," + Int("free", 0, 2) + "," +
              Bin("fixed", false) +
              ",{\"name\": \"r\", \"type\": \"real\", \"lb\": 0, \"ub\": 1, "
              "\"actionable\": true, \"sign\": null}",
          ""));
  const Vector x = {2, 1, 0, 0.5};
  EXPECT_EQ(intervention_grid(x, 0, set), (std::vector<double>{1, 2}));
  EXPECT_EQ(intervention_grid(x, 1, set), (std::vector<double>{-1, 1}));
  EXPECT_TRUE(intervention_grid(x, 2, set).empty());
  EXPECT_THROW(intervention_grid(x, 3, set), ValidationError);
}

TEST(Separable, ChecksEachFeatureAlone) {
  const ActionSet set =
      load_action_spec(Doc(Int("up", 0, 4, "\"+\"") + "," + Bin("fixed", false), ""));
  EXPECT_TRUE(separable_feasible({1, 0}, {3, 0}, set));
  EXPECT_FALSE(separable_feasible({1, 0}, {-1, 0}, set));
  EXPECT_FALSE(separable_feasible({1, 0}, {4, 0}, set));
  EXPECT_FALSE(separable_feasible({1, 0}, {0, 1}, set));
}

}  // namespace
}  // namespace rescore
