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

#ifndef RESCORE_MODELS_H_
#define RESCORE_MODELS_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rescore/actionability.h"
#include "rescore/common.h"

namespace rescore {

// Positive iff coefficients . x + intercept >= threshold.
struct LinearModel {
  Vector coefficients;
  double intercept = 0.0;
  double threshold = 0.0;
};

// Split nodes route x[feature] < threshold to `left`, everything else to
// `right`. Node 0 is the root.
struct TreeNode {
  bool is_leaf = true;
  double leaf_value = 0.0;
  FeatureIndex feature = 0;
  double threshold = 0.0;
  std::size_t left = 0;
  std::size_t right = 0;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;
};

// Positive iff the sum of leaf values over all trees is >= threshold.
struct TreeEnsemble {
  std::vector<DecisionTree> trees;
  double threshold = 0.0;
};

// Explicit lookup for tiny instances; querying a point absent from the table
// is an error.
struct TableModel {
  std::vector<Vector> points;
  std::vector<Label> labels;
};

class Classifier {
 public:
  using Parameters = std::variant<LinearModel, TreeEnsemble, TableModel>;

  Classifier(std::vector<std::string> feature_names, Parameters parameters,
             Label positive_label = 1, Label negative_label = 0);

  std::size_t dimension() const { return feature_names_.size(); }
  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }
  const Parameters& parameters() const { return parameters_; }
  Label positive_label() const { return positive_label_; }
  Label negative_label() const { return negative_label_; }

  bool is_linear() const {
    return std::holds_alternative<LinearModel>(parameters_);
  }

  // Deterministic label. Throws ValidationError on dimension mismatch or an
  // off-table query.
  Label Predict(const Vector& x) const;

  // Real-valued decision value: w.x + b for linear models, the leaf sum for
  // tree ensembles, the stored label for tables.
  double Score(const Vector& x) const;

 private:
  void CheckDimension(const Vector& x) const;

  std::vector<std::string> feature_names_;
  Parameters parameters_;
  Label positive_label_;
  Label negative_label_;
};

inline Label predict(const Classifier& model, const Vector& x) {
  return model.Predict(x);
}

// Parses a model document, resolving feature names against `action_set`.
Classifier load_model(std::string_view document, const ActionSet& action_set);

// Canonical serialization accepted by load_model.
std::string to_json(const Classifier& model);

struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<Vector> rows;
  std::vector<Label> labels;
  Label target = 1;
};

// Comma-delimited text with a header row. Columns are matched by name to the
// action set; extra columns other than the label are ignored. Errors name the
// 1-based data row.
Dataset parse_dataset(std::string_view text, const ActionSet& action_set,
                      std::string_view label_column, Label target);
Dataset load_dataset(const std::filesystem::path& path,
                     const ActionSet& action_set,
                     std::string_view label_column, Label target);

std::string read_file(const std::filesystem::path& path);

}  // namespace rescore

#endif  // RESCORE_MODELS_H_
