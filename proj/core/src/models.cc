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

#include "rescore/models.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <type_traits>
#include <utility>

#include "json.hpp"

namespace rescore {
namespace {

using nlohmann::json;

double Evaluate(const DecisionTree& tree, const Vector& x) {
  std::size_t i = 0;
  // Children always sit after their parent, so this loop terminates.
  while (!tree.nodes[i].is_leaf) {
    const TreeNode& n = tree.nodes[i];
    i = x[n.feature] < n.threshold ? n.left : n.right;
  }
  return tree.nodes[i].leaf_value;
}

bool SamePoint(const Vector& a, const Vector& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > kValueTolerance) return false;
  }
  return true;
}

void RequireKeys(const json& obj, std::initializer_list<const char*> required,
                 std::initializer_list<const char*> optional,
                 const std::string& path) {
  if (!obj.is_object()) throw ValidationError("expected an object", path);
  for (const char* key : required) {
    if (!obj.contains(key)) {
      throw ValidationError(std::string("missing field '") + key + "'", path);
    }
  }
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (const char* k : required) known = known || key == k;
    for (const char* k : optional) known = known || key == k;
    if (!known) throw ValidationError("unexpected field '" + key + "'", path);
  }
}

double Number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ValidationError("expected a number", path);
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ValidationError("expected a finite number", path);
  return d;
}

Label LabelValue(const json& v, const std::string& path) {
  if (!v.is_number_integer()) {
    throw ValidationError("label must be an integer", path);
  }
  return v.get<Label>();
}

std::size_t Index(const json& v, std::size_t limit, const std::string& path) {
  if (!v.is_number_unsigned() || v.get<std::size_t>() >= limit) {
    throw ValidationError("node index out of range", path);
  }
  return v.get<std::size_t>();
}

FeatureIndex ResolveFeature(const json& v, const ActionSet& action_set,
                            const std::string& path) {
  if (!v.is_string()) throw ValidationError("expected a feature name", path);
  const auto k = action_set.IndexOf(v.get<std::string>());
  if (!k) {
    throw ValidationError(
        "unknown feature '" + v.get<std::string>() + "'", path);
  }
  return *k;
}

LinearModel ParseLinear(const json& doc, const ActionSet& action_set) {
  LinearModel m;
  m.coefficients.assign(action_set.size(), 0.0);
  const json& coefficients = doc["coefficients"];
  if (!coefficients.is_object()) {
    throw ValidationError("coefficients must be an object", "/coefficients");
  }
  for (const auto& [name, w] : coefficients.items()) {
    const std::string path = "/coefficients/" + name;
    m.coefficients[ResolveFeature(json(name), action_set, path)] =
        Number(w, path);
  }
  m.intercept = Number(doc["intercept"], "/intercept");
  m.threshold = Number(doc["threshold"], "/threshold");
  return m;
}

TreeEnsemble ParseTrees(const json& doc, const ActionSet& action_set) {
  TreeEnsemble e;
  e.threshold = Number(doc["threshold"], "/threshold");
  if (!doc["trees"].is_array() || doc["trees"].empty()) {
    throw ValidationError("trees must be a nonempty array", "/trees");
  }
  for (std::size_t t = 0; t < doc["trees"].size(); ++t) {
    const std::string tpath = "/trees/" + std::to_string(t);
    const json& tree = doc["trees"][t];
    RequireKeys(tree, {"nodes"}, {}, tpath);
    const json& nodes = tree["nodes"];
    if (!nodes.is_array() || nodes.empty()) {
      throw ValidationError("nodes must be a nonempty array", tpath + "/nodes");
    }
    DecisionTree parsed;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const std::string path = tpath + "/nodes/" + std::to_string(i);
      const json& n = nodes[i];
      TreeNode node;
      if (n.is_object() && n.contains("leaf")) {
        RequireKeys(n, {"leaf"}, {}, path);
        node.leaf_value = Number(n["leaf"], path + "/leaf");
      } else {
        RequireKeys(n, {"feature", "threshold", "left", "right"}, {}, path);
        node.is_leaf = false;
        node.feature = ResolveFeature(n["feature"], action_set, path + "/feature");
        node.threshold = Number(n["threshold"], path + "/threshold");
        const FeatureSpec& f = action_set.feature(node.feature);
        if (node.threshold < f.lower_bound || node.threshold > f.upper_bound) {
          throw ValidationError("threshold outside the bounds of '" + f.name +
                                    "'",
                                path + "/threshold");
        }
        node.left = Index(n["left"], nodes.size(), path + "/left");
        node.right = Index(n["right"], nodes.size(), path + "/right");
        if (node.left <= i || node.right <= i) {
          throw ValidationError("children must follow their parent", path);
        }
      }
      parsed.nodes.push_back(node);
    }
    e.trees.push_back(std::move(parsed));
  }
  return e;
}

TableModel ParseTable(const json& doc, const ActionSet& action_set) {
  TableModel m;
  if (!doc["rows"].is_array()) {
    throw ValidationError("rows must be an array", "/rows");
  }
  for (std::size_t r = 0; r < doc["rows"].size(); ++r) {
    const std::string path = "/rows/" + std::to_string(r);
    const json& row = doc["rows"][r];
    RequireKeys(row, {"x", "y"}, {}, path);
    if (!row["x"].is_array() || row["x"].size() != action_set.size()) {
      throw ValidationError("x must list one value per feature", path + "/x");
    }
    Vector x;
    for (std::size_t k = 0; k < row["x"].size(); ++k) {
      x.push_back(Number(row["x"][k], path + "/x/" + std::to_string(k)));
    }
    for (const Vector& seen : m.points) {
      if (SamePoint(seen, x)) throw ValidationError("duplicate row", path);
    }
    m.points.push_back(std::move(x));
    m.labels.push_back(LabelValue(row["y"], path + "/y"));
  }
  return m;
}

std::string Trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> SplitRow(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(Trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool ParseDouble(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  const char* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

Classifier::Classifier(std::vector<std::string> feature_names,
                       Parameters parameters, Label positive_label,
                       Label negative_label)
    : feature_names_(std::move(feature_names)),
      parameters_(std::move(parameters)),
      positive_label_(positive_label),
      negative_label_(negative_label) {
  if (positive_label_ == negative_label_) {
    throw ValidationError("positive and negative labels must differ");
  }
  const std::size_t d = feature_names_.size();
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LinearModel>) {
          if (p.coefficients.size() != d) {
            throw ValidationError("one coefficient per feature required");
          }
        } else if constexpr (std::is_same_v<P, TreeEnsemble>) {
          for (const DecisionTree& t : p.trees) {
            if (t.nodes.empty()) throw ValidationError("empty tree");
            for (std::size_t i = 0; i < t.nodes.size(); ++i) {
              const TreeNode& n = t.nodes[i];
              if (n.is_leaf) continue;
              if (n.feature >= d || n.left <= i || n.right <= i ||
                  n.left >= t.nodes.size() || n.right >= t.nodes.size()) {
                throw ValidationError("malformed tree");
              }
            }
          }
        } else {
          if (p.points.size() != p.labels.size()) {
            throw ValidationError("one label per table row required");
          }
          for (const Vector& x : p.points) {
            if (x.size() != d) throw ValidationError("table row dimension");
          }
        }
      },
      parameters_);
}

void Classifier::CheckDimension(const Vector& x) const {
  if (x.size() != dimension()) {
    throw ValidationError("model expects " + std::to_string(dimension()) +
                          " features, got " + std::to_string(x.size()));
  }
}

double Classifier::Score(const Vector& x) const {
  CheckDimension(x);
  return std::visit(
      [&](const auto& p) -> double {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LinearModel>) {
          double s = p.intercept;
          for (std::size_t k = 0; k < x.size(); ++k) {
            s += p.coefficients[k] * x[k];
          }
          return s;
        } else if constexpr (std::is_same_v<P, TreeEnsemble>) {
          double s = 0.0;
          for (const DecisionTree& t : p.trees) s += Evaluate(t, x);
          return s;
        } else {
          for (std::size_t r = 0; r < p.points.size(); ++r) {
            if (SamePoint(p.points[r], x)) return p.labels[r];
          }
          throw ValidationError("point is not in the model table");
        }
      },
      parameters_);
}

Label Classifier::Predict(const Vector& x) const {
  const double s = Score(x);
  if (const auto* linear = std::get_if<LinearModel>(&parameters_)) {
    return s >= linear->threshold ? positive_label_ : negative_label_;
  }
  if (const auto* trees = std::get_if<TreeEnsemble>(&parameters_)) {
    return s >= trees->threshold ? positive_label_ : negative_label_;
  }
  return static_cast<Label>(s);
}

Classifier load_model(std::string_view document, const ActionSet& action_set) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed document: ") + e.what(), "/");
  }
  if (!doc.is_object() || !doc.contains("type") || !doc["type"].is_string()) {
    throw ValidationError("missing model type", "/type");
  }
  const std::string type = doc["type"].get<std::string>();
  std::vector<std::string> names;
  for (const FeatureSpec& f : action_set.features()) names.push_back(f.name);

  Classifier::Parameters parameters;
  if (type == "linear") {
    RequireKeys(doc, {"type", "coefficients", "intercept", "threshold"},
                {"positive_label", "negative_label"}, "");
    parameters = ParseLinear(doc, action_set);
  } else if (type == "tree_ensemble") {
    RequireKeys(doc, {"type", "trees", "threshold"},
                {"positive_label", "negative_label"}, "");
    parameters = ParseTrees(doc, action_set);
  } else if (type == "table") {
    RequireKeys(doc, {"type", "rows"}, {"positive_label", "negative_label"},
                "");
    parameters = ParseTable(doc, action_set);
  } else {
    throw ValidationError("unknown model type '" + type + "'", "/type");
  }
  Label positive = 1;
  Label negative = 0;
  if (doc.contains("positive_label")) {
    positive = LabelValue(doc["positive_label"], "/positive_label");
  }
  if (doc.contains("negative_label")) {
    negative = LabelValue(doc["negative_label"], "/negative_label");
  }
  return Classifier(std::move(names), std::move(parameters), positive,
                    negative);
}

std::string to_json(const Classifier& model) {
  json doc;
  const auto& names = model.feature_names();
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, LinearModel>) {
          doc["type"] = "linear";
          json w = json::object();
          for (std::size_t k = 0; k < names.size(); ++k) {
            w[names[k]] = p.coefficients[k];
          }
          doc["coefficients"] = std::move(w);
          doc["intercept"] = p.intercept;
          doc["threshold"] = p.threshold;
        } else if constexpr (std::is_same_v<P, TreeEnsemble>) {
          doc["type"] = "tree_ensemble";
          doc["threshold"] = p.threshold;
          doc["trees"] = json::array();
          for (const DecisionTree& t : p.trees) {
            json nodes = json::array();
            for (const TreeNode& n : t.nodes) {
              if (n.is_leaf) {
                nodes.push_back({{"leaf", n.leaf_value}});
              } else {
                nodes.push_back({{"feature", names[n.feature]},
                                 {"threshold", n.threshold},
                                 {"left", n.left},
                                 {"right", n.right}});
              }
            }
            doc["trees"].push_back({{"nodes", std::move(nodes)}});
          }
        } else {
          doc["type"] = "table";
          doc["rows"] = json::array();
          for (std::size_t r = 0; r < p.points.size(); ++r) {
            doc["rows"].push_back({{"x", p.points[r]}, {"y", p.labels[r]}});
          }
        }
      },
      model.parameters());
  doc["positive_label"] = model.positive_label();
  doc["negative_label"] = model.negative_label();
  return doc.dump();
}

Dataset parse_dataset(std::string_view text, const ActionSet& action_set,
                      std::string_view label_column, Label target) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty dataset");
  const auto header = SplitRow(line);

  std::map<std::string, std::size_t> column;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!column.emplace(header[c], c).second) {
      throw ValidationError("duplicate column '" + header[c] + "'", "header");
    }
  }
  std::vector<std::size_t> feature_column;
  for (const FeatureSpec& f : action_set.features()) {
    const auto it = column.find(f.name);
    if (it == column.end()) {
      throw ValidationError("missing column '" + f.name + "'", "header");
    }
    feature_column.push_back(it->second);
  }
  const auto label_it = column.find(std::string(label_column));
  if (label_it == column.end()) {
    throw ValidationError(
        "missing label column '" + std::string(label_column) + "'", "header");
  }

  Dataset data;
  data.target = target;
  for (const FeatureSpec& f : action_set.features()) {
    data.feature_names.push_back(f.name);
  }
  std::size_t row_number = 0;
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    ++row_number;
    const std::string where = "row " + std::to_string(row_number);
    const auto cells = SplitRow(line);
    if (cells.size() != header.size()) {
      throw ValidationError("expected " + std::to_string(header.size()) +
                                " cells, got " + std::to_string(cells.size()),
                            where);
    }
    Vector x(action_set.size());
    for (FeatureIndex k = 0; k < action_set.size(); ++k) {
      const FeatureSpec& f = action_set.feature(k);
      const std::string& cell = cells[feature_column[k]];
      if (!ParseDouble(cell, x[k])) {
        throw ValidationError("unparseable cell '" + cell + "' in column '" +
                                  f.name + "'",
                              where);
      }
      if (x[k] < f.lower_bound || x[k] > f.upper_bound) {
        throw ValidationError("value " + cell + " outside the bounds of '" +
                                  f.name + "'",
                              where);
      }
      if (f.discrete() && x[k] != std::round(x[k])) {
        throw ValidationError("non-integral value " + cell + " for '" +
                                  f.name + "'",
                              where);
      }
    }
    double label = 0.0;
    const std::string& cell = cells[label_it->second];
    if (!ParseDouble(cell, label) || label != std::round(label)) {
      throw ValidationError("unparseable label '" + cell + "'", where);
    }
    data.rows.push_back(std::move(x));
    data.labels.push_back(static_cast<Label>(label));
  }
  return data;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file", path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Dataset load_dataset(const std::filesystem::path& path,
                     const ActionSet& action_set,
                     std::string_view label_column, Label target) {
  return parse_dataset(read_file(path), action_set, label_column, target);
}

}  // namespace rescore
