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

#include "rescore/actionability.h"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <type_traits>
#include <utility>

#include "json.hpp"

namespace rescore {
namespace {

using nlohmann::json;

bool Near(double a, double b) {
  return std::abs(a - b) <= kValueTolerance * std::max(1.0, std::abs(b));
}

bool IsIntegral(double v) { return Near(v, std::round(v)); }

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  std::size_t Find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }
  void Unite(std::size_t a, std::size_t b) {
    a = Find(a);
    b = Find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

std::string MemberPath(std::size_t c) {
  return "/constraints/" + std::to_string(c);
}

void ValidateFeature(const FeatureSpec& f, std::size_t i) {
  const std::string path = "/features/" + std::to_string(i);
  if (f.name.empty()) throw ValidationError("empty feature name", path + "/name");
  if (!std::isfinite(f.lower_bound) || !std::isfinite(f.upper_bound)) {
    throw ValidationError("bounds must be finite", path);
  }
  if (f.lower_bound > f.upper_bound) {
    throw ValidationError("lb exceeds ub", path + "/lb");
  }
  if (f.kind == FeatureKind::kBinary &&
      (f.lower_bound != 0.0 || f.upper_bound != 1.0)) {
    throw ValidationError("binary feature must have bounds [0, 1]", path);
  }
  if (f.kind == FeatureKind::kInteger &&
      (f.lower_bound != std::round(f.lower_bound) ||
       f.upper_bound != std::round(f.upper_bound))) {
    throw ValidationError("integer feature must have integral bounds", path);
  }
}

void ValidateConstraint(const JointConstraint& c, std::size_t ci,
                        const std::vector<FeatureSpec>& features) {
  const std::string path = MemberPath(ci);
  if (c.members.size() < 2) {
    throw ValidationError("constraint needs at least two members",
                          path + "/members");
  }
  std::set<FeatureIndex> seen;
  for (FeatureIndex m : c.members) {
    if (m >= features.size()) {
      throw ValidationError("undeclared feature", path + "/members");
    }
    if (!seen.insert(m).second) {
      throw ValidationError("duplicate member", path + "/members");
    }
  }
  auto require_binary = [&](FeatureIndex m) {
    if (features[m].kind != FeatureKind::kBinary) {
      throw ValidationError(
          "member '" + features[m].name + "' must be binary",
          path + "/members");
    }
  };
  switch (c.kind) {
    case ConstraintKind::kThermometer:
    case ConstraintKind::kOneHot:
      for (FeatureIndex m : c.members) require_binary(m);
      break;
    case ConstraintKind::kDirectionalLinkage: {
      const auto& p = std::get<LinkageParams>(c.params);
      if (p.scales.size() + 1 != c.members.size()) {
        throw ValidationError("one scale per target required",
                              path + "/params/scales");
      }
      for (double s : p.scales) {
        if (!std::isfinite(s)) {
          throw ValidationError("scale must be finite",
                                path + "/params/scales");
        }
      }
      break;
    }
    case ConstraintKind::kReachability: {
      const auto& p = std::get<ReachabilityParams>(c.params);
      if (p.values.empty()) {
        throw ValidationError("reachability needs allowed values",
                              path + "/params/values");
      }
      for (std::size_t r = 0; r < p.values.size(); ++r) {
        const std::string vpath = path + "/params/values/" + std::to_string(r);
        if (p.values[r].size() != c.members.size()) {
          throw ValidationError("value vector length must match members",
                                vpath);
        }
        for (std::size_t i = 0; i < c.members.size(); ++i) {
          const FeatureSpec& f = features[c.members[i]];
          const double v = p.values[r][i];
          if (v < f.lower_bound || v > f.upper_bound ||
              (f.discrete() && !IsIntegral(v))) {
            throw ValidationError("value outside bounds of '" + f.name + "'",
                                  vpath);
          }
        }
      }
      if (!p.transitions.empty()) {
        if (p.transitions.size() != p.values.size()) {
          throw ValidationError("transitions must be square over values",
                                path + "/params/transitions");
        }
        for (const auto& row : p.transitions) {
          if (row.size() != p.values.size()) {
            throw ValidationError("transitions must be square over values",
                                  path + "/params/transitions");
          }
        }
      }
      break;
    }
    case ConstraintKind::kLogicalImplication: {
      if (c.members.size() != 2) {
        throw ValidationError("implication takes {guard, consequent}",
                              path + "/members");
      }
      require_binary(c.members[0]);
      const auto& p = std::get<ImplicationParams>(c.params);
      const FeatureSpec& consequent = features[c.members[1]];
      if (consequent.lower_bound > 0.0 || consequent.upper_bound < 0.0) {
        throw ValidationError("consequent bounds must contain 0",
                              path + "/members");
      }
      if (p.bound && (!std::isfinite(*p.bound) || *p.bound < 0.0)) {
        throw ValidationError("bound must be finite and nonnegative",
                              path + "/params/bound");
      }
      break;
    }
    case ConstraintKind::kCausalBound: {
      if (c.members.size() != 2) {
        throw ValidationError("causal bound takes {source, target}",
                              path + "/members");
      }
      const auto& p = std::get<CausalBoundParams>(c.params);
      if (!std::isfinite(p.max_slack) || p.max_slack < 0.0) {
        throw ValidationError("max_slack must be finite and nonnegative",
                              path + "/params/max_slack");
      }
      break;
    }
  }
}

// Induced edges must form a DAG so downstream effects can be propagated.
void RejectInducedCycles(const std::vector<std::vector<InducedEdge>>& induced) {
  const std::size_t n = induced.size();
  std::vector<int> state(n, 0);
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  for (std::size_t root = 0; root < n; ++root) {
    if (state[root] != 0) continue;
    stack.push_back({root, 0});
    state[root] = 1;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < induced[node].size()) {
        const std::size_t src = induced[node][next++].source;
        if (state[src] == 1) {
          throw ValidationError("cyclic linkage or causal constraints",
                                "/constraints");
        }
        if (state[src] == 0) {
          state[src] = 1;
          stack.push_back({src, 0});
        }
      } else {
        state[node] = 2;
        stack.pop_back();
      }
    }
  }
}

}  // namespace

ActionSet::ActionSet(std::vector<FeatureSpec> features,
                     std::vector<JointConstraint> joints)
    : features_(std::move(features)), joints_(std::move(joints)) {
  std::set<std::string> names;
  for (std::size_t i = 0; i < features_.size(); ++i) {
    ValidateFeature(features_[i], i);
    if (!names.insert(features_[i].name).second) {
      throw ValidationError("duplicate feature name '" + features_[i].name + "'",
                            "/features/" + std::to_string(i) + "/name");
    }
  }
  for (std::size_t c = 0; c < joints_.size(); ++c) {
    ValidateConstraint(joints_[c], c, features_);
  }

  const std::size_t d = features_.size();
  UnionFind uf(d);
  for (const auto& c : joints_) {
    for (FeatureIndex m : c.members) uf.Unite(c.members.front(), m);
  }
  std::map<std::size_t, std::size_t> root_to_part;
  part_of_.resize(d);
  for (FeatureIndex k = 0; k < d; ++k) {
    const std::size_t root = uf.Find(k);
    auto [it, inserted] = root_to_part.emplace(root, partition_.size());
    if (inserted) partition_.emplace_back();
    partition_[it->second].push_back(k);
    part_of_[k] = it->second;
  }
  joints_by_part_.resize(partition_.size());
  for (std::size_t c = 0; c < joints_.size(); ++c) {
    joints_by_part_[part_of_[joints_[c].members.front()]].push_back(c);
  }

  induced_.resize(d);
  for (const auto& c : joints_) {
    if (c.kind == ConstraintKind::kDirectionalLinkage) {
      const auto& p = std::get<LinkageParams>(c.params);
      for (std::size_t t = 1; t < c.members.size(); ++t) {
        induced_[c.members[t]].push_back(
            {InducedEdge::Type::kLinkage, c.members[0], p.scales[t - 1], 0.0});
      }
    } else if (c.kind == ConstraintKind::kCausalBound) {
      const auto& p = std::get<CausalBoundParams>(c.params);
      induced_[c.members[1]].push_back(
          {InducedEdge::Type::kCausal, c.members[0], 0.0, p.max_slack});
    }
  }
  RejectInducedCycles(induced_);
}

std::optional<FeatureIndex> ActionSet::IndexOf(std::string_view name) const {
  for (FeatureIndex k = 0; k < features_.size(); ++k) {
    if (features_[k].name == name) return k;
  }
  return std::nullopt;
}

bool ActionSet::AllDiscrete(const std::vector<FeatureIndex>& features) const {
  return std::all_of(features.begin(), features.end(),
                     [&](FeatureIndex k) { return features_[k].discrete(); });
}

double ActionSet::Induced(FeatureIndex k, const Vector& x,
                          const Vector& a) const {
  double induced = 0.0;
  for (const InducedEdge& e : induced_[k]) {
    if (e.type == InducedEdge::Type::kLinkage) {
      induced += e.scale * a[e.source];
    } else {
      induced += std::max(0.0, x[e.source] + a[e.source] - x[k]);
    }
  }
  return induced;
}

bool ActionSet::ComponentFeasible(FeatureIndex k, const Vector& x,
                                  const Vector& a) const {
  const FeatureSpec& f = features_[k];
  const double moved = x[k] + a[k];
  if (moved < f.lower_bound - kValueTolerance * std::max(1.0, std::abs(f.lower_bound)) ||
      moved > f.upper_bound + kValueTolerance * std::max(1.0, std::abs(f.upper_bound))) {
    return false;
  }
  if (f.discrete() && !IsIntegral(a[k])) return false;

  for (const InducedEdge& e : induced_[k]) {
    if (e.type == InducedEdge::Type::kCausal) {
      const double slack = std::max(0.0, x[e.source] + a[e.source] - x[k]);
      if (slack > e.max_slack + kValueTolerance) return false;
    }
  }

  const double own = a[k] - Induced(k, x, a);
  if (Near(own, 0.0)) return true;
  if (!f.actionable) return false;
  if (f.sign == Sign::kIncreaseOnly && own < 0.0) return false;
  if (f.sign == Sign::kDecreaseOnly && own > 0.0) return false;
  return true;
}

bool ActionSet::ConstraintSatisfied(std::size_t ci, const Vector& x,
                                    const Vector& a) const {
  const JointConstraint& c = joints_[ci];
  auto value = [&](FeatureIndex m) { return x[m] + a[m]; };
  switch (c.kind) {
    case ConstraintKind::kDirectionalLinkage:
    case ConstraintKind::kCausalBound:
      return true;
    case ConstraintKind::kThermometer: {
      const auto& p = std::get<ThermometerParams>(c.params);
      for (std::size_t i = 0; i < c.members.size(); ++i) {
        const double change = a[c.members[i]];
        if (p.direction == Direction::kIncrease && change < -kValueTolerance) {
          return false;
        }
        if (p.direction == Direction::kDecrease && change > kValueTolerance) {
          return false;
        }
        if (i > 0 && value(c.members[i]) > value(c.members[i - 1]) + kValueTolerance) {
          return false;
        }
      }
      return true;
    }
    case ConstraintKind::kOneHot: {
      double total = 0.0;
      for (FeatureIndex m : c.members) total += value(m);
      return Near(total, 1.0);
    }
    case ConstraintKind::kReachability: {
      const auto& p = std::get<ReachabilityParams>(c.params);
      auto find_row = [&](auto&& get) -> std::optional<std::size_t> {
        for (std::size_t r = 0; r < p.values.size(); ++r) {
          bool match = true;
          for (std::size_t i = 0; i < c.members.size() && match; ++i) {
            match = Near(get(c.members[i]), p.values[r][i]);
          }
          if (match) return r;
        }
        return std::nullopt;
      };
      const auto to = find_row(value);
      if (!to) return false;
      if (p.transitions.empty()) return true;
      const auto from = find_row([&](FeatureIndex m) { return x[m]; });
      if (!from || *from == *to) return true;
      return p.transitions[*from][*to];
    }
    case ConstraintKind::kLogicalImplication: {
      const auto& p = std::get<ImplicationParams>(c.params);
      const double guard = value(c.members[0]);
      const double consequent = value(c.members[1]);
      if (guard < 0.5) return Near(consequent, 0.0);
      const double bound =
          p.bound.value_or(features_[c.members[1]].upper_bound);
      return consequent <= bound + kValueTolerance;
    }
  }
  return false;
}

bool ActionSet::PartFeasible(std::size_t p, const Vector& x,
                             const Vector& a) const {
  for (FeatureIndex k : partition_.at(p)) {
    if (!ComponentFeasible(k, x, a)) return false;
  }
  for (std::size_t c : joints_by_part_.at(p)) {
    if (!ConstraintSatisfied(c, x, a)) return false;
  }
  return true;
}

bool ActionSet::JointFeasible(const Vector& x, const Vector& a) const {
  if (x.size() != size() || a.size() != size()) {
    throw ValidationError("dimension mismatch");
  }
  for (std::size_t p = 0; p < partition_.size(); ++p) {
    if (!PartFeasible(p, x, a)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Document loading.

namespace {

FeatureKind ParseKind(const json& v, const std::string& path) {
  if (!v.is_string()) throw ValidationError("type must be a string", path);
  const auto s = v.get<std::string>();
  if (s == "binary") return FeatureKind::kBinary;
  if (s == "integer") return FeatureKind::kInteger;
  if (s == "real") return FeatureKind::kReal;
  throw ValidationError("unknown feature type '" + s + "'", path);
}

Sign ParseSign(const json& v, const std::string& path) {
  if (v.is_null()) return Sign::kFree;
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "+") return Sign::kIncreaseOnly;
    if (s == "-") return Sign::kDecreaseOnly;
  }
  throw ValidationError("sign must be \"+\", \"-\" or null", path);
}

double ParseNumber(const json& v, const std::string& path) {
  if (!v.is_number()) throw ValidationError("expected a number", path);
  return v.get<double>();
}

void RequireExactKeys(const json& obj, std::initializer_list<const char*> keys,
                      const std::string& path) {
  if (!obj.is_object()) throw ValidationError("expected an object", path);
  for (const char* key : keys) {
    if (!obj.contains(key)) {
      throw ValidationError(std::string("missing field '") + key + "'", path);
    }
  }
  for (const auto& [key, _] : obj.items()) {
    if (std::find_if(keys.begin(), keys.end(), [&](const char* k) {
          return key == k;
        }) == keys.end()) {
      throw ValidationError("unexpected field '" + key + "'", path);
    }
  }
}

void RejectUnknownParams(const json& params,
                         std::initializer_list<const char*> allowed,
                         const std::string& path) {
  if (!params.is_object()) throw ValidationError("params must be an object", path);
  for (const auto& [key, _] : params.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return key == k;
        }) == allowed.end()) {
      throw ValidationError("unexpected parameter '" + key + "'", path);
    }
  }
}

ConstraintParams ParseParams(ConstraintKind kind, const json& params,
                             const std::string& path) {
  switch (kind) {
    case ConstraintKind::kThermometer: {
      RejectUnknownParams(params, {"direction"}, path);
      if (!params.contains("direction") || !params["direction"].is_string()) {
        throw ValidationError("thermometer needs a direction", path);
      }
      const auto d = params["direction"].get<std::string>();
      if (d == "increase") return ThermometerParams{Direction::kIncrease};
      if (d == "decrease") return ThermometerParams{Direction::kDecrease};
      throw ValidationError("direction must be increase or decrease",
                            path + "/direction");
    }
    case ConstraintKind::kDirectionalLinkage: {
      RejectUnknownParams(params, {"scales"}, path);
      if (!params.contains("scales") || !params["scales"].is_array()) {
        throw ValidationError("linkage needs a scales array", path);
      }
      LinkageParams p;
      for (std::size_t i = 0; i < params["scales"].size(); ++i) {
        p.scales.push_back(ParseNumber(params["scales"][i],
                                       path + "/scales/" + std::to_string(i)));
      }
      return p;
    }
    case ConstraintKind::kOneHot:
      RejectUnknownParams(params, {}, path);
      return OneHotParams{};
    case ConstraintKind::kReachability: {
      RejectUnknownParams(params, {"values", "transitions"}, path);
      if (!params.contains("values") || !params["values"].is_array()) {
        throw ValidationError("reachability needs a values array", path);
      }
      ReachabilityParams p;
      for (std::size_t r = 0; r < params["values"].size(); ++r) {
        const json& row = params["values"][r];
        const std::string rpath = path + "/values/" + std::to_string(r);
        if (!row.is_array()) throw ValidationError("expected an array", rpath);
        Vector values;
        for (std::size_t i = 0; i < row.size(); ++i) {
          values.push_back(ParseNumber(row[i], rpath + "/" + std::to_string(i)));
        }
        p.values.push_back(std::move(values));
      }
      if (params.contains("transitions")) {
        const json& t = params["transitions"];
        if (!t.is_array()) {
          throw ValidationError("expected an array", path + "/transitions");
        }
        for (std::size_t r = 0; r < t.size(); ++r) {
          const std::string rpath = path + "/transitions/" + std::to_string(r);
          if (!t[r].is_array()) throw ValidationError("expected an array", rpath);
          std::vector<bool> row;
          for (const json& cell : t[r]) {
            if (cell.is_boolean()) {
              row.push_back(cell.get<bool>());
            } else if (cell.is_number_integer() &&
                       (cell.get<int>() == 0 || cell.get<int>() == 1)) {
              row.push_back(cell.get<int>() == 1);
            } else {
              throw ValidationError("transition entries must be 0/1", rpath);
            }
          }
          p.transitions.push_back(std::move(row));
        }
      }
      return p;
    }
    case ConstraintKind::kLogicalImplication: {
      RejectUnknownParams(params, {"bound"}, path);
      ImplicationParams p;
      if (params.contains("bound")) {
        p.bound = ParseNumber(params["bound"], path + "/bound");
      }
      return p;
    }
    case ConstraintKind::kCausalBound: {
      RejectUnknownParams(params, {"max_slack"}, path);
      if (!params.contains("max_slack")) {
        throw ValidationError("causal bound needs max_slack", path);
      }
      return CausalBoundParams{
          ParseNumber(params["max_slack"], path + "/max_slack")};
    }
  }
  throw ValidationError("unknown constraint kind", path);
}

ConstraintKind ParseConstraintKind(const json& v, const std::string& path) {
  if (!v.is_string()) throw ValidationError("kind must be a string", path);
  const auto s = v.get<std::string>();
  static const std::map<std::string, ConstraintKind> kKinds = {
      {"thermometer", ConstraintKind::kThermometer},
      {"directional_linkage", ConstraintKind::kDirectionalLinkage},
      {"one_hot", ConstraintKind::kOneHot},
      {"reachability", ConstraintKind::kReachability},
      {"logical_implication", ConstraintKind::kLogicalImplication},
      {"causal_bound", ConstraintKind::kCausalBound},
  };
  const auto it = kKinds.find(s);
  if (it == kKinds.end()) {
    throw ValidationError("unknown constraint kind '" + s + "'", path);
  }
  return it->second;
}

}  // namespace

ActionSet load_action_spec(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed document: ") + e.what(), "/");
  }
  RequireExactKeys(doc, {"features", "constraints"}, "");
  if (!doc["features"].is_array()) {
    throw ValidationError("features must be an array", "/features");
  }
  if (!doc["constraints"].is_array()) {
    throw ValidationError("constraints must be an array", "/constraints");
  }

  std::vector<FeatureSpec> features;
  std::map<std::string, FeatureIndex> by_name;
  for (std::size_t i = 0; i < doc["features"].size(); ++i) {
    const json& f = doc["features"][i];
    const std::string path = "/features/" + std::to_string(i);
    RequireExactKeys(f, {"name", "type", "lb", "ub", "actionable", "sign"},
                     path);
    if (!f["name"].is_string()) {
      throw ValidationError("name must be a string", path + "/name");
    }
    if (!f["actionable"].is_boolean()) {
      throw ValidationError("actionable must be a boolean",
                            path + "/actionable");
    }
    FeatureSpec spec;
    spec.name = f["name"].get<std::string>();
    spec.kind = ParseKind(f["type"], path + "/type");
    spec.lower_bound = ParseNumber(f["lb"], path + "/lb");
    spec.upper_bound = ParseNumber(f["ub"], path + "/ub");
    spec.actionable = f["actionable"].get<bool>();
    spec.sign = ParseSign(f["sign"], path + "/sign");
    if (!by_name.emplace(spec.name, i).second) {
      throw ValidationError("duplicate feature name '" + spec.name + "'",
                            path + "/name");
    }
    features.push_back(std::move(spec));
  }

  std::vector<JointConstraint> joints;
  for (std::size_t ci = 0; ci < doc["constraints"].size(); ++ci) {
    const json& c = doc["constraints"][ci];
    const std::string path = "/constraints/" + std::to_string(ci);
    RequireExactKeys(c, {"kind", "members", "params"}, path);
    JointConstraint constraint;
    constraint.kind = ParseConstraintKind(c["kind"], path + "/kind");
    if (!c["members"].is_array()) {
      throw ValidationError("members must be an array", path + "/members");
    }
    for (std::size_t m = 0; m < c["members"].size(); ++m) {
      const json& name = c["members"][m];
      const std::string mpath = path + "/members/" + std::to_string(m);
      if (!name.is_string()) throw ValidationError("expected a name", mpath);
      const auto it = by_name.find(name.get<std::string>());
      if (it == by_name.end()) {
        throw ValidationError(
            "undeclared feature '" + name.get<std::string>() + "'", mpath);
      }
      constraint.members.push_back(it->second);
    }
    constraint.params = ParseParams(constraint.kind, c["params"],
                                    path + "/params");
    joints.push_back(std::move(constraint));
  }
  return ActionSet(std::move(features), std::move(joints));
}

std::string to_json(const ActionSet& action_set) {
  json doc;
  doc["features"] = json::array();
  for (const FeatureSpec& f : action_set.features()) {
    json sign = nullptr;
    if (f.sign == Sign::kIncreaseOnly) sign = "+";
    if (f.sign == Sign::kDecreaseOnly) sign = "-";
    doc["features"].push_back({{"name", f.name},
                               {"type", std::string(to_string(f.kind))},
                               {"lb", f.lower_bound},
                               {"ub", f.upper_bound},
                               {"actionable", f.actionable},
                               {"sign", sign}});
  }
  doc["constraints"] = json::array();
  for (const JointConstraint& c : action_set.joints()) {
    json members = json::array();
    for (FeatureIndex m : c.members) members.push_back(action_set.feature(m).name);
    json params = json::object();
    std::visit(
        [&](const auto& p) {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, ThermometerParams>) {
            params["direction"] =
                p.direction == Direction::kIncrease ? "increase" : "decrease";
          } else if constexpr (std::is_same_v<P, LinkageParams>) {
            params["scales"] = p.scales;
          } else if constexpr (std::is_same_v<P, ReachabilityParams>) {
            params["values"] = p.values;
            if (!p.transitions.empty()) {
              json t = json::array();
              for (const auto& row : p.transitions) {
                json r = json::array();
                for (bool b : row) r.push_back(b ? 1 : 0);
                t.push_back(std::move(r));
              }
              params["transitions"] = std::move(t);
            }
          } else if constexpr (std::is_same_v<P, ImplicationParams>) {
            if (p.bound) params["bound"] = *p.bound;
          } else if constexpr (std::is_same_v<P, CausalBoundParams>) {
            params["max_slack"] = p.max_slack;
          }
        },
        c.params);
    doc["constraints"].push_back({{"kind", std::string(to_string(c.kind))},
                                  {"members", members},
                                  {"params", params}});
  }
  return doc.dump();
}

std::vector<double> intervention_grid(const Vector& x, FeatureIndex j,
                                      const ActionSet& action_set) {
  if (x.size() != action_set.size() || j >= action_set.size()) {
    throw ValidationError("dimension mismatch");
  }
  const FeatureSpec& f = action_set.feature(j);
  if (!f.discrete()) {
    throw ValidationError("cannot enumerate interventions on real-valued '" +
                          f.name + "'");
  }
  std::vector<double> grid;
  if (!f.actionable) return grid;
  const auto [lo, hi] = own_change_range(x, j, action_set);
  for (double v = std::ceil(lo - kValueTolerance); v <= hi + kValueTolerance;
       v += 1.0) {
    if (v != 0.0) grid.push_back(v);
  }
  return grid;
}

std::pair<double, double> own_change_range(const Vector& x, FeatureIndex k,
                                           const ActionSet& action_set) {
  const FeatureSpec& f = action_set.feature(k);
  if (!f.actionable) return {0.0, 0.0};
  double lo = f.lower_bound - x[k];
  double hi = f.upper_bound - x[k];
  if (f.sign == Sign::kIncreaseOnly) lo = std::max(lo, 0.0);
  if (f.sign == Sign::kDecreaseOnly) hi = std::min(hi, 0.0);
  if (lo > hi) return {0.0, 0.0};
  return {lo, hi};
}

bool separable_feasible(const Vector& x, const Vector& a,
                        const ActionSet& action_set) {
  if (x.size() != action_set.size() || a.size() != action_set.size()) {
    throw ValidationError("dimension mismatch");
  }
  for (FeatureIndex k = 0; k < a.size(); ++k) {
    const FeatureSpec& f = action_set.feature(k);
    if (Near(a[k], 0.0)) continue;
    if (!f.actionable) return false;
    if (f.sign == Sign::kIncreaseOnly && a[k] < 0.0) return false;
    if (f.sign == Sign::kDecreaseOnly && a[k] > 0.0) return false;
    if (f.discrete() && !IsIntegral(a[k])) return false;
    const double moved = x[k] + a[k];
    if (moved < f.lower_bound - kValueTolerance ||
        moved > f.upper_bound + kValueTolerance) {
      return false;
    }
  }
  return true;
}

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kBinary:
      return "binary";
    case FeatureKind::kInteger:
      return "integer";
    case FeatureKind::kReal:
      return "real";
  }
  return "?";
}

std::string_view to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::kThermometer:
      return "thermometer";
    case ConstraintKind::kDirectionalLinkage:
      return "directional_linkage";
    case ConstraintKind::kOneHot:
      return "one_hot";
    case ConstraintKind::kReachability:
      return "reachability";
    case ConstraintKind::kLogicalImplication:
      return "logical_implication";
    case ConstraintKind::kCausalBound:
      return "causal_bound";
  }
  return "?";
}

}  // namespace rescore
