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

// Reference implementations for tests. Nothing here calls into the library's
// feasibility logic: instances are described by a plain struct, and the
// brute-force reachable set is a filter over the whole integer box written
// straight from the constraint definitions.

#ifndef RESCORE_TESTS_ORACLES_H_
#define RESCORE_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace oracle {

using Point = std::vector<long long>;

struct Feature {
  bool binary = true;
  long long lb = 0, ub = 1;
  bool actionable = true;
  int sign = 0;  // +1 increase only, -1 decrease only
};

struct Thermometer {
  std::vector<int> members;
  bool increase = true;
};

struct Linkage {
  int source;
  int target;
  long long scale;
};

struct Reachability {
  std::vector<int> members;
  std::vector<Point> values;
  std::vector<std::vector<bool>> transitions;  // empty = unrestricted
};

struct Instance {
  std::vector<Feature> features;
  std::vector<Thermometer> thermometers;
  std::vector<Linkage> linkages;
  std::vector<Reachability> reachability;

  std::string Name(int k) const { return "f" + std::to_string(k); }

  std::string ToJson() const {
    nlohmann::json doc;
    doc["features"] = nlohmann::json::array();
    for (std::size_t k = 0; k < features.size(); ++k) {
      const Feature& f = features[k];
      nlohmann::json sign = nullptr;
      if (f.sign > 0) sign = "+";
      if (f.sign < 0) sign = "-";
      doc["features"].push_back({{"name", Name(static_cast<int>(k))},
                                 {"type", f.binary ? "binary" : "integer"},
                                 {"lb", f.lb},
                                 {"ub", f.ub},
                                 {"actionable", f.actionable},
                                 {"sign", sign}});
    }
    doc["constraints"] = nlohmann::json::array();
    for (const Thermometer& t : thermometers) {
      nlohmann::json m = nlohmann::json::array();
      for (int k : t.members) m.push_back(Name(k));
      doc["constraints"].push_back(
          {{"kind", "thermometer"},
           {"members", m},
           {"params", {{"direction", t.increase ? "increase" : "decrease"}}}});
    }
    for (const Linkage& l : linkages) {
      doc["constraints"].push_back(
          {{"kind", "directional_linkage"},
           {"members", {Name(l.source), Name(l.target)}},
           {"params", {{"scales", {static_cast<double>(l.scale)}}}}});
    }
    for (const Reachability& r : reachability) {
      nlohmann::json m = nlohmann::json::array();
      for (int k : r.members) m.push_back(Name(k));
      nlohmann::json params = {{"values", r.values}};
      if (!r.transitions.empty()) {
        nlohmann::json t = nlohmann::json::array();
        for (const auto& row : r.transitions) {
          nlohmann::json tr = nlohmann::json::array();
          for (bool b : row) tr.push_back(b);
          t.push_back(tr);
        }
        params["transitions"] = t;
      }
      doc["constraints"].push_back(
          {{"kind", "reachability"}, {"members", m}, {"params", params}});
    }
    return doc.dump();
  }

  // Features connected to k through any constraint, k included.
  std::vector<int> Component(int k) const {
    const int d = static_cast<int>(features.size());
    std::vector<std::set<int>> adj(d);
    auto link = [&](const std::vector<int>& m) {
      for (int a : m) {
        for (int b : m) adj[a].insert(b);
      }
    };
    for (const auto& t : thermometers) link(t.members);
    for (const auto& l : linkages) link({l.source, l.target});
    for (const auto& r : reachability) link(r.members);
    std::vector<bool> seen(d, false);
    std::vector<int> stack = {k}, out;
    seen[k] = true;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      out.push_back(v);
      for (int w : adj[v]) {
        if (!seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  bool HasInflow(int k) const {
    for (const auto& l : linkages) {
      if (l.target == k) return true;
    }
    return false;
  }

  bool Feasible(const Point& x, const Point& a) const {
    const int d = static_cast<int>(features.size());
    for (int k = 0; k < d; ++k) {
      const Feature& f = features[k];
      const long long moved = x[k] + a[k];
      if (moved < f.lb || moved > f.ub) return false;
      long long induced = 0;
      for (const auto& l : linkages) {
        if (l.target == k) induced += l.scale * a[l.source];
      }
      const long long own = a[k] - induced;
      if (own != 0) {
        if (!f.actionable) return false;
        if (f.sign > 0 && own < 0) return false;
        if (f.sign < 0 && own > 0) return false;
      }
    }
    for (const auto& t : thermometers) {
      for (std::size_t i = 0; i < t.members.size(); ++i) {
        const int m = t.members[i];
        if (t.increase ? a[m] < 0 : a[m] > 0) return false;
        if (i > 0 && x[m] + a[m] > x[t.members[i - 1]] + a[t.members[i - 1]]) {
          return false;
        }
      }
    }
    for (const auto& r : reachability) {
      auto row_of = [&](const Point& p) {
        for (std::size_t v = 0; v < r.values.size(); ++v) {
          bool match = true;
          for (std::size_t i = 0; i < r.members.size(); ++i) {
            match = match && p[r.members[i]] == r.values[v][i];
          }
          if (match) return static_cast<int>(v);
        }
        return -1;
      };
      Point after = x;
      for (int k = 0; k < d; ++k) after[k] += a[k];
      const int to = row_of(after);
      if (to < 0) return false;
      if (!r.transitions.empty()) {
        const int from = row_of(x);
        if (from >= 0 && from != to && !r.transitions[from][to]) return false;
      }
    }
    return true;
  }

  // Every feasible action supported on the part of j with a_j != 0.
  std::vector<Point> ReachableActions(const Point& x, int j) const {
    std::vector<Point> out;
    if (!features[j].actionable) return out;
    const auto part = Component(j);
    Point a(features.size(), 0);
    auto recurse = [&](auto&& self, std::size_t i) -> void {
      if (i == part.size()) {
        if (a[j] != 0 && Feasible(x, a)) out.push_back(a);
        return;
      }
      const int k = part[i];
      for (long long v = features[k].lb - x[k]; v <= features[k].ub - x[k];
           ++v) {
        a[k] = v;
        self(self, i + 1);
      }
      a[k] = 0;
    };
    recurse(recurse, 0);
    return out;
  }

  // Values v that nearest-action search accepts for feature j.
  std::vector<long long> Interventions(const Point& x, int j) const {
    std::vector<long long> out;
    const Feature& f = features[j];
    if (!f.actionable) return out;
    for (long long v = f.lb - x[j]; v <= f.ub - x[j]; ++v) {
      if (v == 0) continue;
      if (!HasInflow(j) && f.sign > 0 && v < 0) continue;
      if (!HasInflow(j) && f.sign < 0 && v > 0) continue;
      out.push_back(v);
    }
    return out;
  }
};

inline long long L1(const Point& a) {
  long long n = 0;
  for (long long v : a) n += v < 0 ? -v : v;
  return n;
}

// Random instance with at most `max_features` features mixing thermometer,
// linkage and reachability constraints, plus a point respecting the
// thermometer encodings.
inline Instance RandomInstance(std::mt19937_64& rng, int max_features,
                               Point& x) {
  auto coin = [&](double p) {
    return std::uniform_real_distribution<double>(0, 1)(rng) < p;
  };
  auto pick = [&](long long lo, long long hi) {
    return std::uniform_int_distribution<long long>(lo, hi)(rng);
  };
  Instance inst;
  const int d = static_cast<int>(pick(2, max_features));
  for (int k = 0; k < d; ++k) {
    Feature f;
    f.binary = coin(0.6);
    f.lb = 0;
    f.ub = f.binary ? 1 : pick(2, 3);
    f.actionable = coin(0.85);
    const int s = static_cast<int>(pick(0, 3));
    f.sign = s == 1 ? 1 : (s == 2 ? -1 : 0);
    inst.features.push_back(f);
  }
  std::vector<int> binaries;
  for (int k = 0; k < d; ++k) {
    if (inst.features[k].binary) binaries.push_back(k);
  }
  std::set<int> used;
  if (binaries.size() >= 2 && coin(0.6)) {
    std::shuffle(binaries.begin(), binaries.end(), rng);
    const std::size_t n = std::min<std::size_t>(binaries.size(), pick(2, 3));
    Thermometer t;
    t.members.assign(binaries.begin(), binaries.begin() + n);
    t.increase = coin(0.5);
    for (int m : t.members) used.insert(m);
    inst.thermometers.push_back(t);
  }
  if (coin(0.6)) {
    const int s = static_cast<int>(pick(0, d - 2));
    const int t = static_cast<int>(pick(s + 1, d - 1));
    const long long scales[] = {1, -1, 2};
    inst.linkages.push_back({s, t, scales[pick(0, 2)]});
  }
  x.assign(d, 0);
  for (int k = 0; k < d; ++k) {
    x[k] = pick(inst.features[k].lb, inst.features[k].ub);
  }
  for (const Thermometer& t : inst.thermometers) {
    const long long level = pick(0, static_cast<long long>(t.members.size()));
    for (std::size_t i = 0; i < t.members.size(); ++i) {
      x[t.members[i]] = static_cast<long long>(i) < level ? 1 : 0;
    }
  }
  if (d >= 2 && coin(0.5)) {
    std::vector<int> free;
    for (int k = 0; k < d; ++k) {
      if (!used.count(k)) free.push_back(k);
    }
    if (free.size() >= 2) {
      std::shuffle(free.begin(), free.end(), rng);
      Reachability r;
      r.members = {free[0], free[1]};
      std::sort(r.members.begin(), r.members.end());
      r.values.push_back({x[r.members[0]], x[r.members[1]]});
      const int extra = static_cast<int>(pick(1, 4));
      for (int e = 0; e < extra; ++e) {
        Point v = {pick(inst.features[r.members[0]].lb,
                        inst.features[r.members[0]].ub),
                   pick(inst.features[r.members[1]].lb,
                        inst.features[r.members[1]].ub)};
        if (std::find(r.values.begin(), r.values.end(), v) == r.values.end()) {
          r.values.push_back(v);
        }
      }
      if (coin(0.5)) {
        const std::size_t n = r.values.size();
        r.transitions.assign(n, std::vector<bool>(n, true));
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t k = 0; k < n; ++k) {
            if (i != k) r.transitions[i][k] = coin(0.6);
          }
        }
      }
      inst.reachability.push_back(r);
    }
  }
  return inst;
}

}  // namespace oracle

#endif  // RESCORE_TESTS_ORACLES_H_
