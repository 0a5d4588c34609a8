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

#include "rescore/solver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <optional>
#include <string>
#include <tuple>
#include <utility>

namespace rescore {
namespace {

double L1Distance(const Vector& a, const Vector& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return d;
}

void RequireDiscretePart(const ActionSet& action_set, std::size_t part) {
  for (FeatureIndex k : action_set.partition().at(part)) {
    if (!action_set.feature(k).discrete()) {
      throw ValidationError("part contains real-valued feature '" +
                            action_set.feature(k).name +
                            "'; exact search needs discrete features");
    }
  }
}

// Depth-first search over the integer box of one part. One feature may be
// pinned to a fixed change before the search starts.
class PartSearch {
 public:
  PartSearch(const ActionSet& action_set, const Vector& x, std::size_t part,
             std::optional<FeatureIndex> pinned, double pinned_value,
             std::uint64_t budget)
      : action_set_(action_set), x_(x), budget_(budget),
        a_(action_set.size(), 0.0) {
    const auto& members = action_set.partition().at(part);
    for (FeatureIndex k : members) {
      if (pinned && k == *pinned) continue;
      order_.push_back(k);
    }
    std::vector<int> position(action_set.size(), -1);
    if (pinned) {
      a_[*pinned] = pinned_value;
      position[*pinned] = 0;
    }
    for (std::size_t i = 0; i < order_.size(); ++i) {
      position[order_[i]] = static_cast<int>(i) + 1;
      domains_.push_back(Domain(order_[i]));
    }

    // A check becomes decidable once its last involved feature is assigned.
    checks_.resize(order_.size() + 1);
    auto ready_at = [&](const std::set<FeatureIndex>& involved) {
      int depth = 0;
      for (FeatureIndex k : involved) {
        if (action_set.PartOf(k) == part) depth = std::max(depth, position[k]);
      }
      return static_cast<std::size_t>(depth);
    };
    for (FeatureIndex k : members) {
      std::set<FeatureIndex> involved = {k};
      for (const InducedEdge& e : action_set.InducedInto(k)) {
        involved.insert(e.source);
      }
      checks_[ready_at(involved)].push_back({false, k});
    }
    for (std::size_t c : action_set.JointsInPart(part)) {
      const auto& m = action_set.joints()[c].members;
      checks_[ready_at({m.begin(), m.end()})].push_back({true, c});
    }
  }

  // Calls leaf(a, norm) for every assignment passing all checks whose
  // partial norm stays strictly below *cutoff (when set).
  template <typename Leaf>
  void Run(double base_norm, const double* cutoff, Leaf&& leaf) {
    if (!ChecksPass(0)) return;
    Recurse(0, base_norm, cutoff, leaf);
  }

 private:
  struct Check {
    bool is_constraint;
    std::size_t index;
  };

  std::vector<double> Domain(FeatureIndex k) const {
    const FeatureSpec& f = action_set_.feature(k);
    double lo = f.lower_bound - x_[k];
    double hi = f.upper_bound - x_[k];
    // Without induced inflow the whole change is own change.
    if (action_set_.InducedInto(k).empty()) {
      std::tie(lo, hi) = own_change_range(x_, k, action_set_);
    }
    std::vector<double> values;
    for (double v = std::ceil(lo - kValueTolerance); v <= hi + kValueTolerance;
         v += 1.0) {
      values.push_back(v);
    }
    return values;
  }

  bool ChecksPass(std::size_t depth) const {
    for (const Check& c : checks_[depth]) {
      const bool ok =
          c.is_constraint ? action_set_.ConstraintSatisfied(c.index, x_, a_)
                          : action_set_.ComponentFeasible(c.index, x_, a_);
      if (!ok) return false;
    }
    return true;
  }

  template <typename Leaf>
  void Recurse(std::size_t depth, double norm, const double* cutoff,
               Leaf& leaf) {
    if (depth == order_.size()) {
      if (cutoff && norm >= *cutoff) return;
      leaf(a_, norm);
      return;
    }
    const FeatureIndex k = order_[depth];
    for (double value : domains_[depth]) {
      if (++nodes_ > budget_) {
        throw ResourceError("search node budget of " +
                            std::to_string(budget_) + " exhausted");
      }
      const double next = norm + std::abs(value);
      if (cutoff && next >= *cutoff) continue;
      a_[k] = value;
      if (ChecksPass(depth + 1)) Recurse(depth + 1, next, cutoff, leaf);
    }
    a_[k] = 0.0;
  }

  const ActionSet& action_set_;
  const Vector& x_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  Vector a_;
  std::vector<FeatureIndex> order_;
  std::vector<std::vector<double>> domains_;
  std::vector<std::vector<Check>> checks_;
};

void ValidateIntervention(const Vector& x, FeatureIndex j, double v,
                          const ActionSet& action_set) {
  if (x.size() != action_set.size() || j >= action_set.size()) {
    throw ValidationError("dimension mismatch");
  }
  const auto grid = change_values(x, j, action_set);
  if (!std::binary_search(grid.begin(), grid.end(), v)) {
    throw ValidationError("intervention " + std::to_string(v) +
                          " is not in the grid of '" +
                          action_set.feature(j).name + "'");
  }
}

}  // namespace

bool check_feasibility(const Vector& x, FeatureIndex j, const Vector& a,
                       const ActionSet& action_set) {
  if (x.size() != action_set.size() || a.size() != action_set.size() ||
      j >= action_set.size()) {
    throw ValidationError("dimension mismatch");
  }
  const std::size_t part = action_set.PartOf(j);
  for (FeatureIndex k = 0; k < a.size(); ++k) {
    if (action_set.PartOf(k) != part && std::abs(a[k]) > kValueTolerance) {
      return false;
    }
  }
  return action_set.PartFeasible(part, x, a);
}

std::optional<Vector> find_1d_action(const Vector& x, FeatureIndex j, double v,
                                     const ActionSet& action_set,
                                     const std::vector<Vector>& excluded,
                                     const SolverOptions& options) {
  if (!(options.min_separation > 0.0)) {
    throw ValidationError("min_separation must be positive");
  }
  ValidateIntervention(x, j, v, action_set);
  const std::size_t part = action_set.PartOf(j);
  RequireDiscretePart(action_set, part);
  for (const Vector& e : excluded) {
    if (e.size() != action_set.size() || e[j] != v ||
        !check_feasibility(x, j, e, action_set)) {
      throw ValidationError("inconsistent exclusion list");
    }
  }

  PartSearch search(action_set, x, part, j, v, options.node_budget);
  std::optional<Vector> best;
  double cutoff = std::numeric_limits<double>::infinity();
  search.Run(std::abs(v), &cutoff, [&](const Vector& a, double norm) {
    for (const Vector& e : excluded) {
      if (L1Distance(a, e) < options.min_separation) return;
    }
    best = a;
    cutoff = norm;
  });
  return best;
}

std::vector<Vector> enumerate_completions(const Vector& x, FeatureIndex j,
                                          double v,
                                          const ActionSet& action_set,
                                          const SolverOptions& options) {
  std::vector<Vector> found;
  while (auto a = find_1d_action(x, j, v, action_set, found, options)) {
    found.push_back(std::move(*a));
  }
  return found;
}

std::vector<Vector> enumerate_part_actions(const Vector& x, std::size_t part,
                                           const ActionSet& action_set,
                                           std::uint64_t budget) {
  if (x.size() != action_set.size()) {
    throw ValidationError("dimension mismatch");
  }
  RequireDiscretePart(action_set, part);
  PartSearch search(action_set, x, part, std::nullopt, 0.0, budget);
  std::vector<Vector> actions;
  search.Run(0.0, nullptr,
             [&](const Vector& a, double) { actions.push_back(a); });
  return actions;
}

std::vector<double> change_values(const Vector& x, FeatureIndex j,
                                  const ActionSet& action_set) {
  const FeatureSpec& f = action_set.feature(j);
  if (action_set.InducedInto(j).empty() || !f.actionable) {
    return intervention_grid(x, j, action_set);
  }
  if (!f.discrete()) {
    throw ValidationError("cannot enumerate interventions on real-valued '" +
                          f.name + "'");
  }
  std::vector<double> values;
  for (double v = f.lower_bound - x[j]; v <= f.upper_bound - x[j]; v += 1.0) {
    if (v != 0.0) values.push_back(v);
  }
  return values;
}

std::uint64_t part_grid_size(std::size_t part, const ActionSet& action_set) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t total = 1;
  for (FeatureIndex k : action_set.partition().at(part)) {
    const FeatureSpec& f = action_set.feature(k);
    if (!f.discrete()) return kMax;
    const auto count = static_cast<std::uint64_t>(
        std::floor(f.upper_bound) - std::ceil(f.lower_bound) + 1.0);
    if (count != 0 && total > kMax / count) return kMax;
    total *= count;
  }
  return total;
}

}  // namespace rescore
