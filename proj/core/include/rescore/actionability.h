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

// Actionability model: which single-feature changes a person can make, and
// which changes other features must undergo as a consequence.
//
// An action `a` moves a point `x` to `x + a`. Every component of an action is
// split into an *induced* part, fixed by directional linkages and causal
// bounds from the other components, and an *own* part, `a_k - induced_k`.
// Actionability flags and sign restrictions apply to the own part only, so a
// non-actionable feature (e.g. age) can still move when another feature drags
// it along. Bounds and integrality apply to the total change.

#ifndef RESCORE_ACTIONABILITY_H_
#define RESCORE_ACTIONABILITY_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rescore/common.h"

namespace rescore {

enum class FeatureKind { kBinary, kInteger, kReal };
enum class Sign { kFree, kIncreaseOnly, kDecreaseOnly };
enum class Direction { kIncrease, kDecrease };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kReal;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  bool actionable = false;
  Sign sign = Sign::kFree;

  bool discrete() const { return kind != FeatureKind::kReal; }
};

enum class ConstraintKind {
  kThermometer,
  kDirectionalLinkage,
  kOneHot,
  kReachability,
  kLogicalImplication,
  kCausalBound,
};

// Members are ordered from the lowest-level dummy to the highest. A valid
// encoding never has a higher dummy on while a lower one is off; every member
// may only move in `direction`.
struct ThermometerParams {
  Direction direction = Direction::kIncrease;
};

// members[0] is the source; members[i] (i >= 1) receives scales[i - 1] units
// of change per unit change of the source. Several linkages into the same
// target accumulate.
struct LinkageParams {
  std::vector<double> scales;
};

// Exactly one member is 1 after the action.
struct OneHotParams {};

// After the action, the members' joint values must equal one of `values`.
// When `transitions` is non-empty, transitions[from][to] must also hold
// whenever the current joint value is itself listed.
struct ReachabilityParams {
  std::vector<Vector> values;
  std::vector<std::vector<bool>> transitions;
};

// members = {guard, consequent}. The consequent must be zero while the guard
// is off; while the guard is on it ranges up to `bound` (or its declared upper
// bound when absent).
struct ImplicationParams {
  std::optional<double> bound;
};

// members = {source, target}. After the action, source <= target + slack
// where slack = max(0, x'_source - x_target) is applied to the target as a
// forced downstream change, and must not exceed `max_slack`.
struct CausalBoundParams {
  double max_slack = 0.0;
};

using ConstraintParams =
    std::variant<ThermometerParams, LinkageParams, OneHotParams,
                 ReachabilityParams, ImplicationParams, CausalBoundParams>;

struct JointConstraint {
  ConstraintKind kind;
  std::vector<FeatureIndex> members;
  ConstraintParams params;
};

// A deterministic downstream dependency of `target` on `source`.
struct InducedEdge {
  enum class Type { kLinkage, kCausal };
  Type type;
  FeatureIndex source;
  double scale = 0.0;      // kLinkage
  double max_slack = 0.0;  // kCausal
};

// Immutable after construction; safe to share across threads.
class ActionSet {
 public:
  // Validates every invariant and computes the feature partition. Throws
  // ValidationError.
  ActionSet(std::vector<FeatureSpec> features,
            std::vector<JointConstraint> joints);

  std::size_t size() const { return features_.size(); }
  const FeatureSpec& feature(FeatureIndex k) const { return features_.at(k); }
  const std::vector<FeatureSpec>& features() const { return features_; }
  const std::vector<JointConstraint>& joints() const { return joints_; }
  std::optional<FeatureIndex> IndexOf(std::string_view name) const;

  // Connected components of the joint-constraint graph, each sorted, ordered
  // by smallest member.
  const std::vector<std::vector<FeatureIndex>>& partition() const {
    return partition_;
  }
  std::size_t PartOf(FeatureIndex k) const { return part_of_.at(k); }
  const std::vector<FeatureIndex>& PartContaining(FeatureIndex k) const {
    return partition_.at(PartOf(k));
  }
  // Indices into joints() of the constraints inside part `p`.
  const std::vector<std::size_t>& JointsInPart(std::size_t p) const {
    return joints_by_part_.at(p);
  }
  const std::vector<InducedEdge>& InducedInto(FeatureIndex k) const {
    return induced_.at(k);
  }
  bool AllDiscrete(const std::vector<FeatureIndex>& features) const;

  // Induced change on `k` implied by the other components of `a`.
  double Induced(FeatureIndex k, const Vector& x, const Vector& a) const;

  // Bounds, integrality, and own-part actionability/sign of component k,
  // plus the slack limit of causal bounds into k.
  bool ComponentFeasible(FeatureIndex k, const Vector& x,
                         const Vector& a) const;

  // Joint constraint `c` holds for x + a. Linkages and causal bounds are
  // enforced through ComponentFeasible and always return true here.
  bool ConstraintSatisfied(std::size_t c, const Vector& x,
                           const Vector& a) const;

  // Every component and constraint of part `p` holds.
  bool PartFeasible(std::size_t p, const Vector& x, const Vector& a) const;

  // Every part holds: `a` is a feasible (possibly multi-feature) action.
  bool JointFeasible(const Vector& x, const Vector& a) const;

 private:
  std::vector<FeatureSpec> features_;
  std::vector<JointConstraint> joints_;
  std::vector<std::vector<FeatureIndex>> partition_;
  std::vector<std::size_t> part_of_;
  std::vector<std::vector<std::size_t>> joints_by_part_;
  std::vector<std::vector<InducedEdge>> induced_;
};

// Tolerance used when comparing feature values and action components.
inline constexpr double kValueTolerance = 1e-9;

// Parses and validates an action-spec document (see README for the schema).
ActionSet load_action_spec(std::string_view document);

// Canonical serialization; load_action_spec(to_json(s)) reproduces `s`.
std::string to_json(const ActionSet& action_set);

// Integer interventions v != 0 on discrete feature j that respect its bounds
// and sign, ascending. Empty for non-actionable features. The values need not
// be jointly feasible. Throws ValidationError for real-valued features.
std::vector<double> intervention_grid(const Vector& x, FeatureIndex j,
                                      const ActionSet& action_set);

// Every component keeps x within bounds, respects sign and integrality, and
// is zero on non-actionable features. Joint constraints are ignored.
bool separable_feasible(const Vector& x, const Vector& a,
                        const ActionSet& action_set);

// Range of own changes available to feature k from x: [lo, hi] after sign
// and bounds, or {0, 0} if k is not actionable.
std::pair<double, double> own_change_range(const Vector& x, FeatureIndex k,
                                           const ActionSet& action_set);

std::string_view to_string(FeatureKind kind);
std::string_view to_string(ConstraintKind kind);

}  // namespace rescore

#endif  // RESCORE_ACTIONABILITY_H_
