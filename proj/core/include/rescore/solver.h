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

// Exact search over the discrete actions of one feature part.
//
// Nearest-action search is a depth-first branch and bound over the integer
// domains of the part's features, visited in feature-index order with values
// ascending. Constraints are checked as soon as every feature they touch has
// been assigned, and a branch is cut once its partial L1 norm reaches the
// incumbent's. Because the visiting order is lexicographic, the first optimum
// found is also the lexicographically smallest one among equal norms.

#ifndef RESCORE_SOLVER_H_
#define RESCORE_SOLVER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rescore/actionability.h"
#include "rescore/common.h"

namespace rescore {

struct SolverOptions {
  // Minimum L1 distance between a new solution and every excluded one.
  double min_separation = 0.5;
  // Search nodes per call; exceeding it raises ResourceError.
  std::uint64_t node_budget = 10'000'000;
};

// Nearest action a with a_j = v, supported on the part of j, satisfying every
// actionability constraint and at L1 distance >= min_separation from every
// action in `excluded`. Returns nullopt iff no such action exists.
//
// Throws ValidationError if the part has a real-valued feature, if v is not
// in change_values(x, j), or if an excluded action has the wrong shape or
// a_j != v. Throws ResourceError when the node budget runs out.
std::optional<Vector> find_1d_action(const Vector& x, FeatureIndex j, double v,
                                     const ActionSet& action_set,
                                     const std::vector<Vector>& excluded,
                                     const SolverOptions& options = {});

// True iff `a` is supported on the part of the intervened feature j and
// satisfies every separable and joint constraint of that part.
bool check_feasibility(const Vector& x, FeatureIndex j, const Vector& a,
                       const ActionSet& action_set);

// All feasible actions with a_j = v, in non-decreasing L1 order, obtained by
// calling find_1d_action with a growing exclusion list until it is
// infeasible.
std::vector<Vector> enumerate_completions(const Vector& x, FeatureIndex j,
                                          double v,
                                          const ActionSet& action_set,
                                          const SolverOptions& options = {});

// Every feasible action supported on part `p` (the null action included),
// allowing own changes on several features at once. Requires a discrete
// part. Raises ResourceError once more than `budget` nodes are visited.
std::vector<Vector> enumerate_part_actions(const Vector& x, std::size_t part,
                                           const ActionSet& action_set,
                                           std::uint64_t budget = 10'000'000);

// Nonzero changes on feature j that enumeration iterates over: the
// intervention grid, widened to every in-bounds integer change when j also
// receives induced changes (its own part then needs separate checking). Empty
// for non-actionable j.
std::vector<double> change_values(const Vector& x, FeatureIndex j,
                                  const ActionSet& action_set);

// Number of integer points in the box of part `p` (product of per-feature
// domain sizes), saturating at UINT64_MAX.
std::uint64_t part_grid_size(std::size_t part, const ActionSet& action_set);

}  // namespace rescore

#endif  // RESCORE_SOLVER_H_
