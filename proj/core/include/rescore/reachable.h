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

#ifndef RESCORE_REACHABLE_H_
#define RESCORE_REACHABLE_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rescore/actionability.h"
#include "rescore/common.h"
#include "rescore/solver.h"

namespace rescore {

// Points attainable from `anchor` by acting on `feature`.
struct ReachableSet {
  Vector anchor;
  FeatureIndex feature = 0;
  std::vector<Vector> points;
  bool exact = true;
  std::size_t sample_size = 0;  // requested draws when !exact
  Seed seed = 0;
};

// Every point x + a with a_j != 0 and check_feasibility(x, j, a), found by
// repeated nearest-action search with exclusion. Requires a discrete part.
// Empty for non-actionable j.
ReachableSet enumerate_reachable(const Vector& x, FeatureIndex j,
                                 const ActionSet& action_set,
                                 const SolverOptions& options = {});

struct SamplerOptions {
  // Total candidate draws allowed per requested sample; 0 means 1000.
  std::size_t attempts_per_sample = 1000;
  SolverOptions solver;
};

// `n` accepted draws with replacement, fully determined by `seed`.
//
// For a discrete part the completions of every intervention are enumerated
// once and draws are uniform over all of them. Otherwise own changes are drawn
// uniformly per feature of the part (the intervened one nonzero), induced
// effects are propagated, and candidates failing check_feasibility are
// rejected. A discrete part with no feasible action yields an empty exact set.
//
// Throws ValidationError for a non-actionable j or an empty intervention set,
// SamplerStarvedError when the attempt cap is hit.
ReachableSet sample_reachable(const Vector& x, FeatureIndex j,
                              const ActionSet& action_set, std::size_t n,
                              Seed seed, const SamplerOptions& options = {});

// Members of part `part` with every induced source ahead of its targets.
std::vector<FeatureIndex> propagation_order(const ActionSet& action_set,
                                           std::size_t part);

// Independent stream seed for (row, feature) under a master seed.
Seed derive_seed(Seed master, std::uint64_t row, std::uint64_t feature);

// Comment lines carrying metadata, then a header of feature names, then one
// row per point. Numbers are written in shortest round-trip form.
std::string serialize_reachable(const ReachableSet& set,
                                const ActionSet& action_set);
ReachableSet parse_reachable(std::string_view text,
                             const ActionSet& action_set);

}  // namespace rescore

#endif  // RESCORE_REACHABLE_H_
