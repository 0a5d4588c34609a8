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

// Responsiveness: the fraction of a feature's reachable points that attain
// the target label, plus the machinery around it.

#ifndef RESCORE_RESPONSIVENESS_H_
#define RESCORE_RESPONSIVENESS_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rescore/actionability.h"
#include "rescore/common.h"
#include "rescore/models.h"
#include "rescore/reachable.h"

namespace rescore {

struct ResponsivenessScore {
  FeatureIndex feature = 0;
  // S / N when exact, the plain sample mean otherwise.
  double estimate = 0.0;
  bool exact = true;
  // Agresti-Coull interval at level 1 - alpha; only when !exact.
  std::optional<std::pair<double, double>> interval;
  std::size_t successes = 0;
  std::size_t trials = 0;
  double alpha = 0.0;
  // Set when the reachable set was empty and the score defaults to 0.
  bool empty = false;
};

// Exact score of a complete reachable set. Empty sets score 0 with N = 0.
ResponsivenessScore score_exact(const ReachableSet& reachable,
                                const Classifier& model, Label target);

// Sample mean of a sampled set with its Agresti-Coull interval. Throws
// ValidationError unless 0 < alpha < 1 and the set is nonempty.
ResponsivenessScore score_estimated(const ReachableSet& reachable,
                                    const Classifier& model, Label target,
                                    double alpha);

// score_exact for exact sets, score_estimated otherwise.
ResponsivenessScore score_reachable(const ReachableSet& reachable,
                                    const Classifier& model, Label target,
                                    double alpha);

// Score of a feature that cannot be acted on: exact 0 over N = 0.
ResponsivenessScore unactionable_score(FeatureIndex j);

struct AgrestiCoull {
  double center = 0.0;      // (S + k^2/2) / (N + k^2)
  double half_width = 0.0;  // k * sqrt(center (1 - center) / (N + k^2))
  double low = 0.0;
  double high = 0.0;
};

// Normal quantile at 1 - alpha/2.
double critical_value(double alpha);

// Successes and trials are real so that S = N/2 can be evaluated for odd N.
AgrestiCoull agresti_coull(double successes, double trials, double alpha);

enum class IntervalRegime { kShortest, kWidest };

// Smallest N whose half-width is <= half_width at S = 0 (shortest) or
// S = N/2 (widest).
std::uint64_t sample_size(double alpha, double half_width,
                          IntervalRegime regime);

// Weight of an action a = x' - x. Must be finite and nonnegative.
using ActionWeight = std::function<double(const Vector& action)>;

// Sum of weight(a) over reachable actions attaining the target, divided by
// the sum of all weights when `normalize` is set (0 if that sum is 0).
double score_cost_weighted(const ReachableSet& reachable,
                           const Classifier& model, Label target,
                           const ActionWeight& weight, bool normalize);

struct FeatureCost {
  FeatureIndex feature;
  double cost;
};

// Cheapest target-attaining action per feature, ascending by cost (ties by
// feature index). Features with no such action are omitted.
std::vector<FeatureCost> rank_by_least_cost(
    const std::vector<ReachableSet>& reachable, const Classifier& model,
    Label target, const ActionWeight& cost);

// Minimum over integer perturbations d (d_j = 0, ||d||_1 <= epsilon) of the
// fraction of reachable points x + a with f(clip(x + a + d)) = target. Only
// discrete features are perturbed; epsilon > 0 with a real-valued feature
// outside j is rejected. Throws ResourceError past `perturbation_budget`
// perturbations.
double score_robust(const Vector& x, FeatureIndex j,
                    const ActionSet& action_set, const Classifier& model,
                    Label target, double epsilon,
                    std::uint64_t perturbation_budget = 1'000'000,
                    const SolverOptions& options = {});

struct ResponseClass {
  bool responsive = false;
  bool monotonic = false;
  // Absent when no expected direction was supplied.
  std::optional<bool> intuitive;
};

// Groups reachable points by the new value of the feature; a value is
// responsive when any of its points attains the target. Monotonic means the
// responsive values form one contiguous run reaching the smallest or largest
// value; intuitive means that run reaches the end on the expected side.
ResponseClass classify_response(const ReachableSet& reachable,
                                const Classifier& model, Label target,
                                std::optional<Direction> expected_direction);

// Looks up the expected direction of a feature; throws ValidationError when
// none is configured.
Direction expected_direction_for(
    const std::map<std::string, Direction>& expectations,
    std::string_view feature);

enum class TriageStatus {
  kSingleFeatureRecourse,
  kJointOnlyRecourse,
  kFixedPrediction,
  kUndetermined,
};

std::string_view to_string(TriageStatus status);

struct TriageVerdict {
  TriageStatus status = TriageStatus::kUndetermined;
  std::optional<FeatureIndex> witness_feature;
  std::optional<Vector> witness_action;
};

struct TriageOptions {
  // Largest product of per-part action counts searched exhaustively.
  std::uint64_t exhaustive_limit = 1'000'000;
  // Random joint actions tried when exhaustive search is out of reach.
  std::size_t random_trials = 100'000;
  Seed seed = 0;
  // Node budget for per-part enumeration.
  std::uint64_t part_budget = 2'000'000;
};

// Decides whether x has single-feature recourse, only joint recourse, or a
// fixed prediction. fixed_prediction is only returned when certified by an
// exact search; a witness found by search counts as single-feature recourse
// when exactly one feature changes on its own.
TriageVerdict triage(const Vector& x,
                     const std::vector<ResponsivenessScore>& scores,
                     const ActionSet& action_set, const Classifier& model,
                     Label target, const TriageOptions& options = {});

}  // namespace rescore

#endif  // RESCORE_RESPONSIVENESS_H_
