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

// Baseline feature attributions (a local linear surrogate and Shapley
// values) and top-k explanation lists.

#ifndef RESCORE_ATTRIBUTION_H_
#define RESCORE_ATTRIBUTION_H_

#include <string>
#include <vector>

#include "rescore/actionability.h"
#include "rescore/common.h"
#include "rescore/models.h"
#include "rescore/responsiveness.h"

namespace rescore {

struct AttributionVector {
  std::vector<double> scores;
  std::string method;
  // Reference point for Shapley values; empty for the surrogate.
  Vector baseline;
  // The surrogate's normal equations were singular and a small ridge term
  // was added.
  bool ridge_fallback = false;
};

// Weighted least-squares fit of 1[f(z) = positive label] on standardized
// offsets z - x. Samples are Gaussian around x with per-feature standard
// deviation (ub - lb) / 4, rounded and clipped for discrete features.
// Weights are exp(-dist^2 / width^2); width <= 0 selects 0.75 sqrt(d).
// Scores are the slope coefficients. Requires n_samples >= d + 1.
AttributionVector attribute_surrogate(const Vector& x, const Classifier& model,
                                      const ActionSet& action_set,
                                      std::size_t n_samples,
                                      double kernel_width, Seed seed);

enum class ShapleyMode { kExact, kPermutationSampled };

// Shapley values of the game v(S) = score(x on S, baseline elsewhere).
// Exact mode enumerates all coalitions and needs d <= 15.
AttributionVector attribute_shapley(const Vector& x, const Classifier& model,
                                    const Vector& baseline, ShapleyMode mode,
                                    std::size_t n_permutations, Seed seed);

// Zeroes the scores of non-actionable features.
AttributionVector make_action_aware(const AttributionVector& attribution,
                                    const ActionSet& action_set);

struct Explanation {
  std::vector<FeatureIndex> features;
  std::vector<double> scores;
  // A responsiveness explanation came out empty: no single feature can
  // change the outcome and the case needs triage instead of reasons.
  bool escalate = false;
};

// Top-k by |score|, ties to the lower index. require_positive drops zeros.
Explanation build_explanation(const AttributionVector& attribution,
                              std::size_t k, bool require_positive);

// Top-k by responsiveness estimate, ties to the lower index.
// require_positive drops features with no observed success.
Explanation build_explanation(const std::vector<ResponsivenessScore>& scores,
                              std::size_t k, bool require_positive);

}  // namespace rescore

#endif  // RESCORE_ATTRIBUTION_H_
