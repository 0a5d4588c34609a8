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

#include "rescore/attribution.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "rescore/reachable.h"

namespace rescore {
namespace {

std::uint64_t Fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Indices ordered by key descending, ties to the lower index.
std::vector<FeatureIndex> RankDescending(const std::vector<double>& key) {
  std::vector<FeatureIndex> order(key.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](FeatureIndex l, FeatureIndex r) { return key[l] > key[r]; });
  return order;
}

}  // namespace

AttributionVector attribute_surrogate(const Vector& x, const Classifier& model,
                                      const ActionSet& action_set,
                                      std::size_t n_samples,
                                      double kernel_width, Seed seed) {
  const std::size_t d = action_set.size();
  if (x.size() != d || model.dimension() != d) {
    throw ValidationError("dimension mismatch");
  }
  if (n_samples < d + 1) {
    throw ValidationError("need at least d + 1 surrogate samples");
  }
  const double width =
      kernel_width > 0.0 ? kernel_width : 0.75 * std::sqrt(static_cast<double>(d));

  // One stream per feature, keyed by name, so reordering features permutes
  // the result instead of reshuffling the noise.
  std::vector<std::mt19937_64> streams;
  std::vector<double> sigma(d);
  for (FeatureIndex k = 0; k < d; ++k) {
    const FeatureSpec& f = action_set.feature(k);
    streams.emplace_back(derive_seed(seed, Fnv1a(f.name), 0));
    sigma[k] = (f.upper_bound - f.lower_bound) / 4.0;
  }

  const Eigen::Index p = static_cast<Eigen::Index>(d) + 1;
  Eigen::MatrixXd design(static_cast<Eigen::Index>(n_samples), p);
  Eigen::VectorXd target(static_cast<Eigen::Index>(n_samples));
  Eigen::VectorXd weight(static_cast<Eigen::Index>(n_samples));
  std::normal_distribution<double> noise(0.0, 1.0);
  Vector z(d);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    double dist2 = 0.0;
    design(row, 0) = 1.0;
    for (FeatureIndex k = 0; k < d; ++k) {
      const FeatureSpec& f = action_set.feature(k);
      double v = x[k] + sigma[k] * noise(streams[k]);
      if (f.discrete()) v = std::round(v);
      z[k] = std::clamp(v, f.lower_bound, f.upper_bound);
      const double u = sigma[k] > 0.0 ? (z[k] - x[k]) / sigma[k] : 0.0;
      design(row, static_cast<Eigen::Index>(k) + 1) = u;
      dist2 += u * u;
    }
    target(row) = model.Predict(z) == model.positive_label() ? 1.0 : 0.0;
    weight(row) = std::exp(-dist2 / (width * width));
  }

  const Eigen::VectorXd root = weight.cwiseSqrt();
  const Eigen::MatrixXd weighted = root.asDiagonal() * design;
  const Eigen::VectorXd rhs = root.cwiseProduct(target);
  AttributionVector result;
  result.method = "lime";
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(weighted);
  qr.setThreshold(1e-10);
  Eigen::VectorXd beta;
  if (qr.rank() == p) {
    beta = qr.solve(rhs);
  } else {
    result.ridge_fallback = true;
    Eigen::MatrixXd normal = weighted.transpose() * weighted;
    const double lambda = 1e-6 * std::max(1.0, normal.trace() / p);
    normal.diagonal().array() += lambda;
    beta = normal.ldlt().solve(weighted.transpose() * rhs);
  }
  result.scores.resize(d);
  for (FeatureIndex k = 0; k < d; ++k) {
    const double b = beta(static_cast<Eigen::Index>(k) + 1);
    result.scores[k] = std::isfinite(b) ? b : 0.0;
  }
  return result;
}

AttributionVector attribute_shapley(const Vector& x, const Classifier& model,
                                    const Vector& baseline, ShapleyMode mode,
                                    std::size_t n_permutations, Seed seed) {
  const std::size_t d = x.size();
  if (baseline.size() != d || model.dimension() != d) {
    throw ValidationError("dimension mismatch");
  }
  AttributionVector result;
  result.baseline = baseline;
  result.scores.assign(d, 0.0);

  if (mode == ShapleyMode::kExact) {
    if (d > 15) throw ValidationError("exact Shapley values need d <= 15");
    result.method = "shap";
    const std::size_t masks = std::size_t{1} << d;
    std::vector<double> value(masks);
    Vector z(d);
    for (std::size_t m = 0; m < masks; ++m) {
      for (std::size_t k = 0; k < d; ++k) z[k] = (m >> k) & 1 ? x[k] : baseline[k];
      value[m] = model.Score(z);
    }
    // weight[s] = s! (d - s - 1)! / d!
    std::vector<double> weight(d);
    for (std::size_t s = 0; s < d; ++s) {
      weight[s] = std::exp(std::lgamma(s + 1.0) + std::lgamma(d - s + 0.0) -
                           std::lgamma(d + 1.0));
    }
    for (std::size_t m = 0; m < masks; ++m) {
      const auto size = static_cast<std::size_t>(__builtin_popcountll(m));
      for (std::size_t k = 0; k < d; ++k) {
        if ((m >> k) & 1) continue;
        result.scores[k] +=
            weight[size] * (value[m | (std::size_t{1} << k)] - value[m]);
      }
    }
    return result;
  }

  if (n_permutations == 0) {
    throw ValidationError("need at least one permutation");
  }
  result.method = "shap_sampled";
  std::mt19937_64 rng(seed);
  std::vector<FeatureIndex> order(d);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t t = 0; t < n_permutations; ++t) {
    std::shuffle(order.begin(), order.end(), rng);
    Vector z = baseline;
    double previous = model.Score(z);
    for (FeatureIndex k : order) {
      z[k] = x[k];
      const double current = model.Score(z);
      result.scores[k] += current - previous;
      previous = current;
    }
  }
  for (double& s : result.scores) s /= static_cast<double>(n_permutations);
  return result;
}

AttributionVector make_action_aware(const AttributionVector& attribution,
                                    const ActionSet& action_set) {
  if (attribution.scores.size() != action_set.size()) {
    throw ValidationError("dimension mismatch");
  }
  AttributionVector result = attribution;
  for (FeatureIndex k = 0; k < result.scores.size(); ++k) {
    if (!action_set.feature(k).actionable) result.scores[k] = 0.0;
  }
  const std::string suffix = "_aa";
  if (result.method.size() < suffix.size() ||
      result.method.compare(result.method.size() - suffix.size(),
                            suffix.size(), suffix) != 0) {
    result.method += suffix;
  }
  return result;
}

Explanation build_explanation(const AttributionVector& attribution,
                              std::size_t k, bool require_positive) {
  if (k == 0) throw ValidationError("k must be at least 1");
  std::vector<double> magnitude;
  for (double s : attribution.scores) magnitude.push_back(std::abs(s));
  Explanation e;
  for (FeatureIndex j : RankDescending(magnitude)) {
    if (e.features.size() == k) break;
    if (require_positive && magnitude[j] == 0.0) continue;
    e.features.push_back(j);
    e.scores.push_back(attribution.scores[j]);
  }
  return e;
}

Explanation build_explanation(const std::vector<ResponsivenessScore>& scores,
                              std::size_t k, bool require_positive) {
  if (k == 0) throw ValidationError("k must be at least 1");
  std::vector<double> key;
  for (const ResponsivenessScore& s : scores) key.push_back(s.estimate);
  Explanation e;
  for (std::size_t i : RankDescending(key)) {
    if (e.features.size() == k) break;
    if (require_positive && scores[i].successes == 0) continue;
    e.features.push_back(scores[i].feature);
    e.scores.push_back(scores[i].estimate);
  }
  e.escalate = e.features.empty();
  return e;
}

}  // namespace rescore
