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

#include "rescore/responsiveness.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <boost/math/distributions/normal.hpp>

#include "rescore/solver.h"

namespace rescore {
namespace {

void CheckAlpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ValidationError("alpha must lie in (0, 1)");
  }
}

Vector ActionOf(const ReachableSet& reachable, const Vector& point) {
  Vector a(point.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    a[k] = point[k] - reachable.anchor[k];
  }
  return a;
}

double CheckedWeight(const ActionWeight& weight, const Vector& a) {
  const double w = weight(a);
  if (!std::isfinite(w) || w < 0.0) {
    throw ValidationError("action weights must be finite and nonnegative");
  }
  return w;
}

Vector Plus(const Vector& x, const Vector& a) {
  Vector y = x;
  for (std::size_t k = 0; k < y.size(); ++k) y[k] += a[k];
  return y;
}

bool IsNull(const Vector& a) {
  return std::all_of(a.begin(), a.end(),
                     [](double v) { return std::abs(v) <= kValueTolerance; });
}

// Uniform own changes on the part, propagated downstream; the null action if
// the draw is infeasible.
Vector RandomPartAction(const Vector& x, std::size_t part,
                        const ActionSet& action_set, std::mt19937_64& rng) {
  Vector a(action_set.size(), 0.0);
  for (FeatureIndex k : propagation_order(action_set, part)) {
    const auto [lo, hi] = own_change_range(x, k, action_set);
    double own = 0.0;
    if (lo < hi) {
      if (action_set.feature(k).discrete()) {
        std::uniform_int_distribution<long long> u(std::llround(std::ceil(lo)),
                                                   std::llround(std::floor(hi)));
        own = static_cast<double>(u(rng));
      } else {
        own = std::uniform_real_distribution<double>(lo, hi)(rng);
      }
    }
    a[k] = own + action_set.Induced(k, x, a);
  }
  if (!action_set.PartFeasible(part, x, a)) std::fill(a.begin(), a.end(), 0.0);
  return a;
}

TriageVerdict Witness(const Vector& x, const Vector& a,
                      const ActionSet& action_set) {
  TriageVerdict verdict;
  verdict.witness_action = a;
  std::vector<FeatureIndex> movers;
  for (FeatureIndex k = 0; k < a.size(); ++k) {
    if (std::abs(a[k] - action_set.Induced(k, x, a)) > kValueTolerance) {
      movers.push_back(k);
    }
  }
  if (movers.size() == 1 && std::abs(a[movers[0]]) > kValueTolerance) {
    verdict.status = TriageStatus::kSingleFeatureRecourse;
    verdict.witness_feature = movers[0];
  } else {
    verdict.status = TriageStatus::kJointOnlyRecourse;
  }
  return verdict;
}

// Feasible actions of a part, null first and then by L1 norm; nullopt when
// the part cannot be enumerated.
std::optional<std::vector<Vector>> PartActions(const Vector& x,
                                               std::size_t part,
                                               const ActionSet& action_set,
                                               const TriageOptions& options) {
  if (!action_set.AllDiscrete(action_set.partition()[part]) ||
      part_grid_size(part, action_set) > options.exhaustive_limit) {
    return std::nullopt;
  }
  std::vector<Vector> actions;
  try {
    actions = enumerate_part_actions(x, part, action_set, options.part_budget);
  } catch (const ResourceError&) {
    return std::nullopt;
  }
  auto norm = [](const Vector& a) {
    double n = 0.0;
    for (double v : a) n += std::abs(v);
    return n;
  };
  std::stable_sort(actions.begin(), actions.end(),
                   [&](const Vector& l, const Vector& r) {
                     return norm(l) < norm(r);
                   });
  return actions;
}

TriageVerdict TriageLinear(const Vector& x, const ActionSet& action_set,
                           const Classifier& model, Label target,
                           const TriageOptions& options) {
  const auto& w = std::get<LinearModel>(model.parameters()).coefficients;
  const double sign = target == model.positive_label() ? 1.0 : -1.0;
  auto gain = [&](const Vector& a) {
    double g = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) g += w[k] * a[k];
    return sign * g;
  };

  // Best action per part; the objective is additive across parts.
  const std::size_t parts = action_set.partition().size();
  std::vector<Vector> best(parts, Vector(action_set.size(), 0.0));
  std::vector<double> best_gain(parts, 0.0);
  bool uncertain = false;
  for (std::size_t p = 0; p < parts; ++p) {
    const auto& members = action_set.partition()[p];
    if (auto actions = PartActions(x, p, action_set, options)) {
      for (const Vector& a : *actions) {
        const double g = gain(a);
        if (g > best_gain[p]) {
          best_gain[p] = g;
          best[p] = a;
        }
      }
    } else if (members.size() == 1 &&
               action_set.InducedInto(members[0]).empty()) {
      const FeatureIndex k = members[0];
      const auto [lo, hi] = own_change_range(x, k, action_set);
      for (double v : {lo, hi}) {
        Vector a(action_set.size(), 0.0);
        a[k] = v;
        if (gain(a) > best_gain[p]) {
          best_gain[p] = gain(a);
          best[p] = a;
        }
      }
    } else {
      uncertain = true;
    }
  }

  std::vector<std::size_t> order(parts);
  for (std::size_t p = 0; p < parts; ++p) order[p] = p;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return best_gain[l] > best_gain[r];
  });
  Vector a(action_set.size(), 0.0);
  for (std::size_t p : order) {
    if (best_gain[p] <= 0.0) break;
    for (std::size_t k = 0; k < a.size(); ++k) a[k] += best[p][k];
    if (model.Predict(Plus(x, a)) == target) return Witness(x, a, action_set);
  }
  TriageVerdict verdict;
  verdict.status =
      uncertain ? TriageStatus::kUndetermined : TriageStatus::kFixedPrediction;
  return verdict;
}

TriageVerdict TriageGeneral(const Vector& x, const ActionSet& action_set,
                            const Classifier& model, Label target,
                            const TriageOptions& options) {
  const std::size_t parts = action_set.partition().size();
  std::vector<std::optional<std::vector<Vector>>> lists(parts);
  bool all_listed = true;
  std::uint64_t total = 1;
  for (std::size_t p = 0; p < parts; ++p) {
    lists[p] = PartActions(x, p, action_set, options);
    if (!lists[p]) {
      all_listed = false;
      continue;
    }
    const std::uint64_t n = lists[p]->size();
    total = (n != 0 && total > options.exhaustive_limit / n)
                ? options.exhaustive_limit + 1
                : total * n;
  }

  if (all_listed && total <= options.exhaustive_limit) {
    std::vector<std::size_t> pick(parts, 0);
    for (bool more = total > 0; more;) {
      Vector a(action_set.size(), 0.0);
      for (std::size_t q = 0; q < parts; ++q) {
        const Vector& part_action = (*lists[q])[pick[q]];
        for (std::size_t k = 0; k < a.size(); ++k) a[k] += part_action[k];
      }
      if (!IsNull(a) && model.Predict(Plus(x, a)) == target) {
        return Witness(x, a, action_set);
      }
      std::size_t p = 0;
      while (p < parts && ++pick[p] == lists[p]->size()) pick[p++] = 0;
      more = p < parts;
    }
    return {TriageStatus::kFixedPrediction, std::nullopt, std::nullopt};
  }

  std::mt19937_64 rng(options.seed);
  for (std::size_t t = 0; t < options.random_trials; ++t) {
    Vector a(action_set.size(), 0.0);
    for (std::size_t p = 0; p < parts; ++p) {
      Vector part_action;
      if (lists[p] && lists[p]->empty()) {
        return {TriageStatus::kFixedPrediction, std::nullopt, std::nullopt};
      }
      if (lists[p]) {
        std::uniform_int_distribution<std::size_t> u(0, lists[p]->size() - 1);
        part_action = (*lists[p])[u(rng)];
      } else {
        part_action = RandomPartAction(x, p, action_set, rng);
      }
      for (std::size_t k = 0; k < a.size(); ++k) a[k] += part_action[k];
    }
    if (IsNull(a)) continue;
    if (model.Predict(Plus(x, a)) == target) return Witness(x, a, action_set);
  }
  return {TriageStatus::kUndetermined, std::nullopt, std::nullopt};
}

}  // namespace

ResponsivenessScore score_exact(const ReachableSet& reachable,
                                const Classifier& model, Label target) {
  if (!reachable.exact) {
    throw ValidationError("score_exact needs an exact reachable set");
  }
  ResponsivenessScore s;
  s.feature = reachable.feature;
  s.exact = true;
  s.trials = reachable.points.size();
  for (const Vector& p : reachable.points) {
    if (model.Predict(p) == target) ++s.successes;
  }
  s.empty = s.trials == 0;
  s.estimate = s.empty ? 0.0 : static_cast<double>(s.successes) / s.trials;
  return s;
}

ResponsivenessScore score_estimated(const ReachableSet& reachable,
                                    const Classifier& model, Label target,
                                    double alpha) {
  CheckAlpha(alpha);
  if (reachable.exact) {
    throw ValidationError("score_estimated needs a sampled reachable set");
  }
  if (reachable.points.empty()) {
    throw ValidationError("no sampled points to score");
  }
  ResponsivenessScore s;
  s.feature = reachable.feature;
  s.exact = false;
  s.alpha = alpha;
  s.trials = reachable.points.size();
  for (const Vector& p : reachable.points) {
    if (model.Predict(p) == target) ++s.successes;
  }
  s.estimate = static_cast<double>(s.successes) / s.trials;
  const AgrestiCoull ac = agresti_coull(s.successes, s.trials, alpha);
  s.interval = std::make_pair(ac.low, ac.high);
  return s;
}

ResponsivenessScore score_reachable(const ReachableSet& reachable,
                                    const Classifier& model, Label target,
                                    double alpha) {
  return reachable.exact ? score_exact(reachable, model, target)
                         : score_estimated(reachable, model, target, alpha);
}

ResponsivenessScore unactionable_score(FeatureIndex j) {
  ResponsivenessScore s;
  s.feature = j;
  s.empty = true;
  return s;
}

double critical_value(double alpha) {
  CheckAlpha(alpha);
  return boost::math::quantile(boost::math::normal_distribution<double>(),
                               1.0 - alpha / 2.0);
}

AgrestiCoull agresti_coull(double successes, double trials, double alpha) {
  if (!(trials >= 0.0) || successes < 0.0 || successes > trials) {
    throw ValidationError("need 0 <= successes <= trials");
  }
  const double k = critical_value(alpha);
  const double k2 = k * k;
  AgrestiCoull ac;
  ac.center = (successes + k2 / 2.0) / (trials + k2);
  ac.half_width = k * std::sqrt(ac.center * (1.0 - ac.center) / (trials + k2));
  ac.low = std::max(0.0, ac.center - ac.half_width);
  ac.high = std::min(1.0, ac.center + ac.half_width);
  return ac;
}

std::uint64_t sample_size(double alpha, double half_width,
                          IntervalRegime regime) {
  CheckAlpha(alpha);
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw ValidationError("half_width must be positive");
  }
  auto width = [&](std::uint64_t n) {
    const double trials = static_cast<double>(n);
    const double successes =
        regime == IntervalRegime::kShortest ? 0.0 : trials / 2.0;
    return agresti_coull(successes, trials, alpha).half_width;
  };
  // The half-width decreases in N in both regimes.
  std::uint64_t hi = 1;
  while (width(hi) > half_width) {
    if (hi > (std::numeric_limits<std::uint64_t>::max() >> 2)) {
      throw ResourceError("half_width too small");
    }
    hi *= 2;
  }
  std::uint64_t lo = hi / 2;  // width(lo) > half_width, or lo == 0
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (width(mid) <= half_width ? hi : lo) = mid;
  }
  if (lo == 0 && width(0) <= half_width) return 0;
  return hi;
}

double score_cost_weighted(const ReachableSet& reachable,
                           const Classifier& model, Label target,
                           const ActionWeight& weight, bool normalize) {
  double hit = 0.0;
  double all = 0.0;
  for (const Vector& p : reachable.points) {
    const double w = CheckedWeight(weight, ActionOf(reachable, p));
    all += w;
    if (model.Predict(p) == target) hit += w;
  }
  if (!normalize) return hit;
  return all > 0.0 ? hit / all : 0.0;
}

std::vector<FeatureCost> rank_by_least_cost(
    const std::vector<ReachableSet>& reachable, const Classifier& model,
    Label target, const ActionWeight& cost) {
  std::vector<FeatureCost> ranked;
  for (const ReachableSet& r : reachable) {
    std::optional<double> cheapest;
    for (const Vector& p : r.points) {
      if (model.Predict(p) != target) continue;
      const double c = CheckedWeight(cost, ActionOf(r, p));
      if (!cheapest || c < *cheapest) cheapest = c;
    }
    if (cheapest) ranked.push_back({r.feature, *cheapest});
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const FeatureCost& l, const FeatureCost& r) {
              return l.cost != r.cost ? l.cost < r.cost : l.feature < r.feature;
            });
  return ranked;
}

double score_robust(const Vector& x, FeatureIndex j,
                    const ActionSet& action_set, const Classifier& model,
                    Label target, double epsilon,
                    std::uint64_t perturbation_budget,
                    const SolverOptions& options) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw ValidationError("epsilon must be finite and nonnegative");
  }
  const ReachableSet reachable = enumerate_reachable(x, j, action_set, options);
  const std::size_t d = action_set.size();
  std::vector<FeatureIndex> perturbable;
  for (FeatureIndex k = 0; k < d; ++k) {
    if (k == j) continue;
    if (!action_set.feature(k).discrete()) {
      if (epsilon > 0.0) {
        throw ValidationError("cannot perturb real-valued feature '" +
                              action_set.feature(k).name + "'");
      }
      continue;
    }
    perturbable.push_back(k);
  }
  if (reachable.points.empty()) return 0.0;

  const auto radius = static_cast<long long>(std::floor(epsilon));
  auto fraction = [&](const Vector& delta) {
    std::size_t hits = 0;
    for (const Vector& p : reachable.points) {
      Vector q = p;
      for (FeatureIndex k = 0; k < d; ++k) {
        const FeatureSpec& f = action_set.feature(k);
        q[k] = std::clamp(q[k] + delta[k], f.lower_bound, f.upper_bound);
      }
      if (model.Predict(q) == target) ++hits;
    }
    return static_cast<double>(hits) / reachable.points.size();
  };

  double worst = 1.0;
  std::uint64_t visited = 0;
  Vector delta(d, 0.0);
  auto recurse = [&](auto&& self, std::size_t i, long long left) -> void {
    if (i == perturbable.size()) {
      if (++visited > perturbation_budget) {
        throw ResourceError("perturbation budget of " +
                            std::to_string(perturbation_budget) +
                            " exhausted");
      }
      worst = std::min(worst, fraction(delta));
      return;
    }
    const FeatureIndex k = perturbable[i];
    for (long long v = -left; v <= left; ++v) {
      delta[k] = static_cast<double>(v);
      self(self, i + 1, left - std::abs(v));
    }
    delta[k] = 0.0;
  };
  recurse(recurse, 0, radius);
  return worst;
}

ResponseClass classify_response(const ReachableSet& reachable,
                                const Classifier& model, Label target,
                                std::optional<Direction> expected_direction) {
  const FeatureIndex j = reachable.feature;
  std::vector<std::pair<double, bool>> by_value;
  for (const Vector& p : reachable.points) {
    by_value.push_back({p[j], model.Predict(p) == target});
  }
  std::sort(by_value.begin(), by_value.end());
  // Collapse equal values; a value responds if any of its points does.
  std::vector<std::pair<double, bool>> values;
  for (const auto& [v, hit] : by_value) {
    if (!values.empty() && values.back().first == v) {
      values.back().second = values.back().second || hit;
    } else {
      values.push_back({v, hit});
    }
  }

  ResponseClass result;
  std::size_t first = values.size(), last = 0, count = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i].second) continue;
    first = std::min(first, i);
    last = i;
    ++count;
  }
  result.responsive = count > 0;
  const bool contiguous = result.responsive && last - first + 1 == count;
  const bool reaches_low = contiguous && first == 0;
  const bool reaches_high = contiguous && last + 1 == values.size();
  result.monotonic = reaches_low || reaches_high;
  if (expected_direction) {
    result.intuitive = *expected_direction == Direction::kIncrease
                           ? reaches_high
                           : reaches_low;
  }
  return result;
}

Direction expected_direction_for(
    const std::map<std::string, Direction>& expectations,
    std::string_view feature) {
  const auto it = expectations.find(std::string(feature));
  if (it == expectations.end()) {
    throw ValidationError("no expected direction configured for '" +
                          std::string(feature) + "'");
  }
  return it->second;
}

std::string_view to_string(TriageStatus status) {
  switch (status) {
    case TriageStatus::kSingleFeatureRecourse:
      return "single_feature_recourse";
    case TriageStatus::kJointOnlyRecourse:
      return "joint_only_recourse";
    case TriageStatus::kFixedPrediction:
      return "fixed_prediction";
    case TriageStatus::kUndetermined:
      return "undetermined";
  }
  return "undetermined";
}

TriageVerdict triage(const Vector& x,
                     const std::vector<ResponsivenessScore>& scores,
                     const ActionSet& action_set, const Classifier& model,
                     Label target, const TriageOptions& options) {
  if (x.size() != action_set.size()) {
    throw ValidationError("dimension mismatch");
  }
  const ResponsivenessScore* best = nullptr;
  for (const ResponsivenessScore& s : scores) {
    if (s.successes == 0) continue;
    if (!best || s.estimate > best->estimate) best = &s;
  }
  if (best) {
    TriageVerdict verdict;
    verdict.status = TriageStatus::kSingleFeatureRecourse;
    verdict.witness_feature = best->feature;
    return verdict;
  }
  if (!std::holds_alternative<TableModel>(model.parameters()) &&
      target != model.positive_label() && target != model.negative_label()) {
    return {TriageStatus::kFixedPrediction, std::nullopt, std::nullopt};
  }
  return model.is_linear()
             ? TriageLinear(x, action_set, model, target, options)
             : TriageGeneral(x, action_set, model, target, options);
}

}  // namespace rescore
