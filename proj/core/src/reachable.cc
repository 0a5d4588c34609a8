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

#include "rescore/reachable.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>
#include <tuple>
#include <utility>

namespace rescore {

std::vector<FeatureIndex> propagation_order(const ActionSet& action_set,
                                           std::size_t part) {
  std::vector<FeatureIndex> order;
  std::vector<bool> done(action_set.size(), false);
  // Induced edges are acyclic, so plain recursion terminates.
  auto visit = [&](auto&& self, FeatureIndex k) -> void {
    if (done[k]) return;
    done[k] = true;
    for (const InducedEdge& e : action_set.InducedInto(k)) self(self, e.source);
    order.push_back(k);
  };
  for (FeatureIndex k : action_set.partition().at(part)) visit(visit, k);
  return order;
}

namespace {

std::string FormatNumber(double v) {
  char buffer[32];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
  return std::string(buffer, end);
}

double ParseNumber(std::string_view s, const std::string& where) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ValidationError("unparseable number '" + std::string(s) + "'", where);
  }
  return v;
}

std::vector<std::string_view> Split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

void SampleByRejection(const Vector& x, FeatureIndex j,
                       const ActionSet& action_set, std::size_t n,
                       std::size_t max_attempts, std::mt19937_64& rng,
                       std::vector<Vector>& points) {
  const FeatureSpec& fj = action_set.feature(j);
  const std::size_t part = action_set.PartOf(j);
  const auto order = propagation_order(action_set, part);

  // With inflow, j can move without an own change, so its own draw is not
  // restricted to nonzero values.
  const bool inflow = !action_set.InducedInto(j).empty();
  const double min_step =
      fj.discrete() ? 0.0 : 1e-9 * (fj.upper_bound - fj.lower_bound);
  std::vector<double> grid;
  double lo_j = 0.0, hi_j = 0.0;
  if (inflow) {
    if (fj.upper_bound - fj.lower_bound <= min_step) {
      throw ValidationError("empty intervention set");
    }
  } else if (fj.discrete()) {
    grid = intervention_grid(x, j, action_set);
    if (grid.empty()) throw ValidationError("empty intervention set");
  } else {
    std::tie(lo_j, hi_j) = own_change_range(x, j, action_set);
    if (std::max(-lo_j, hi_j) < min_step) {
      throw ValidationError("empty intervention set");
    }
  }

  auto draw_own = [&](FeatureIndex k) -> double {
    if (k == j && !inflow) {
      if (fj.discrete()) {
        std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
        return grid[pick(rng)];
      }
      std::uniform_real_distribution<double> u(lo_j, hi_j);
      return u(rng);
    }
    const auto [lo, hi] = own_change_range(x, k, action_set);
    if (lo == hi) return lo;
    if (action_set.feature(k).discrete()) {
      std::uniform_int_distribution<long long> u(std::llround(std::ceil(lo)),
                                                 std::llround(std::floor(hi)));
      return static_cast<double>(u(rng));
    }
    std::uniform_real_distribution<double> u(lo, hi);
    return u(rng);
  };

  Vector a(action_set.size(), 0.0);
  std::size_t attempts = 0;
  while (points.size() < n) {
    if (attempts++ >= max_attempts) {
      throw SamplerStarvedError(
          "accepted " + std::to_string(points.size()) + " of " +
          std::to_string(n) + " draws for '" + fj.name + "' after " +
          std::to_string(max_attempts) + " attempts");
    }
    std::fill(a.begin(), a.end(), 0.0);
    for (FeatureIndex k : order) {
      a[k] = draw_own(k) + action_set.Induced(k, x, a);
    }
    if (std::abs(a[j]) <= std::max(min_step, kValueTolerance)) continue;
    if (!check_feasibility(x, j, a, action_set)) continue;
    Vector p = x;
    for (std::size_t k = 0; k < p.size(); ++k) p[k] += a[k];
    points.push_back(std::move(p));
  }
}

}  // namespace

ReachableSet enumerate_reachable(const Vector& x, FeatureIndex j,
                                 const ActionSet& action_set,
                                 const SolverOptions& options) {
  if (x.size() != action_set.size() || j >= action_set.size()) {
    throw ValidationError("dimension mismatch");
  }
  ReachableSet set;
  set.anchor = x;
  set.feature = j;
  set.exact = true;
  for (FeatureIndex k : action_set.PartContaining(j)) {
    if (!action_set.feature(k).discrete()) {
      throw ValidationError("exact enumeration needs a discrete part; '" +
                            action_set.feature(k).name + "' is real-valued");
    }
  }
  for (double v : change_values(x, j, action_set)) {
    for (const Vector& a : enumerate_completions(x, j, v, action_set, options)) {
      Vector p = x;
      for (std::size_t k = 0; k < p.size(); ++k) p[k] += a[k];
      set.points.push_back(std::move(p));
    }
  }
  return set;
}

ReachableSet sample_reachable(const Vector& x, FeatureIndex j,
                              const ActionSet& action_set, std::size_t n,
                              Seed seed, const SamplerOptions& options) {
  if (x.size() != action_set.size() || j >= action_set.size()) {
    throw ValidationError("dimension mismatch");
  }
  if (n == 0) throw ValidationError("sample size must be at least 1");
  if (!action_set.feature(j).actionable) {
    throw ValidationError("feature '" + action_set.feature(j).name +
                          "' is not actionable");
  }
  ReachableSet set;
  set.anchor = x;
  set.feature = j;
  set.exact = false;
  set.sample_size = n;
  set.seed = seed;
  std::mt19937_64 rng(seed);

  if (action_set.AllDiscrete(action_set.PartContaining(j))) {
    if (change_values(x, j, action_set).empty()) {
      throw ValidationError("empty intervention set");
    }
    const ReachableSet all = enumerate_reachable(x, j, action_set,
                                                 options.solver);
    if (all.points.empty()) {
      set.exact = true;
      set.sample_size = 0;
      return set;
    }
    std::uniform_int_distribution<std::size_t> pick(0, all.points.size() - 1);
    for (std::size_t i = 0; i < n; ++i) {
      set.points.push_back(all.points[pick(rng)]);
    }
    return set;
  }

  const std::size_t per_sample =
      options.attempts_per_sample == 0 ? 1000 : options.attempts_per_sample;
  SampleByRejection(x, j, action_set, n, per_sample * n, rng, set.points);
  return set;
}

Seed derive_seed(Seed master, std::uint64_t row, std::uint64_t feature) {
  // splitmix64 finalizer over a mix of the three inputs.
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(master) ^ row) ^ feature);
}

std::string serialize_reachable(const ReachableSet& set,
                                const ActionSet& action_set) {
  std::ostringstream out;
  out << "# anchor=";
  for (std::size_t k = 0; k < set.anchor.size(); ++k) {
    out << (k ? "," : "") << FormatNumber(set.anchor[k]);
  }
  out << "\n# feature=" << action_set.feature(set.feature).name
      << "\n# exact=" << (set.exact ? 1 : 0)
      << "\n# sample_size=" << set.sample_size << "\n# seed=" << set.seed
      << "\n";
  for (std::size_t k = 0; k < action_set.size(); ++k) {
    out << (k ? "," : "") << action_set.feature(k).name;
  }
  out << "\n";
  for (const Vector& p : set.points) {
    for (std::size_t k = 0; k < p.size(); ++k) {
      out << (k ? "," : "") << FormatNumber(p[k]);
    }
    out << "\n";
  }
  return out.str();
}

ReachableSet parse_reachable(std::string_view text,
                             const ActionSet& action_set) {
  ReachableSet set;
  std::istringstream in{std::string(text)};
  std::string line;
  bool have_feature = false, have_header = false;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string where = "line " + std::to_string(line_number);
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ValidationError("bad metadata", where);
      const std::string key = line.substr(2, eq - 2);
      const std::string value = line.substr(eq + 1);
      if (key == "anchor") {
        set.anchor.clear();
        for (auto cell : Split(value)) {
          set.anchor.push_back(ParseNumber(cell, where));
        }
      } else if (key == "feature") {
        const auto k = action_set.IndexOf(value);
        if (!k) throw ValidationError("unknown feature '" + value + "'", where);
        set.feature = *k;
        have_feature = true;
      } else if (key == "exact") {
        set.exact = value == "1";
      } else if (key == "sample_size") {
        set.sample_size = std::stoull(value);
      } else if (key == "seed") {
        set.seed = std::stoull(value);
      } else {
        throw ValidationError("unknown metadata key '" + key + "'", where);
      }
      continue;
    }
    const auto cells = Split(line);
    if (cells.size() != action_set.size()) {
      throw ValidationError("wrong number of columns", where);
    }
    if (!have_header) {
      for (std::size_t k = 0; k < cells.size(); ++k) {
        if (cells[k] != action_set.feature(k).name) {
          throw ValidationError("header does not match the action set", where);
        }
      }
      have_header = true;
      continue;
    }
    Vector p;
    for (auto cell : cells) p.push_back(ParseNumber(cell, where));
    set.points.push_back(std::move(p));
  }
  if (!have_feature || !have_header || set.anchor.size() != action_set.size()) {
    throw ValidationError("incomplete reachable-set file");
  }
  return set;
}

}  // namespace rescore
