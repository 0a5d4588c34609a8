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

#include "commands.h"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include "CLI11.hpp"
#include "rescore/attribution.h"
#include "rescore/digest.h"
#include "rescore/reachable.h"

namespace rescore::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr std::size_t kSurrogateSamples = 1000;
constexpr std::size_t kShapleyPermutations = 256;

const std::set<std::string> kMethods = {"resp", "lime", "lime_aa", "shap",
                                        "shap_aa"};

std::string RequireFile(const std::string& path, const char* flag) {
  if (path.empty()) {
    throw ValidationError(std::string(flag) + " is required");
  }
  return read_file(path);
}

void WriteAtomically(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path temp = path;
  temp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write file", temp.string());
    out << contents;
    if (!out.flush()) throw ValidationError("write failed", temp.string());
  }
  fs::rename(temp, path);
}

class Session {
 public:
  explicit Session(const Inputs& inputs)
      : inputs_(inputs),
        actions_text_(RequireFile(inputs.actions, "--actions")),
        model_text_(RequireFile(inputs.model, "--model")),
        data_text_(RequireFile(inputs.data, "--data")),
        actions_(load_action_spec(actions_text_)),
        model_(load_model(model_text_, actions_)),
        data_(parse_dataset(data_text_, actions_, inputs.label_column,
                            inputs.target)),
        spec_digest_(sha256_hex(to_json(actions_))) {
    critical_value(inputs.alpha);
  }

  const ActionSet& actions() const { return actions_; }
  const Classifier& model() const { return model_; }
  const Dataset& data() const { return data_; }
  const Inputs& inputs() const { return inputs_; }

  bool Denied(std::size_t row) const {
    return model_.Predict(data_.rows[row]) != inputs_.target;
  }

  std::vector<ResponsivenessScore> Scores(std::size_t row) const {
    std::vector<ResponsivenessScore> scores;
    for (FeatureIndex j = 0; j < actions_.size(); ++j) {
      if (!actions_.feature(j).actionable) {
        scores.push_back(unactionable_score(j));
        continue;
      }
      const ReachableSet r = Reach(row, j);
      scores.push_back(
          score_reachable(r, model_, inputs_.target, inputs_.alpha));
    }
    return scores;
  }

  Json Provenance(const std::string& command) const {
    Json p;
    p["command"] = command;
    p["tool"] = "rescore 0.1.0";
    p["mode"] = inputs_.sample == 0 ? "exact" : "sample";
    p["sample"] = inputs_.sample;
    p["alpha"] = inputs_.alpha;
    p["seed"] = inputs_.seed;
    p["target"] = inputs_.target;
    p["label_column"] = inputs_.label_column;
    p["data_sha256"] = sha256_hex(data_text_);
    p["actions_sha256"] = sha256_hex(actions_text_);
    p["model_sha256"] = sha256_hex(model_text_);
    p["spec_digest"] = spec_digest_;
    return p;
  }

  Vector Baseline() const {
    Vector mean(actions_.size(), 0.0);
    if (data_.rows.empty()) return mean;
    for (const Vector& x : data_.rows) {
      for (std::size_t k = 0; k < x.size(); ++k) mean[k] += x[k];
    }
    for (FeatureIndex k = 0; k < mean.size(); ++k) {
      const FeatureSpec& f = actions_.feature(k);
      mean[k] /= static_cast<double>(data_.rows.size());
      if (f.discrete()) mean[k] = std::round(mean[k]);
      mean[k] = std::clamp(mean[k], f.lower_bound, f.upper_bound);
    }
    return mean;
  }

 private:
  bool HasInterventions(const Vector& x, FeatureIndex j) const {
    if (actions_.feature(j).discrete()) {
      return !intervention_grid(x, j, actions_).empty();
    }
    const auto [lo, hi] = own_change_range(x, j, actions_);
    return hi > lo;
  }

  ReachableSet Compute(std::size_t row, FeatureIndex j) const {
    const Vector& x = data_.rows[row];
    if (inputs_.sample == 0) {
      if (!actions_.AllDiscrete(actions_.PartContaining(j))) {
        throw ValidationError("exact mode needs discrete features; '" +
                              actions_.feature(j).name +
                              "' shares a part with a real-valued feature "
                              "(use --sample)");
      }
      return enumerate_reachable(x, j, actions_);
    }
    if (!HasInterventions(x, j)) {
      ReachableSet empty;
      empty.anchor = x;
      empty.feature = j;
      return empty;
    }
    return sample_reachable(x, j, actions_, inputs_.sample,
                            derive_seed(inputs_.seed, row, j));
  }

  ReachableSet Reach(std::size_t row, FeatureIndex j) const {
    if (inputs_.cache_dir.empty()) return Compute(row, j);
    const Vector& x = data_.rows[row];
    ReachableSet probe;
    probe.anchor = x;
    const std::string row_digest =
        sha256_hex(serialize_reachable(probe, actions_));
    const std::string mode =
        inputs_.sample == 0
            ? "exact"
            : "n" + std::to_string(inputs_.sample) + "-s" +
                  std::to_string(derive_seed(inputs_.seed, row, j));
    const fs::path path = fs::path(inputs_.cache_dir) / spec_digest_ /
                          row_digest /
                          (actions_.feature(j).name + "." + mode + ".csv");
    if (fs::exists(path)) {
      try {
        ReachableSet cached = parse_reachable(read_file(path), actions_);
        if (cached.anchor == x && cached.feature == j) return cached;
      } catch (const ValidationError&) {
        // Unreadable entries are recomputed and overwritten.
      }
    }
    ReachableSet fresh = Compute(row, j);
    WriteAtomically(path, serialize_reachable(fresh, actions_));
    return fresh;
  }

  Inputs inputs_;
  std::string actions_text_;
  std::string model_text_;
  std::string data_text_;
  ActionSet actions_;
  Classifier model_;
  Dataset data_;
  std::string spec_digest_;
};

Json ScoreRecord(const Session& s, std::size_t row,
                 const ResponsivenessScore& score) {
  Json r;
  r["row"] = row;
  r["feature"] = s.actions().feature(score.feature).name;
  r["estimate"] = score.estimate;
  r["exact"] = score.exact;
  r["successes"] = score.successes;
  r["trials"] = score.trials;
  if (score.interval) {
    r["interval"] = {score.interval->first, score.interval->second};
  } else {
    r["interval"] = nullptr;
  }
  r["empty"] = score.empty;
  return r;
}

struct RowAnalysis {
  std::vector<ResponsivenessScore> scores;
  TriageVerdict verdict;
};

RowAnalysis Analyze(const Session& s, std::size_t row) {
  RowAnalysis a;
  a.scores = s.Scores(row);
  TriageOptions options;
  options.seed = derive_seed(s.inputs().seed, row, s.actions().size() + 1);
  a.verdict = triage(s.data().rows[row], a.scores, s.actions(), s.model(),
                     s.inputs().target, options);
  return a;
}

Explanation Explain(const Session& s, std::size_t row,
                    const RowAnalysis& analysis, const std::string& method,
                    std::size_t k) {
  if (method == "resp") {
    if (analysis.verdict.status != TriageStatus::kSingleFeatureRecourse) {
      Explanation withheld;
      withheld.escalate = true;
      return withheld;
    }
    return build_explanation(analysis.scores, k, true);
  }
  const Vector& x = s.data().rows[row];
  const std::size_t d = s.actions().size();
  AttributionVector attribution;
  if (method == "lime" || method == "lime_aa") {
    attribution = attribute_surrogate(x, s.model(), s.actions(),
                                      std::max(kSurrogateSamples, d + 1), 0.0,
                                      derive_seed(s.inputs().seed, row, d));
  } else if (method == "shap" || method == "shap_aa") {
    const ShapleyMode mode =
        d <= 15 ? ShapleyMode::kExact : ShapleyMode::kPermutationSampled;
    attribution = attribute_shapley(x, s.model(), s.Baseline(), mode,
                                    kShapleyPermutations,
                                    derive_seed(s.inputs().seed, row, d));
  } else {
    throw ValidationError("unknown method '" + method + "'");
  }
  if (method.size() > 3 && method.substr(method.size() - 3) == "_aa") {
    attribution = make_action_aware(attribution, s.actions());
  }
  return build_explanation(attribution, k, true);
}

Json ExplanationRecord(const Session& s, std::size_t row,
                       const std::string& method, const Explanation& e,
                       const RowAnalysis& analysis) {
  Json r;
  r["row"] = row;
  r["method"] = method;
  Json features = Json::array();
  for (FeatureIndex j : e.features) {
    features.push_back(s.actions().feature(j).name);
  }
  r["features"] = std::move(features);
  r["scores"] = e.scores;
  Json responsive = Json::array();
  for (FeatureIndex j : e.features) {
    responsive.push_back(analysis.scores[j].successes > 0);
  }
  r["responsive"] = std::move(responsive);
  if (method == "resp") {
    r["triage"] = std::string(to_string(analysis.verdict.status));
    r["withheld"] = e.escalate;
  }
  return r;
}

void CheckMethod(const std::string& method) {
  if (!kMethods.count(method)) {
    throw ValidationError("unknown method '" + method + "'");
  }
}

double Percent(std::size_t count, std::size_t total) {
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(count) / total;
}

}  // namespace

Json run_score(const Inputs& inputs) {
  const Session s(inputs);
  Json report;
  report["provenance"] = s.Provenance("score");
  Json records = Json::array();
  for (std::size_t row = 0; row < s.data().rows.size(); ++row) {
    if (!s.Denied(row)) continue;
    for (const ResponsivenessScore& score : s.Scores(row)) {
      records.push_back(ScoreRecord(s, row, score));
    }
  }
  report["records"] = std::move(records);
  return report;
}

Json run_explain(const Inputs& inputs, const ExplainOptions& options) {
  CheckMethod(options.method);
  if (options.k == 0) throw ValidationError("--k must be at least 1");
  const Session s(inputs);
  if (options.row && *options.row >= s.data().rows.size()) {
    throw ValidationError("--row is out of range");
  }
  Json report;
  report["provenance"] = s.Provenance("explain");
  report["method"] = options.method;
  report["k"] = options.k;
  Json records = Json::array();
  for (std::size_t row = 0; row < s.data().rows.size(); ++row) {
    if (options.row && row != *options.row) continue;
    if (!s.Denied(row)) continue;
    const RowAnalysis analysis = Analyze(s, row);
    const Explanation e = Explain(s, row, analysis, options.method, options.k);
    records.push_back(ExplanationRecord(s, row, options.method, e, analysis));
  }
  report["records"] = std::move(records);
  return report;
}

Json run_audit(const Inputs& inputs, const AuditOptions& options) {
  for (const std::string& m : options.methods) CheckMethod(m);
  if (options.k == 0) throw ValidationError("--k must be at least 1");
  const Session s(inputs);

  std::vector<std::size_t> denied;
  for (std::size_t row = 0; row < s.data().rows.size(); ++row) {
    if (s.Denied(row)) denied.push_back(row);
  }

  std::map<TriageStatus, std::size_t> segment;
  struct MethodTally {
    std::size_t presented = 0, all_unresponsive = 0, at_least_one = 0,
                all_responsive = 0, highlighted = 0;
  };
  std::vector<MethodTally> tally(options.methods.size());
  Json rows = Json::array();
  for (std::size_t row : denied) {
    const RowAnalysis analysis = Analyze(s, row);
    ++segment[analysis.verdict.status];
    Json entry;
    entry["row"] = row;
    entry["triage"] = std::string(to_string(analysis.verdict.status));
    if (analysis.verdict.witness_feature) {
      entry["witness_feature"] =
          s.actions().feature(*analysis.verdict.witness_feature).name;
    }
    if (analysis.verdict.witness_action) {
      entry["witness_action"] = *analysis.verdict.witness_action;
    }
    Json explanations = Json::array();
    for (std::size_t m = 0; m < options.methods.size(); ++m) {
      const std::string& method = options.methods[m];
      const Explanation e = Explain(s, row, analysis, method, options.k);
      explanations.push_back(ExplanationRecord(s, row, method, e, analysis));
      if (e.features.empty()) continue;
      MethodTally& t = tally[m];
      ++t.presented;
      t.highlighted += e.features.size();
      std::size_t responsive = 0;
      for (FeatureIndex j : e.features) {
        if (analysis.scores[j].successes > 0) ++responsive;
      }
      if (responsive == 0) ++t.all_unresponsive;
      if (responsive > 0) ++t.at_least_one;
      if (responsive == e.features.size()) ++t.all_responsive;
    }
    entry["explanations"] = std::move(explanations);
    rows.push_back(std::move(entry));
  }

  const std::size_t n = s.data().rows.size();
  const std::size_t nd = denied.size();
  Json report;
  report["provenance"] = s.Provenance("audit");
  report["k"] = options.k;
  report["n_rows"] = n;
  report["n_denied"] = nd;
  report["pct_denied"] = Percent(nd, n);
  report["pct_fixed"] = Percent(segment[TriageStatus::kFixedPrediction], nd);
  report["pct_1d"] = Percent(segment[TriageStatus::kSingleFeatureRecourse], nd);
  report["pct_nd"] = Percent(segment[TriageStatus::kJointOnlyRecourse], nd);
  report["pct_undetermined"] =
      Percent(segment[TriageStatus::kUndetermined], nd);
  report["segment_counts"] = {
      {"fixed_prediction", segment[TriageStatus::kFixedPrediction]},
      {"single_feature_recourse",
       segment[TriageStatus::kSingleFeatureRecourse]},
      {"joint_only_recourse", segment[TriageStatus::kJointOnlyRecourse]},
      {"undetermined", segment[TriageStatus::kUndetermined]}};
  Json warnings = Json::array();
  if (segment[TriageStatus::kUndetermined] > 0) {
    warnings.push_back(
        std::to_string(segment[TriageStatus::kUndetermined]) +
        " denied rows have undetermined triage; segment percentages are "
        "incomplete");
  }
  report["warnings"] = std::move(warnings);

  Json methods = Json::array();
  for (std::size_t m = 0; m < options.methods.size(); ++m) {
    const MethodTally& t = tally[m];
    auto both = [&](std::size_t count) {
      return Json{{"of_presented", Percent(count, t.presented)},
                  {"of_denied", Percent(count, nd)}};
    };
    Json entry;
    entry["method"] = options.methods[m];
    entry["pct_presented"] = Percent(t.presented, nd);
    entry["pct_all_unresponsive"] = both(t.all_unresponsive);
    entry["pct_at_least_one_responsive"] = both(t.at_least_one);
    entry["pct_all_responsive"] = both(t.all_responsive);
    entry["mean_features_highlighted"] = {
        {"of_presented", t.presented == 0 ? 0.0
                                          : static_cast<double>(t.highlighted) /
                                                t.presented},
        {"of_denied",
         nd == 0 ? 0.0 : static_cast<double>(t.highlighted) / nd}};
    methods.push_back(std::move(entry));
  }
  report["methods"] = std::move(methods);
  report["rows"] = std::move(rows);
  return report;
}

Json run_samplesize(double alpha, double half_width,
                    const std::string& regime) {
  IntervalRegime r;
  if (regime == "shortest") {
    r = IntervalRegime::kShortest;
  } else if (regime == "widest") {
    r = IntervalRegime::kWidest;
  } else {
    throw ValidationError("--regime must be 'shortest' or 'widest'");
  }
  Json report;
  report["alpha"] = alpha;
  report["half_width"] = half_width;
  report["regime"] = regime;
  report["n"] = sample_size(alpha, half_width, r);
  return report;
}

int run_main(int argc, char** argv) {
  CLI::App app{"Feature responsiveness scores and recourse audits"};
  app.require_subcommand(1);

  Inputs inputs;
  std::string out;
  auto add_inputs = [&](CLI::App* cmd) {
    cmd->add_option("--data", inputs.data, "Delimited dataset with header")
        ->required();
    cmd->add_option("--actions", inputs.actions, "Action-set document")
        ->required();
    cmd->add_option("--model", inputs.model, "Model document")->required();
    cmd->add_option("--label", inputs.label_column, "Label column name");
    cmd->add_option("--target", inputs.target, "Target label");
    cmd->add_option("--sample", inputs.sample,
                    "Draws per feature (0 = exact enumeration)");
    cmd->add_option("--alpha", inputs.alpha, "Interval significance level");
    cmd->add_option("--seed", inputs.seed, "Master RNG seed");
    cmd->add_option("--cache-dir", inputs.cache_dir,
                    "Reachable-set cache directory");
    cmd->add_option("--out", out, "Report path (default: stdout)");
  };

  CLI::App* score = app.add_subcommand("score", "Score every denied row");
  add_inputs(score);

  ExplainOptions explain_options;
  CLI::App* explain = app.add_subcommand("explain", "Top-k explanations");
  add_inputs(explain);
  explain->add_option("--method", explain_options.method,
                      "resp, lime, lime_aa, shap or shap_aa");
  explain->add_option("--k", explain_options.k, "Features per explanation");
  std::size_t row = 0;
  CLI::Option* row_option =
      explain->add_option("--row", row, "Only explain this row (0-based)");

  AuditOptions audit_options;
  CLI::App* audit = app.add_subcommand("audit", "Population audit");
  add_inputs(audit);
  audit->add_option("--method", audit_options.methods, "Methods to compare")
      ->delimiter(',');
  audit->add_option("--k", audit_options.k, "Features per explanation");

  double ss_alpha = 0.05;
  double half_width = 0.01;
  std::string regime = "shortest";
  CLI::App* samplesize =
      app.add_subcommand("samplesize", "Minimum draws for a half-width");
  samplesize->add_option("--alpha", ss_alpha, "Significance level");
  samplesize->add_option("--half-width", half_width, "Target half-width");
  samplesize->add_option("--regime", regime, "shortest or widest");
  samplesize->add_option("--out", out, "Report path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  try {
    Json report;
    if (*score) {
      report = run_score(inputs);
    } else if (*explain) {
      if (*row_option) explain_options.row = row;
      report = run_explain(inputs, explain_options);
    } else if (*audit) {
      report = run_audit(inputs, audit_options);
    } else {
      report = run_samplesize(ss_alpha, half_width, regime);
    }
    const std::string text = report.dump(2) + "\n";
    if (out.empty()) {
      std::cout << text;
    } else {
      WriteAtomically(out, text);
    }
    return kExitOk;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kExitResource;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace rescore::cli
