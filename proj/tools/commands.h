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

// Subcommands of the rescore tool. Each returns a JSON report; main() only
// parses flags, writes the report, and maps exceptions to exit codes.

#ifndef RESCORE_TOOLS_COMMANDS_H_
#define RESCORE_TOOLS_COMMANDS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rescore/responsiveness.h"

namespace rescore::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitResource = 3;

struct Inputs {
  std::string data;
  std::string actions;
  std::string model;
  std::string label_column = "label";
  Label target = 1;
  // 0 selects exact enumeration.
  std::size_t sample = 0;
  double alpha = 0.05;
  Seed seed = 0;
  std::string cache_dir;
};

struct ExplainOptions {
  std::string method = "resp";
  std::size_t k = 4;
  std::optional<std::size_t> row;
};

struct AuditOptions {
  std::vector<std::string> methods = {"resp", "lime", "lime_aa", "shap",
                                      "shap_aa"};
  std::size_t k = 4;
};

nlohmann::ordered_json run_score(const Inputs& inputs);
nlohmann::ordered_json run_explain(const Inputs& inputs,
                                   const ExplainOptions& options);
nlohmann::ordered_json run_audit(const Inputs& inputs,
                                 const AuditOptions& options);
nlohmann::ordered_json run_samplesize(double alpha, double half_width,
                                      const std::string& regime);

// Full command line entry point; returns the process exit code.
int run_main(int argc, char** argv);

}  // namespace rescore::cli

#endif  // RESCORE_TOOLS_COMMANDS_H_
