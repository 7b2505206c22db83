// Copyright 2026 The Motiontrace Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Batch commands behind the motiontrace binary. Each command reads its inputs,
// writes its outputs atomically under the output directory, and reports an
// exit code instead of aborting on the first bad item.

#ifndef MOTIONTRACE_CLI_H_
#define MOTIONTRACE_CLI_H_

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "motiontrace/eval.h"
#include "motiontrace/rewards.h"
#include "motiontrace/temporal.h"

namespace motiontrace {

// Environment variable holding the default worker count.
inline constexpr char kJobsEnvVar[] = "MOTIONTRACE_JOBS";

enum ExitCode : int {
  kExitOk = 0,
  kExitPartialFailure = 1,
  kExitInvalidInvocation = 2,
};

// Per-field overrides on top of DefaultCamera(width, height).
struct CameraOverrides {
  std::optional<double> fx;
  std::optional<double> fy;
  std::optional<double> cx;
  std::optional<double> cy;
};

struct RunConfig {
  std::filesystem::path manifest_path;
  std::filesystem::path qa_path;
  std::filesystem::path output_dir;
  SegmentConfig segment;
  CameraOverrides camera;
  RewardWeights weights;
  bool emit_grounding = true;
  bool system_preamble = false;
  UnclearPolicy unclear_policy = UnclearPolicy::kCountAsIncorrect;
  int jobs = 1;
};

// MOTIONTRACE_JOBS if it holds a positive integer, else 1.
int DefaultJobs();

// Applies a JSON config document on top of `config`. Keys present in the
// document win; unknown keys are rejected. Relative paths are resolved
// against `base_dir`.
absl::Status ApplyConfigJson(std::string_view text,
                             const std::filesystem::path& base_dir,
                             RunConfig* config);
absl::Status ApplyConfigFile(const std::filesystem::path& path,
                             RunConfig* config);

absl::Status ValidateRunConfig(const RunConfig& config);

struct ItemError {
  // "video:<id>", "qa:<id>", "response:<id>", ...
  std::string item;
  std::string message;

  friend bool operator==(const ItemError&, const ItemError&) = default;
};

struct CommandResult {
  int exit_code = kExitOk;
  // Sorted by item for stable output.
  std::vector<ItemError> errors;
};

// Per video: <out>/<video_id>/{segments,artifacts,profile}.json.
// Per QA record: <out>/<video_id>/<qa_id>/{grounding.json,prompt.txt}.
// Always writes <out>/errors.json.
CommandResult RunProfile(const RunConfig& config);

// Reads judge responses ({"id", "text"} per line), writes <out>/report.json
// and <out>/report.md. Records without a response count as Unclear.
CommandResult RunScore(const RunConfig& config,
                       const std::filesystem::path& responses_path);

// Prints the composition table and writes <out>/stats.{txt,json}.
CommandResult RunStats(const RunConfig& config, std::ostream& out);

// Reads rollouts ({"prompt_id", "text", "correctness", "ordered"} plus an
// optional "reference"), writes <out>/advantages.jsonl with one line per
// prompt group. Without a "reference" field the ROUGE reference is the
// ground truth of the QA record whose id equals prompt_id.
CommandResult RunRewards(const RunConfig& config,
                         const std::filesystem::path& rollouts_path);

// Checks every manifest entry (and the QA file, if set) and prints the
// violations. Writes <out>/validation.json when an output directory is set.
CommandResult RunValidate(const RunConfig& config, std::ostream& out);

// Pairs QA records with model answers ({"id", "text"} per line) and writes
// <out>/judge_requests.jsonl ({"id", "prompt"} per line).
CommandResult RunJudge(const RunConfig& config,
                       const std::filesystem::path& answers_path);

}  // namespace motiontrace

#endif  // MOTIONTRACE_CLI_H_
