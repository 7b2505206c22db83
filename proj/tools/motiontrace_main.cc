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

// motiontrace: batch front end.
//
//   motiontrace profile  --manifest dataset.json --qa qa.jsonl --out runs/a
//   motiontrace judge    --qa qa.jsonl --answers answers.jsonl --out runs/a
//   motiontrace score    --qa qa.jsonl --responses judge.jsonl --out runs/a
//   motiontrace stats    --qa qa.jsonl [--out runs/a]
//   motiontrace rewards  --rollouts rollouts.jsonl [--qa qa.jsonl] --out runs/a
//   motiontrace validate --manifest dataset.json [--qa qa.jsonl] [--out dir]
//
// Values from --config take precedence over flags.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "motiontrace/cli.h"

namespace {

using ::motiontrace::CommandResult;
using ::motiontrace::RunConfig;

struct Invocation {
  RunConfig config;
  std::string config_file;
  std::string extra_input;  // responses / rollouts / answers
  bool no_grounding = false;
  std::string unclear = "count_as_incorrect";
  std::optional<uint32_t> max_len;
};

void AddCommonOptions(CLI::App* app, Invocation* inv) {
  RunConfig& c = inv->config;
  app->add_option("--config", inv->config_file,
                  "JSON config file; its values override flags")
      ->check(CLI::ExistingFile);
  app->add_option("--out", c.output_dir, "Output directory");
  app->add_option("-j,--jobs", c.jobs,
                  "Worker threads (default: $MOTIONTRACE_JOBS or 1)")
      ->check(CLI::PositiveNumber);
}

void AddSegmentOptions(CLI::App* app, Invocation* inv) {
  motiontrace::SegmentConfig& s = inv->config.segment;
  app->add_option("--target-segments", s.target_segments,
                  "Desired number of temporal segments");
  app->add_option("--min-len", s.min_len, "Minimum segment length (frames)");
  app->add_option("--max-len", inv->max_len,
                  "Maximum segment length (frames); default max(min_len, "
                  "round(2*fps))");
  app->add_option("--presence-threshold", s.presence_threshold,
                  "Minimum detection score counted as a hit");
  app->add_option("--min-hits", s.min_hits,
                  "Hits needed for an entity to be present in a segment");
}

void AddCameraOptions(CLI::App* app, Invocation* inv) {
  motiontrace::CameraOverrides& cam = inv->config.camera;
  app->add_option("--fx", cam.fx, "Focal length x (pixels)");
  app->add_option("--fy", cam.fy, "Focal length y (pixels)");
  app->add_option("--cx", cam.cx, "Principal point x (pixels)");
  app->add_option("--cy", cam.cy, "Principal point y (pixels)");
}

void AddRewardOptions(CLI::App* app, Invocation* inv) {
  motiontrace::RewardWeights& w = inv->config.weights;
  app->add_option("--w-correct", w.w_correct, "Correctness weight");
  app->add_option("--w-format", w.w_format, "Format reward weight");
  app->add_option("--w-rouge", w.w_rouge, "ROUGE-L weight");
  app->add_option("--alpha-temporal", w.alpha_temporal,
                  "Temporal bonus magnitude");
  app->add_option("--epsilon", w.epsilon, "Advantage normalization epsilon");
}

int Report(const CommandResult& result) {
  for (const auto& e : result.errors) {
    std::cerr << e.item << ": " << e.message << "\n";
  }
  return result.exit_code;
}

int Usage(const std::string& message) {
  std::cerr << "motiontrace: " << message << "\n";
  return motiontrace::kExitInvalidInvocation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Motion grounding, prompt serialization, rewards and judge "
               "evaluation for video QA."};
  app.require_subcommand(1);
  Invocation inv;
  inv.config.jobs = motiontrace::DefaultJobs();
  RunConfig& c = inv.config;

  CLI::App* profile =
      app.add_subcommand("profile", "Ground entities and render prompts");
  profile->add_option("--manifest", c.manifest_path, "dataset.json");
  profile->add_option("--qa", c.qa_path, "qa.jsonl");
  profile->add_flag("--no-grounding", inv.no_grounding,
                    "Leave the grounding block out of prompts");
  profile->add_flag("--system-preamble", c.system_preamble,
                    "Prepend the system preamble to prompts");
  AddCommonOptions(profile, &inv);
  AddSegmentOptions(profile, &inv);
  AddCameraOptions(profile, &inv);

  CLI::App* judge =
      app.add_subcommand("judge", "Build judge requests from model answers");
  judge->add_option("--qa", c.qa_path, "qa.jsonl");
  judge->add_option("--answers", inv.extra_input,
                    "Model answers, {\"id\", \"text\"} per line");
  AddCommonOptions(judge, &inv);

  CLI::App* score = app.add_subcommand("score", "Aggregate judge verdicts");
  score->add_option("--qa", c.qa_path, "qa.jsonl");
  score->add_option("--responses", inv.extra_input,
                    "Judge responses, {\"id\", \"text\"} per line");
  score->add_option("--unclear-policy", inv.unclear,
                    "How Unclear verdicts enter accuracy")
      ->check(CLI::IsMember({"count_as_incorrect", "exclude_from_total"}));
  AddCommonOptions(score, &inv);

  CLI::App* stats = app.add_subcommand("stats", "QA set composition");
  stats->add_option("--qa", c.qa_path, "qa.jsonl");
  AddCommonOptions(stats, &inv);

  CLI::App* rewards =
      app.add_subcommand("rewards", "Rewards and group advantages");
  rewards->add_option("--rollouts", inv.extra_input, "rollouts.jsonl");
  rewards->add_option("--qa", c.qa_path,
                      "qa.jsonl supplying ROUGE references by prompt_id");
  AddCommonOptions(rewards, &inv);
  AddRewardOptions(rewards, &inv);

  CLI::App* validate =
      app.add_subcommand("validate", "Check interchange files");
  validate->add_option("--manifest", c.manifest_path, "dataset.json");
  validate->add_option("--qa", c.qa_path, "qa.jsonl");
  AddCommonOptions(validate, &inv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return motiontrace::kExitInvalidInvocation;
  }

  if (inv.max_len) c.segment.max_len = inv.max_len;
  c.emit_grounding = !inv.no_grounding;
  c.unclear_policy = inv.unclear == "exclude_from_total"
                         ? motiontrace::UnclearPolicy::kExcludeFromTotal
                         : motiontrace::UnclearPolicy::kCountAsIncorrect;
  if (!inv.config_file.empty()) {
    if (auto s = motiontrace::ApplyConfigFile(inv.config_file, &c); !s.ok()) {
      return Usage(std::string(s.message()));
    }
  }
  if (auto s = motiontrace::ValidateRunConfig(c); !s.ok()) {
    return Usage(std::string(s.message()));
  }

  auto need = [](bool present, const char* what) {
    if (!present) std::cerr << "motiontrace: missing " << what << "\n";
    return present;
  };
  if (*profile) {
    if (!need(!c.manifest_path.empty(), "--manifest") ||
        !need(!c.qa_path.empty(), "--qa") ||
        !need(!c.output_dir.empty(), "--out")) {
      return motiontrace::kExitInvalidInvocation;
    }
    return Report(motiontrace::RunProfile(c));
  }
  if (*judge) {
    if (!need(!c.qa_path.empty(), "--qa") ||
        !need(!inv.extra_input.empty(), "--answers") ||
        !need(!c.output_dir.empty(), "--out")) {
      return motiontrace::kExitInvalidInvocation;
    }
    return Report(motiontrace::RunJudge(c, inv.extra_input));
  }
  if (*score) {
    if (!need(!c.qa_path.empty(), "--qa") ||
        !need(!inv.extra_input.empty(), "--responses") ||
        !need(!c.output_dir.empty(), "--out")) {
      return motiontrace::kExitInvalidInvocation;
    }
    return Report(motiontrace::RunScore(c, inv.extra_input));
  }
  if (*stats) {
    if (!need(!c.qa_path.empty(), "--qa")) {
      return motiontrace::kExitInvalidInvocation;
    }
    return Report(motiontrace::RunStats(c, std::cout));
  }
  if (*rewards) {
    if (!need(!inv.extra_input.empty(), "--rollouts") ||
        !need(!c.output_dir.empty(), "--out")) {
      return motiontrace::kExitInvalidInvocation;
    }
    return Report(motiontrace::RunRewards(c, inv.extra_input));
  }
  if (!need(!c.manifest_path.empty(), "--manifest")) {
    return motiontrace::kExitInvalidInvocation;
  }
  return Report(motiontrace::RunValidate(c, std::cout));
}
