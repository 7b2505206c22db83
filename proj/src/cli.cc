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

#include "motiontrace/cli.h"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <unordered_map>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl_compat.h"
#include "motiontrace/file_util.h"
#include "motiontrace/geometry.h"
#include "motiontrace/interchange.h"
#include "motiontrace/serialize.h"
#include "nlohmann/json.hpp"
#include "parallel.h"
#include "status_macros.h"

namespace motiontrace {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

std::string Dump(const OrderedJson& j) { return j.dump(2) + "\n"; }

std::string StatusText(const absl::Status& s) {
  return std::string(s.message().data(), s.message().size());
}

CommandResult Invalid(std::string item, const absl::Status& status) {
  return CommandResult{kExitInvalidInvocation,
                       {ItemError{std::move(item), StatusText(status)}}};
}

void SortErrors(std::vector<ItemError>* errors) {
  std::stable_sort(errors->begin(), errors->end(),
                   [](const ItemError& a, const ItemError& b) {
                     return a.item < b.item;
                   });
}

OrderedJson ErrorsToJson(const std::vector<ItemError>& errors) {
  OrderedJson out = OrderedJson::array();
  for (const ItemError& e : errors) {
    out.push_back(OrderedJson{{"item", e.item}, {"message", e.message}});
  }
  return out;
}

CommandResult Finish(std::vector<ItemError> errors) {
  SortErrors(&errors);
  CommandResult result;
  result.exit_code = errors.empty() ? kExitOk : kExitPartialFailure;
  result.errors = std::move(errors);
  return result;
}

// ---------------------------------------------------------------------------
// Config

template <typename T>
absl::Status ReadField(const Json& object, std::string_view section,
                       const char* key, T* out) {
  auto it = object.find(key);
  if (it == object.end()) return absl::OkStatus();
  try {
    *out = it->get<T>();
  } catch (const Json::exception&) {
    return absl::InvalidArgumentError(
        absl::StrCat("config: ", Sv(section), section.empty() ? "" : ".", key,
                     ": wrong type"));
  }
  return absl::OkStatus();
}

absl::Status CheckKeys(const Json& object, std::string_view section,
                       std::initializer_list<std::string_view> allowed) {
  if (!object.is_object()) {
    return absl::InvalidArgumentError(
        absl::StrCat("config: ", section.empty() ? "<root>" : Sv(section),
                     ": expected an object"));
  }
  for (const auto& [key, value] : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("config: unknown key \"", Sv(section),
                       section.empty() ? "" : ".", key, "\""));
    }
  }
  return absl::OkStatus();
}

absl::Status ReadPath(const Json& object, const char* key,
                      const fs::path& base_dir, fs::path* out) {
  std::string value;
  if (object.find(key) == object.end()) return absl::OkStatus();
  MT_RETURN_IF_ERROR(ReadField(object, "", key, &value));
  fs::path p(value);
  *out = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  return absl::OkStatus();
}

absl::Status ReadOptionalDouble(const Json& object, std::string_view section,
                                const char* key, std::optional<double>* out) {
  if (object.find(key) == object.end()) return absl::OkStatus();
  double value = 0.0;
  MT_RETURN_IF_ERROR(ReadField(object, section, key, &value));
  *out = value;
  return absl::OkStatus();
}

// ---------------------------------------------------------------------------
// {"id", "text"} response files

absl::StatusOr<std::map<std::string, std::string>> ReadIdTextFile(
    const fs::path& path) {
  MT_ASSIGN_OR_RETURN(std::string text, ReadFileToString(path));
  std::map<std::string, std::string> out;
  size_t line_number = 0;
  for (absl::string_view piece : absl::StrSplit(Sv(text), '\n')) {
    ++line_number;
    const std::string line(piece.data(), piece.size());
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto where = [&] {
      return absl::StrCat(path.string(), ": line ", line_number, ": ");
    };
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      return absl::InvalidArgumentError(
          absl::StrCat(where(), "malformed JSON: ", e.what()));
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() ||
        !j.contains("text") || !j["text"].is_string()) {
      return absl::InvalidArgumentError(
          absl::StrCat(where(), "expected {\"id\": str, \"text\": str}"));
    }
    const std::string id = j["id"].get<std::string>();
    if (!out.emplace(id, j["text"].get<std::string>()).second) {
      return absl::InvalidArgumentError(
          absl::StrCat(where(), "duplicate id \"", id, "\""));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// profile

CameraModel ResolveCamera(const CameraOverrides& o, const VideoMeta& meta) {
  CameraModel cam = DefaultCamera(meta.width, meta.height);
  if (o.fx) cam.fx = *o.fx;
  if (o.fy) cam.fy = *o.fy;
  if (o.cx) cam.cx = *o.cx;
  if (o.cy) cam.cy = *o.cy;
  return cam;
}

// Everything derived from one video that QA records draw on.
struct VideoAnalysis {
  SegmentPlan plan;
  std::vector<Trajectory3D> trajectories;
  std::map<std::string, PresenceProfile> presence;
  std::map<std::string, EntityGrounding> grounding;
};

absl::StatusOr<VideoAnalysis> AnalyzeVideo(const VideoEntry& entry,
                                           const RunConfig& config) {
  MT_ASSIGN_OR_RETURN(BundleValidation validation, LoadBundle(entry));
  if (!validation.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat("validation failed: ", validation.Summary()));
  }
  const PerceptionBundle& bundle = *validation.bundle;
  const VideoMeta& meta = bundle.meta();

  VideoAnalysis a;
  MT_ASSIGN_OR_RETURN(a.plan,
                      PlanSegments(meta.frame_count, meta.fps, config.segment));
  const CameraModel camera = ResolveCamera(config.camera, meta);
  MT_RETURN_IF_ERROR(ValidateCamera(camera, meta.width, meta.height));
  for (const PointTrack& track : bundle.tracks()) {
    MT_ASSIGN_OR_RETURN(Trajectory3D t,
                        LiftTrack(track, bundle.depth_frames(), camera));
    a.trajectories.push_back(std::move(t));
  }
  for (const std::string& label : bundle.entities()) {
    PresenceProfile presence =
        BuildPresence(bundle, a.plan, config.segment, label);
    a.grounding[label] = EntityGrounding{
        label, EntityMotion(a.trajectories, a.plan, presence)};
    a.presence.emplace(label, std::move(presence));
  }
  return a;
}

EntityGrounding GroundingFor(const VideoAnalysis& a, const std::string& label,
                             const RunConfig& config,
                             const std::vector<Detection>& no_detections) {
  if (auto it = a.grounding.find(label); it != a.grounding.end()) {
    return it->second;
  }
  // Asked about but never detected: every segment absent.
  PresenceProfile absent =
      BuildPresence(no_detections, a.plan, config.segment, label);
  return EntityGrounding{label, EntityMotion(a.trajectories, a.plan, absent)};
}

absl::Status WriteVideoOutputs(const fs::path& dir, const VideoEntry& entry,
                               const VideoAnalysis& a) {
  OrderedJson artifacts = OrderedJson::array();
  OrderedJson presence = OrderedJson::array();
  std::vector<EntityGrounding> entities;
  for (const auto& [label, profile] : a.presence) {
    for (auto& item : ArtifactsToJson(DetectArtifacts(profile))) {
      artifacts.push_back(std::move(item));
    }
    presence.push_back(PresenceProfileToJson(profile));
    entities.push_back(a.grounding.at(label));
  }
  MT_ASSIGN_OR_RETURN(
      GroundingProfile all,
      MakeGroundingProfile(entry.meta.video_id, std::move(entities)));

  OrderedJson profile;
  profile["video_id"] = entry.meta.video_id;
  profile["segments"] = SegmentPlanToJson(a.plan);
  profile["presence"] = std::move(presence);
  profile["grounding"] = GroundingProfileToJson(all);

  MT_RETURN_IF_ERROR(
      WriteFileAtomically(dir / "segments.json", Dump(SegmentPlanToJson(a.plan))));
  MT_RETURN_IF_ERROR(
      WriteFileAtomically(dir / "artifacts.json", Dump(artifacts)));
  return WriteFileAtomically(dir / "profile.json", Dump(profile));
}

absl::Status WriteQaOutputs(const fs::path& dir, const QARecord& qa,
                            const VideoAnalysis& a, const RunConfig& config) {
  std::vector<std::string> labels = qa.entities;
  if (labels.empty()) {
    for (const auto& [label, unused] : a.grounding) labels.push_back(label);
  }
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

  const std::vector<Detection> none;
  std::vector<EntityGrounding> entities;
  for (const std::string& label : labels) {
    entities.push_back(GroundingFor(a, label, config, none));
  }
  MT_ASSIGN_OR_RETURN(GroundingProfile profile,
                      MakeGroundingProfile(qa.video_id, std::move(entities)));
  const std::string grounding_text =
      config.emit_grounding ? RenderEntityBlock(profile) : std::string();
  MT_ASSIGN_OR_RETURN(PromptBundle prompt, RenderPrompt(qa, grounding_text));

  OrderedJson grounding = GroundingProfileToJson(profile);
  grounding["emitted_in_prompt"] = config.emit_grounding;
  MT_RETURN_IF_ERROR(
      WriteFileAtomically(dir / "grounding.json", Dump(grounding)));
  return WriteFileAtomically(dir / "prompt.txt",
                             prompt.Flatten(config.system_preamble));
}

absl::Status CheckPathSegment(std::string_view kind, const std::string& id) {
  if (id.empty() || id == "." || id == ".." ||
      id.find_first_of("/\\") != std::string::npos) {
    return absl::InvalidArgumentError(absl::StrCat(
        Sv(kind), " id \"", id, "\" cannot be used as a directory name"));
  }
  return absl::OkStatus();
}

}  // namespace

int DefaultJobs() {
  const char* value = std::getenv(kJobsEnvVar);
  int jobs = 0;
  if (value != nullptr && absl::SimpleAtoi(value, &jobs) && jobs > 0) {
    return jobs;
  }
  return 1;
}

absl::Status ApplyConfigJson(std::string_view text, const fs::path& base_dir,
                             RunConfig* config) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("config: malformed JSON: ", e.what()));
  }
  MT_RETURN_IF_ERROR(CheckKeys(
      root, "",
      {"manifest", "qa", "out", "jobs", "segment", "camera", "rewards",
       "emit_grounding", "system_preamble", "unclear_policy"}));
  MT_RETURN_IF_ERROR(
      ReadPath(root, "manifest", base_dir, &config->manifest_path));
  MT_RETURN_IF_ERROR(ReadPath(root, "qa", base_dir, &config->qa_path));
  MT_RETURN_IF_ERROR(ReadPath(root, "out", base_dir, &config->output_dir));
  MT_RETURN_IF_ERROR(ReadField(root, "", "jobs", &config->jobs));
  MT_RETURN_IF_ERROR(
      ReadField(root, "", "emit_grounding", &config->emit_grounding));
  MT_RETURN_IF_ERROR(
      ReadField(root, "", "system_preamble", &config->system_preamble));
  if (root.contains("unclear_policy")) {
    std::string policy;
    MT_RETURN_IF_ERROR(ReadField(root, "", "unclear_policy", &policy));
    if (policy == UnclearPolicyName(UnclearPolicy::kCountAsIncorrect)) {
      config->unclear_policy = UnclearPolicy::kCountAsIncorrect;
    } else if (policy == UnclearPolicyName(UnclearPolicy::kExcludeFromTotal)) {
      config->unclear_policy = UnclearPolicy::kExcludeFromTotal;
    } else {
      return absl::InvalidArgumentError(absl::StrCat(
          "config: unclear_policy: unknown value \"", policy, "\""));
    }
  }
  if (root.contains("segment")) {
    const Json& s = root["segment"];
    MT_RETURN_IF_ERROR(CheckKeys(s, "segment",
                                 {"target_segments", "min_len", "max_len",
                                  "presence_threshold", "min_hits"}));
    SegmentConfig& c = config->segment;
    MT_RETURN_IF_ERROR(
        ReadField(s, "segment", "target_segments", &c.target_segments));
    MT_RETURN_IF_ERROR(ReadField(s, "segment", "min_len", &c.min_len));
    if (s.contains("max_len")) {
      if (s["max_len"].is_null()) {
        c.max_len.reset();
      } else {
        uint32_t max_len = 0;
        MT_RETURN_IF_ERROR(ReadField(s, "segment", "max_len", &max_len));
        c.max_len = max_len;
      }
    }
    MT_RETURN_IF_ERROR(
        ReadField(s, "segment", "presence_threshold", &c.presence_threshold));
    MT_RETURN_IF_ERROR(ReadField(s, "segment", "min_hits", &c.min_hits));
  }
  if (root.contains("camera")) {
    const Json& c = root["camera"];
    MT_RETURN_IF_ERROR(CheckKeys(c, "camera", {"fx", "fy", "cx", "cy"}));
    MT_RETURN_IF_ERROR(ReadOptionalDouble(c, "camera", "fx", &config->camera.fx));
    MT_RETURN_IF_ERROR(ReadOptionalDouble(c, "camera", "fy", &config->camera.fy));
    MT_RETURN_IF_ERROR(ReadOptionalDouble(c, "camera", "cx", &config->camera.cx));
    MT_RETURN_IF_ERROR(ReadOptionalDouble(c, "camera", "cy", &config->camera.cy));
  }
  if (root.contains("rewards")) {
    const Json& r = root["rewards"];
    MT_RETURN_IF_ERROR(CheckKeys(r, "rewards",
                                 {"w_correct", "w_format", "w_rouge",
                                  "alpha_temporal", "epsilon"}));
    RewardWeights& w = config->weights;
    MT_RETURN_IF_ERROR(ReadField(r, "rewards", "w_correct", &w.w_correct));
    MT_RETURN_IF_ERROR(ReadField(r, "rewards", "w_format", &w.w_format));
    MT_RETURN_IF_ERROR(ReadField(r, "rewards", "w_rouge", &w.w_rouge));
    MT_RETURN_IF_ERROR(
        ReadField(r, "rewards", "alpha_temporal", &w.alpha_temporal));
    MT_RETURN_IF_ERROR(ReadField(r, "rewards", "epsilon", &w.epsilon));
  }
  return absl::OkStatus();
}

absl::Status ApplyConfigFile(const fs::path& path, RunConfig* config) {
  MT_ASSIGN_OR_RETURN(std::string text, ReadFileToString(path));
  return ApplyConfigJson(text, path.parent_path(), config);
}

absl::Status ValidateRunConfig(const RunConfig& config) {
  if (config.jobs < 1) {
    return absl::InvalidArgumentError("jobs must be >= 1");
  }
  MT_RETURN_IF_ERROR(ValidateSegmentConfig(config.segment));
  MT_RETURN_IF_ERROR(ValidateRewardWeights(config.weights));
  for (const std::optional<double>& v :
       {config.camera.fx, config.camera.fy}) {
    if (v && !(std::isfinite(*v) && *v > 0.0)) {
      return absl::InvalidArgumentError("focal lengths must be > 0");
    }
  }
  for (const std::optional<double>& v :
       {config.camera.cx, config.camera.cy}) {
    if (v && !std::isfinite(*v)) {
      return absl::InvalidArgumentError("principal point must be finite");
    }
  }
  return absl::OkStatus();
}

CommandResult RunProfile(const RunConfig& config) {
  if (absl::Status s = ValidateRunConfig(config); !s.ok()) {
    return Invalid("config", s);
  }
  auto videos = ParseManifest(config.manifest_path);
  if (!videos.ok()) return Invalid("manifest", videos.status());
  auto qa = ParseQa(config.qa_path);
  if (!qa.ok()) return Invalid("qa", qa.status());

  std::vector<ItemError> errors;
  std::map<std::string, std::vector<const QARecord*>> qa_by_video;
  std::set<std::string> known_videos;
  for (const VideoEntry& v : *videos) known_videos.insert(v.meta.video_id);
  for (const QARecord& r : *qa) {
    if (absl::Status s = CheckPathSegment("qa", r.id); !s.ok()) {
      errors.push_back({"qa:" + r.id, StatusText(s)});
    } else if (!known_videos.contains(r.video_id)) {
      errors.push_back({"qa:" + r.id, absl::StrCat("unknown video_id \"",
                                                   r.video_id, "\"")});
    } else {
      qa_by_video[r.video_id].push_back(&r);
    }
  }

  // One slot per video so results never depend on thread scheduling.
  std::vector<std::vector<ItemError>> video_errors(videos->size());
  ParallelFor(videos->size(), config.jobs, [&](size_t i) {
    const VideoEntry& entry = (*videos)[i];
    const std::string& id = entry.meta.video_id;
    std::vector<ItemError>& out = video_errors[i];
    if (absl::Status s = CheckPathSegment("video", id); !s.ok()) {
      out.push_back({"video:" + id, StatusText(s)});
      return;
    }
    const std::vector<const QARecord*>& records = qa_by_video[id];
    absl::StatusOr<VideoAnalysis> analysis = AnalyzeVideo(entry, config);
    if (!analysis.ok()) {
      out.push_back({"video:" + id, StatusText(analysis.status())});
      for (const QARecord* r : records) {
        out.push_back({"qa:" + r->id, absl::StrCat("video \"", id,
                                                   "\" failed")});
      }
      return;
    }
    const fs::path video_dir = config.output_dir / id;
    if (absl::Status s = WriteVideoOutputs(video_dir, entry, *analysis);
        !s.ok()) {
      out.push_back({"video:" + id, StatusText(s)});
    }
    for (const QARecord* r : records) {
      if (absl::Status s =
              WriteQaOutputs(video_dir / r->id, *r, *analysis, config);
          !s.ok()) {
        out.push_back({"qa:" + r->id, StatusText(s)});
      }
    }
  });
  for (auto& v : video_errors) {
    errors.insert(errors.end(), v.begin(), v.end());
  }
  CommandResult result = Finish(std::move(errors));
  if (absl::Status s = WriteFileAtomically(config.output_dir / "errors.json",
                                           Dump(ErrorsToJson(result.errors)));
      !s.ok()) {
    result.errors.push_back({"output", StatusText(s)});
    result.exit_code = kExitPartialFailure;
  }
  return result;
}

CommandResult RunScore(const RunConfig& config, const fs::path& responses_path) {
  auto qa = ParseQa(config.qa_path);
  if (!qa.ok()) return Invalid("qa", qa.status());
  auto responses = ReadIdTextFile(responses_path);
  if (!responses.ok()) return Invalid("responses", responses.status());

  std::vector<JudgedRecord> judged;
  OrderedJson missing = OrderedJson::array();
  std::set<std::string> qa_ids;
  std::vector<ItemError> errors;
  for (const QARecord& r : *qa) {
    qa_ids.insert(r.id);
    Verdict verdict = Verdict::kUnclear;
    if (auto it = responses->find(r.id); it != responses->end()) {
      verdict = ParseVerdict(it->second);
    } else {
      missing.push_back(r.id);
      errors.push_back({"qa:" + r.id, "no judge response; counted Unclear"});
    }
    judged.push_back({r.category, verdict});
  }
  OrderedJson unknown = OrderedJson::array();
  for (const auto& [id, unused] : *responses) {
    if (!qa_ids.contains(id)) unknown.push_back(id);
  }

  const CategoryReport report = Aggregate(judged);
  OrderedJson j;
  j["accuracy"] = CategoryReportToJson(report, config.unclear_policy);
  j["stats"] = DatasetStatsToJson(ComputeDatasetStats(*qa));
  j["missing_responses"] = std::move(missing);
  j["unknown_responses"] = std::move(unknown);

  CommandResult result = Finish(std::move(errors));
  for (const auto& [name, body] :
       {std::pair<std::string, std::string>{"report.json", Dump(j)},
        {"report.md", RenderReportMarkdown(report, config.unclear_policy)}}) {
    if (absl::Status s = WriteFileAtomically(config.output_dir / name, body);
        !s.ok()) {
      result.errors.push_back({"output", StatusText(s)});
      result.exit_code = kExitPartialFailure;
    }
  }
  return result;
}

CommandResult RunStats(const RunConfig& config, std::ostream& out) {
  auto qa = ParseQa(config.qa_path);
  if (!qa.ok()) return Invalid("qa", qa.status());
  const DatasetStats stats = ComputeDatasetStats(*qa);
  const std::string table = RenderStatsTable(stats);
  out << table;
  CommandResult result;
  if (config.output_dir.empty()) return result;
  for (const auto& [name, body] :
       {std::pair<std::string, std::string>{"stats.txt", table},
        {"stats.json", Dump(DatasetStatsToJson(stats))}}) {
    if (absl::Status s = WriteFileAtomically(config.output_dir / name, body);
        !s.ok()) {
      result.errors.push_back({"output", StatusText(s)});
      result.exit_code = kExitPartialFailure;
    }
  }
  return result;
}

CommandResult RunRewards(const RunConfig& config,
                         const fs::path& rollouts_path) {
  if (absl::Status s = ValidateRewardWeights(config.weights); !s.ok()) {
    return Invalid("config", s);
  }
  std::unordered_map<std::string, std::string> ground_truth;
  if (!config.qa_path.empty()) {
    auto qa = ParseQa(config.qa_path);
    if (!qa.ok()) return Invalid("qa", qa.status());
    for (const QARecord& r : *qa) ground_truth[r.id] = r.ground_truth;
  }
  auto text = ReadFileToString(rollouts_path);
  if (!text.ok()) return Invalid("rollouts", text.status());

  struct Group {
    std::string prompt_id;
    std::optional<std::string> reference;
    std::vector<Rollout> rollouts;
  };
  std::vector<Group> groups;
  std::unordered_map<std::string, size_t> group_index;
  size_t line_number = 0;
  for (absl::string_view piece : absl::StrSplit(Sv(*text), '\n')) {
    ++line_number;
    const std::string line(piece.data(), piece.size());
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where =
        absl::StrCat(rollouts_path.string(), ": line ", line_number, ": ");
    Json j;
    std::string prompt_id;
    Rollout rollout;
    std::optional<std::string> reference;
    try {
      j = Json::parse(line);
      prompt_id = j.at("prompt_id").get<std::string>();
      rollout.text = j.at("text").get<std::string>();
      rollout.correctness = j.at("correctness").get<double>();
      rollout.ordered_frames = j.at("ordered").get<bool>();
      if (j.contains("reference")) {
        reference = j["reference"].get<std::string>();
      }
    } catch (const Json::exception& e) {
      return Invalid("rollouts", absl::InvalidArgumentError(
                                     absl::StrCat(where, e.what())));
    }
    auto [it, inserted] = group_index.emplace(prompt_id, groups.size());
    if (inserted) groups.push_back(Group{prompt_id, std::nullopt, {}});
    Group& g = groups[it->second];
    if (reference) {
      if (g.reference && *g.reference != *reference) {
        return Invalid("rollouts",
                       absl::InvalidArgumentError(absl::StrCat(
                           where, "conflicting reference for prompt \"",
                           prompt_id, "\"")));
      }
      g.reference = reference;
    }
    g.rollouts.push_back(std::move(rollout));
  }

  std::vector<std::string> lines(groups.size());
  std::vector<std::optional<ItemError>> group_errors(groups.size());
  ParallelFor(groups.size(), config.jobs, [&](size_t i) {
    const Group& g = groups[i];
    std::optional<std::string> reference = g.reference;
    if (!reference) {
      if (auto it = ground_truth.find(g.prompt_id); it != ground_truth.end()) {
        reference = it->second;
      }
    }
    if (!reference) {
      group_errors[i] = ItemError{"prompt:" + g.prompt_id,
                                  "no ROUGE reference (no \"reference\" field "
                                  "and no matching QA record)"};
      return;
    }
    absl::StatusOr<GroupScore> score =
        ScoreGroup(g.rollouts, config.weights, *reference);
    if (!score.ok()) {
      group_errors[i] = ItemError{"prompt:" + g.prompt_id,
                                  StatusText(score.status())};
      return;
    }
    OrderedJson j;
    j["prompt_id"] = g.prompt_id;
    j["mean_correct_ordered"] =
        score->mean_correct_ordered ? OrderedJson(*score->mean_correct_ordered)
                                    : OrderedJson(nullptr);
    j["mean_correct_shuffled"] =
        score->mean_correct_shuffled
            ? OrderedJson(*score->mean_correct_shuffled)
            : OrderedJson(nullptr);
    j["temporal_bonus"] = score->temporal_bonus;
    OrderedJson rollouts = OrderedJson::array();
    for (size_t k = 0; k < g.rollouts.size(); ++k) {
      const RewardBreakdown& b = score->rewards[k];
      rollouts.push_back(OrderedJson{{"index", k},
                                     {"ordered", g.rollouts[k].ordered_frames},
                                     {"correctness", b.correctness},
                                     {"format", b.format},
                                     {"rouge", b.rouge},
                                     {"temporal", b.temporal},
                                     {"total", b.total},
                                     {"advantage", score->advantages[k]}});
    }
    j["rollouts"] = std::move(rollouts);
    lines[i] = j.dump() + "\n";
  });

  std::vector<ItemError> errors;
  std::string body;
  for (size_t i = 0; i < groups.size(); ++i) {
    if (group_errors[i]) {
      errors.push_back(*group_errors[i]);
    } else {
      body += lines[i];
    }
  }
  CommandResult result = Finish(std::move(errors));
  if (absl::Status s =
          WriteFileAtomically(config.output_dir / "advantages.jsonl", body);
      !s.ok()) {
    result.errors.push_back({"output", StatusText(s)});
    result.exit_code = kExitPartialFailure;
  }
  return result;
}

CommandResult RunValidate(const RunConfig& config, std::ostream& out) {
  auto videos = ParseManifest(config.manifest_path);
  if (!videos.ok()) return Invalid("manifest", videos.status());

  std::vector<OrderedJson> reports(videos->size());
  std::vector<std::optional<ItemError>> video_errors(videos->size());
  ParallelFor(videos->size(), config.jobs, [&](size_t i) {
    const VideoEntry& entry = (*videos)[i];
    OrderedJson r;
    r["video_id"] = entry.meta.video_id;
    OrderedJson violations = OrderedJson::array();
    absl::StatusOr<BundleValidation> v = LoadBundle(entry);
    if (!v.ok()) {
      violations.push_back(
          OrderedJson{{"subject", "files"}, {"message", StatusText(v.status())}});
    } else {
      for (const Violation& violation : v->violations) {
        violations.push_back(OrderedJson{{"subject", violation.subject},
                                         {"message", violation.message}});
      }
    }
    if (!violations.empty()) {
      video_errors[i] = ItemError{
          "video:" + entry.meta.video_id,
          absl::StrCat(violations.size(), " violation(s)")};
    }
    r["ok"] = violations.empty();
    r["violations"] = std::move(violations);
    reports[i] = std::move(r);
  });

  std::vector<ItemError> errors;
  OrderedJson doc;
  doc["videos"] = OrderedJson::array();
  for (size_t i = 0; i < reports.size(); ++i) {
    out << reports[i]["video_id"].get<std::string>() << ": "
        << (reports[i]["ok"].get<bool>() ? "ok" : "FAILED") << "\n";
    for (const auto& v : reports[i]["violations"]) {
      out << "  " << v["subject"].get<std::string>() << ": "
          << v["message"].get<std::string>() << "\n";
    }
    if (video_errors[i]) errors.push_back(*video_errors[i]);
    doc["videos"].push_back(std::move(reports[i]));
  }
  if (!config.qa_path.empty()) {
    auto qa = ParseQa(config.qa_path);
    OrderedJson q;
    q["ok"] = qa.ok();
    if (!qa.ok()) {
      q["message"] = StatusText(qa.status());
      out << "qa: FAILED\n  " << StatusText(qa.status()) << "\n";
      errors.push_back({"qa", StatusText(qa.status())});
    } else {
      q["records"] = qa->size();
      out << "qa: ok (" << qa->size() << " records)\n";
    }
    doc["qa"] = std::move(q);
  }
  CommandResult result = Finish(std::move(errors));
  if (!config.output_dir.empty()) {
    if (absl::Status s = WriteFileAtomically(
            config.output_dir / "validation.json", Dump(doc));
        !s.ok()) {
      result.errors.push_back({"output", StatusText(s)});
      result.exit_code = kExitPartialFailure;
    }
  }
  return result;
}

CommandResult RunJudge(const RunConfig& config, const fs::path& answers_path) {
  auto qa = ParseQa(config.qa_path);
  if (!qa.ok()) return Invalid("qa", qa.status());
  auto answers = ReadIdTextFile(answers_path);
  if (!answers.ok()) return Invalid("answers", answers.status());

  std::vector<ItemError> errors;
  std::string body;
  for (const QARecord& r : *qa) {
    auto it = answers->find(r.id);
    if (it == answers->end()) {
      errors.push_back({"qa:" + r.id, "no model answer"});
      continue;
    }
    absl::StatusOr<std::string> prompt = RenderJudgePrompt(
        {r.question, r.ground_truth, ExtractAnswerText(it->second)});
    if (!prompt.ok()) {
      errors.push_back({"qa:" + r.id, StatusText(prompt.status())});
      continue;
    }
    body += OrderedJson{{"id", r.id}, {"prompt", *prompt}}.dump() + "\n";
  }
  CommandResult result = Finish(std::move(errors));
  if (absl::Status s = WriteFileAtomically(
          config.output_dir / "judge_requests.jsonl", body);
      !s.ok()) {
    result.errors.push_back({"output", StatusText(s)});
    result.exit_code = kExitPartialFailure;
  }
  return result;
}

}  // namespace motiontrace
