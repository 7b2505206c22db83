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

#include "motiontrace/temporal.h"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "absl/strings/str_cat.h"
#include "nlohmann/json.hpp"

namespace motiontrace {
namespace {

// True if `a` should replace `b` as the segment's representative box.
bool BetterDetection(const Detection& a, const SegmentPresence& b) {
  if (a.confidence != b.best_confidence) {
    return a.confidence > b.best_confidence;
  }
  const BBox& bb = *b.best_bbox;
  return std::tie(a.frame_index, a.bbox.x1, a.bbox.y1, a.bbox.x2, a.bbox.y2) <
         std::tie(b.best_frame, bb.x1, bb.y1, bb.x2, bb.y2);
}

}  // namespace

absl::Status ValidateSegmentConfig(const SegmentConfig& config) {
  if (config.target_segments < 1) {
    return absl::InvalidArgumentError("target_segments must be >= 1");
  }
  if (config.min_len < 1) {
    return absl::InvalidArgumentError("min_len must be >= 1");
  }
  if (config.max_len.has_value() && *config.max_len < config.min_len) {
    return absl::InvalidArgumentError(absl::StrCat(
        "max_len (", *config.max_len, ") must be >= min_len (",
        config.min_len, ")"));
  }
  if (!(config.presence_threshold >= 0.0 &&
        config.presence_threshold <= 1.0)) {
    return absl::InvalidArgumentError("presence_threshold must be in [0, 1]");
  }
  if (config.min_hits < 1) {
    return absl::InvalidArgumentError("min_hits must be >= 1");
  }
  return absl::OkStatus();
}

uint32_t EffectiveMaxLen(const SegmentConfig& config, double fps) {
  if (config.max_len.has_value()) return *config.max_len;
  const double two_seconds = std::round(2.0 * fps);
  const uint32_t by_rate =
      two_seconds >= 1.0 ? static_cast<uint32_t>(
                               std::min<double>(two_seconds, UINT32_MAX))
                         : 1u;
  return std::max(config.min_len, by_rate);
}

std::optional<size_t> SegmentPlan::SegmentOf(uint32_t frame) const {
  auto it = std::upper_bound(
      segments.begin(), segments.end(), frame,
      [](uint32_t f, const FrameRange& r) { return f < r.start; });
  if (it == segments.begin()) return std::nullopt;
  --it;
  if (!it->Contains(frame)) return std::nullopt;
  return static_cast<size_t>(it - segments.begin());
}

absl::StatusOr<SegmentPlan> PlanSegments(uint32_t frame_count, double fps,
                                         const SegmentConfig& config) {
  if (frame_count == 0) {
    return absl::InvalidArgumentError("frame_count must be >= 1");
  }
  if (absl::Status s = ValidateSegmentConfig(config); !s.ok()) return s;
  if (!config.max_len.has_value() && !(std::isfinite(fps) && fps > 0.0)) {
    return absl::InvalidArgumentError(
        "fps must be > 0 when max_len is derived from it");
  }

  const uint64_t by_target =
      (static_cast<uint64_t>(frame_count) + config.target_segments - 1) /
      config.target_segments;
  const uint64_t length = std::clamp<uint64_t>(
      by_target, config.min_len, EffectiveMaxLen(config, fps));

  SegmentPlan plan;
  plan.frame_count = frame_count;
  plan.nominal_length = static_cast<uint32_t>(length);
  for (uint64_t start = 0; start < frame_count; start += length) {
    const uint64_t end = std::min<uint64_t>(start + length, frame_count) - 1;
    plan.segments.push_back(
        {static_cast<uint32_t>(start), static_cast<uint32_t>(end)});
  }
  return plan;
}

std::optional<size_t> PresenceProfile::FirstPresentSegment() const {
  for (size_t i = 0; i < segments.size(); ++i) {
    if (segments[i].present) return i;
  }
  return std::nullopt;
}

PresenceProfile BuildPresence(std::span<const Detection> detections,
                              const SegmentPlan& plan,
                              const SegmentConfig& config,
                              std::string_view entity_label) {
  PresenceProfile profile;
  profile.entity_label = std::string(entity_label);
  profile.segments.resize(plan.size());
  for (const Detection& d : detections) {
    if (d.entity_label != entity_label) continue;
    if (!(d.confidence >= config.presence_threshold)) continue;
    const std::optional<size_t> index = plan.SegmentOf(d.frame_index);
    if (!index.has_value()) continue;
    SegmentPresence& seg = profile.segments[*index];
    ++seg.hit_count;
    if (!seg.best_bbox.has_value() || BetterDetection(d, seg)) {
      seg.best_bbox = d.bbox;
      seg.best_confidence = d.confidence;
      seg.best_frame = d.frame_index;
    }
  }
  for (SegmentPresence& seg : profile.segments) {
    seg.present = seg.hit_count >= config.min_hits;
  }
  return profile;
}

PresenceProfile BuildPresence(const PerceptionBundle& bundle,
                              const SegmentPlan& plan,
                              const SegmentConfig& config,
                              std::string_view entity_label) {
  return BuildPresence(bundle.detections(), plan, config, entity_label);
}

std::string_view ArtifactKindName(ArtifactKind kind) {
  return kind == ArtifactKind::kSuddenAppearance ? "sudden_appearance"
                                                 : "sudden_disappearance";
}

std::vector<TemporalArtifact> DetectArtifacts(const PresenceProfile& profile) {
  std::vector<TemporalArtifact> artifacts;
  const size_t n = profile.segments.size();
  for (size_t i = 1; i < n; ++i) {
    const bool before = profile.segments[i - 1].present;
    const bool now = profile.segments[i].present;
    if (!before && now) {
      artifacts.push_back(
          {profile.entity_label, ArtifactKind::kSuddenAppearance, i});
    } else if (before && !now && i + 1 < n) {
      artifacts.push_back(
          {profile.entity_label, ArtifactKind::kSuddenDisappearance, i});
    }
  }
  return artifacts;
}

nlohmann::ordered_json SegmentPlanToJson(const SegmentPlan& plan) {
  nlohmann::ordered_json segments = nlohmann::ordered_json::array();
  for (const FrameRange& r : plan.segments) {
    segments.push_back({r.start, r.end});
  }
  return {{"frame_count", plan.frame_count},
          {"nominal_length", plan.nominal_length},
          {"segments", std::move(segments)}};
}

nlohmann::ordered_json PresenceProfileToJson(const PresenceProfile& profile) {
  nlohmann::ordered_json segments = nlohmann::ordered_json::array();
  for (const SegmentPresence& s : profile.segments) {
    nlohmann::ordered_json entry = {{"present", s.present},
                                    {"hit_count", s.hit_count}};
    if (s.best_bbox.has_value()) {
      const BBox& b = *s.best_bbox;
      entry["best_bbox"] = {b.x1, b.y1, b.x2, b.y2};
      entry["best_confidence"] = s.best_confidence;
      entry["best_frame"] = s.best_frame;
    } else {
      entry["best_bbox"] = nullptr;
    }
    segments.push_back(std::move(entry));
  }
  return {{"entity_label", profile.entity_label},
          {"segments", std::move(segments)}};
}

nlohmann::ordered_json ArtifactsToJson(
    std::span<const TemporalArtifact> artifacts) {
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const TemporalArtifact& a : artifacts) {
    list.push_back({{"entity_label", a.entity_label},
                    {"kind", ArtifactKindName(a.kind)},
                    {"segment_index", a.segment_index}});
  }
  return list;
}

}  // namespace motiontrace
