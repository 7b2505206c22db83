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

// Duration-adaptive temporal segmentation and per-entity presence profiles.
//
// A video of T frames is cut into segments of nominal length
//
//   L = clamp(ceil(T / target_segments), min_len, max_len)
//
// with the final segment taking whatever is left (1..L frames). An entity is
// present in a segment when at least `min_hits` of its detections there have
// confidence >= presence_threshold. Presence flips in the middle of a video
// are reported as temporal artifacts.

#ifndef MOTIONTRACE_TEMPORAL_H_
#define MOTIONTRACE_TEMPORAL_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "motiontrace/interchange.h"
#include "nlohmann/json_fwd.hpp"

namespace motiontrace {

struct SegmentConfig {
  uint32_t target_segments = 8;
  uint32_t min_len = 8;
  // Unset means max(min_len, round(2 * fps)).
  std::optional<uint32_t> max_len;
  double presence_threshold = 0.35;
  uint32_t min_hits = 1;
};

absl::Status ValidateSegmentConfig(const SegmentConfig& config);

// Resolves the max_len default for a given frame rate.
uint32_t EffectiveMaxLen(const SegmentConfig& config, double fps);

// Inclusive, 0-based.
struct FrameRange {
  uint32_t start = 0;
  uint32_t end = 0;

  uint32_t length() const { return end - start + 1; }
  bool Contains(uint32_t frame) const { return frame >= start && frame <= end; }

  friend bool operator==(const FrameRange&, const FrameRange&) = default;
};

struct SegmentPlan {
  uint32_t frame_count = 0;
  uint32_t nominal_length = 0;
  std::vector<FrameRange> segments;

  size_t size() const { return segments.size(); }
  // Index of the segment holding `frame`, or nullopt past the end.
  std::optional<size_t> SegmentOf(uint32_t frame) const;
};

absl::StatusOr<SegmentPlan> PlanSegments(uint32_t frame_count, double fps,
                                         const SegmentConfig& config);

struct SegmentPresence {
  bool present = false;
  // Detections at or above the threshold.
  uint32_t hit_count = 0;
  // Highest-confidence qualifying detection; ties go to the lower frame,
  // then the lower x1.
  std::optional<BBox> best_bbox;
  double best_confidence = 0.0;
  uint32_t best_frame = 0;
};

struct PresenceProfile {
  std::string entity_label;
  std::vector<SegmentPresence> segments;

  std::optional<size_t> FirstPresentSegment() const;
};

PresenceProfile BuildPresence(std::span<const Detection> detections,
                              const SegmentPlan& plan,
                              const SegmentConfig& config,
                              std::string_view entity_label);

PresenceProfile BuildPresence(const PerceptionBundle& bundle,
                              const SegmentPlan& plan,
                              const SegmentConfig& config,
                              std::string_view entity_label);

enum class ArtifactKind { kSuddenAppearance, kSuddenDisappearance };

std::string_view ArtifactKindName(ArtifactKind kind);

struct TemporalArtifact {
  std::string entity_label;
  ArtifactKind kind = ArtifactKind::kSuddenAppearance;
  size_t segment_index = 0;

  friend bool operator==(const TemporalArtifact&,
                         const TemporalArtifact&) = default;
};

// One artifact per presence flip, reported at the segment where the new state
// begins. A disappearance landing on the final segment is not reported.
std::vector<TemporalArtifact> DetectArtifacts(const PresenceProfile& profile);

nlohmann::ordered_json SegmentPlanToJson(const SegmentPlan& plan);
nlohmann::ordered_json PresenceProfileToJson(const PresenceProfile& profile);
nlohmann::ordered_json ArtifactsToJson(
    std::span<const TemporalArtifact> artifacts);

}  // namespace motiontrace

#endif  // MOTIONTRACE_TEMPORAL_H_
