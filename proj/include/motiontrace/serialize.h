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

// Text rendering of motion grounding and of the question-answering prompt.
//
// Output is byte-deterministic: LF line endings, reals printed with exactly
// two decimals (ties to even on the binary value), 1-based entity and segment
// numbering, 0-based inclusive frame ranges. A grounding block looks like
//
//   Entity #1: ball
//   * Segment #1: First Position (0.00, 0.00, 1.00), Motion Vector (2.00,
//     0.00, 0.00), Last Position (2.00, 0.00, 1.00), Bounding Box (10.00,
//     10.00, 20.00, 20.00), Frame 0...29
//
// (one line per segment; wrapped here for width). Segments where the entity
// is absent are left out without renumbering the others.

#ifndef MOTIONTRACE_SERIALIZE_H_
#define MOTIONTRACE_SERIALIZE_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "motiontrace/geometry.h"
#include "motiontrace/interchange.h"
#include "nlohmann/json_fwd.hpp"

namespace motiontrace {

struct EntityGrounding {
  std::string entity_label;
  // One slot per segment of the plan; nullopt where the entity is absent.
  std::vector<std::optional<MotionAttributes>> segments;
};

struct GroundingProfile {
  std::string video_id;
  std::vector<EntityGrounding> entities;
};

// Orders entities by their earliest present segment (never-present entities
// last), breaking ties by label. All segment lists must have equal length.
absl::StatusOr<GroundingProfile> MakeGroundingProfile(
    std::string video_id, std::vector<EntityGrounding> entities);

// "%.2f" with negative zero printed as "0.00".
std::string FormatFixed2(double value);

std::string RenderSegmentLine(size_t segment_number,
                              const MotionAttributes& attrs);
std::string RenderEntityBlock(const GroundingProfile& profile);

struct ParsedSegmentLine {
  size_t segment_number = 0;
  Point3 first_position;
  Point3 motion_vector;
  Point3 last_position;
  BBox bbox;
  uint32_t first_frame = 0;
  uint32_t last_frame = 0;
};

struct ParsedEntity {
  size_t entity_number = 0;
  std::string entity_label;
  std::vector<ParsedSegmentLine> segments;
};

// Inverse of RenderSegmentLine (without the trailing newline).
absl::StatusOr<ParsedSegmentLine> ParseSegmentLine(std::string_view line);
// Inverse of RenderEntityBlock.
absl::StatusOr<std::vector<ParsedEntity>> ParseEntityBlock(
    std::string_view text);

nlohmann::ordered_json GroundingProfileToJson(const GroundingProfile& profile);

// Fixed prompt strings.
extern const std::string_view kSystemPreamble;
extern const std::string_view kConversationSetup;
extern const std::string_view kReasoningInstruction;
extern const std::string_view kAnswerInstruction;

struct PromptBundle {
  // Separate system instruction; only emitted when requested.
  std::string system_preamble;
  std::string conversation_setup;
  std::string question_block;
  // Empty when grounding is disabled or nothing was grounded.
  std::string grounding_block;
  std::string reasoning_instruction;
  std::string answer_instruction;

  // Conversation setup, question, grounding, reasoning and answer
  // instructions, separated by blank lines and ending in a newline. An empty
  // grounding block is skipped. The system preamble is prepended only on
  // request.
  std::string Flatten(bool include_system_preamble = false) const;
};

// Fails on an empty question.
absl::StatusOr<PromptBundle> RenderPrompt(const QARecord& qa,
                                          std::string_view grounding_text);

}  // namespace motiontrace

#endif  // MOTIONTRACE_SERIALIZE_H_
