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

#include "motiontrace/serialize.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <limits>
#include <utility>

#include "absl/strings/ascii.h"
#include "absl_compat.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "nlohmann/json.hpp"
#include "status_macros.h"

namespace motiontrace {

const std::string_view kSystemPreamble =
    "You will be given a video, a question about it, and motion-grounding "
    "metadata for the entities involved. Reason step by step inside <think> "
    "</think> tags using natural internal dialogue (e.g., \"let me think\", "
    "\"hmm\", \"wait\") and check the spatial-temporal cues as you go. Then "
    "place only a short free-form final answer inside <answer> </answer> "
    "tags.";

const std::string_view kConversationSetup =
    "A conversation between User and Assistant. The user asks a question, and "
    "the Assistant solves it. The Assistant first thinks about the reasoning "
    "process inside <think> </think> tags, then provides the final answer "
    "inside <answer> </answer> tags.";

const std::string_view kReasoningInstruction =
    "Please think about this question as if you were a human pondering "
    "deeply. Use internal dialogue such as \"let me think\", \"wait\", "
    "\"hmm\", \"I see\", and include verification or self-reflection in the "
    "reasoning process. Provide detailed reasoning in <think> </think>, then "
    "provide the final answer in <answer> </answer>.";

const std::string_view kAnswerInstruction =
    "Please provide your text answer within the <answer> </answer> tags.";

namespace {

std::string Triple(const Point3& p) {
  return absl::StrCat("(", FormatFixed2(p.x), ", ", FormatFixed2(p.y), ", ",
                      FormatFixed2(p.z), ")");
}

std::string Box(const BBox& b) {
  return absl::StrCat("(", FormatFixed2(b.x1), ", ", FormatFixed2(b.y1), ", ",
                      FormatFixed2(b.x2), ", ", FormatFixed2(b.y2), ")");
}

// Minimal cursor for the segment-line grammar.
class Scanner {
 public:
  explicit Scanner(std::string_view text) : text_(text) {}

  absl::Status Expect(std::string_view literal) {
    if (text_.substr(pos_, literal.size()) != literal) {
      return Error(absl::StrCat("expected \"", Sv(literal), "\""));
    }
    pos_ += literal.size();
    return absl::OkStatus();
  }

  absl::StatusOr<double> Real() {
    double value = 0.0;
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) return Error("expected a number");
    pos_ += static_cast<size_t>(ptr - begin);
    return value;
  }

  template <typename Int>
  absl::StatusOr<Int> Integer() {
    Int value = 0;
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) return Error("expected an integer");
    pos_ += static_cast<size_t>(ptr - begin);
    return value;
  }

  absl::StatusOr<Point3> Tuple3() {
    Point3 p;
    MT_RETURN_IF_ERROR(Expect("("));
    MT_ASSIGN_OR_RETURN(p.x, Real());
    MT_RETURN_IF_ERROR(Expect(", "));
    MT_ASSIGN_OR_RETURN(p.y, Real());
    MT_RETURN_IF_ERROR(Expect(", "));
    MT_ASSIGN_OR_RETURN(p.z, Real());
    MT_RETURN_IF_ERROR(Expect(")"));
    return p;
  }

  bool AtEnd() const { return pos_ == text_.size(); }

  absl::Status Error(std::string_view what) const {
    return absl::InvalidArgumentError(
        absl::StrCat("segment line, column ", pos_ + 1, ": ", Sv(what)));
  }

 private:
  std::string_view text_;
  size_t pos_ = 0;
};

nlohmann::ordered_json Json3(const Point3& p) { return {p.x, p.y, p.z}; }

}  // namespace

absl::StatusOr<GroundingProfile> MakeGroundingProfile(
    std::string video_id, std::vector<EntityGrounding> entities) {
  for (const EntityGrounding& e : entities) {
    if (e.segments.size() != entities.front().segments.size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "entity \"", e.entity_label, "\" has ", e.segments.size(),
          " segments, expected ", entities.front().segments.size()));
    }
  }
  auto first_present = [](const EntityGrounding& e) {
    for (size_t i = 0; i < e.segments.size(); ++i) {
      if (e.segments[i].has_value()) return i;
    }
    return std::numeric_limits<size_t>::max();
  };
  std::stable_sort(entities.begin(), entities.end(),
                   [&](const EntityGrounding& a, const EntityGrounding& b) {
                     const size_t fa = first_present(a);
                     const size_t fb = first_present(b);
                     if (fa != fb) return fa < fb;
                     return a.entity_label < b.entity_label;
                   });
  return GroundingProfile{std::move(video_id), std::move(entities)};
}

std::string FormatFixed2(double value) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof(buf), "%.2f", value);
  std::string out(buf, n > 0 ? static_cast<size_t>(n) : 0);
  if (out == "-0.00") out = "0.00";
  return out;
}

std::string RenderSegmentLine(size_t segment_number,
                              const MotionAttributes& attrs) {
  return absl::StrCat("* Segment #", segment_number, ": First Position ",
                      Triple(attrs.first_position), ", Motion Vector ",
                      Triple(attrs.motion_vector), ", Last Position ",
                      Triple(attrs.last_position), ", Bounding Box ",
                      Box(attrs.bbox), ", Frame ", attrs.first_frame, "...",
                      attrs.last_frame);
}

std::string RenderEntityBlock(const GroundingProfile& profile) {
  std::string out;
  for (size_t k = 0; k < profile.entities.size(); ++k) {
    const EntityGrounding& entity = profile.entities[k];
    absl::StrAppend(&out, "Entity #", k + 1, ": ", entity.entity_label, "\n");
    for (size_t j = 0; j < entity.segments.size(); ++j) {
      if (!entity.segments[j].has_value()) continue;
      absl::StrAppend(&out, RenderSegmentLine(j + 1, *entity.segments[j]),
                      "\n");
    }
  }
  return out;
}

absl::StatusOr<ParsedSegmentLine> ParseSegmentLine(std::string_view line) {
  Scanner s(line);
  ParsedSegmentLine parsed;
  MT_RETURN_IF_ERROR(s.Expect("* Segment #"));
  MT_ASSIGN_OR_RETURN(parsed.segment_number, s.Integer<size_t>());
  MT_RETURN_IF_ERROR(s.Expect(": First Position "));
  MT_ASSIGN_OR_RETURN(parsed.first_position, s.Tuple3());
  MT_RETURN_IF_ERROR(s.Expect(", Motion Vector "));
  MT_ASSIGN_OR_RETURN(parsed.motion_vector, s.Tuple3());
  MT_RETURN_IF_ERROR(s.Expect(", Last Position "));
  MT_ASSIGN_OR_RETURN(parsed.last_position, s.Tuple3());
  MT_RETURN_IF_ERROR(s.Expect(", Bounding Box ("));
  MT_ASSIGN_OR_RETURN(parsed.bbox.x1, s.Real());
  MT_RETURN_IF_ERROR(s.Expect(", "));
  MT_ASSIGN_OR_RETURN(parsed.bbox.y1, s.Real());
  MT_RETURN_IF_ERROR(s.Expect(", "));
  MT_ASSIGN_OR_RETURN(parsed.bbox.x2, s.Real());
  MT_RETURN_IF_ERROR(s.Expect(", "));
  MT_ASSIGN_OR_RETURN(parsed.bbox.y2, s.Real());
  MT_RETURN_IF_ERROR(s.Expect("), Frame "));
  MT_ASSIGN_OR_RETURN(parsed.first_frame, s.Integer<uint32_t>());
  MT_RETURN_IF_ERROR(s.Expect("..."));
  MT_ASSIGN_OR_RETURN(parsed.last_frame, s.Integer<uint32_t>());
  if (!s.AtEnd()) return s.Error("trailing characters");
  return parsed;
}

absl::StatusOr<std::vector<ParsedEntity>> ParseEntityBlock(
    std::string_view text) {
  std::vector<ParsedEntity> entities;
  size_t line_number = 0;
  for (absl::string_view piece : absl::StrSplit(Sv(text), '\n')) {
    const std::string_view line = Sv(piece);
    ++line_number;
    if (line.empty()) continue;
    if (line.starts_with("Entity #")) {
      std::string_view rest = line.substr(8);
      const size_t colon = rest.find(": ");
      size_t number = 0;
      if (colon == std::string_view::npos ||
          std::from_chars(rest.data(), rest.data() + colon, number).ptr !=
              rest.data() + colon) {
        return absl::InvalidArgumentError(
            absl::StrCat("line ", line_number, ": malformed entity header"));
      }
      entities.push_back(
          {number, std::string(rest.substr(colon + 2)), {}});
    } else if (line.starts_with("* Segment #")) {
      if (entities.empty()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "line ", line_number, ": segment line before any entity header"));
      }
      auto parsed = ParseSegmentLine(line);
      if (!parsed.ok()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "line ", line_number, ": ", parsed.status().message()));
      }
      entities.back().segments.push_back(*parsed);
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_number, ": unrecognized line"));
    }
  }
  return entities;
}

nlohmann::ordered_json GroundingProfileToJson(const GroundingProfile& profile) {
  nlohmann::ordered_json entities = nlohmann::ordered_json::array();
  for (size_t k = 0; k < profile.entities.size(); ++k) {
    const EntityGrounding& entity = profile.entities[k];
    nlohmann::ordered_json segments = nlohmann::ordered_json::array();
    for (size_t j = 0; j < entity.segments.size(); ++j) {
      if (!entity.segments[j].has_value()) continue;
      const MotionAttributes& m = *entity.segments[j];
      segments.push_back(
          {{"segment_number", j + 1},
           {"first_position", Json3(m.first_position)},
           {"motion_vector", Json3(m.motion_vector)},
           {"last_position", Json3(m.last_position)},
           {"bounding_box", {m.bbox.x1, m.bbox.y1, m.bbox.x2, m.bbox.y2}},
           {"frame", {m.first_frame, m.last_frame}},
           {"contributing_points", m.contributing_points}});
    }
    entities.push_back({{"entity_number", k + 1},
                        {"entity_label", entity.entity_label},
                        {"segments", std::move(segments)}});
  }
  return {{"video_id", profile.video_id}, {"entities", std::move(entities)}};
}

std::string PromptBundle::Flatten(bool include_system_preamble) const {
  std::string out;
  auto add = [&out](std::string_view block) {
    if (block.empty()) return;
    if (!out.empty()) out += "\n\n";
    out += block;
  };
  if (include_system_preamble) add(system_preamble);
  add(conversation_setup);
  add(question_block);
  add(grounding_block);
  add(reasoning_instruction);
  add(answer_instruction);
  out += '\n';
  return out;
}

absl::StatusOr<PromptBundle> RenderPrompt(const QARecord& qa,
                                          std::string_view grounding_text) {
  if (absl::StripAsciiWhitespace(qa.question).empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("qa record \"", qa.id, "\": empty question"));
  }
  PromptBundle bundle;
  bundle.system_preamble = std::string(kSystemPreamble);
  bundle.conversation_setup = std::string(kConversationSetup);
  bundle.question_block = absl::StrCat("<Question> ", qa.question,
                                       " </Question>");
  std::string_view grounding = grounding_text;
  while (!grounding.empty() && grounding.back() == '\n') {
    grounding.remove_suffix(1);
  }
  bundle.grounding_block = std::string(grounding);
  bundle.reasoning_instruction = std::string(kReasoningInstruction);
  bundle.answer_instruction = std::string(kAnswerInstruction);
  return bundle;
}

}  // namespace motiontrace
