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

#include "motiontrace/interchange.h"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl_compat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "motiontrace/file_util.h"
#include "nlohmann/json.hpp"
#include "status_macros.h"

namespace motiontrace {
namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

absl::Status SchemaError(std::string_view path, std::string_view message) {
  return absl::InvalidArgumentError(absl::StrCat(Sv(path), ": ", Sv(message)));
}

std::string Child(std::string_view parent, std::string_view key) {
  if (parent.empty()) return std::string(key);
  return absl::StrCat(Sv(parent), ".", Sv(key));
}

std::string Index(std::string_view parent, size_t i) {
  return absl::StrCat(Sv(parent), "[", i, "]");
}

absl::StatusOr<const Json*> Member(const Json& object, std::string_view key,
                                   std::string_view parent) {
  if (!object.is_object()) return SchemaError(parent, "expected an object");
  auto it = object.find(key);
  if (it == object.end()) {
    return SchemaError(Child(parent, key), "missing required field");
  }
  return &*it;
}

absl::StatusOr<std::string> GetString(const Json& object, std::string_view key,
                                      std::string_view parent) {
  MT_ASSIGN_OR_RETURN(const Json* value, Member(object, key, parent));
  if (!value->is_string()) {
    return SchemaError(Child(parent, key), "expected a string");
  }
  return value->get<std::string>();
}

absl::StatusOr<uint64_t> AsUnsigned(const Json& value, std::string_view path) {
  if (!value.is_number_integer()) {
    return SchemaError(path, "expected a non-negative integer");
  }
  if (value.is_number_unsigned()) return value.get<uint64_t>();
  const int64_t v = value.get<int64_t>();
  if (v < 0) return SchemaError(path, "expected a non-negative integer");
  return static_cast<uint64_t>(v);
}

absl::StatusOr<uint32_t> GetU32(const Json& object, std::string_view key,
                                std::string_view parent) {
  MT_ASSIGN_OR_RETURN(const Json* value, Member(object, key, parent));
  MT_ASSIGN_OR_RETURN(uint64_t v, AsUnsigned(*value, Child(parent, key)));
  if (v > UINT32_MAX) {
    return SchemaError(Child(parent, key), "value exceeds 32 bits");
  }
  return static_cast<uint32_t>(v);
}

absl::StatusOr<double> AsNumber(const Json& value, std::string_view path) {
  if (!value.is_number()) return SchemaError(path, "expected a number");
  const double v = value.get<double>();
  if (!std::isfinite(v)) return SchemaError(path, "expected a finite number");
  return v;
}

absl::StatusOr<double> GetNumber(const Json& object, std::string_view key,
                                 std::string_view parent) {
  MT_ASSIGN_OR_RETURN(const Json* value, Member(object, key, parent));
  return AsNumber(*value, Child(parent, key));
}

absl::StatusOr<Json> ParseJsonText(std::string_view text,
                                   std::string_view where) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    return absl::InvalidArgumentError(
        absl::StrCat(Sv(where), ": malformed JSON: ", e.what()));
  }
}

// Splits JSON-lines text. Yields (1-based line number, line) for non-blank
// lines; a trailing '\r' is dropped.
std::vector<std::pair<size_t, std::string_view>> SplitLines(
    std::string_view text) {
  std::vector<std::pair<size_t, std::string_view>> lines;
  size_t line_number = 0;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") != std::string_view::npos) {
      lines.emplace_back(line_number, line);
    }
    start = end + 1;
  }
  return lines;
}

absl::Status AtLine(size_t line_number, const absl::Status& status) {
  return absl::Status(status.code(), absl::StrCat("line ", line_number, ": ",
                                                  status.message()));
}

uint32_t LoadU32(const char* p) {
  const auto* b = reinterpret_cast<const unsigned char*>(p);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) |
         (static_cast<uint32_t>(b[3]) << 24);
}

void StoreU32(uint32_t v, std::string& out) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::string DescribeBox(const BBox& b) {
  return absl::StrCat("[", b.x1, ", ", b.y1, ", ", b.x2, ", ", b.y2, "]");
}

}  // namespace

bool DepthFrame::IsValidDepth(double value) {
  return std::isfinite(value) && value > 0.0;
}

std::string_view CategoryCode(Category category) {
  switch (category) {
    case Category::kSU:
      return "SU";
    case Category::kTU:
      return "TU";
    case Category::kMAR:
      return "MAR";
    case Category::kPC:
      return "PC";
    case Category::kPA:
      return "PA";
  }
  return "?";
}

std::optional<Category> CategoryFromCode(std::string_view code) {
  for (Category c : kAllCategories) {
    if (CategoryCode(c) == code) return c;
  }
  return std::nullopt;
}

std::string_view QuestionTypeName(QuestionType type) {
  return type == QuestionType::kFactual ? "factual" : "critical";
}

std::optional<QuestionType> QuestionTypeFromName(std::string_view name) {
  if (name == "factual") return QuestionType::kFactual;
  if (name == "critical") return QuestionType::kCritical;
  return std::nullopt;
}

std::string_view PolarityName(Polarity polarity) {
  return polarity == Polarity::kPositive ? "positive" : "negative";
}

std::optional<Polarity> PolarityFromName(std::string_view name) {
  if (name == "positive") return Polarity::kPositive;
  if (name == "negative") return Polarity::kNegative;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Manifest

absl::StatusOr<std::vector<VideoEntry>> ParseManifestJson(
    std::string_view text, const std::filesystem::path& base_dir) {
  MT_ASSIGN_OR_RETURN(Json root, ParseJsonText(text, "manifest"));
  MT_ASSIGN_OR_RETURN(const Json* videos, Member(root, "videos", ""));
  if (!videos->is_array()) return SchemaError("videos", "expected an array");

  auto resolve = [&](std::string raw) {
    std::filesystem::path p(std::move(raw));
    if (base_dir.empty() || p.is_absolute()) return p;
    return base_dir / p;
  };

  std::vector<VideoEntry> entries;
  std::unordered_set<std::string> seen_ids;
  for (size_t i = 0; i < videos->size(); ++i) {
    const Json& v = (*videos)[i];
    const std::string path = Index("videos", i);
    VideoEntry entry;
    MT_ASSIGN_OR_RETURN(entry.meta.video_id, GetString(v, "video_id", path));
    MT_ASSIGN_OR_RETURN(entry.meta.width, GetU32(v, "width", path));
    MT_ASSIGN_OR_RETURN(entry.meta.height, GetU32(v, "height", path));
    MT_ASSIGN_OR_RETURN(entry.meta.fps, GetNumber(v, "fps", path));
    MT_ASSIGN_OR_RETURN(entry.meta.frame_count,
                        GetU32(v, "frame_count", path));
    MT_ASSIGN_OR_RETURN(std::string detections,
                        GetString(v, "detections", path));
    MT_ASSIGN_OR_RETURN(std::string tracks, GetString(v, "tracks", path));
    MT_ASSIGN_OR_RETURN(std::string depth_dir,
                        GetString(v, "depth_dir", path));

    if (entry.meta.video_id.empty()) {
      return SchemaError(Child(path, "video_id"), "must be non-empty");
    }
    if (!seen_ids.insert(entry.meta.video_id).second) {
      return SchemaError(Child(path, "video_id"),
                         absl::StrCat("duplicate id \"", entry.meta.video_id,
                                      "\""));
    }
    if (entry.meta.width == 0) {
      return SchemaError(Child(path, "width"), "must be > 0");
    }
    if (entry.meta.height == 0) {
      return SchemaError(Child(path, "height"), "must be > 0");
    }
    if (!(entry.meta.fps > 0.0)) {
      return SchemaError(Child(path, "fps"), "must be > 0");
    }
    if (entry.meta.frame_count == 0) {
      return SchemaError(Child(path, "frame_count"), "must be >= 1");
    }
    entry.detections_path = resolve(std::move(detections));
    entry.tracks_path = resolve(std::move(tracks));
    entry.depth_dir = resolve(std::move(depth_dir));
    entries.push_back(std::move(entry));
  }
  return entries;
}

absl::StatusOr<std::vector<VideoEntry>> ParseManifest(
    const std::filesystem::path& path) {
  MT_ASSIGN_OR_RETURN(std::string text, ReadFileToString(path));
  auto entries = ParseManifestJson(text, path.parent_path());
  if (!entries.ok()) {
    return absl::Status(entries.status().code(),
                        absl::StrCat(path.string(), ": ",
                                     entries.status().message()));
  }
  return entries;
}

std::string EncodeManifestJson(std::span<const VideoEntry> videos) {
  OrderedJson list = OrderedJson::array();
  for (const VideoEntry& v : videos) {
    list.push_back({{"video_id", v.meta.video_id},
                    {"width", v.meta.width},
                    {"height", v.meta.height},
                    {"fps", v.meta.fps},
                    {"frame_count", v.meta.frame_count},
                    {"detections", v.detections_path.generic_string()},
                    {"tracks", v.tracks_path.generic_string()},
                    {"depth_dir", v.depth_dir.generic_string()}});
  }
  OrderedJson root = {{"videos", std::move(list)}};
  return root.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Depth

absl::StatusOr<DepthFrame> ParseDepthFrame(std::string_view bytes) {
  if (bytes.size() < kDepthMagic.size() ||
      bytes.substr(0, kDepthMagic.size()) != kDepthMagic) {
    return absl::InvalidArgumentError("depth frame: bad magic, expected MGD1");
  }
  if (bytes.size() < kDepthHeaderSize) {
    return absl::InvalidArgumentError(absl::StrCat(
        "depth frame: truncated header (", bytes.size(), " of ",
        kDepthHeaderSize, " bytes)"));
  }
  DepthFrame frame;
  frame.width = LoadU32(bytes.data() + 4);
  frame.height = LoadU32(bytes.data() + 8);
  frame.frame_index = LoadU32(bytes.data() + 12);
  if (frame.width == 0 || frame.height == 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "depth frame: zero dimension ", frame.width, "x", frame.height));
  }
  const uint64_t count = static_cast<uint64_t>(frame.width) * frame.height;
  const uint64_t payload = bytes.size() - kDepthHeaderSize;
  if (payload < count * 4) {
    return absl::InvalidArgumentError(absl::StrCat(
        "depth frame: truncated payload, header declares ", frame.width, "x",
        frame.height, " = ", count, " values but only ", payload,
        " bytes follow"));
  }
  if (payload > count * 4) {
    return absl::InvalidArgumentError(absl::StrCat(
        "depth frame: size mismatch, header declares ", frame.width, "x",
        frame.height, " = ", count, " values but ", payload,
        " payload bytes follow"));
  }
  frame.values.resize(count);
  const char* p = bytes.data() + kDepthHeaderSize;
  for (uint64_t i = 0; i < count; ++i, p += 4) {
    frame.values[i] = std::bit_cast<float>(LoadU32(p));
  }
  return frame;
}

std::string EncodeDepthFrame(const DepthFrame& frame) {
  std::string out;
  out.reserve(kDepthHeaderSize + frame.values.size() * 4);
  out.append(kDepthMagic);
  StoreU32(frame.width, out);
  StoreU32(frame.height, out);
  StoreU32(frame.frame_index, out);
  for (float v : frame.values) StoreU32(std::bit_cast<uint32_t>(v), out);
  return out;
}

std::string DepthFrameFileName(uint32_t frame_index) {
  return absl::StrFormat("depth_%06d.bin", frame_index);
}

absl::StatusOr<DepthFrame> ReadDepthFrameFile(
    const std::filesystem::path& path) {
  MT_ASSIGN_OR_RETURN(std::string bytes, ReadFileToString(path));
  auto frame = ParseDepthFrame(bytes);
  if (!frame.ok()) {
    return absl::Status(frame.status().code(),
                        absl::StrCat(path.string(), ": ",
                                     frame.status().message()));
  }
  return frame;
}

absl::StatusOr<std::vector<std::optional<DepthFrame>>> LoadDepthFrames(
    const std::filesystem::path& dir, uint32_t frame_count) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    return absl::NotFoundError(
        absl::StrCat(dir.string(), ": depth directory not found"));
  }
  std::vector<std::optional<DepthFrame>> frames(frame_count);
  for (uint32_t i = 0; i < frame_count; ++i) {
    const std::filesystem::path path = dir / DepthFrameFileName(i);
    if (!std::filesystem::exists(path, ec)) continue;
    MT_ASSIGN_OR_RETURN(frames[i], ReadDepthFrameFile(path));
  }
  return frames;
}

// ---------------------------------------------------------------------------
// Detections

absl::StatusOr<std::vector<Detection>> ParseDetectionsJsonl(
    std::string_view text) {
  std::vector<Detection> detections;
  for (const auto& [line_number, line] : SplitLines(text)) {
    auto parse_line = [&]() -> absl::StatusOr<Detection> {
      MT_ASSIGN_OR_RETURN(Json j, ParseJsonText(line, "detection"));
      Detection d;
      MT_ASSIGN_OR_RETURN(d.frame_index, GetU32(j, "frame", ""));
      MT_ASSIGN_OR_RETURN(d.entity_label, GetString(j, "entity", ""));
      MT_ASSIGN_OR_RETURN(const Json* box, Member(j, "bbox", ""));
      if (!box->is_array() || box->size() != 4) {
        return SchemaError("bbox", "expected [x1, y1, x2, y2]");
      }
      MT_ASSIGN_OR_RETURN(d.bbox.x1, AsNumber((*box)[0], "bbox[0]"));
      MT_ASSIGN_OR_RETURN(d.bbox.y1, AsNumber((*box)[1], "bbox[1]"));
      MT_ASSIGN_OR_RETURN(d.bbox.x2, AsNumber((*box)[2], "bbox[2]"));
      MT_ASSIGN_OR_RETURN(d.bbox.y2, AsNumber((*box)[3], "bbox[3]"));
      MT_ASSIGN_OR_RETURN(d.confidence, GetNumber(j, "score", ""));
      return d;
    };
    auto d = parse_line();
    if (!d.ok()) return AtLine(line_number, d.status());
    detections.push_back(*std::move(d));
  }
  return detections;
}

std::string EncodeDetectionsJsonl(std::span<const Detection> detections) {
  std::string out;
  for (const Detection& d : detections) {
    OrderedJson j = {
        {"frame", d.frame_index},
        {"entity", d.entity_label},
        {"bbox", {d.bbox.x1, d.bbox.y1, d.bbox.x2, d.bbox.y2}},
        {"score", d.confidence}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

absl::StatusOr<std::vector<Detection>> ReadDetectionsFile(
    const std::filesystem::path& path) {
  MT_ASSIGN_OR_RETURN(std::string text, ReadFileToString(path));
  auto detections = ParseDetectionsJsonl(text);
  if (!detections.ok()) {
    return absl::Status(detections.status().code(),
                        absl::StrCat(path.string(), ": ",
                                     detections.status().message()));
  }
  return detections;
}

// ---------------------------------------------------------------------------
// Tracks

absl::StatusOr<std::vector<PointTrack>> ParseTracksJson(
    std::string_view text) {
  MT_ASSIGN_OR_RETURN(Json root, ParseJsonText(text, "tracks"));
  if (!root.is_array()) {
    return SchemaError("tracks", "expected a top-level array");
  }
  std::vector<PointTrack> tracks;
  for (size_t e = 0; e < root.size(); ++e) {
    const std::string entity_path = Index("tracks", e);
    const Json& entity = root[e];
    MT_ASSIGN_OR_RETURN(std::string label,
                        GetString(entity, "entity_label", entity_path));
    MT_ASSIGN_OR_RETURN(const Json* points,
                        Member(entity, "points", entity_path));
    const std::string points_path = Child(entity_path, "points");
    if (!points->is_array()) return SchemaError(points_path, "expected an array");
    for (size_t p = 0; p < points->size(); ++p) {
      const std::string point_path = Index(points_path, p);
      const Json& frames = (*points)[p];
      if (!frames.is_array()) {
        return SchemaError(point_path, "expected an array of samples");
      }
      PointTrack track;
      track.entity_label = label;
      track.point_id = static_cast<uint32_t>(p);
      track.samples.reserve(frames.size());
      for (size_t f = 0; f < frames.size(); ++f) {
        const std::string sample_path = Index(point_path, f);
        const Json& s = frames[f];
        if (!s.is_array() || s.size() != 3) {
          return SchemaError(sample_path, "expected [x, y, visible]");
        }
        TrackSample sample;
        MT_ASSIGN_OR_RETURN(sample.x, AsNumber(s[0], sample_path));
        MT_ASSIGN_OR_RETURN(sample.y, AsNumber(s[1], sample_path));
        if (s[2].is_boolean()) {
          sample.visible = s[2].get<bool>();
        } else if (s[2].is_number_integer() &&
                   (s[2].get<int64_t>() == 0 || s[2].get<int64_t>() == 1)) {
          sample.visible = s[2].get<int64_t>() == 1;
        } else {
          return SchemaError(sample_path, "visible flag must be 0 or 1");
        }
        track.samples.push_back(sample);
      }
      tracks.push_back(std::move(track));
    }
  }
  return tracks;
}

std::string EncodeTracksJson(std::span<const PointTrack> tracks) {
  // Group by label, preserving first-appearance order.
  std::vector<std::string> order;
  std::map<std::string, std::vector<const PointTrack*>> groups;
  for (const PointTrack& t : tracks) {
    auto [it, inserted] = groups.try_emplace(t.entity_label);
    if (inserted) order.push_back(t.entity_label);
    it->second.push_back(&t);
  }
  OrderedJson root = OrderedJson::array();
  for (const std::string& label : order) {
    OrderedJson points = OrderedJson::array();
    for (const PointTrack* t : groups[label]) {
      OrderedJson samples = OrderedJson::array();
      for (const TrackSample& s : t->samples) {
        samples.push_back({s.x, s.y, s.visible ? 1 : 0});
      }
      points.push_back(std::move(samples));
    }
    root.push_back({{"entity_label", label}, {"points", std::move(points)}});
  }
  return root.dump() + "\n";
}

absl::StatusOr<std::vector<PointTrack>> ReadTracksFile(
    const std::filesystem::path& path) {
  MT_ASSIGN_OR_RETURN(std::string text, ReadFileToString(path));
  auto tracks = ParseTracksJson(text);
  if (!tracks.ok()) {
    return absl::Status(tracks.status().code(),
                        absl::StrCat(path.string(), ": ",
                                     tracks.status().message()));
  }
  return tracks;
}

// ---------------------------------------------------------------------------
// QA

absl::StatusOr<std::vector<QARecord>> ParseQaJsonl(std::string_view text) {
  std::vector<QARecord> records;
  std::unordered_set<std::string> seen_ids;
  for (const auto& [line_number, line] : SplitLines(text)) {
    auto parse_line = [&]() -> absl::StatusOr<QARecord> {
      MT_ASSIGN_OR_RETURN(Json j, ParseJsonText(line, "qa record"));
      QARecord r;
      MT_ASSIGN_OR_RETURN(r.id, GetString(j, "id", ""));
      MT_ASSIGN_OR_RETURN(r.video_id, GetString(j, "video_id", ""));
      MT_ASSIGN_OR_RETURN(r.question, GetString(j, "question", ""));
      MT_ASSIGN_OR_RETURN(r.ground_truth, GetString(j, "ground_truth", ""));
      MT_ASSIGN_OR_RETURN(std::string type, GetString(j, "question_type", ""));
      MT_ASSIGN_OR_RETURN(std::string category, GetString(j, "category", ""));
      MT_ASSIGN_OR_RETURN(std::string polarity, GetString(j, "polarity", ""));

      if (r.id.empty()) return SchemaError("id", "must be non-empty");
      if (auto t = QuestionTypeFromName(type)) {
        r.question_type = *t;
      } else {
        return SchemaError("question_type",
                           absl::StrCat("unknown question type \"", type,
                                        "\" (expected factual|critical)"));
      }
      if (auto c = CategoryFromCode(category)) {
        r.category = *c;
      } else {
        return SchemaError("category",
                           absl::StrCat("unknown category code \"", category,
                                        "\" (expected SU|TU|MAR|PC|PA)"));
      }
      if (auto p = PolarityFromName(polarity)) {
        r.polarity = *p;
      } else {
        return SchemaError("polarity",
                           absl::StrCat("unknown polarity \"", polarity,
                                        "\" (expected positive|negative)"));
      }
      if (auto it = j.find("entities"); it != j.end()) {
        if (!it->is_array()) {
          return SchemaError("entities", "expected an array of strings");
        }
        for (size_t i = 0; i < it->size(); ++i) {
          if (!(*it)[i].is_string()) {
            return SchemaError(Index("entities", i), "expected a string");
          }
          r.entities.push_back((*it)[i].get<std::string>());
        }
      }
      if (r.question_type == QuestionType::kFactual && r.entities.empty()) {
        return SchemaError("entities",
                           "factual records must name at least one entity");
      }
      return r;
    };
    auto r = parse_line();
    if (!r.ok()) return AtLine(line_number, r.status());
    if (!seen_ids.insert(r->id).second) {
      return AtLine(line_number,
                    SchemaError("id", absl::StrCat("duplicate id \"", r->id,
                                                   "\"")));
    }
    records.push_back(*std::move(r));
  }
  return records;
}

std::string EncodeQaJsonl(std::span<const QARecord> records) {
  std::string out;
  for (const QARecord& r : records) {
    OrderedJson j = {{"id", r.id},
                     {"video_id", r.video_id},
                     {"question", r.question},
                     {"ground_truth", r.ground_truth},
                     {"question_type", QuestionTypeName(r.question_type)},
                     {"category", CategoryCode(r.category)},
                     {"polarity", PolarityName(r.polarity)},
                     {"entities", r.entities}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

absl::StatusOr<std::vector<QARecord>> ParseQa(
    const std::filesystem::path& path) {
  MT_ASSIGN_OR_RETURN(std::string text, ReadFileToString(path));
  auto records = ParseQaJsonl(text);
  if (!records.ok()) {
    return absl::Status(records.status().code(),
                        absl::StrCat(path.string(), ": ",
                                     records.status().message()));
  }
  return records;
}

// ---------------------------------------------------------------------------
// Validation

std::string BundleValidation::Summary() const {
  std::vector<std::string> lines;
  lines.reserve(violations.size());
  for (const Violation& v : violations) {
    lines.push_back(absl::StrCat(v.subject, ": ", v.message));
  }
  return absl::StrJoin(lines, "\n");
}

BundleValidation ValidateBundle(
    VideoMeta meta, std::vector<Detection> detections,
    std::vector<PointTrack> tracks,
    std::vector<std::optional<DepthFrame>> depth_frames) {
  std::vector<Violation> violations;
  auto flag = [&](std::string subject, std::string message) {
    violations.push_back({std::move(subject), std::move(message)});
  };

  if (meta.video_id.empty()) flag("meta.video_id", "must be non-empty");
  if (meta.width == 0) flag("meta.width", "must be > 0");
  if (meta.height == 0) flag("meta.height", "must be > 0");
  if (!(std::isfinite(meta.fps) && meta.fps > 0.0)) {
    flag("meta.fps", absl::StrCat("must be > 0, got ", meta.fps));
  }
  if (meta.frame_count == 0) flag("meta.frame_count", "must be >= 1");

  const double width = meta.width;
  const double height = meta.height;

  std::set<std::string> entities;
  for (size_t i = 0; i < detections.size(); ++i) {
    const Detection& d = detections[i];
    const std::string subject =
        absl::StrCat("detections[", i, "] (frame ", d.frame_index, ")");
    if (d.entity_label.empty()) {
      flag(subject, "empty entity label");
    } else {
      entities.insert(d.entity_label);
    }
    if (d.frame_index >= meta.frame_count) {
      flag(subject, absl::StrCat("frame index ", d.frame_index,
                                 " >= frame_count ", meta.frame_count));
    }
    const BBox& b = d.bbox;
    const bool finite = std::isfinite(b.x1) && std::isfinite(b.y1) &&
                        std::isfinite(b.x2) && std::isfinite(b.y2);
    if (!finite || !(0.0 <= b.x1 && b.x1 < b.x2 && b.x2 <= width)) {
      flag(subject, absl::StrCat("bbox ", DescribeBox(b),
                                 " violates 0 <= x1 < x2 <= width (", width,
                                 ")"));
    }
    if (!finite || !(0.0 <= b.y1 && b.y1 < b.y2 && b.y2 <= height)) {
      flag(subject, absl::StrCat("bbox ", DescribeBox(b),
                                 " violates 0 <= y1 < y2 <= height (", height,
                                 ")"));
    }
    if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) {
      flag(subject,
           absl::StrCat("confidence ", d.confidence, " outside [0, 1]"));
    }
  }

  std::set<std::pair<std::string, uint32_t>> seen_points;
  for (const PointTrack& t : tracks) {
    const std::string subject =
        absl::StrCat("tracks[", t.entity_label, "#", t.point_id, "]");
    if (t.entity_label.empty()) flag(subject, "empty entity label");
    if (!seen_points.emplace(t.entity_label, t.point_id).second) {
      flag(subject, "duplicate point id");
    }
    if (!t.entity_label.empty() && !entities.contains(t.entity_label)) {
      flag(subject, absl::StrCat("entity \"", t.entity_label,
                                 "\" has no detections"));
    }
    if (t.samples.size() != meta.frame_count) {
      flag(subject, absl::StrCat("has ", t.samples.size(),
                                 " samples, expected frame_count ",
                                 meta.frame_count));
    }
    for (size_t f = 0; f < t.samples.size(); ++f) {
      const TrackSample& s = t.samples[f];
      if (!s.visible) continue;
      if (!(std::isfinite(s.x) && std::isfinite(s.y) && s.x >= 0.0 &&
            s.x <= width && s.y >= 0.0 && s.y <= height)) {
        flag(subject, absl::StrCat("visible sample at frame ", f, " (", s.x,
                                   ", ", s.y, ") lies outside the image"));
      }
    }
  }

  if (depth_frames.size() > meta.frame_count) {
    for (size_t i = meta.frame_count; i < depth_frames.size(); ++i) {
      if (depth_frames[i].has_value()) {
        flag(absl::StrCat("depth[", i, "]"),
             absl::StrCat("frame beyond frame_count ", meta.frame_count));
      }
    }
  }
  for (size_t i = 0; i < depth_frames.size(); ++i) {
    if (!depth_frames[i].has_value()) continue;
    const DepthFrame& frame = *depth_frames[i];
    const std::string subject = absl::StrCat("depth[", i, "]");
    if (frame.frame_index != i) {
      flag(subject, absl::StrCat("header frame_index ", frame.frame_index,
                                 " does not match slot ", i));
    }
    if (frame.width != meta.width || frame.height != meta.height) {
      flag(subject, absl::StrCat("dimensions ", frame.width, "x",
                                 frame.height, " differ from video ",
                                 meta.width, "x", meta.height));
    }
    if (frame.values.size() !=
        static_cast<size_t>(frame.width) * frame.height) {
      flag(subject, absl::StrCat("grid holds ", frame.values.size(),
                                 " values, expected ", frame.width, "x",
                                 frame.height));
    }
  }

  BundleValidation result;
  if (!violations.empty()) {
    result.violations = std::move(violations);
    return result;
  }
  depth_frames.resize(meta.frame_count);
  auto data = std::make_shared<PerceptionBundle::Data>();
  data->meta = std::move(meta);
  data->detections = std::move(detections);
  data->tracks = std::move(tracks);
  data->depth_frames = std::move(depth_frames);
  data->entities = std::move(entities);
  result.bundle = PerceptionBundle(std::move(data));
  return result;
}

absl::StatusOr<BundleValidation> LoadBundle(const VideoEntry& entry) {
  MT_ASSIGN_OR_RETURN(std::vector<Detection> detections,
                      ReadDetectionsFile(entry.detections_path));
  MT_ASSIGN_OR_RETURN(std::vector<PointTrack> tracks,
                      ReadTracksFile(entry.tracks_path));
  MT_ASSIGN_OR_RETURN(auto depth_frames,
                      LoadDepthFrames(entry.depth_dir, entry.meta.frame_count));
  return ValidateBundle(entry.meta, std::move(detections), std::move(tracks),
                        std::move(depth_frames));
}

}  // namespace motiontrace
