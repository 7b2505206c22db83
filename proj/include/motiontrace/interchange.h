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

// File formats through which perception adapters hand detections, point
// tracks and depth maps to the engine, plus the QA record format.
//
// All frame indices are 0-based. Parsers never crash on bad input; every
// failure is reported as an absl::Status carrying the offending location
// (JSON field path, line number or byte offset).

#ifndef MOTIONTRACE_INTERCHANGE_H_
#define MOTIONTRACE_INTERCHANGE_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace motiontrace {

struct VideoMeta {
  std::string video_id;
  uint32_t width = 0;
  uint32_t height = 0;
  double fps = 0.0;
  uint32_t frame_count = 0;

  friend bool operator==(const VideoMeta&, const VideoMeta&) = default;
};

// A manifest row. Relative artifact paths are resolved against the
// directory holding the manifest; nothing is read from them at parse time.
struct VideoEntry {
  VideoMeta meta;
  std::filesystem::path detections_path;
  std::filesystem::path tracks_path;
  std::filesystem::path depth_dir;

  friend bool operator==(const VideoEntry&, const VideoEntry&) = default;
};

// Axis-aligned box in pixel coordinates, (x1, y1) top-left.
struct BBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  friend bool operator==(const BBox&, const BBox&) = default;
};

struct Detection {
  uint32_t frame_index = 0;
  std::string entity_label;
  BBox bbox;
  double confidence = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct TrackSample {
  double x = 0.0;
  double y = 0.0;
  bool visible = false;

  friend bool operator==(const TrackSample&, const TrackSample&) = default;
};

// Dense over all frames of the video; invisible samples keep whatever
// coordinates the tracker reported.
struct PointTrack {
  std::string entity_label;
  uint32_t point_id = 0;
  std::vector<TrackSample> samples;

  friend bool operator==(const PointTrack&, const PointTrack&) = default;
};

// Row-major depth grid in the estimator's relative units. Texel (col, row)
// has its center at pixel coordinate (col, row).
struct DepthFrame {
  uint32_t frame_index = 0;
  uint32_t width = 0;
  uint32_t height = 0;
  std::vector<float> values;

  float At(uint32_t col, uint32_t row) const {
    return values[static_cast<size_t>(row) * width + col];
  }

  // Holes are encoded as non-positive or non-finite depth.
  static bool IsValidDepth(double value);
};

enum class QuestionType { kFactual, kCritical };
enum class Category { kSU, kTU, kMAR, kPC, kPA };
enum class Polarity { kPositive, kNegative };

// Table order used by every report.
inline constexpr std::array<Category, 5> kAllCategories = {
    Category::kSU, Category::kTU, Category::kMAR, Category::kPC,
    Category::kPA};

std::string_view CategoryCode(Category category);
std::optional<Category> CategoryFromCode(std::string_view code);
std::string_view QuestionTypeName(QuestionType type);
std::optional<QuestionType> QuestionTypeFromName(std::string_view name);
std::string_view PolarityName(Polarity polarity);
std::optional<Polarity> PolarityFromName(std::string_view name);

struct QARecord {
  std::string id;
  std::string video_id;
  std::string question;
  std::string ground_truth;
  QuestionType question_type = QuestionType::kFactual;
  Category category = Category::kSU;
  Polarity polarity = Polarity::kPositive;
  // May be empty for critical questions; consumers then fall back to every
  // detected entity.
  std::vector<std::string> entities;

  friend bool operator==(const QARecord&, const QARecord&) = default;
};

// ---------------------------------------------------------------------------
// Manifest (dataset.json)

absl::StatusOr<std::vector<VideoEntry>> ParseManifest(
    const std::filesystem::path& path);

// Relative artifact paths are joined onto `base_dir` unless it is empty.
absl::StatusOr<std::vector<VideoEntry>> ParseManifestJson(
    std::string_view text, const std::filesystem::path& base_dir = {});

std::string EncodeManifestJson(std::span<const VideoEntry> videos);

// ---------------------------------------------------------------------------
// Depth frames (MGD1)
//
//   offset 0   "MGD1"
//   offset 4   u32 width, u32 height, u32 frame_index   (little-endian)
//   offset 16  width*height binary32 values, row-major  (little-endian)

inline constexpr std::string_view kDepthMagic = "MGD1";
inline constexpr size_t kDepthHeaderSize = 16;

absl::StatusOr<DepthFrame> ParseDepthFrame(std::string_view bytes);
std::string EncodeDepthFrame(const DepthFrame& frame);

// "depth_000042.bin"
std::string DepthFrameFileName(uint32_t frame_index);

absl::StatusOr<DepthFrame> ReadDepthFrameFile(
    const std::filesystem::path& path);

// Slot i holds depth_%06d.bin for frame i, or nullopt when that file does not
// exist. A file that exists but fails to decode is an error.
absl::StatusOr<std::vector<std::optional<DepthFrame>>> LoadDepthFrames(
    const std::filesystem::path& dir, uint32_t frame_count);

// ---------------------------------------------------------------------------
// Detections (detections.jsonl)

absl::StatusOr<std::vector<Detection>> ParseDetectionsJsonl(
    std::string_view text);
std::string EncodeDetectionsJsonl(std::span<const Detection> detections);
absl::StatusOr<std::vector<Detection>> ReadDetectionsFile(
    const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Tracks (tracks.json)
//
// A top-level array with one object per entity. point_id is the index of the
// point inside its entity's "points" list.

absl::StatusOr<std::vector<PointTrack>> ParseTracksJson(std::string_view text);
std::string EncodeTracksJson(std::span<const PointTrack> tracks);
absl::StatusOr<std::vector<PointTrack>> ReadTracksFile(
    const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// QA records (qa.jsonl)

absl::StatusOr<std::vector<QARecord>> ParseQaJsonl(std::string_view text);
std::string EncodeQaJsonl(std::span<const QARecord> records);
absl::StatusOr<std::vector<QARecord>> ParseQa(
    const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Cross-file validation

struct Violation {
  // Location, e.g. "detections[3]" or "tracks[ball#2]".
  std::string subject;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct BundleValidation;

// Immutable, validated view of one video's perception artifacts. Copies
// share the underlying data, so a bundle can be handed to worker threads
// freely.
class PerceptionBundle {
 public:
  const VideoMeta& meta() const { return data_->meta; }
  const std::vector<Detection>& detections() const {
    return data_->detections;
  }
  const std::vector<PointTrack>& tracks() const { return data_->tracks; }
  // Indexed by frame; size() == frame_count.
  const std::vector<std::optional<DepthFrame>>& depth_frames() const {
    return data_->depth_frames;
  }
  // Union of detection labels, sorted.
  const std::set<std::string>& entities() const { return data_->entities; }

 private:
  struct Data {
    VideoMeta meta;
    std::vector<Detection> detections;
    std::vector<PointTrack> tracks;
    std::vector<std::optional<DepthFrame>> depth_frames;
    std::set<std::string> entities;
  };

  explicit PerceptionBundle(std::shared_ptr<const Data> data)
      : data_(std::move(data)) {}

  std::shared_ptr<const Data> data_;

  friend BundleValidation ValidateBundle(
      VideoMeta meta, std::vector<Detection> detections,
      std::vector<PointTrack> tracks,
      std::vector<std::optional<DepthFrame>> depth_frames);
};

struct BundleValidation {
  // Set iff `violations` is empty.
  std::optional<PerceptionBundle> bundle;
  std::vector<Violation> violations;

  bool ok() const { return bundle.has_value(); }
  // One violation per line.
  std::string Summary() const;
};

// Checks every cross-file invariant and reports all violations at once.
// `depth_frames` is indexed by frame and may be shorter than frame_count;
// missing slots are treated as absent depth.
BundleValidation ValidateBundle(
    VideoMeta meta, std::vector<Detection> detections,
    std::vector<PointTrack> tracks,
    std::vector<std::optional<DepthFrame>> depth_frames);

// Reads all artifacts of a manifest entry and validates them. Read or decode
// failures come back as an error status; invariant breaches come back as a
// BundleValidation with violations.
absl::StatusOr<BundleValidation> LoadBundle(const VideoEntry& entry);

}  // namespace motiontrace

#endif  // MOTIONTRACE_INTERCHANGE_H_
