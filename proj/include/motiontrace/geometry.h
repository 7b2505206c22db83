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

// Lifting 2D point tracks into camera space with per-frame relative depth,
// and reducing them to per-segment motion attributes.
//
// Camera space follows the pinhole model: a pixel (u, v) with depth d maps to
//
//   X = d * (u - cx) / fx,   Y = d * (v - cy) / fy,   Z = d
//
// Depth is the estimator's relative depth; no metric scale is recovered.

#ifndef MOTIONTRACE_GEOMETRY_H_
#define MOTIONTRACE_GEOMETRY_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "motiontrace/interchange.h"
#include "motiontrace/temporal.h"
#include "nlohmann/json_fwd.hpp"

namespace motiontrace {

struct CameraModel {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
};

// fx = fy = max(width, height), principal point at the image center.
CameraModel DefaultCamera(uint32_t width, uint32_t height);

absl::Status ValidateCamera(const CameraModel& camera, uint32_t width,
                            uint32_t height);

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Point3& operator+=(const Point3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  friend Point3 operator+(Point3 a, const Point3& b) { return a += b; }
  friend Point3 operator-(const Point3& a, const Point3& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend Point3 operator/(const Point3& a, double s) {
    return {a.x / s, a.y / s, a.z / s};
  }
  friend bool operator==(const Point3&, const Point3&) = default;
};

// Fails on non-positive or non-finite depth.
absl::StatusOr<Point3> Backproject(double u, double v, double depth,
                                   const CameraModel& camera);

// Bilinear depth at (u, v). Coordinates are clamped to the texel-center
// rectangle [0, width-1] x [0, height-1]. Returns nullopt if any texel that
// carries non-zero weight is a hole.
std::optional<double> SampleDepth(const DepthFrame& frame, double u, double v);

struct TrajectorySample {
  uint32_t frame_index = 0;
  Point3 position;
  // Visible in 2D and backed by valid depth.
  bool valid = false;
};

struct Trajectory3D {
  std::string entity_label;
  uint32_t point_id = 0;
  std::vector<TrajectorySample> samples;
};

// `depth` is indexed by frame and must have one slot per track sample; a
// missing frame makes the sample invalid rather than failing.
absl::StatusOr<Trajectory3D> LiftTrack(
    const PointTrack& track, std::span<const std::optional<DepthFrame>> depth,
    const CameraModel& camera);

struct MotionAttributes {
  std::string entity_label;
  size_t segment_index = 0;
  Point3 first_position;
  Point3 last_position;
  Point3 motion_vector;
  BBox bbox;
  uint32_t first_frame = 0;
  uint32_t last_frame = 0;
  size_t contributing_points = 0;
};

// Averages the first and last valid positions of every point of
// `entity_label` with at least two valid samples inside `segment`. The motion vector is the mean of the
// per-point displacements (a displacement over the segment, not a velocity).
// Returns nullopt when the entity is absent or no point contributes. The
// result does not depend on the order of `trajectories`.
std::optional<MotionAttributes> SegmentMotion(
    std::span<const Trajectory3D> trajectories, std::string_view entity_label,
    size_t segment_index, FrameRange segment, const SegmentPresence& presence);

// SegmentMotion over every segment of `plan`.
std::vector<std::optional<MotionAttributes>> EntityMotion(
    std::span<const Trajectory3D> trajectories, const SegmentPlan& plan,
    const PresenceProfile& presence);

nlohmann::ordered_json TrajectoryToJson(const Trajectory3D& trajectory);

}  // namespace motiontrace

#endif  // MOTIONTRACE_GEOMETRY_H_
