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

#include "motiontrace/geometry.h"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "absl/strings/str_cat.h"
#include "nlohmann/json.hpp"

namespace motiontrace {
namespace {

struct Contribution {
  uint32_t point_id;
  Point3 first;
  Point3 last;
};

auto SortKey(const Contribution& c) {
  return std::make_tuple(c.point_id, c.first.x, c.first.y, c.first.z,
                         c.last.x, c.last.y, c.last.z);
}

}  // namespace

CameraModel DefaultCamera(uint32_t width, uint32_t height) {
  const double focal = std::max(width, height);
  return {focal, focal, width / 2.0, height / 2.0};
}

absl::Status ValidateCamera(const CameraModel& camera, uint32_t width,
                            uint32_t height) {
  if (!(std::isfinite(camera.fx) && camera.fx > 0.0 &&
        std::isfinite(camera.fy) && camera.fy > 0.0)) {
    return absl::InvalidArgumentError("focal lengths must be finite and > 0");
  }
  if (!(camera.cx >= 0.0 && camera.cx <= width && camera.cy >= 0.0 &&
        camera.cy <= height)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "principal point (", camera.cx, ", ", camera.cy,
        ") lies outside the ", width, "x", height, " image"));
  }
  return absl::OkStatus();
}

absl::StatusOr<Point3> Backproject(double u, double v, double depth,
                                   const CameraModel& camera) {
  if (!DepthFrame::IsValidDepth(depth)) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot back-project invalid depth ", depth));
  }
  return Point3{depth * (u - camera.cx) / camera.fx,
                depth * (v - camera.cy) / camera.fy, depth};
}

std::optional<double> SampleDepth(const DepthFrame& frame, double u,
                                  double v) {
  if (frame.width == 0 || frame.height == 0 ||
      frame.values.size() != static_cast<size_t>(frame.width) * frame.height ||
      !std::isfinite(u) || !std::isfinite(v)) {
    return std::nullopt;
  }
  const double max_u = frame.width - 1.0;
  const double max_v = frame.height - 1.0;
  u = std::clamp(u, 0.0, max_u);
  v = std::clamp(v, 0.0, max_v);
  const auto col0 = static_cast<uint32_t>(std::floor(u));
  const auto row0 = static_cast<uint32_t>(std::floor(v));
  const double tu = u - col0;
  const double tv = v - row0;
  const uint32_t col1 = tu > 0.0 ? col0 + 1 : col0;
  const uint32_t row1 = tv > 0.0 ? row0 + 1 : row0;

  const double d00 = frame.At(col0, row0);
  const double d10 = frame.At(col1, row0);
  const double d01 = frame.At(col0, row1);
  const double d11 = frame.At(col1, row1);
  // col1 == col0 when tu == 0 (and likewise for rows), so zero-weight texels
  // never reach this check.
  if (!DepthFrame::IsValidDepth(d00) || !DepthFrame::IsValidDepth(d10) ||
      !DepthFrame::IsValidDepth(d01) || !DepthFrame::IsValidDepth(d11)) {
    return std::nullopt;
  }
  // lerp(a, a, t) == a, so constant neighborhoods sample exactly.
  const double top = std::lerp(d00, d10, tu);
  const double bottom = std::lerp(d01, d11, tu);
  return std::lerp(top, bottom, tv);
}

absl::StatusOr<Trajectory3D> LiftTrack(
    const PointTrack& track, std::span<const std::optional<DepthFrame>> depth,
    const CameraModel& camera) {
  if (depth.size() != track.samples.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "track ", track.entity_label, "#", track.point_id, " has ",
        track.samples.size(), " samples but ", depth.size(), " depth slots"));
  }
  const DepthFrame* reference = nullptr;
  for (const auto& frame : depth) {
    if (!frame.has_value()) continue;
    if (reference == nullptr) {
      reference = &*frame;
    } else if (frame->width != reference->width ||
               frame->height != reference->height) {
      return absl::InvalidArgumentError(absl::StrCat(
          "depth frame ", frame->frame_index, " is ", frame->width, "x",
          frame->height, ", expected ", reference->width, "x",
          reference->height));
    }
  }

  Trajectory3D out;
  out.entity_label = track.entity_label;
  out.point_id = track.point_id;
  out.samples.resize(track.samples.size());
  for (size_t f = 0; f < track.samples.size(); ++f) {
    const TrackSample& s = track.samples[f];
    TrajectorySample& lifted = out.samples[f];
    lifted.frame_index = static_cast<uint32_t>(f);
    if (!s.visible || !depth[f].has_value()) continue;
    const DepthFrame& frame = *depth[f];
    if (!(s.x >= 0.0 && s.x <= frame.width && s.y >= 0.0 &&
          s.y <= frame.height)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "track ", track.entity_label, "#", track.point_id, " frame ", f,
          ": (", s.x, ", ", s.y, ") outside the ", frame.width, "x",
          frame.height, " depth grid"));
    }
    const std::optional<double> d = SampleDepth(frame, s.x, s.y);
    if (!d.has_value()) continue;
    absl::StatusOr<Point3> p = Backproject(s.x, s.y, *d, camera);
    if (!p.ok()) continue;
    lifted.position = *p;
    lifted.valid = true;
  }
  return out;
}

std::optional<MotionAttributes> SegmentMotion(
    std::span<const Trajectory3D> trajectories, std::string_view entity_label,
    size_t segment_index, FrameRange segment, const SegmentPresence& presence) {
  if (!presence.present || !presence.best_bbox.has_value()) {
    return std::nullopt;
  }

  std::vector<Contribution> contributions;
  for (const Trajectory3D& t : trajectories) {
    if (t.entity_label != entity_label) continue;
    const TrajectorySample* first = nullptr;
    const TrajectorySample* last = nullptr;
    const size_t end = std::min<size_t>(segment.end + 1, t.samples.size());
    for (size_t f = segment.start; f < end; ++f) {
      if (!t.samples[f].valid) continue;
      if (first == nullptr) first = &t.samples[f];
      last = &t.samples[f];
    }
    if (first != nullptr && last != first) {
      contributions.push_back({t.point_id, first->position, last->position});
    }
  }
  if (contributions.empty()) return std::nullopt;

  // Fixed summation order keeps the means bit-identical under permutation.
  std::sort(contributions.begin(), contributions.end(),
            [](const Contribution& a, const Contribution& b) {
              return SortKey(a) < SortKey(b);
            });
  Point3 first_sum;
  Point3 last_sum;
  Point3 displacement_sum;
  for (const Contribution& c : contributions) {
    first_sum += c.first;
    last_sum += c.last;
    displacement_sum += c.last - c.first;
  }
  const double n = static_cast<double>(contributions.size());

  MotionAttributes attrs;
  attrs.entity_label = std::string(entity_label);
  attrs.segment_index = segment_index;
  attrs.first_position = first_sum / n;
  attrs.last_position = last_sum / n;
  attrs.motion_vector = displacement_sum / n;
  attrs.bbox = *presence.best_bbox;
  attrs.first_frame = segment.start;
  attrs.last_frame = segment.end;
  attrs.contributing_points = contributions.size();
  return attrs;
}

std::vector<std::optional<MotionAttributes>> EntityMotion(
    std::span<const Trajectory3D> trajectories, const SegmentPlan& plan,
    const PresenceProfile& presence) {
  std::vector<std::optional<MotionAttributes>> motion;
  motion.reserve(plan.size());
  for (size_t i = 0; i < plan.size(); ++i) {
    const SegmentPresence empty;
    const SegmentPresence& p =
        i < presence.segments.size() ? presence.segments[i] : empty;
    motion.push_back(SegmentMotion(trajectories, presence.entity_label, i,
                                   plan.segments[i], p));
  }
  return motion;
}

nlohmann::ordered_json TrajectoryToJson(const Trajectory3D& trajectory) {
  nlohmann::ordered_json samples = nlohmann::ordered_json::array();
  for (const TrajectorySample& s : trajectory.samples) {
    if (!s.valid) {
      samples.push_back(nullptr);
      continue;
    }
    samples.push_back({s.position.x, s.position.y, s.position.z});
  }
  return {{"entity_label", trajectory.entity_label},
          {"point_id", trajectory.point_id},
          {"samples", std::move(samples)}};
}

}  // namespace motiontrace
