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

// Reference implementations used only by tests. Each one is written from the
// definition, deliberately unlike the production code path, so agreement
// between the two means something.

#ifndef MOTIONTRACE_TESTS_ORACLES_H_
#define MOTIONTRACE_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <regex>
#include <string>
#include <tuple>
#include <vector>

#include "motiontrace/geometry.h"
#include "motiontrace/interchange.h"
#include "motiontrace/temporal.h"

namespace motiontrace::oracle {

// |a - b| <= tol * max(|a|, |b|), with exact equality accepted for zeros.
inline bool RelClose(double a, double b, double tol) {
  if (a == b) return true;
  return std::fabs(a - b) <= tol * std::max(std::fabs(a), std::fabs(b));
}

// ---------------------------------------------------------------------------
// Geometry

// Pinhole forward map.
inline std::pair<double, double> Project(const Point3& p,
                                         const CameraModel& cam) {
  return {cam.fx * p.x / p.z + cam.cx, cam.fy * p.y / p.z + cam.cy};
}

// Bilinear depth lookup written as an explicit weighted sum over the four
// clamped neighbours.
inline std::optional<double> BilinearDepth(const DepthFrame& f, double u,
                                           double v) {
  const double cu = std::clamp(u, 0.0, double(f.width - 1));
  const double cv = std::clamp(v, 0.0, double(f.height - 1));
  const long c0 = long(std::floor(cu)), r0 = long(std::floor(cv));
  const double a = cu - c0, b = cv - r0;
  const long c1 = std::min<long>(c0 + 1, f.width - 1);
  const long r1 = std::min<long>(r0 + 1, f.height - 1);
  const std::tuple<long, long, double> taps[4] = {
      {c0, r0, (1 - a) * (1 - b)},
      {c1, r0, a * (1 - b)},
      {c0, r1, (1 - a) * b},
      {c1, r1, a * b}};
  long double sum = 0;
  for (const auto& [c, r, w] : taps) {
    if (w == 0) continue;
    const double d = f.values[size_t(r) * f.width + size_t(c)];
    if (!(std::isfinite(d) && d > 0)) return std::nullopt;
    sum += static_cast<long double>(w) * d;
  }
  return double(sum);
}

// Segment statistics the long way: flatten every sample into rows, keep the
// valid ones of the entity inside the segment, group by point, then average.
inline std::optional<MotionAttributes> SegmentMotion(
    const std::vector<Trajectory3D>& trajectories, const std::string& label,
    size_t segment_index, FrameRange segment, const SegmentPresence& presence) {
  if (!presence.present || !presence.best_bbox) return std::nullopt;
  struct Row {
    uint32_t point_id;
    uint32_t frame;
    Point3 p;
  };
  std::vector<Row> rows;
  for (const Trajectory3D& t : trajectories) {
    for (const TrajectorySample& s : t.samples) {
      rows.push_back({t.point_id, s.frame_index, s.position});
      if (t.entity_label != label || !s.valid ||
          !segment.Contains(s.frame_index)) {
        rows.pop_back();
      }
    }
  }
  std::map<uint32_t, std::vector<Row>> groups;
  for (const Row& r : rows) groups[r.point_id].push_back(r);
  long double f[3] = {0, 0, 0}, l[3] = {0, 0, 0}, m[3] = {0, 0, 0};
  size_t n = 0;
  for (auto& [id, g] : groups) {
    if (g.size() < 2) continue;
    auto [lo, hi] = std::minmax_element(
        g.begin(), g.end(),
        [](const Row& a, const Row& b) { return a.frame < b.frame; });
    const double first[3] = {lo->p.x, lo->p.y, lo->p.z};
    const double last[3] = {hi->p.x, hi->p.y, hi->p.z};
    for (int k = 0; k < 3; ++k) {
      f[k] += first[k];
      l[k] += last[k];
      m[k] += static_cast<long double>(last[k]) - first[k];
    }
    ++n;
  }
  if (n == 0) return std::nullopt;
  MotionAttributes out;
  out.entity_label = label;
  out.segment_index = segment_index;
  out.first_position = {double(f[0] / n), double(f[1] / n), double(f[2] / n)};
  out.last_position = {double(l[0] / n), double(l[1] / n), double(l[2] / n)};
  out.motion_vector = {double(m[0] / n), double(m[1] / n), double(m[2] / n)};
  out.bbox = *presence.best_bbox;
  out.first_frame = segment.start;
  out.last_frame = segment.end;
  out.contributing_points = n;
  return out;
}

// ---------------------------------------------------------------------------
// Temporal

// True iff the plan covers [0, frame_count - 1] with contiguous, non-empty,
// non-overlapping ranges.
inline bool IsExactPartition(const SegmentPlan& plan, uint32_t frame_count) {
  std::vector<int> hits(frame_count, 0);
  for (const FrameRange& r : plan.segments) {
    if (r.start > r.end || r.end >= frame_count) return false;
    for (uint32_t f = r.start; f <= r.end; ++f) ++hits[f];
  }
  for (size_t i = 1; i < plan.segments.size(); ++i) {
    if (plan.segments[i].start != plan.segments[i - 1].end + 1) return false;
  }
  return std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; });
}

// Scan every adjacent pair; skip the boundary exemptions.
inline std::vector<std::pair<ArtifactKind, size_t>> Artifacts(
    const std::vector<bool>& present) {
  std::vector<std::pair<ArtifactKind, size_t>> out;
  for (size_t i = 1; i < present.size(); ++i) {
    if (!present[i - 1] && present[i]) {
      out.push_back({ArtifactKind::kSuddenAppearance, i});
    }
    if (present[i - 1] && !present[i] && i + 1 != present.size()) {
      out.push_back({ArtifactKind::kSuddenDisappearance, i});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rewards

// Longest common subsequence by enumerating every subsequence of `a`.
// Exponential; keep |a| small.
template <typename T>
size_t BruteForceLcs(const std::vector<T>& a, const std::vector<T>& b) {
  size_t best = 0;
  for (uint32_t mask = 0; mask < (1u << a.size()); ++mask) {
    const size_t bits = std::popcount(mask);
    if (bits <= best) continue;
    size_t j = 0;
    bool ok = true;
    for (size_t i = 0; i < a.size() && ok; ++i) {
      if (!(mask >> i & 1)) continue;
      while (j < b.size() && b[j] != a[i]) ++j;
      if (j == b.size()) ok = false;
      ++j;
    }
    if (ok) best = bits;
  }
  return best;
}

// Full (|a|+1) x (|b|+1) table.
template <typename T>
size_t TableLcs(const std::vector<T>& a, const std::vector<T>& b) {
  std::vector<std::vector<size_t>> t(a.size() + 1,
                                     std::vector<size_t>(b.size() + 1, 0));
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1
                                     : std::max(t[i - 1][j], t[i][j - 1]);
    }
  }
  return t[a.size()][b.size()];
}

inline double LcsF1(size_t lcs, size_t cand, size_t ref) {
  if (lcs == 0 || cand == 0 || ref == 0) return 0.0;
  return 2.0 * double(lcs) / double(cand + ref);
}

// Reference grammar for the format reward.
inline bool MatchesFormatGrammar(const std::string& text) {
  static const std::regex kGrammar(
      R"(^\s*<think>((?:(?!</?think>|</?answer>)[\s\S])*)</think>)"
      R"(\s*<answer>((?:(?!</?think>|</?answer>)[\s\S])*)</answer>\s*$)");
  static const std::regex kNonBlank(R"(\S)");
  std::smatch m;
  if (!std::regex_match(text, m, kGrammar)) return false;
  const std::string think = m[1].str(), answer = m[2].str();
  return std::regex_search(think, kNonBlank) &&
         std::regex_search(answer, kNonBlank);
}

// 200 format-reward probes: hand-written adversarial cases first, then
// seeded random splices of tags, text and whitespace.
inline std::vector<std::string> FormatCorpus() {
  std::vector<std::string> corpus = {
      "<think>x</think><answer>y</answer>",
      "<think>x</think>\n<answer>y</answer>\n",
      "  \n<think> reasoning </think> \t <answer> 42 </answer>  ",
      "<answer>y</answer>",
      "<think>x</think>",
      "<think>a</think><answer>b</answer><answer>c</answer>",
      "<think>a</think><think>b</think><answer>c</answer>",
      "<answer>b</answer><think>a</think>",
      "<think><think>a</think></think><answer>b</answer>",
      "<think>a<answer>b</answer></think>",
      "<think>a</think><answer><answer>b</answer></answer>",
      "<think></think><answer>b</answer>",
      "<think>a</think><answer></answer>",
      "<think>  \n</think><answer>b</answer>",
      "<think>a</think><answer> \t</answer>",
      "text<think>a</think><answer>b</answer>",
      "<think>a</think>text<answer>b</answer>",
      "<think>a</think><answer>b</answer>text",
      "<THINK>a</THINK><ANSWER>b</ANSWER>",
      "<think>a</think><answer>b",
      "<think>a<answer>b</answer>",
      "<think>a</think><answer>b</think>",
      "<think>a</answer><answer>b</answer>",
      "<think>a <b>bold</b></think><answer>c</answer>",
      "<think>1 < 2 and 3 > 2</think><answer>yes</answer>",
      "<think>a</think >< answer>b</answer>",
      "<think>a</think><answer>b</answer></answer>",
      "</think><think>a</think><answer>b</answer>",
      "<think>a</think></think><answer>b</answer>",
      "<think>let me think</think>\r\n<answer>left</answer>\r\n",
      "<think>a</think><answer>b</answer><think>c</think>",
      "<thinking>a</thinking><answer>b</answer>",
      "<think>a</think><answers>b</answers>",
      "<think>a</think><answer>b</answer>\v\f",
      "",
      "   ",
      "<think>\xc3\xa9</think><answer>\xe2\x9c\x93</answer>",
      "<think>a</think>\xc2\xa0<answer>b</answer>",
      "<think>x</think><answer>y</answer><",
      "><think>x</think><answer>y</answer>",
  };
  const std::vector<std::string> pieces = {
      "<think>", "</think>", "<answer>", "</answer>", " ",  "\n",
      "x",       "yes",      "<think",   "answer>",   "<",  ">",
      "\t",      "</",       "<ANSWER>", "z z"};
  std::mt19937 rng(20260101);
  // Half the random cases start from a valid skeleton and mutate it.
  while (corpus.size() < 200) {
    std::string s;
    if (rng() % 2 == 0) {
      std::vector<std::string> parts = {"<think>", "a", "</think>", " ",
                                        "<answer>", "b", "</answer>"};
      const int edits = 1 + int(rng() % 3);
      for (int e = 0; e < edits; ++e) {
        const size_t at = rng() % (parts.size() + 1);
        switch (rng() % 3) {
          case 0:
            parts.insert(parts.begin() + at, pieces[rng() % pieces.size()]);
            break;
          case 1:
            if (!parts.empty()) parts.erase(parts.begin() + at % parts.size());
            break;
          default:
            if (parts.size() > 1) {
              std::swap(parts[at % parts.size()],
                        parts[(at + 1) % parts.size()]);
            }
        }
      }
      for (const auto& p : parts) s += p;
    } else {
      const int n = 1 + int(rng() % 9);
      for (int i = 0; i < n; ++i) s += pieces[rng() % pieces.size()];
    }
    corpus.push_back(s);
  }
  return corpus;
}

// Advantages straight from the formula, in extended precision.
inline std::vector<double> Advantages(const std::vector<double>& r,
                                      double eps) {
  long double mean = 0;
  for (double x : r) mean += x;
  mean /= r.size();
  long double var = 0;
  for (double x : r) var += (x - mean) * (x - mean);
  const long double sd = std::sqrt(var / r.size());
  std::vector<double> out;
  for (double x : r) out.push_back(sd == 0 ? 0.0 : double((x - mean) / (sd + eps)));
  return out;
}

}  // namespace motiontrace::oracle

#endif  // MOTIONTRACE_TESTS_ORACLES_H_
