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
#include <cstring>
#include <random>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace motiontrace {
namespace {

using ::testing::HasSubstr;
using ::testing::SizeIs;

}  // namespace

void PrintTo(const Violation& v, std::ostream* os) {
  *os << v.subject << ": " << v.message;
}

namespace {

std::string Le32(uint32_t v) {
  std::string out(4, '\0');
  for (int i = 0; i < 4; ++i) out[i] = static_cast<char>(v >> (8 * i));
  return out;
}

std::string LeFloat(float f) { return Le32(std::bit_cast<uint32_t>(f)); }

std::string DepthBytes(uint32_t w, uint32_t h, uint32_t index,
                       const std::vector<float>& values) {
  std::string out = "MGD1" + Le32(w) + Le32(h) + Le32(index);
  for (float v : values) out += LeFloat(v);
  return out;
}

std::string VideoJson(const std::string& id, int frames, double fps) {
  return "{\"video_id\": \"" + id +
         "\", \"width\": 640, \"height\": 360, \"fps\": " +
         std::to_string(fps) + ", \"frame_count\": " + std::to_string(frames) +
         ", \"detections\": \"" + id + "/d.jsonl\", \"tracks\": \"" + id +
         "/t.json\", \"depth_dir\": \"" + id + "/depth\"}";
}

// --- manifest --------------------------------------------------------------

TEST(ManifestTest, OneVideoCopiesFields) {
  auto videos = ParseManifestJson(
      "{\"videos\": [" + VideoJson("v0", 240, 30.0) + "]}", "/data");
  ASSERT_TRUE(videos.ok()) << videos.status();
  ASSERT_THAT(*videos, SizeIs(1));
  EXPECT_EQ((*videos)[0].meta.frame_count, 240u);
  EXPECT_EQ((*videos)[0].meta.fps, 30.0);
  EXPECT_EQ((*videos)[0].detections_path,
            std::filesystem::path("/data/v0/d.jsonl"));
  EXPECT_EQ((*videos)[0].depth_dir, std::filesystem::path("/data/v0/depth"));
}

TEST(ManifestTest, ZeroFpsNamesTheField) {
  auto videos =
      ParseManifestJson("{\"videos\": [" + VideoJson("v0", 240, 0.0) + "]}");
  ASSERT_FALSE(videos.ok());
  EXPECT_EQ(videos.status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_THAT(std::string(videos.status().message()), HasSubstr("fps"));
  EXPECT_THAT(std::string(videos.status().message()), HasSubstr("videos[0]"));
}

TEST(ManifestTest, MetadataMeansSurviveParsing) {
  // Five clips whose frame counts and rates average 545.8 and 27.37.
  const int frames[] = {300, 420, 545, 700, 764};
  const double fps[] = {24.0, 25.0, 29.97, 30.0, 27.88};
  std::string json = "{\"videos\": [";
  for (int i = 0; i < 5; ++i) {
    if (i) json += ",";
    json += VideoJson("v" + std::to_string(i), frames[i], fps[i]);
  }
  auto videos = ParseManifestJson(json + "]}");
  ASSERT_TRUE(videos.ok()) << videos.status();
  double frame_sum = 0, fps_sum = 0;
  for (const VideoEntry& v : *videos) {
    frame_sum += v.meta.frame_count;
    fps_sum += v.meta.fps;
  }
  EXPECT_NEAR(frame_sum / 5, 545.8, 0.1);
  EXPECT_NEAR(fps_sum / 5, 27.37, 0.1);
}

TEST(ManifestTest, Errors) {
  EXPECT_EQ(ParseManifest("/nonexistent/dataset.json").status().code(),
            absl::StatusCode::kNotFound);
  EXPECT_THAT(std::string(ParseManifestJson("{\"videos\": [").status().message()),
              HasSubstr("malformed JSON"));
  auto missing = ParseManifestJson("{\"videos\": [{\"video_id\": \"a\"}]}");
  EXPECT_THAT(std::string(missing.status().message()),
              HasSubstr("videos[0].width"));
  auto dup = ParseManifestJson("{\"videos\": [" + VideoJson("a", 10, 5) + "," +
                               VideoJson("a", 10, 5) + "]}");
  EXPECT_THAT(std::string(dup.status().message()), HasSubstr("duplicate"));
}

TEST(ManifestTest, EncodeParseRoundTrip) {
  auto videos = ParseManifestJson("{\"videos\": [" + VideoJson("a", 12, 7.5) +
                                  "," + VideoJson("b", 99, 29.97) + "]}");
  ASSERT_TRUE(videos.ok());
  auto again = ParseManifestJson(EncodeManifestJson(*videos));
  ASSERT_TRUE(again.ok()) << again.status();
  EXPECT_EQ(*again, *videos);
}

// --- depth -----------------------------------------------------------------

TEST(DepthTest, DecodesRowMajor) {
  auto frame = ParseDepthFrame(DepthBytes(2, 2, 0, {1, 2, 3, 4}));
  ASSERT_TRUE(frame.ok()) << frame.status();
  EXPECT_EQ(frame->width, 2u);
  EXPECT_EQ(frame->height, 2u);
  EXPECT_EQ(frame->At(0, 0), 1.0f);
  EXPECT_EQ(frame->At(1, 0), 2.0f);
  EXPECT_EQ(frame->At(0, 1), 3.0f);
  EXPECT_EQ(frame->At(1, 1), 4.0f);
}

TEST(DepthTest, TruncatedPayload) {
  auto frame = ParseDepthFrame(DepthBytes(2, 2, 0, {1, 2, 3}));
  ASSERT_FALSE(frame.ok());
  EXPECT_THAT(std::string(frame.status().message()), HasSubstr("truncated"));
}

TEST(DepthTest, RejectsMalformedBuffers) {
  EXPECT_THAT(std::string(ParseDepthFrame("MGD2" + DepthBytes(1, 1, 0, {1}).substr(4))
                              .status()
                              .message()),
              HasSubstr("magic"));
  EXPECT_FALSE(ParseDepthFrame("MGD1").ok());
  EXPECT_FALSE(ParseDepthFrame(DepthBytes(0, 2, 0, {})).ok());
  EXPECT_FALSE(ParseDepthFrame(DepthBytes(1, 1, 0, {1, 2})).ok());
}

TEST(DepthTest, EncodeParseIsByteIdentity) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const uint32_t w = 1 + rng() % 16, h = 1 + rng() % 16;
    std::string bytes = "MGD1" + Le32(w) + Le32(h) + Le32(rng());
    for (uint32_t i = 0; i < w * h; ++i) bytes += Le32(rng());  // any bits
    auto frame = ParseDepthFrame(bytes);
    ASSERT_TRUE(frame.ok()) << frame.status();
    ASSERT_EQ(EncodeDepthFrame(*frame), bytes) << "trial " << trial;
  }
}

TEST(DepthTest, HolesAreRepresentable) {
  EXPECT_FALSE(DepthFrame::IsValidDepth(0.0));
  EXPECT_FALSE(DepthFrame::IsValidDepth(-1.0));
  EXPECT_FALSE(DepthFrame::IsValidDepth(std::nan("")));
  EXPECT_FALSE(DepthFrame::IsValidDepth(INFINITY));
  EXPECT_TRUE(DepthFrame::IsValidDepth(1e-6));
}

TEST(DepthTest, LoadDepthFramesLeavesGapsForMissingFiles) {
  const auto dir = testing::ScratchDir();
  testing::Spit(dir / DepthFrameFileName(0), DepthBytes(1, 1, 0, {1}));
  testing::Spit(dir / DepthFrameFileName(2), DepthBytes(1, 1, 2, {3}));
  auto frames = LoadDepthFrames(dir, 3);
  ASSERT_TRUE(frames.ok()) << frames.status();
  ASSERT_THAT(*frames, SizeIs(3));
  EXPECT_TRUE((*frames)[0].has_value());
  EXPECT_FALSE((*frames)[1].has_value());
  EXPECT_EQ((*frames)[2]->values[0], 3.0f);
  EXPECT_EQ(DepthFrameFileName(42), "depth_000042.bin");

  testing::Spit(dir / DepthFrameFileName(1), "MGD1");
  EXPECT_FALSE(LoadDepthFrames(dir, 3).ok());
  EXPECT_EQ(LoadDepthFrames(dir / "nope", 3).status().code(),
            absl::StatusCode::kNotFound);
}

// --- detections and tracks -------------------------------------------------

TEST(DetectionsTest, RandomRoundTrip) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> coord(0, 640);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Detection> dets;
    for (int i = 0; i < 20; ++i) {
      const double x = coord(rng), y = coord(rng);
      dets.push_back({uint32_t(rng() % 500), "e" + std::to_string(rng() % 4),
                      {x, y, x + 1 + coord(rng), y + 1 + coord(rng)},
                      std::uniform_real_distribution<double>(0, 1)(rng)});
    }
    auto back = ParseDetectionsJsonl(EncodeDetectionsJsonl(dets));
    ASSERT_TRUE(back.ok()) << back.status();
    ASSERT_EQ(*back, dets);
  }
}

TEST(DetectionsTest, ErrorsCarryLineNumbers) {
  const std::string text =
      "{\"frame\": 0, \"entity\": \"a\", \"bbox\": [0,0,1,1], \"score\": 1}\n"
      "\n"
      "{\"frame\": 1, \"entity\": \"a\", \"bbox\": [0,0,1], \"score\": 1}\n";
  auto dets = ParseDetectionsJsonl(text);
  ASSERT_FALSE(dets.ok());
  EXPECT_THAT(std::string(dets.status().message()), HasSubstr("line 3"));
}

TEST(TracksTest, RoundTripAndPointIds) {
  auto tracks = ParseTracksJson(
      R"([{"entity_label": "ball", "points": [[[1, 2, 1], [3, 4, 0]],
                                               [[5, 6, true], [7, 8, false]]]},
          {"entity_label": "cup", "points": [[[0.5, 0.25, 1], [0, 0, 1]]]}])");
  ASSERT_TRUE(tracks.ok()) << tracks.status();
  ASSERT_THAT(*tracks, SizeIs(3));
  EXPECT_EQ((*tracks)[1].entity_label, "ball");
  EXPECT_EQ((*tracks)[1].point_id, 1u);
  EXPECT_EQ((*tracks)[1].samples[0], (TrackSample{5, 6, true}));
  EXPECT_EQ((*tracks)[2].point_id, 0u);
  auto again = ParseTracksJson(EncodeTracksJson(*tracks));
  ASSERT_TRUE(again.ok());
  EXPECT_EQ(*again, *tracks);
  EXPECT_FALSE(ParseTracksJson(R"([{"entity_label": "x", "points": [[[1]]]}])")
                   .ok());
}

// --- QA --------------------------------------------------------------------

std::string QaLine(const std::string& id, const std::string& category,
                   const std::string& type = "factual",
                   const std::string& entities = "[\"ball\"]") {
  return "{\"id\": \"" + id +
         "\", \"video_id\": \"v\", \"question\": \"q\", \"ground_truth\": "
         "\"g\", \"question_type\": \"" +
         type + "\", \"category\": \"" + category +
         "\", \"polarity\": \"positive\", \"entities\": " + entities + "}\n";
}

TEST(QaTest, ParsesCategory) {
  auto qa = ParseQaJsonl(QaLine("q1", "SU"));
  ASSERT_TRUE(qa.ok()) << qa.status();
  EXPECT_EQ((*qa)[0].category, Category::kSU);
  EXPECT_EQ((*qa)[0].entities, std::vector<std::string>{"ball"});
}

TEST(QaTest, UnknownCategoryNamesLine) {
  auto qa = ParseQaJsonl(QaLine("q1", "SU") + QaLine("q2", "XX"));
  ASSERT_FALSE(qa.ok());
  const std::string msg(qa.status().message());
  EXPECT_THAT(msg, HasSubstr("line 2"));
  EXPECT_THAT(msg, HasSubstr("XX"));
}

TEST(QaTest, EntitiesRules) {
  EXPECT_FALSE(ParseQaJsonl(QaLine("q", "SU", "factual", "[]")).ok());
  EXPECT_TRUE(ParseQaJsonl(QaLine("q", "SU", "critical", "[]")).ok());
  EXPECT_FALSE(ParseQaJsonl(QaLine("q", "SU") + QaLine("q", "TU")).ok());
}

TEST(QaTest, BenchmarkSizedFileCounts) {
  const std::pair<const char*, int> counts[] = {
      {"SU", 2785}, {"TU", 1633}, {"MAR", 1205}, {"PC", 1304}, {"PA", 1432}};
  std::string text;
  int id = 0;
  for (const auto& [code, n] : counts) {
    for (int i = 0; i < n; ++i) text += QaLine("q" + std::to_string(id++), code);
  }
  auto qa = ParseQaJsonl(text);
  ASSERT_TRUE(qa.ok()) << qa.status();
  // The five reference category counts add up to 8359, two short of the
  // headline 8361; each record carries exactly one category.
  EXPECT_EQ(qa->size(), 8359u);
  std::map<Category, int> seen;
  for (const QARecord& r : *qa) ++seen[r.category];
  EXPECT_EQ(seen[Category::kSU], 2785);
  EXPECT_EQ(seen[Category::kTU], 1633);
  EXPECT_EQ(seen[Category::kPA], 1432);
  EXPECT_EQ(seen[Category::kPC], 1304);
  EXPECT_EQ(seen[Category::kMAR], 1205);
  auto again = ParseQaJsonl(EncodeQaJsonl(*qa));
  ASSERT_TRUE(again.ok());
  EXPECT_EQ(*again, *qa);
}

// --- bundle validation -----------------------------------------------------

struct Inputs {
  VideoMeta meta{"v", 32, 24, 10.0, 4};
  std::vector<Detection> detections{{0, "ball", {1, 1, 5, 5}, 0.9},
                                    {3, "cup", {10, 10, 20, 20}, 0.5}};
  std::vector<PointTrack> tracks{
      {"ball", 0, std::vector<TrackSample>(4, TrackSample{3, 3, true})},
      {"cup", 0, std::vector<TrackSample>(4, TrackSample{15, 15, false})}};
  std::vector<std::optional<DepthFrame>> depth;

  Inputs() {
    for (uint32_t f = 0; f < 4; ++f) {
      depth.push_back(DepthFrame{f, 32, 24, std::vector<float>(32 * 24, 2.0f)});
    }
  }
  BundleValidation Validate() const {
    return ValidateBundle(meta, detections, tracks, depth);
  }
};

TEST(ValidateBundleTest, ConsistentInputs) {
  const BundleValidation v = Inputs().Validate();
  ASSERT_TRUE(v.ok()) << v.Summary();
  EXPECT_EQ(v.bundle->entities(), (std::set<std::string>{"ball", "cup"}));
  EXPECT_THAT(v.bundle->depth_frames(), SizeIs(4));
}

TEST(ValidateBundleTest, ShortTrackNamesTrack) {
  Inputs in;
  in.tracks[1].samples.pop_back();
  const BundleValidation v = in.Validate();
  ASSERT_FALSE(v.ok());
  ASSERT_THAT(v.violations, SizeIs(1));
  EXPECT_EQ(v.violations[0].subject, "tracks[cup#0]");
}

TEST(ValidateBundleTest, WideBoxNamesFrameAndBox) {
  Inputs in;
  in.detections[1].bbox.x2 = 40;
  const BundleValidation v = in.Validate();
  ASSERT_FALSE(v.ok());
  EXPECT_THAT(v.violations[0].subject, HasSubstr("frame 3"));
  EXPECT_THAT(v.violations[0].message, HasSubstr("40"));
}

TEST(ValidateBundleTest, ReportsEveryViolation) {
  Inputs in;
  in.meta.fps = -1;
  in.detections[0].confidence = 2;
  in.tracks[0].samples[2] = {99, 3, true};
  in.depth[1]->width = 31;  // wrong dimensions and wrong grid size
  const BundleValidation v = in.Validate();
  std::set<std::string> subjects;
  for (const Violation& x : v.violations) subjects.insert(x.subject);
  EXPECT_THAT(v.violations, SizeIs(5)) << v.Summary();
  EXPECT_EQ(subjects, (std::set<std::string>{"meta.fps", "detections[0] (frame 0)",
                                             "tracks[ball#0]", "depth[1]"}));
}

TEST(ValidateBundleTest, EverySingleFieldMutationIsRejected) {
  using Mutation = std::function<void(Inputs&)>;
  const std::vector<std::pair<std::string, Mutation>> mutations = {
      {"empty video id", [](Inputs& in) { in.meta.video_id.clear(); }},
      {"zero width", [](Inputs& in) { in.meta.width = 0; }},
      {"zero height", [](Inputs& in) { in.meta.height = 0; }},
      {"zero fps", [](Inputs& in) { in.meta.fps = 0; }},
      {"nan fps", [](Inputs& in) { in.meta.fps = std::nan(""); }},
      {"zero frames", [](Inputs& in) { in.meta.frame_count = 0; }},
      {"frames shrink", [](Inputs& in) { in.meta.frame_count = 3; }},
      {"frames grow", [](Inputs& in) { in.meta.frame_count = 5; }},
      {"detection frame", [](Inputs& in) { in.detections[0].frame_index = 4; }},
      {"detection label", [](Inputs& in) { in.detections[0].entity_label = ""; }},
      {"bbox x1<0", [](Inputs& in) { in.detections[0].bbox.x1 = -1; }},
      {"bbox y2>h", [](Inputs& in) { in.detections[0].bbox.y2 = 25; }},
      {"bbox inverted", [](Inputs& in) { in.detections[0].bbox.x2 = 0.5; }},
      {"bbox empty", [](Inputs& in) { in.detections[0].bbox.y2 = 1; }},
      {"confidence<0", [](Inputs& in) { in.detections[0].confidence = -0.1; }},
      {"confidence nan",
       [](Inputs& in) { in.detections[0].confidence = std::nan(""); }},
      {"track label", [](Inputs& in) { in.tracks[0].entity_label = "ghost"; }},
      {"track dup id", [](Inputs& in) { in.tracks.push_back(in.tracks[0]); }},
      {"track long",
       [](Inputs& in) { in.tracks[0].samples.push_back({1, 1, false}); }},
      {"visible outside",
       [](Inputs& in) { in.tracks[0].samples[0] = {3, -0.5, true}; }},
      {"depth extra frame",
       [](Inputs& in) {
         in.depth.push_back(DepthFrame{4, 32, 24, std::vector<float>(768, 1)});
       }},
      {"depth index", [](Inputs& in) { in.depth[2]->frame_index = 3; }},
      {"depth height", [](Inputs& in) { in.depth[0]->height = 23; }},
      {"depth grid", [](Inputs& in) { in.depth[3]->values.pop_back(); }},
  };
  ASSERT_TRUE(Inputs().Validate().ok());
  for (const auto& [name, mutate] : mutations) {
    Inputs in;
    mutate(in);
    const BundleValidation v = in.Validate();
    EXPECT_FALSE(v.ok()) << name;
    EXPECT_FALSE(v.bundle.has_value()) << name;
  }
}

TEST(ValidateBundleTest, InvisibleSamplesMayLieOutside) {
  Inputs in;
  in.tracks[1].samples[0] = {-50, 900, false};
  in.depth[2].reset();
  EXPECT_TRUE(in.Validate().ok());
}

TEST(LoadBundleTest, Fixture) {
  auto videos = ParseManifest(testing::FixtureDir() / "dataset.json");
  ASSERT_TRUE(videos.ok()) << videos.status();
  for (const VideoEntry& v : *videos) {
    auto bundle = LoadBundle(v);
    ASSERT_TRUE(bundle.ok()) << bundle.status();
    EXPECT_TRUE(bundle->ok()) << bundle->Summary();
  }
  auto corrupt = ParseManifest(testing::FixtureDir() / "dataset_corrupt.json");
  ASSERT_TRUE(corrupt.ok());
  EXPECT_FALSE(LoadBundle((*corrupt)[1]).ok());
}

}  // namespace
}  // namespace motiontrace
