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

// LLM-as-judge evaluation: judge prompt rendering, verdict parsing, and
// per-category accuracy aggregation. Calling the judge model is left to the
// caller.

#ifndef MOTIONTRACE_EVAL_H_
#define MOTIONTRACE_EVAL_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "motiontrace/interchange.h"
#include "nlohmann/json_fwd.hpp"

namespace motiontrace {

struct JudgeRequest {
  std::string question;
  std::string ground_truth;
  std::string answer;
};

enum class Verdict { kCorrect, kIncorrect, kUnclear };

// "Correct", "Incorrect" or "Unclear".
std::string_view VerdictName(Verdict verdict);

// Fails if any field is blank.
absl::StatusOr<std::string> RenderJudgePrompt(const JudgeRequest& request);

// Looks for <Eval> X </Eval> tags (case-insensitive, any inner whitespace)
// with X one of correct/incorrect/unclear. No tag, or tags that disagree,
// yield kUnclear.
Verdict ParseVerdict(std::string_view judge_output);

// The last <answer>...</answer> body of a model output, or the whole output
// (trimmed) when it has none.
std::string ExtractAnswerText(std::string_view model_output);

// Percentages are kept as exact hundredths of a percent, rounded half to even.
struct Percent {
  int64_t hundredths = 0;
  // False when the denominator was zero; the value then reads 0.00.
  bool defined = false;

  double value() const { return hundredths / 100.0; }
  std::string ToString() const;

  friend bool operator==(const Percent&, const Percent&) = default;
};

// 100 * part / whole.
Percent PercentOf(uint64_t part, uint64_t whole);

enum class UnclearPolicy {
  // Unclear verdicts stay in the denominator (default).
  kCountAsIncorrect,
  // Unclear verdicts are dropped from the denominator.
  kExcludeFromTotal,
};

std::string_view UnclearPolicyName(UnclearPolicy policy);

struct VerdictCounts {
  uint64_t n = 0;
  uint64_t correct = 0;
  uint64_t incorrect = 0;
  uint64_t unclear = 0;

  void Add(Verdict verdict);
  VerdictCounts& operator+=(const VerdictCounts& other);
  friend bool operator==(const VerdictCounts&, const VerdictCounts&) = default;
};

Percent Accuracy(const VerdictCounts& counts, UnclearPolicy policy);
Percent UnclearRate(const VerdictCounts& counts);

struct JudgedRecord {
  Category category = Category::kSU;
  Verdict verdict = Verdict::kUnclear;
};

// Counts per category in kAllCategories order. Merging two reports equals
// aggregating the concatenated inputs.
struct CategoryReport {
  std::array<VerdictCounts, 5> categories{};

  const VerdictCounts& at(Category c) const {
    return categories[static_cast<size_t>(c)];
  }
  VerdictCounts Overall() const;
  CategoryReport& Merge(const CategoryReport& other);
  friend bool operator==(const CategoryReport&,
                         const CategoryReport&) = default;
};

CategoryReport Aggregate(std::span<const JudgedRecord> records);

nlohmann::ordered_json CategoryReportToJson(const CategoryReport& report,
                                            UnclearPolicy policy);

struct StatsRow {
  std::string label;
  uint64_t count = 0;
  Percent percent;
};

// Composition of a QA set. Every percentage uses `total` as its base.
struct DatasetStats {
  uint64_t total = 0;
  std::vector<StatsRow> categories;      // SU, TU, MAR, PC, PA
  std::vector<StatsRow> question_types;  // factual, critical
  std::vector<StatsRow> polarities;      // positive, negative
};

DatasetStats ComputeDatasetStats(std::span<const QARecord> records);
std::string RenderStatsTable(const DatasetStats& stats);
nlohmann::ordered_json DatasetStatsToJson(const DatasetStats& stats);

// Markdown table with rows SU, TU, MAR, PC, PA, Overall.
std::string RenderReportMarkdown(const CategoryReport& report,
                                 UnclearPolicy policy);

}  // namespace motiontrace

#endif  // MOTIONTRACE_EVAL_H_
