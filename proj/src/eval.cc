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

#include "motiontrace/eval.h"

#include <optional>
#include <regex>

#include "absl/strings/ascii.h"
#include "absl_compat.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "nlohmann/json.hpp"

namespace motiontrace {
namespace {

constexpr std::string_view kJudgeTemplateHead =
    "You are an intelligent teacher whose task is to evaluate the correctness "
    "of a model's answer to a question, given a reference ground-truth "
    "answer.\n"
    "\n"
    "Inputs:\n"
    "- Question: wrapped in <Question> ... </Question>\n"
    "- Ground-truth answer: wrapped in <GT> ... </GT>\n"
    "- Model prediction: wrapped in <Answer> ... </Answer>\n"
    "\n"
    "Evaluation Criteria:\n"
    "- If the prediction does not conflict with the ground truth, output "
    "<Eval> Correct </Eval>.\n"
    "- If the prediction conflicts with the ground truth, output "
    "<Eval> Incorrect </Eval>.\n"
    "- If the correctness of the prediction is unclear, output "
    "<Eval> Unclear </Eval>.\n"
    "- Reason carefully about the relationship between the prediction and "
    "the ground truth, but keep the final evaluation very brief.\n"
    "\n"
    "Output Format:\n"
    "Produce only one of the following tokens as the final output:\n"
    "  <Eval> Correct </Eval>\n"
    "  <Eval> Incorrect </Eval>\n"
    "  <Eval> Unclear </Eval>\n";

std::string_view Trim(std::string_view s) {
  return Sv(absl::StripAsciiWhitespace(Sv(s)));
}

std::string PercentField(const Percent& p) { return p.ToString(); }

nlohmann::ordered_json CountsToJson(const VerdictCounts& c,
                                    UnclearPolicy policy) {
  nlohmann::ordered_json j;
  j["n"] = c.n;
  j["correct"] = c.correct;
  j["incorrect"] = c.incorrect;
  j["unclear"] = c.unclear;
  const Percent acc = Accuracy(c, policy);
  j["accuracy"] = PercentField(acc);
  j["unclear_rate"] = PercentField(UnclearRate(c));
  j["defined"] = acc.defined;
  return j;
}

nlohmann::ordered_json RowsToJson(const std::vector<StatsRow>& rows) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const StatsRow& row : rows) {
    nlohmann::ordered_json j;
    j["label"] = row.label;
    j["count"] = row.count;
    j["percent"] = row.percent.ToString();
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace

std::string_view VerdictName(Verdict verdict) {
  switch (verdict) {
    case Verdict::kCorrect:
      return "Correct";
    case Verdict::kIncorrect:
      return "Incorrect";
    case Verdict::kUnclear:
      return "Unclear";
  }
  return "Unclear";
}

absl::StatusOr<std::string> RenderJudgePrompt(const JudgeRequest& request) {
  if (Trim(request.question).empty()) {
    return absl::InvalidArgumentError("judge request: empty question");
  }
  if (Trim(request.ground_truth).empty()) {
    return absl::InvalidArgumentError("judge request: empty ground truth");
  }
  if (Trim(request.answer).empty()) {
    return absl::InvalidArgumentError("judge request: empty answer");
  }
  return absl::StrCat(Sv(kJudgeTemplateHead), "\n<Question> ",
                      Sv(Trim(request.question)), " </Question>\n<GT> ",
                      Sv(Trim(request.ground_truth)), " </GT>\n<Answer> ",
                      Sv(Trim(request.answer)), " </Answer>\n");
}

Verdict ParseVerdict(std::string_view judge_output) {
  static const std::regex* const kTag = new std::regex(
      R"(<\s*eval\s*>\s*(correct|incorrect|unclear)\s*<\s*/\s*eval\s*>)",
      std::regex::icase | std::regex::ECMAScript);
  std::optional<Verdict> found;
  const std::string text(judge_output);
  for (auto it = std::sregex_iterator(text.begin(), text.end(), *kTag);
       it != std::sregex_iterator(); ++it) {
    const std::string word = absl::AsciiStrToLower((*it)[1].str());
    const Verdict v = word == "correct"     ? Verdict::kCorrect
                      : word == "incorrect" ? Verdict::kIncorrect
                                            : Verdict::kUnclear;
    if (found && *found != v) return Verdict::kUnclear;
    found = v;
  }
  return found.value_or(Verdict::kUnclear);
}

std::string ExtractAnswerText(std::string_view model_output) {
  constexpr std::string_view kOpen = "<answer>";
  constexpr std::string_view kClose = "</answer>";
  const size_t close = model_output.rfind(kClose);
  if (close != std::string_view::npos) {
    const size_t open = model_output.rfind(kOpen, close);
    if (open != std::string_view::npos) {
      const size_t begin = open + kOpen.size();
      return std::string(Trim(model_output.substr(begin, close - begin)));
    }
  }
  return std::string(Trim(model_output));
}

std::string Percent::ToString() const {
  const int64_t whole = hundredths / 100;
  const int64_t frac = hundredths % 100;
  return absl::StrFormat("%d.%02d", whole, frac);
}

Percent PercentOf(uint64_t part, uint64_t whole) {
  if (whole == 0) return Percent{0, false};
  // 10000 * part / whole, rounded half to even, in integers.
  const unsigned __int128 scaled = static_cast<unsigned __int128>(part) * 10000;
  uint64_t q = static_cast<uint64_t>(scaled / whole);
  const uint64_t r = static_cast<uint64_t>(scaled % whole);
  const unsigned __int128 twice = static_cast<unsigned __int128>(r) * 2;
  if (twice > whole || (twice == whole && (q & 1) == 1)) ++q;
  return Percent{static_cast<int64_t>(q), true};
}

std::string_view UnclearPolicyName(UnclearPolicy policy) {
  return policy == UnclearPolicy::kCountAsIncorrect ? "count_as_incorrect"
                                                    : "exclude_from_total";
}

void VerdictCounts::Add(Verdict verdict) {
  ++n;
  switch (verdict) {
    case Verdict::kCorrect:
      ++correct;
      break;
    case Verdict::kIncorrect:
      ++incorrect;
      break;
    case Verdict::kUnclear:
      ++unclear;
      break;
  }
}

VerdictCounts& VerdictCounts::operator+=(const VerdictCounts& other) {
  n += other.n;
  correct += other.correct;
  incorrect += other.incorrect;
  unclear += other.unclear;
  return *this;
}

Percent Accuracy(const VerdictCounts& counts, UnclearPolicy policy) {
  const uint64_t base = policy == UnclearPolicy::kCountAsIncorrect
                            ? counts.n
                            : counts.n - counts.unclear;
  return PercentOf(counts.correct, base);
}

Percent UnclearRate(const VerdictCounts& counts) {
  return PercentOf(counts.unclear, counts.n);
}

VerdictCounts CategoryReport::Overall() const {
  VerdictCounts total;
  for (const VerdictCounts& c : categories) total += c;
  return total;
}

CategoryReport& CategoryReport::Merge(const CategoryReport& other) {
  for (size_t i = 0; i < categories.size(); ++i) {
    categories[i] += other.categories[i];
  }
  return *this;
}

CategoryReport Aggregate(std::span<const JudgedRecord> records) {
  CategoryReport report;
  for (const JudgedRecord& r : records) {
    report.categories[static_cast<size_t>(r.category)].Add(r.verdict);
  }
  return report;
}

nlohmann::ordered_json CategoryReportToJson(const CategoryReport& report,
                                            UnclearPolicy policy) {
  nlohmann::ordered_json j;
  j["unclear_policy"] = UnclearPolicyName(policy);
  nlohmann::ordered_json rows;
  for (Category c : kAllCategories) {
    rows[std::string(CategoryCode(c))] = CountsToJson(report.at(c), policy);
  }
  rows["Overall"] = CountsToJson(report.Overall(), policy);
  j["categories"] = std::move(rows);
  return j;
}

std::string RenderReportMarkdown(const CategoryReport& report,
                                 UnclearPolicy policy) {
  std::string out = absl::StrCat(
      "# Accuracy by category\n\nUnclear verdicts: ",
      Sv(UnclearPolicyName(policy)),
      "\n\n| Category | n | Correct | Incorrect | Unclear | Accuracy (%) | "
      "Unclear (%) |\n|---|---:|---:|---:|---:|---:|---:|\n");
  auto row = [&](std::string_view name, const VerdictCounts& c) {
    absl::StrAppend(&out, "| ", Sv(name), " | ", c.n, " | ", c.correct, " | ",
                    c.incorrect, " | ", c.unclear, " | ",
                    Accuracy(c, policy).ToString(), " | ",
                    UnclearRate(c).ToString(), " |\n");
  };
  for (Category c : kAllCategories) row(CategoryCode(c), report.at(c));
  row("Overall", report.Overall());
  return out;
}

DatasetStats ComputeDatasetStats(std::span<const QARecord> records) {
  DatasetStats stats;
  stats.total = records.size();
  std::array<uint64_t, 5> by_category{};
  uint64_t factual = 0;
  uint64_t positive = 0;
  for (const QARecord& r : records) {
    ++by_category[static_cast<size_t>(r.category)];
    if (r.question_type == QuestionType::kFactual) ++factual;
    if (r.polarity == Polarity::kPositive) ++positive;
  }
  auto make = [&](std::string label, uint64_t count) {
    return StatsRow{std::move(label), count, PercentOf(count, stats.total)};
  };
  for (Category c : kAllCategories) {
    stats.categories.push_back(
        make(std::string(CategoryCode(c)),
             by_category[static_cast<size_t>(c)]));
  }
  stats.question_types.push_back(make("factual", factual));
  stats.question_types.push_back(make("critical", stats.total - factual));
  stats.polarities.push_back(make("positive", positive));
  stats.polarities.push_back(make("negative", stats.total - positive));
  return stats;
}

std::string RenderStatsTable(const DatasetStats& stats) {
  std::string out = absl::StrFormat(
      "records: %d\npercent base: %d records%s\n", stats.total, stats.total,
      stats.total == 0 ? " (n=0, percentages undefined, shown as 0.00)" : "");
  auto section = [&](std::string_view title,
                     const std::vector<StatsRow>& rows) {
    absl::StrAppend(&out, "\n", Sv(title), "\n");
    for (const StatsRow& row : rows) {
      absl::StrAppend(&out, absl::StrFormat("  %-10s %8d %7s%%\n", row.label,
                                            row.count,
                                            row.percent.ToString()));
    }
  };
  section("category", stats.categories);
  section("question_type", stats.question_types);
  section("polarity", stats.polarities);
  return out;
}

nlohmann::ordered_json DatasetStatsToJson(const DatasetStats& stats) {
  nlohmann::ordered_json j;
  j["total"] = stats.total;
  j["percent_base"] = stats.total;
  j["percent_defined"] = stats.total > 0;
  j["category"] = RowsToJson(stats.categories);
  j["question_type"] = RowsToJson(stats.question_types);
  j["polarity"] = RowsToJson(stats.polarities);
  return j;
}

}  // namespace motiontrace
