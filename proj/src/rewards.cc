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

#include "motiontrace/rewards.h"

#include <cmath>

#include "absl/strings/str_cat.h"

namespace motiontrace {
namespace {

constexpr std::string_view kThinkOpen = "<think>";
constexpr std::string_view kThinkClose = "</think>";
constexpr std::string_view kAnswerOpen = "<answer>";
constexpr std::string_view kAnswerClose = "</answer>";

bool IsAsciiSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

size_t SkipSpace(std::string_view text, size_t pos) {
  while (pos < text.size() && IsAsciiSpace(text[pos])) ++pos;
  return pos;
}

bool IsBlank(std::string_view text) {
  return SkipSpace(text, 0) == text.size();
}

// Position of the earliest think/answer tag at or after `pos`.
size_t NextTag(std::string_view text, size_t pos, std::string_view* which) {
  size_t best = std::string_view::npos;
  for (std::string_view tag : {kThinkOpen, kThinkClose, kAnswerOpen,
                               kAnswerClose}) {
    const size_t at = text.find(tag, pos);
    if (at < best) {
      best = at;
      *which = tag;
    }
  }
  return best;
}

// Decodes one UTF-8 code point starting at `pos`. Malformed bytes decode as
// themselves, one byte at a time.
char32_t DecodeUtf8(std::string_view s, size_t pos, size_t* length) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  auto continuation = [&](size_t i) {
    return pos + i < s.size() &&
           (static_cast<unsigned char>(s[pos + i]) & 0xC0) == 0x80;
  };
  auto cont = [&](size_t i) {
    return static_cast<char32_t>(static_cast<unsigned char>(s[pos + i]) &
                                 0x3F);
  };
  if (b0 < 0x80) {
    *length = 1;
    return b0;
  }
  if ((b0 & 0xE0) == 0xC0 && continuation(1)) {
    *length = 2;
    return (static_cast<char32_t>(b0 & 0x1F) << 6) | cont(1);
  }
  if ((b0 & 0xF0) == 0xE0 && continuation(1) && continuation(2)) {
    *length = 3;
    return (static_cast<char32_t>(b0 & 0x0F) << 12) | (cont(1) << 6) |
           cont(2);
  }
  if ((b0 & 0xF8) == 0xF0 && continuation(1) && continuation(2) &&
      continuation(3)) {
    *length = 4;
    return (static_cast<char32_t>(b0 & 0x07) << 18) | (cont(1) << 12) |
           (cont(2) << 6) | cont(3);
  }
  *length = 1;
  return 0xFFFD;
}

bool IsUnicodeSpace(char32_t c) {
  return (c >= 0x09 && c <= 0x0D) || (c >= 0x1C && c <= 0x20) || c == 0x85 ||
         c == 0xA0 || c == 0x1680 || (c >= 0x2000 && c <= 0x200A) ||
         c == 0x2028 || c == 0x2029 || c == 0x202F || c == 0x205F ||
         c == 0x3000;
}

bool IsPunctuation(char32_t c) {
  if (c < 0x80) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) ||
           (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E);
  }
  return c == 0xA1 || c == 0xA7 || c == 0xAB || c == 0xB6 || c == 0xB7 ||
         c == 0xBB || c == 0xBF || (c >= 0x2010 && c <= 0x2027) ||
         (c >= 0x2030 && c <= 0x205E) || (c >= 0x3001 && c <= 0x3003) ||
         (c >= 0x3008 && c <= 0x3011) || (c >= 0xFF01 && c <= 0xFF0F);
}

struct CodePoint {
  char32_t value;
  size_t offset;
  size_t length;
};

std::string_view StripPunctuation(std::string_view token) {
  std::vector<CodePoint> points;
  for (size_t pos = 0; pos < token.size();) {
    size_t len = 1;
    const char32_t c = DecodeUtf8(token, pos, &len);
    points.push_back({c, pos, len});
    pos += len;
  }
  size_t first = 0;
  size_t last = points.size();
  while (first < last && IsPunctuation(points[first].value)) ++first;
  while (last > first && IsPunctuation(points[last - 1].value)) --last;
  if (first == last) return {};
  const size_t begin = points[first].offset;
  const size_t end = points[last - 1].offset + points[last - 1].length;
  return token.substr(begin, end - begin);
}

double Mean(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / values.size();
}

}  // namespace

absl::Status ValidateRewardWeights(const RewardWeights& weights) {
  for (double w : {weights.w_correct, weights.w_format, weights.w_rouge,
                   weights.alpha_temporal}) {
    if (!(std::isfinite(w) && w >= 0.0)) {
      return absl::InvalidArgumentError(
          "reward weights must be finite and non-negative");
    }
  }
  if (!(std::isfinite(weights.epsilon) && weights.epsilon > 0.0)) {
    return absl::InvalidArgumentError("epsilon must be > 0");
  }
  return absl::OkStatus();
}

std::optional<std::string_view> WellFormedAnswer(std::string_view text) {
  std::string_view tag;
  size_t pos = SkipSpace(text, 0);
  if (text.substr(pos, kThinkOpen.size()) != kThinkOpen) return std::nullopt;
  pos += kThinkOpen.size();

  size_t close = NextTag(text, pos, &tag);
  if (close == std::string_view::npos || tag != kThinkClose) {
    return std::nullopt;
  }
  if (IsBlank(text.substr(pos, close - pos))) return std::nullopt;
  pos = SkipSpace(text, close + kThinkClose.size());

  if (text.substr(pos, kAnswerOpen.size()) != kAnswerOpen) return std::nullopt;
  pos += kAnswerOpen.size();
  close = NextTag(text, pos, &tag);
  if (close == std::string_view::npos || tag != kAnswerClose) {
    return std::nullopt;
  }
  const std::string_view answer = text.substr(pos, close - pos);
  if (IsBlank(answer)) return std::nullopt;
  if (SkipSpace(text, close + kAnswerClose.size()) != text.size()) {
    return std::nullopt;
  }
  return answer;
}

int FormatReward(std::string_view text) {
  return WellFormedAnswer(text).has_value() ? 1 : 0;
}

std::vector<std::string> RougeTokenize(std::string_view text) {
  std::vector<std::string> tokens;
  size_t start = std::string_view::npos;
  auto flush = [&](size_t end) {
    if (start == std::string_view::npos) return;
    std::string_view stripped =
        StripPunctuation(text.substr(start, end - start));
    if (!stripped.empty()) {
      std::string token(stripped);
      for (char& c : token) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      }
      tokens.push_back(std::move(token));
    }
    start = std::string_view::npos;
  };
  for (size_t pos = 0; pos < text.size();) {
    size_t len = 1;
    const char32_t c = DecodeUtf8(text, pos, &len);
    if (IsUnicodeSpace(c)) {
      flush(pos);
    } else if (start == std::string_view::npos) {
      start = pos;
    }
    pos += len;
  }
  flush(text.size());
  return tokens;
}

double RougeL(std::string_view candidate, std::string_view reference) {
  const std::vector<std::string> c = RougeTokenize(candidate);
  const std::vector<std::string> r = RougeTokenize(reference);
  return RougeLTokens<std::string>(c, r);
}

double TemporalBonus(double mean_correct_ordered, double mean_correct_shuffled,
                     double alpha) {
  return mean_correct_ordered > mean_correct_shuffled ? alpha : 0.0;
}

RewardBreakdown ScoreRollout(const Rollout& rollout,
                             const RewardWeights& weights,
                             std::string_view rouge_reference,
                             double temporal) {
  RewardBreakdown r;
  r.correctness = rollout.correctness;
  const std::optional<std::string_view> answer =
      WellFormedAnswer(rollout.text);
  r.format = answer.has_value() ? 1 : 0;
  r.rouge = RougeL(answer.value_or(rollout.text), rouge_reference);
  r.temporal = temporal;
  r.total = weights.w_correct * r.correctness + weights.w_format * r.format +
            weights.w_rouge * r.rouge + r.temporal;
  return r;
}

double TotalReward(const Rollout& rollout, const RewardWeights& weights,
                   std::string_view rouge_reference, double temporal) {
  return ScoreRollout(rollout, weights, rouge_reference, temporal).total;
}

absl::StatusOr<std::vector<double>> GroupAdvantages(
    std::span<const double> rewards, double epsilon) {
  if (rewards.empty()) {
    return absl::InvalidArgumentError("advantage group is empty");
  }
  for (double r : rewards) {
    if (!std::isfinite(r)) {
      return absl::InvalidArgumentError(
          absl::StrCat("non-finite reward ", r));
    }
  }
  // Everything is computed from differences to the first reward, so adding a
  // constant to the whole group (where that addition is itself exact) leaves
  // the result bit-identical.
  const double pivot = rewards.front();
  std::vector<double> centered(rewards.size());
  for (size_t i = 0; i < rewards.size(); ++i) {
    centered[i] = rewards[i] - pivot;
  }
  const double mean = Mean(centered);
  std::vector<double> deviation(rewards.size());
  double square_sum = 0.0;
  for (size_t i = 0; i < rewards.size(); ++i) {
    deviation[i] = centered[i] - mean;
    square_sum += deviation[i] * deviation[i];
  }
  const double stddev = std::sqrt(square_sum / rewards.size());

  std::vector<double> advantages(rewards.size(), 0.0);
  if (stddev == 0.0) return advantages;
  for (size_t i = 0; i < rewards.size(); ++i) {
    advantages[i] = deviation[i] / (stddev + epsilon);
  }
  return advantages;
}

absl::StatusOr<GroupScore> ScoreGroup(std::span<const Rollout> rollouts,
                                      const RewardWeights& weights,
                                      std::string_view rouge_reference) {
  if (absl::Status s = ValidateRewardWeights(weights); !s.ok()) return s;
  if (rollouts.empty()) {
    return absl::InvalidArgumentError("rollout group is empty");
  }
  std::vector<double> ordered;
  std::vector<double> shuffled;
  for (const Rollout& r : rollouts) {
    if (!(r.correctness >= 0.0 && r.correctness <= 1.0)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "correctness ", r.correctness, " outside [0, 1]"));
    }
    (r.ordered_frames ? ordered : shuffled).push_back(r.correctness);
  }

  GroupScore score;
  if (!ordered.empty()) score.mean_correct_ordered = Mean(ordered);
  if (!shuffled.empty()) score.mean_correct_shuffled = Mean(shuffled);
  if (score.mean_correct_ordered && score.mean_correct_shuffled) {
    score.temporal_bonus =
        TemporalBonus(*score.mean_correct_ordered,
                      *score.mean_correct_shuffled, weights.alpha_temporal);
  }

  std::vector<double> totals;
  for (const Rollout& r : rollouts) {
    const double temporal = r.ordered_frames ? score.temporal_bonus : 0.0;
    score.rewards.push_back(
        ScoreRollout(r, weights, rouge_reference, temporal));
    totals.push_back(score.rewards.back().total);
  }
  auto advantages = GroupAdvantages(totals, weights.epsilon);
  if (!advantages.ok()) return advantages.status();
  score.advantages = *std::move(advantages);
  return score;
}

}  // namespace motiontrace
