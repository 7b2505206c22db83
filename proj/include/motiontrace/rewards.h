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

// Reward terms for reinforcement fine-tuning on free-form video QA, and the
// group-relative advantage normalization applied on top of them.
//
//   total = w_correct * correctness
//         + w_format  * format        (0 or 1)
//         + w_rouge   * ROUGE-L F1    (answer body if well-formed, else text)
//         + temporal                  (alpha or 0, see TemporalBonus)
//
//   advantage_i = (r_i - mean(r)) / (std(r) + epsilon)   population std
//
// Everything here is pure and reentrant.

#ifndef MOTIONTRACE_REWARDS_H_
#define MOTIONTRACE_REWARDS_H_

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace motiontrace {

struct Rollout {
  std::string text;
  // Externally judged, in [0, 1].
  double correctness = 0.0;
  // False for rollouts generated from shuffled frames.
  bool ordered_frames = true;
};

struct RewardWeights {
  double w_correct = 1.0;
  double w_format = 0.5;
  double w_rouge = 0.5;
  double alpha_temporal = 0.3;
  double epsilon = 1e-6;
};

absl::Status ValidateRewardWeights(const RewardWeights& weights);

// 1 iff the text is exactly one non-blank <think> body followed by exactly
// one non-blank <answer> body, with only whitespace around and between them
// and no other think/answer tags anywhere.
int FormatReward(std::string_view text);

// The <answer> body of a well-formed text, nullopt otherwise.
std::optional<std::string_view> WellFormedAnswer(std::string_view text);

// Lowercases (ASCII), splits on Unicode whitespace and strips leading and
// trailing punctuation from each token. Tokens left empty are dropped.
std::vector<std::string> RougeTokenize(std::string_view text);

template <typename T>
size_t LcsLength(std::span<const T> a, std::span<const T> b) {
  if (a.empty() || b.empty()) return 0;
  if (b.size() <= 64) {
    // Bit-parallel: bit j of `v` is clear where the LCS of the prefix of a
    // seen so far with b[0..j] gains a step. One word operation per token of
    // a, and no data-dependent branches.
    const uint64_t all = b.size() == 64 ? ~uint64_t{0}
                                        : (uint64_t{1} << b.size()) - 1;
    uint64_t v = all;
    for (const T& x : a) {
      uint64_t match = 0;
      for (size_t j = 0; j < b.size(); ++j) {
        match |= static_cast<uint64_t>(x == b[j]) << j;
      }
      const uint64_t u = v & match;
      v = ((v + u) | (v - u)) & all;
    }
    return b.size() - std::popcount(v);
  }
  // Single rolling row over b.
  std::vector<uint32_t> row(b.size() + 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    uint32_t diagonal = 0;  // row[j] from the previous i, before overwrite
    for (size_t j = 0; j < b.size(); ++j) {
      const uint32_t above = row[j + 1];
      row[j + 1] = a[i] == b[j] ? diagonal + 1 : std::max(above, row[j]);
      diagonal = above;
    }
  }
  return row[b.size()];
}

// ROUGE-L F1 over pre-tokenized sequences.
template <typename T>
double RougeLTokens(std::span<const T> candidate, std::span<const T> reference) {
  if (candidate.empty() || reference.empty()) return 0.0;
  const size_t lcs = LcsLength(candidate, reference);
  if (lcs == 0) return 0.0;
  const double precision = static_cast<double>(lcs) / candidate.size();
  const double recall = static_cast<double>(lcs) / reference.size();
  return 2.0 * precision * recall / (precision + recall);
}

double RougeL(std::string_view candidate, std::string_view reference);

// alpha when ordered-frame rollouts beat shuffled-frame rollouts on mean
// correctness, 0 otherwise (ties included).
double TemporalBonus(double mean_correct_ordered, double mean_correct_shuffled,
                     double alpha);

struct RewardBreakdown {
  double correctness = 0.0;
  int format = 0;
  double rouge = 0.0;
  double temporal = 0.0;
  double total = 0.0;
};

RewardBreakdown ScoreRollout(const Rollout& rollout,
                             const RewardWeights& weights,
                             std::string_view rouge_reference,
                             double temporal);

double TotalReward(const Rollout& rollout, const RewardWeights& weights,
                   std::string_view rouge_reference, double temporal);

// Fails on an empty group. A group with zero spread (including a single
// rollout) gets all-zero advantages.
absl::StatusOr<std::vector<double>> GroupAdvantages(
    std::span<const double> rewards, double epsilon);

struct GroupScore {
  // Means over ordered / shuffled rollouts; nullopt if the group has none.
  std::optional<double> mean_correct_ordered;
  std::optional<double> mean_correct_shuffled;
  double temporal_bonus = 0.0;
  std::vector<RewardBreakdown> rewards;
  std::vector<double> advantages;
};

// Scores one prompt's rollouts. The temporal bonus is granted to ordered
// rollouts only, and only when the group has both kinds. Advantages are
// normalized over the whole group.
absl::StatusOr<GroupScore> ScoreGroup(std::span<const Rollout> rollouts,
                                      const RewardWeights& weights,
                                      std::string_view rouge_reference);

}  // namespace motiontrace

#endif  // MOTIONTRACE_REWARDS_H_
