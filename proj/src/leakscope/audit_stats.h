// Copyright 2026 The LeakScope Authors
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
//

// Token-level privacy analyses: PrivBits, per-entity score summaries,
// private versus non-private splits, and sequence rankings.

#ifndef LEAKSCOPE_AUDIT_STATS_H_
#define LEAKSCOPE_AUDIT_STATS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "leakscope/data_model.h"

namespace leakscope {

// Group key used for untagged tokens.
inline constexpr absl::string_view kUntaggedGroup = "None";

// Information content of the private tokens of one record, in bits, using the
// reference-ensemble average probability as the prior of each token.
struct PrivBits {
  double private_bits = 0.0;
  double all_bits = 0.0;  // same sum over every scored token
};

absl::StatusOr<PrivBits> ComputePrivBits(const SequenceSignal& record);

// Nearest-rank percentile of ascending-sorted values, `percent` in [0, 100].
double NearestRankPercentile(std::span<const double> sorted, double percent);

struct ScoredToken {
  std::string group;
  double score = 0.0;
};

struct GroupSummary {
  std::string key;
  int64_t count = 0;
  double mean_score = 0.0;
  double median_score = 0.0;
  double p95 = 0.0;
  // Tokens in the global top 1% by score, threshold ties included.
  int64_t n_high = 0;
  double high_rate = 0.0;
};

// Score at or above which a token counts as "high": the ceil(n/100)-th
// largest score.
absl::StatusOr<double> HighScoreThreshold(std::span<const ScoredToken> tokens);

// One row per group, sorted by mean score descending (then key).
absl::StatusOr<std::vector<GroupSummary>> GroupSummaries(
    std::span<const ScoredToken> tokens);

// Pairs every token score with its tag (empty tags become "None").
absl::StatusOr<std::vector<ScoredToken>> CollectTaggedTokens(
    const EvaluationDataset& dataset, const ScoreSet& token_scores);

struct DistributionSummary {
  std::string key;
  int64_t count = 0;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation
  double min = 0.0;
  double p10 = 0.0;
  double p50 = 0.0;
  double p90 = 0.0;
  double max = 0.0;
};

DistributionSummary Summarize(std::string key, std::vector<double> values);

struct SequencePrivatePair {
  std::string id;
  double sequence_mean = 0.0;                // mean over all scored tokens
  std::optional<double> private_mean;        // mean over private tokens
};

struct PrivateSplit {
  // Absent when no token falls in the group.
  std::optional<DistributionSummary> private_row;
  std::optional<DistributionSummary> non_private_row;
  std::vector<SequencePrivatePair> pairs;  // masked records, dataset order
  int64_t masked_tokens = 0;
};

absl::StatusOr<PrivateSplit> PrivateSplitStats(const EvaluationDataset& dataset,
                                               const ScoreSet& token_scores);

// Pearson correlation.
absl::StatusOr<double> ScoreCorrelation(std::span<const double> x,
                                        std::span<const double> y);

// Correlates each record's sequence score with its private-token mean over
// records that have at least one private token.
absl::StatusOr<double> SequencePrivateCorrelation(const ScoreSet& sequence_scores,
                                                  const PrivateSplit& split);

enum class RankingKey { kSequenceMean, kPrivateTokenMean };

struct RankedSequence {
  std::string id;
  double sequence_mean = 0.0;
  std::optional<double> private_token_mean;
};

// Sequence score from the score set plus the private-token mean when the
// record has a mask and token scores.
std::vector<RankedSequence> BuildRankedSequences(const EvaluationDataset& dataset,
                                                 const ScoreSet& scores);

// Descending by key, ties by id ascending. Records without a private-token
// mean are left out of the private ranking.
std::vector<RankedSequence> TopKSequences(std::span<const RankedSequence> entries,
                                          size_t k, RankingKey by);

}  // namespace leakscope

#endif  // LEAKSCOPE_AUDIT_STATS_H_
