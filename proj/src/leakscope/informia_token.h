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

// Token-level InfoRMIA. Each predicted position is scored with the
// vocabulary itself acting as the population:
//
//   s = log(p(x|theta) / p(x)) + KL(p(.) || p(.|theta))
//
// where p(.) is the probability-space average of the reference models'
// next-token distributions. Token scores are then aggregated into a
// sequence score.

#ifndef LEAKSCOPE_INFORMIA_TOKEN_H_
#define LEAKSCOPE_INFORMIA_TOKEN_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "leakscope/data_model.h"

namespace leakscope {

enum class TokenAggregation { kMean, kMinK };

absl::StatusOr<TokenAggregation> ParseAggregation(absl::string_view name);
absl::string_view AggregationName(TokenAggregation aggregation);

// Scores from the stored ground-truth log-probabilities and the precomputed
// KL summary.
absl::StatusOr<double> TokenInfoRmiaScore(const TokenSignal& token,
                                          const AttackConfig& config);

// Verification form over full distributions: sums the log-posterior ratio
// over every vocabulary entry except the ground truth. Needs gt_token_id.
absl::StatusOr<double> TokenInfoRmiaExcludingGroundTruth(
    const TokenSignal& token, const AttackConfig& config);

absl::StatusOr<double> AggregateMean(std::span<const double> scores);

// Mean of the floor(k% * n) smallest scores, keeping at least one.
absl::StatusOr<double> AggregateMinK(std::span<const double> scores,
                                     double k_percent);

// Number of elements the Min-K family keeps out of `n`.
size_t MinKCount(size_t n, double k_percent);

struct TokenSequenceScore {
  std::vector<double> token_scores;
  double sequence_score = 0.0;
};

absl::StatusOr<TokenSequenceScore> ScoreSequenceViaTokens(
    const SequenceSignal& record, TokenAggregation aggregation,
    const AttackConfig& config);

}  // namespace leakscope

#endif  // LEAKSCOPE_INFORMIA_TOKEN_H_
