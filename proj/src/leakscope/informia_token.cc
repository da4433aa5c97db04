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

#include "leakscope/informia_token.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/string_view.h"
#include "leakscope/base/status_macros.h"
#include "leakscope/prob_algebra.h"

namespace leakscope {
namespace {

double SafeLog(double p) { return std::log(std::max(p, kProbabilityFloor)); }

}  // namespace

absl::StatusOr<TokenAggregation> ParseAggregation(absl::string_view name) {
  if (name == "mean") return TokenAggregation::kMean;
  if (name == "min_k" || name == "mink") return TokenAggregation::kMinK;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown aggregation '", name, "' (expected mean or min_k)"));
}

absl::string_view AggregationName(TokenAggregation aggregation) {
  return aggregation == TokenAggregation::kMean ? "mean" : "min_k";
}

absl::StatusOr<double> TokenInfoRmiaScore(const TokenSignal& token,
                                          const AttackConfig& config) {
  if (token.gt_logprob_refs.empty()) {
    return absl::InvalidArgumentError("token has no reference log-probabilities");
  }
  if (!token.kl_refavg_target) {
    return absl::InvalidArgumentError("token has no kl_refavg_target");
  }
  if (*token.kl_refavg_target < 0.0) {
    return absl::InvalidArgumentError("stored kl_refavg_target is negative");
  }
  // log of the mean reference probability, in probability space.
  const double log_prior =
      LogSumExp(token.gt_logprob_refs) -
      std::log(static_cast<double>(token.gt_logprob_refs.size()));
  const double ln_base = LnOfBase(config.log_base);
  const double gain = (token.gt_logprob_target - log_prior) / ln_base;
  return gain + *token.kl_refavg_target / ln_base;
}

absl::StatusOr<double> TokenInfoRmiaExcludingGroundTruth(
    const TokenSignal& token, const AttackConfig& config) {
  if (!token.has_full_distributions()) {
    return absl::FailedPreconditionError("token has no full distributions");
  }
  if (!token.gt_token_id) {
    return absl::FailedPreconditionError("token has no gt_token_id");
  }
  const std::vector<double>& target = *token.full_dist_target;
  const auto& refs = *token.full_dist_refs;
  const size_t vocab = target.size();
  const size_t gt = static_cast<size_t>(*token.gt_token_id);
  if (refs.empty() || gt >= vocab) {
    return absl::InvalidArgumentError("malformed full-distribution token");
  }
  std::vector<double> prior(vocab, 0.0);
  for (const auto& r : refs) {
    if (r.size() != vocab) {
      return absl::InvalidArgumentError("reference vocabulary size mismatch");
    }
    for (size_t v = 0; v < vocab; ++v) prior[v] += r[v];
  }
  for (double& p : prior) p /= static_cast<double>(refs.size());

  // sum over z != x of p(z) * log((p(x|theta) p(z)) / (p(z|theta) p(x)))
  const double log_gain = SafeLog(target[gt]) - SafeLog(prior[gt]);
  CompensatedSum sum;
  for (size_t z = 0; z < vocab; ++z) {
    if (z == gt || prior[z] == 0.0) continue;
    sum.Add(prior[z] * (log_gain + SafeLog(prior[z]) - SafeLog(target[z])));
  }
  return sum.Total() / LnOfBase(config.log_base);
}

absl::StatusOr<double> AggregateMean(std::span<const double> scores) {
  if (scores.empty()) {
    return absl::InvalidArgumentError("cannot aggregate an empty score vector");
  }
  return Sum(scores) / static_cast<double>(scores.size());
}

size_t MinKCount(size_t n, double k_percent) {
  // The small slack keeps k% * n exact for integral products such as 50% of 4.
  const double kept = std::floor(k_percent * static_cast<double>(n) / 100.0 + 1e-9);
  return std::clamp<size_t>(static_cast<size_t>(std::max(kept, 0.0)), 1, n);
}

absl::StatusOr<double> AggregateMinK(std::span<const double> scores,
                                     double k_percent) {
  if (scores.empty()) {
    return absl::InvalidArgumentError("cannot aggregate an empty score vector");
  }
  if (!(k_percent > 0.0 && k_percent <= 100.0)) {
    return absl::InvalidArgumentError("k_percent must lie in (0, 100]");
  }
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  const size_t kept = MinKCount(scores.size(), k_percent);
  // Keeping every element must reproduce the plain mean bit for bit.
  if (kept == scores.size()) return AggregateMean(scores);
  CompensatedSum sum;
  for (size_t i = 0; i < kept; ++i) sum.Add(scores[order[i]]);
  return sum.Total() / static_cast<double>(kept);
}

absl::StatusOr<TokenSequenceScore> ScoreSequenceViaTokens(
    const SequenceSignal& record, TokenAggregation aggregation,
    const AttackConfig& config) {
  if (!record.has_tokens()) {
    return absl::FailedPreconditionError(
        absl::StrCat("record '", record.id, "' has no token block"));
  }
  TokenSequenceScore result;
  result.token_scores.reserve(record.tokens.size());
  for (size_t i = 0; i < record.tokens.size(); ++i) {
    auto score = TokenInfoRmiaScore(record.tokens[i], config);
    if (!score.ok()) {
      return absl::Status(score.status().code(),
                          absl::StrFormat("record '%s' token %d: %s", record.id,
                                          i + 1, score.status().message()));
    }
    result.token_scores.push_back(*score);
  }
  if (aggregation == TokenAggregation::kMean) {
    ASSIGN_OR_RETURN(result.sequence_score, AggregateMean(result.token_scores));
  } else {
    ASSIGN_OR_RETURN(result.sequence_score,
                     AggregateMinK(result.token_scores, config.k_percent));
  }
  return result;
}

}  // namespace leakscope
