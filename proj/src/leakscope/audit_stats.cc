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

#include "leakscope/audit_stats.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "leakscope/prob_algebra.h"

namespace leakscope {
namespace {

double Mean(std::span<const double> values) {
  return Sum(values) / static_cast<double>(values.size());
}

absl::StatusOr<const ScoreSet::Entry*> TokenEntry(const SequenceSignal& rec,
                                                  const ScoreSet& scores) {
  const ScoreSet::Entry* entry = scores.Find(rec.id);
  if (entry == nullptr) {
    return absl::NotFoundError(
        absl::StrCat("no scores for record '", rec.id, "'"));
  }
  if (entry->token_scores.size() != rec.tokens.size()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "record '%s' has %d tokens but %d token scores", rec.id,
        rec.tokens.size(), entry->token_scores.size()));
  }
  return entry;
}

}  // namespace

absl::StatusOr<PrivBits> ComputePrivBits(const SequenceSignal& record) {
  if (!record.priv_mask) {
    return absl::FailedPreconditionError(
        absl::StrCat("record '", record.id, "' has no priv_mask"));
  }
  if (!record.has_tokens()) {
    return absl::FailedPreconditionError(
        absl::StrCat("record '", record.id, "' has no token block"));
  }
  CompensatedSum private_bits;
  CompensatedSum all_bits;
  for (size_t i = 0; i < record.tokens.size(); ++i) {
    const TokenSignal& t = record.tokens[i];
    if (t.gt_logprob_refs.empty()) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "record '%s' token %d has no reference log-probabilities", record.id,
          i + 1));
    }
    const double log_prior =
        LogSumExp(t.gt_logprob_refs) -
        std::log(static_cast<double>(t.gt_logprob_refs.size()));
    const double bits = -std::min(log_prior, 0.0) / std::log(2.0);
    all_bits.Add(bits);
    if ((*record.priv_mask)[i + 1]) private_bits.Add(bits);
  }
  return PrivBits{private_bits.Total(), all_bits.Total()};
}

double NearestRankPercentile(std::span<const double> sorted, double percent) {
  const double n = static_cast<double>(sorted.size());
  const double rank = std::ceil(percent / 100.0 * n - 1e-9);
  const size_t index =
      static_cast<size_t>(std::clamp(rank, 1.0, n)) - 1;
  return sorted[index];
}

absl::StatusOr<double> HighScoreThreshold(std::span<const ScoredToken> tokens) {
  if (tokens.empty()) return absl::InvalidArgumentError("no scored tokens");
  std::vector<double> scores;
  scores.reserve(tokens.size());
  for (const ScoredToken& t : tokens) scores.push_back(t.score);
  const size_t top = (scores.size() + 99) / 100;
  std::nth_element(scores.begin(), scores.begin() + (top - 1), scores.end(),
                   std::greater<>());
  return scores[top - 1];
}

absl::StatusOr<std::vector<GroupSummary>> GroupSummaries(
    std::span<const ScoredToken> tokens) {
  auto threshold = HighScoreThreshold(tokens);
  if (!threshold.ok()) return threshold.status();
  std::map<std::string, std::vector<double>> groups;
  for (const ScoredToken& t : tokens) {
    groups[t.group.empty() ? std::string(kUntaggedGroup) : t.group].push_back(
        t.score);
  }
  std::vector<GroupSummary> out;
  for (auto& [key, scores] : groups) {
    std::sort(scores.begin(), scores.end());
    GroupSummary g;
    g.key = key;
    g.count = static_cast<int64_t>(scores.size());
    g.mean_score = Mean(scores);
    g.median_score = NearestRankPercentile(scores, 50);
    g.p95 = NearestRankPercentile(scores, 95);
    g.n_high = std::count_if(scores.begin(), scores.end(),
                             [&](double s) { return s >= *threshold; });
    g.high_rate = static_cast<double>(g.n_high) / static_cast<double>(g.count);
    out.push_back(std::move(g));
  }
  std::sort(out.begin(), out.end(),
            [](const GroupSummary& a, const GroupSummary& b) {
              if (a.mean_score != b.mean_score) return a.mean_score > b.mean_score;
              return a.key < b.key;
            });
  return out;
}

absl::StatusOr<std::vector<ScoredToken>> CollectTaggedTokens(
    const EvaluationDataset& dataset, const ScoreSet& token_scores) {
  std::vector<ScoredToken> out;
  for (const SequenceSignal& rec : dataset.records) {
    if (!rec.has_tokens()) continue;
    auto entry = TokenEntry(rec, token_scores);
    if (!entry.ok()) return entry.status();
    for (size_t i = 0; i < rec.tokens.size(); ++i) {
      std::string tag = rec.tags ? (*rec.tags)[i + 1] : std::string();
      out.push_back({tag.empty() ? std::string(kUntaggedGroup) : std::move(tag),
                     (*entry)->token_scores[i]});
    }
  }
  if (out.empty()) return absl::InvalidArgumentError("no scored tokens");
  return out;
}

DistributionSummary Summarize(std::string key, std::vector<double> values) {
  DistributionSummary s;
  s.key = std::move(key);
  s.count = static_cast<int64_t>(values.size());
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.mean = Mean(values);
  if (values.size() > 1) {
    CompensatedSum squares;
    for (double v : values) squares.Add((v - s.mean) * (v - s.mean));
    s.std = std::sqrt(squares.Total() / static_cast<double>(values.size() - 1));
  }
  s.min = values.front();
  s.max = values.back();
  s.p10 = NearestRankPercentile(values, 10);
  s.p50 = NearestRankPercentile(values, 50);
  s.p90 = NearestRankPercentile(values, 90);
  return s;
}

absl::StatusOr<PrivateSplit> PrivateSplitStats(const EvaluationDataset& dataset,
                                               const ScoreSet& token_scores) {
  PrivateSplit split;
  std::vector<double> private_scores;
  std::vector<double> public_scores;
  bool any_masked = false;
  for (const SequenceSignal& rec : dataset.records) {
    if (!rec.priv_mask || !rec.has_tokens()) continue;
    any_masked = true;
    auto entry = TokenEntry(rec, token_scores);
    if (!entry.ok()) return entry.status();
    const std::vector<double>& scores = (*entry)->token_scores;
    std::vector<double> private_here;
    for (size_t i = 0; i < scores.size(); ++i) {
      if ((*rec.priv_mask)[i + 1]) {
        private_here.push_back(scores[i]);
        private_scores.push_back(scores[i]);
      } else {
        public_scores.push_back(scores[i]);
      }
    }
    SequencePrivatePair pair{rec.id, Mean(scores), std::nullopt};
    if (!private_here.empty()) pair.private_mean = Mean(private_here);
    split.pairs.push_back(std::move(pair));
    split.masked_tokens += static_cast<int64_t>(scores.size());
  }
  if (!any_masked) {
    return absl::FailedPreconditionError(
        "no record carries both a priv_mask and a token block");
  }
  if (!private_scores.empty()) {
    split.private_row = Summarize("Private", std::move(private_scores));
  }
  if (!public_scores.empty()) {
    split.non_private_row = Summarize("Non-private", std::move(public_scores));
  }
  return split;
}

absl::StatusOr<double> ScoreCorrelation(std::span<const double> x,
                                        std::span<const double> y) {
  if (x.size() != y.size()) {
    return absl::InvalidArgumentError("correlation inputs differ in length");
  }
  if (x.size() < 2) {
    return absl::InvalidArgumentError("correlation needs at least two pairs");
  }
  const double mx = Mean(x);
  const double my = Mean(y);
  CompensatedSum sxy;
  CompensatedSum sxx;
  CompensatedSum syy;
  for (size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy.Add(dx * dy);
    sxx.Add(dx * dx);
    syy.Add(dy * dy);
  }
  if (!(sxx.Total() > 0.0) || !(syy.Total() > 0.0)) {
    return absl::InvalidArgumentError("correlation input has zero variance");
  }
  const double r = sxy.Total() / std::sqrt(sxx.Total() * syy.Total());
  return std::clamp(r, -1.0, 1.0);
}

absl::StatusOr<double> SequencePrivateCorrelation(const ScoreSet& sequence_scores,
                                                  const PrivateSplit& split) {
  std::vector<double> seq;
  std::vector<double> priv;
  for (const SequencePrivatePair& pair : split.pairs) {
    if (!pair.private_mean) continue;
    const ScoreSet::Entry* entry = sequence_scores.Find(pair.id);
    if (entry == nullptr) {
      return absl::NotFoundError(
          absl::StrCat("no sequence score for record '", pair.id, "'"));
    }
    seq.push_back(entry->score);
    priv.push_back(*pair.private_mean);
  }
  return ScoreCorrelation(seq, priv);
}

std::vector<RankedSequence> BuildRankedSequences(const EvaluationDataset& dataset,
                                                 const ScoreSet& scores) {
  std::vector<RankedSequence> out;
  for (const SequenceSignal& rec : dataset.records) {
    const ScoreSet::Entry* entry = scores.Find(rec.id);
    if (entry == nullptr) continue;
    RankedSequence ranked{rec.id, entry->score, std::nullopt};
    if (rec.priv_mask && entry->token_scores.size() == rec.tokens.size()) {
      std::vector<double> private_scores;
      for (size_t i = 0; i < entry->token_scores.size(); ++i) {
        if ((*rec.priv_mask)[i + 1]) private_scores.push_back(entry->token_scores[i]);
      }
      if (!private_scores.empty()) ranked.private_token_mean = Mean(private_scores);
    }
    out.push_back(std::move(ranked));
  }
  return out;
}

std::vector<RankedSequence> TopKSequences(std::span<const RankedSequence> entries,
                                          size_t k, RankingKey by) {
  std::vector<RankedSequence> ranked;
  for (const RankedSequence& e : entries) {
    if (by == RankingKey::kPrivateTokenMean && !e.private_token_mean) continue;
    ranked.push_back(e);
  }
  auto key = [by](const RankedSequence& e) {
    return by == RankingKey::kSequenceMean ? e.sequence_mean
                                           : *e.private_token_mean;
  };
  std::sort(ranked.begin(), ranked.end(),
            [&](const RankedSequence& a, const RankedSequence& b) {
              if (key(a) != key(b)) return key(a) > key(b);
              return a.id < b.id;
            });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

}  // namespace leakscope
