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
#include <random>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace leakscope {
namespace {

using ::leakscope::testing::MakeToken;

// Record with one token per prior probability; mask and tags cover the
// unscored first token at index 0.
SequenceSignal PrivRecord(const std::string& id, const std::vector<double>& priors,
                          std::vector<bool> mask) {
  SequenceSignal rec;
  rec.id = id;
  rec.p_target = 0.5;
  rec.p_refs = {0.5};
  for (double p : priors) rec.tokens.push_back(MakeToken(-1.0, {std::log(p)}));
  rec.priv_mask = std::move(mask);
  return rec;
}

TEST(PrivBitsTest, TwoPrivateTokens) {
  const SequenceSignal rec = PrivRecord("r", {0.25, 0.9, 0.5}, {false, true, false, true});
  ASSERT_OK_AND_ASSIGN(PrivBits bits, ComputePrivBits(rec));
  EXPECT_NEAR(bits.private_bits, 3.0, 1e-15);
  EXPECT_NEAR(bits.all_bits, 3.0 - std::log2(0.9), 1e-14);
}

TEST(PrivBitsTest, AveragesReferenceProbabilities) {
  SequenceSignal rec = PrivRecord("r", {0.25}, {false, true});
  rec.tokens[0].gt_logprob_refs = {std::log(0.1), std::log(0.4)};
  ASSERT_OK_AND_ASSIGN(PrivBits bits, ComputePrivBits(rec));
  EXPECT_NEAR(bits.private_bits, 2.0, 1e-15);
}

TEST(PrivBitsTest, NoPrivateTokensAndAllPrivateBoundaries) {
  ASSERT_OK_AND_ASSIGN(PrivBits none, ComputePrivBits(PrivRecord("r", {0.3, 0.6}, {true, false, false})));
  EXPECT_EQ(none.private_bits, 0.0);
  ASSERT_OK_AND_ASSIGN(PrivBits all, ComputePrivBits(PrivRecord("r", {0.3, 0.6}, {false, true, true})));
  EXPECT_EQ(all.private_bits, all.all_bits);
}

TEST(PrivBitsTest, RequiresMask) {
  SequenceSignal rec = PrivRecord("r", {0.3}, {false, true});
  rec.priv_mask.reset();
  EXPECT_FALSE(ComputePrivBits(rec).ok());
}

TEST(PercentileTest, NearestRank) {
  std::vector<double> v(100);
  for (int i = 0; i < 100; ++i) v[i] = i + 1;
  EXPECT_EQ(NearestRankPercentile(v, 50), 50.0);
  EXPECT_EQ(NearestRankPercentile(v, 95), 95.0);
  EXPECT_EQ(NearestRankPercentile(v, 0), 1.0);
  EXPECT_EQ(NearestRankPercentile(v, 100), 100.0);
  EXPECT_EQ(NearestRankPercentile(std::vector<double>{1, 2, 3, 4}, 50), 2.0);
}

std::vector<ScoredToken> Tagged(const std::string& tag, const std::vector<double>& scores) {
  std::vector<ScoredToken> tokens;
  for (double s : scores) tokens.push_back({tag, s});
  return tokens;
}

TEST(GroupSummariesTest, OneHighTokenInHundred) {
  std::vector<double> scores(100);
  for (int i = 0; i < 100; ++i) scores[i] = i + 1;
  ASSERT_OK_AND_ASSIGN(std::vector<GroupSummary> groups, GroupSummaries(Tagged("PERSON", scores)));
  ASSERT_EQ(groups.size(), 1u);
  EXPECT_EQ(groups[0].count, 100);
  EXPECT_EQ(groups[0].n_high, 1);
  EXPECT_EQ(groups[0].high_rate, 0.01);
  EXPECT_EQ(groups[0].mean_score, 50.5);
  EXPECT_GE(groups[0].p95, groups[0].median_score);
}

TEST(GroupSummariesTest, IdenticalMultisetsGiveIdenticalSummaries) {
  std::vector<ScoredToken> tokens = Tagged("A", {3, 1, 4, 1, 5, 9, 2, 6});
  for (const ScoredToken& t : Tagged("B", {9, 6, 5, 4, 3, 2, 1, 1})) tokens.push_back(t);
  ASSERT_OK_AND_ASSIGN(std::vector<GroupSummary> groups, GroupSummaries(tokens));
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups[0].mean_score, groups[1].mean_score);
  EXPECT_EQ(groups[0].median_score, groups[1].median_score);
  EXPECT_EQ(groups[0].p95, groups[1].p95);
  EXPECT_EQ(groups[0].key, "A");
}

TEST(GroupSummariesTest, TiesAtThresholdAreHigh) {
  std::vector<ScoredToken> tokens = Tagged("A", std::vector<double>(30, 0.7));
  for (const ScoredToken& t : Tagged("B", std::vector<double>(20, 0.7))) tokens.push_back(t);
  ASSERT_OK_AND_ASSIGN(std::vector<GroupSummary> groups, GroupSummaries(tokens));
  for (const GroupSummary& g : groups) EXPECT_EQ(g.high_rate, 1.0);
}

TEST(GroupSummariesTest, PartitionsCountsAndHighTokens) {
  std::mt19937_64 rng(601);
  std::normal_distribution<double> g(0.0, 1.0);
  const std::vector<std::string> tags = {"None", "PERSON", "DATE", "EMAIL", "ORG"};
  std::vector<ScoredToken> tokens;
  for (int i = 0; i < 1234; ++i) tokens.push_back({tags[rng() % tags.size()], g(rng)});
  ASSERT_OK_AND_ASSIGN(double threshold, HighScoreThreshold(tokens));
  int64_t global_high = 0;
  for (const ScoredToken& t : tokens) global_high += t.score >= threshold ? 1 : 0;
  EXPECT_EQ(global_high, 13);
  ASSERT_OK_AND_ASSIGN(std::vector<GroupSummary> groups, GroupSummaries(tokens));
  int64_t count = 0;
  int64_t high = 0;
  for (const GroupSummary& gs : groups) {
    count += gs.count;
    high += gs.n_high;
    EXPECT_GE(gs.count, 1);
    EXPECT_GE(gs.high_rate, 0.0);
    EXPECT_LE(gs.high_rate, 1.0);
    EXPECT_GE(gs.p95, gs.median_score);
  }
  EXPECT_EQ(count, 1234);
  EXPECT_EQ(high, global_high);
  for (size_t i = 1; i < groups.size(); ++i) {
    EXPECT_GE(groups[i - 1].mean_score, groups[i].mean_score);
  }
}

TEST(GroupSummariesTest, RejectsEmptyInput) {
  EXPECT_FALSE(GroupSummaries(std::vector<ScoredToken>{}).ok());
}

struct MaskedFixture {
  EvaluationDataset dataset;
  ScoreSet scores{"informia-token"};
};

void AddMasked(MaskedFixture& f, const std::string& id, const std::vector<double>& token_scores,
               const std::vector<bool>& private_flags, const std::vector<std::string>& tags = {}) {
  std::vector<double> priors(token_scores.size(), 0.5);
  std::vector<bool> mask = {false};
  mask.insert(mask.end(), private_flags.begin(), private_flags.end());
  SequenceSignal rec = PrivRecord(id, priors, mask);
  if (!tags.empty()) rec.tags = tags;
  f.dataset.records.push_back(rec);
  double sum = 0.0;
  for (double s : token_scores) sum += s;
  EXPECT_OK(f.scores.Add(id, sum / token_scores.size(), token_scores));
}

TEST(PrivateSplitTest, DilutionWitness) {
  MaskedFixture f;
  std::vector<double> scores(10, 0.0);
  scores[4] = 5.0;
  std::vector<bool> flags(10, false);
  flags[4] = true;
  AddMasked(f, "diluted", scores, flags);
  ASSERT_OK_AND_ASSIGN(PrivateSplit split, PrivateSplitStats(f.dataset, f.scores));
  ASSERT_EQ(split.pairs.size(), 1u);
  EXPECT_EQ(split.pairs[0].sequence_mean, 0.5);
  EXPECT_EQ(split.pairs[0].private_mean, 5.0);
  ASSERT_TRUE(split.private_row.has_value());
  ASSERT_TRUE(split.non_private_row.has_value());
  EXPECT_EQ(split.private_row->count + split.non_private_row->count, split.masked_tokens);
  EXPECT_EQ(split.masked_tokens, 10);
}

TEST(PrivateSplitTest, AllFalseMasksLeavePrivateRowAbsent) {
  MaskedFixture f;
  AddMasked(f, "a", {0.1, 0.2, 0.3}, {false, false, false});
  ASSERT_OK_AND_ASSIGN(PrivateSplit split, PrivateSplitStats(f.dataset, f.scores));
  EXPECT_FALSE(split.private_row.has_value());
  ASSERT_TRUE(split.non_private_row.has_value());
  EXPECT_EQ(split.non_private_row->count, 3);
  EXPECT_FALSE(split.pairs[0].private_mean.has_value());
}

TEST(PrivateSplitTest, TableRowStatistics) {
  MaskedFixture f;
  AddMasked(f, "a", {1, 2, 3, 4, 5}, {true, true, true, true, true});
  ASSERT_OK_AND_ASSIGN(PrivateSplit split, PrivateSplitStats(f.dataset, f.scores));
  const DistributionSummary& row = *split.private_row;
  EXPECT_EQ(row.key, "Private");
  EXPECT_EQ(row.count, 5);
  EXPECT_EQ(row.mean, 3.0);
  EXPECT_NEAR(row.std, std::sqrt(2.5), 1e-15);
  EXPECT_EQ(row.min, 1.0);
  EXPECT_EQ(row.p10, 1.0);
  EXPECT_EQ(row.p50, 3.0);
  EXPECT_EQ(row.p90, 5.0);
  EXPECT_EQ(row.max, 5.0);
}

TEST(PrivateSplitTest, IdenticalDistributionsGiveEqualMeans) {
  std::mt19937_64 rng(602);
  std::normal_distribution<double> g(1.0, 1.0);
  MaskedFixture f;
  for (int r = 0; r < 200; ++r) {
    std::vector<double> scores(20);
    std::vector<bool> flags(20);
    for (int i = 0; i < 20; ++i) {
      scores[i] = g(rng);
      flags[i] = rng() % 4 == 0;
    }
    AddMasked(f, "r" + std::to_string(r), scores, flags);
  }
  ASSERT_OK_AND_ASSIGN(PrivateSplit split, PrivateSplitStats(f.dataset, f.scores));
  EXPECT_NEAR(split.private_row->mean, split.non_private_row->mean, 0.1);
  EXPECT_EQ(split.private_row->count + split.non_private_row->count, split.masked_tokens);
}

TEST(PrivateSplitTest, RequiresMaskedRecord) {
  MaskedFixture f;
  AddMasked(f, "a", {0.1}, {true});
  f.dataset.records[0].priv_mask.reset();
  EXPECT_FALSE(PrivateSplitStats(f.dataset, f.scores).ok());
}

TEST(CollectTaggedTokensTest, UntaggedTokensJoinNoneGroup) {
  MaskedFixture f;
  AddMasked(f, "a", {0.1, 0.2, 0.3}, {false, false, false}, {"", "PERSON", "", "DATE"});
  ASSERT_OK_AND_ASSIGN(std::vector<ScoredToken> tokens, CollectTaggedTokens(f.dataset, f.scores));
  ASSERT_EQ(tokens.size(), 3u);
  EXPECT_EQ(tokens[0].group, "PERSON");
  EXPECT_EQ(tokens[1].group, "None");
  EXPECT_EQ(tokens[2].group, "DATE");
  EXPECT_EQ(tokens[2].score, 0.3);
}

TEST(CorrelationTest, Examples) {
  const std::vector<double> x = {1, 2, 3, 4};
  ASSERT_OK_AND_ASSIGN(double same, ScoreCorrelation(x, x));
  EXPECT_NEAR(same, 1.0, 1e-15);
  ASSERT_OK_AND_ASSIGN(double negated, ScoreCorrelation(x, std::vector<double>{-1, -2, -3, -4}));
  EXPECT_NEAR(negated, -1.0, 1e-15);
  ASSERT_OK_AND_ASSIGN(double oracle, ScoreCorrelation(x, std::vector<double>{2, 1, 3, 4}));
  EXPECT_NEAR(oracle, 0.8, 1e-15);
  EXPECT_FALSE(ScoreCorrelation(x, std::vector<double>{1, 2}).ok());
  EXPECT_FALSE(ScoreCorrelation(x, std::vector<double>{5, 5, 5, 5}).ok());
}

TEST(CorrelationTest, BoundedAndAffineInvariant) {
  std::mt19937_64 rng(603);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(3 + trial % 50);
    std::vector<double> y(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
      x[i] = g(rng);
      y[i] = 0.5 * x[i] + g(rng);
    }
    ASSERT_OK_AND_ASSIGN(double r, ScoreCorrelation(x, y));
    EXPECT_GE(r, -1.0);
    EXPECT_LE(r, 1.0);
    std::vector<double> scaled = x;
    for (double& v : scaled) v = 4.0 * v - 7.0;
    ASSERT_OK_AND_ASSIGN(double r_scaled, ScoreCorrelation(scaled, y));
    EXPECT_NEAR(r, r_scaled, 1e-12);
  }
}

std::vector<RankedSequence> Ranked(const std::vector<std::pair<std::string, double>>& rows) {
  std::vector<RankedSequence> out;
  for (const auto& [id, score] : rows) out.push_back({id, score, std::nullopt});
  return out;
}

std::vector<std::string> Ids(const std::vector<RankedSequence>& ranked) {
  std::vector<std::string> ids;
  for (const RankedSequence& r : ranked) ids.push_back(r.id);
  return ids;
}

TEST(TopKTest, OrderingAndTies) {
  const auto entries = Ranked({{"c", 0.3}, {"a", 0.9}, {"b", 0.3}, {"d", -1.0}});
  EXPECT_THAT(Ids(TopKSequences(entries, 10, RankingKey::kSequenceMean)),
              ::testing::ElementsAre("a", "b", "c", "d"));
  EXPECT_THAT(Ids(TopKSequences(entries, 2, RankingKey::kSequenceMean)),
              ::testing::ElementsAre("a", "b"));
}

TEST(TopKTest, MatchesSortOracleOnDistinctScores) {
  std::mt19937_64 rng(604);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::pair<std::string, double>> rows;
  for (int i = 0; i < 200; ++i) rows.push_back({"r" + std::to_string(i), g(rng)});
  std::vector<std::pair<std::string, double>> oracle = rows;
  std::sort(oracle.begin(), oracle.end(),
            [](const auto& a, const auto& b) { return a.second > b.second; });
  const auto top = TopKSequences(Ranked(rows), 25, RankingKey::kSequenceMean);
  ASSERT_EQ(top.size(), 25u);
  for (size_t i = 0; i < top.size(); ++i) EXPECT_EQ(top[i].id, oracle[i].first);
}

TEST(TopKTest, PrivateRankingSkipsRecordsWithoutPrivateTokens) {
  std::vector<RankedSequence> entries = Ranked({{"a", 0.1}, {"b", 0.2}, {"c", 0.3}});
  entries[0].private_token_mean = 2.0;
  entries[2].private_token_mean = 1.0;
  EXPECT_THAT(Ids(TopKSequences(entries, 10, RankingKey::kPrivateTokenMean)),
              ::testing::ElementsAre("a", "c"));
}

TEST(BuildRankedSequencesTest, ComputesPrivateMeans) {
  MaskedFixture f;
  AddMasked(f, "a", {1.0, 3.0, 8.0}, {false, true, true});
  AddMasked(f, "b", {1.0, 3.0}, {false, false});
  const auto ranked = BuildRankedSequences(f.dataset, f.scores);
  ASSERT_EQ(ranked.size(), 2u);
  EXPECT_EQ(ranked[0].private_token_mean, 5.5);
  EXPECT_EQ(ranked[0].sequence_mean, 4.0);
  EXPECT_FALSE(ranked[1].private_token_mean.has_value());
}

}  // namespace
}  // namespace leakscope
