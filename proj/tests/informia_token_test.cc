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
#include <random>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace leakscope {
namespace {

using ::leakscope::testing::MakeToken;
using ::leakscope::testing::RandomSimplex;
using ::leakscope::testing::RelativelyClose;

double KlNats(const std::vector<double>& p, const std::vector<double>& q) {
  double kl = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0) kl += p[i] * std::log(p[i] / q[i]);
  }
  return kl;
}

// Builds a token with full distributions and derived fields filled in.
TokenSignal FullToken(const std::vector<double>& target,
                      const std::vector<std::vector<double>>& refs, int64_t gt) {
  std::vector<double> ref_avg(target.size(), 0.0);
  std::vector<double> gt_refs;
  for (const auto& r : refs) {
    for (size_t v = 0; v < r.size(); ++v) ref_avg[v] += r[v] / refs.size();
    gt_refs.push_back(std::log(r[gt]));
  }
  TokenSignal token = MakeToken(std::log(target[gt]), gt_refs);
  token.kl_refavg_target = KlNats(ref_avg, target);
  token.gt_token_id = gt;
  token.full_dist_target = target;
  token.full_dist_refs = refs;
  return token;
}

TEST(TokenInfoRmiaTest, ThreeTokenOracle) {
  const TokenSignal token = FullToken({0.7, 0.2, 0.1}, {{0.6, 0.2, 0.2}, {0.4, 0.4, 0.2}}, 0);
  ASSERT_OK_AND_ASSIGN(double score, TokenInfoRmiaScore(token, AttackConfig{}));
  ASSERT_OK_AND_ASSIGN(double excluding, TokenInfoRmiaExcludingGroundTruth(token, AttackConfig{}));
  EXPECT_NEAR(score, 0.61820216380146764, 1e-14);
  EXPECT_NEAR(excluding, 0.61820216380146764, 1e-14);
}

TEST(TokenInfoRmiaTest, StoredKlFromRoundedValueStillNearOracle) {
  TokenSignal token = MakeToken(std::log(0.7), {std::log(0.5)});
  token.kl_refavg_target = 0.09203285023383187;
  ASSERT_OK_AND_ASSIGN(double score, TokenInfoRmiaScore(token, AttackConfig{}));
  EXPECT_NEAR(score, 0.48542682717024166 + 0.13277533663122593, 1e-14);
}

TEST(TokenInfoRmiaTest, MatchingTargetAndReferenceGivesZero) {
  const std::vector<double> dist = {0.1, 0.2, 0.3, 0.4};
  for (int64_t gt = 0; gt < 4; ++gt) {
    const TokenSignal token = FullToken(dist, {dist}, gt);
    ASSERT_OK_AND_ASSIGN(double score, TokenInfoRmiaScore(token, AttackConfig{}));
    ASSERT_OK_AND_ASSIGN(double excluding, TokenInfoRmiaExcludingGroundTruth(token, AttackConfig{}));
    EXPECT_NEAR(score, 0.0, 1e-15);
    EXPECT_NEAR(excluding, 0.0, 1e-15);
  }
}

TEST(TokenInfoRmiaTest, UniformDistributionsGiveZero) {
  const std::vector<double> uniform(8, 0.125);
  const TokenSignal token = FullToken(uniform, {uniform, uniform}, 3);
  ASSERT_OK_AND_ASSIGN(double score, TokenInfoRmiaScore(token, AttackConfig{}));
  ASSERT_OK_AND_ASSIGN(double excluding, TokenInfoRmiaExcludingGroundTruth(token, AttackConfig{}));
  EXPECT_NEAR(score, 0.0, 1e-15);
  EXPECT_NEAR(excluding, 0.0, 1e-15);
}

TEST(TokenInfoRmiaTest, BinaryVocabularyFormsAgree) {
  const TokenSignal token = FullToken({0.9, 0.1}, {{0.5, 0.5}}, 0);
  ASSERT_OK_AND_ASSIGN(double score, TokenInfoRmiaScore(token, AttackConfig{}));
  ASSERT_OK_AND_ASSIGN(double excluding, TokenInfoRmiaExcludingGroundTruth(token, AttackConfig{}));
  EXPECT_NEAR(score, 1.5849625007211563, 1e-14);
  EXPECT_TRUE(RelativelyClose(score, excluding, 1e-9));
}

TEST(TokenInfoRmiaTest, Errors) {
  TokenSignal no_kl = MakeToken(-1.0, {-1.0});
  EXPECT_FALSE(TokenInfoRmiaScore(no_kl, AttackConfig{}).ok());
  TokenSignal no_refs = MakeToken(-1.0, {});
  no_refs.kl_refavg_target = 0.0;
  EXPECT_FALSE(TokenInfoRmiaScore(no_refs, AttackConfig{}).ok());
  TokenSignal negative_kl = MakeToken(-1.0, {-1.0});
  negative_kl.kl_refavg_target = -0.5;
  EXPECT_FALSE(TokenInfoRmiaScore(negative_kl, AttackConfig{}).ok());
  EXPECT_FALSE(TokenInfoRmiaExcludingGroundTruth(negative_kl, AttackConfig{}).ok());
}

TEST(TokenInfoRmiaPropertyTest, FormsAgreeAndVocabularyPermutationInvariant) {
  std::mt19937_64 rng(301);
  for (int trial = 0; trial < 300; ++trial) {
    const size_t vocab = 2 + trial % 63;
    const size_t num_refs = 1 + trial % 4;
    std::vector<double> target = RandomSimplex(rng, vocab);
    std::vector<std::vector<double>> refs;
    for (size_t j = 0; j < num_refs; ++j) refs.push_back(RandomSimplex(rng, vocab));
    const int64_t gt = static_cast<int64_t>(rng() % vocab);
    const TokenSignal token = FullToken(target, refs, gt);
    ASSERT_OK_AND_ASSIGN(double score, TokenInfoRmiaScore(token, AttackConfig{}));
    ASSERT_OK_AND_ASSIGN(double excluding, TokenInfoRmiaExcludingGroundTruth(token, AttackConfig{}));
    EXPECT_TRUE(RelativelyClose(score, excluding, 1e-9)) << score << " vs " << excluding;

    std::vector<size_t> perm(vocab);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> permuted_target(vocab);
    std::vector<std::vector<double>> permuted_refs(num_refs, std::vector<double>(vocab));
    for (size_t v = 0; v < vocab; ++v) {
      permuted_target[perm[v]] = target[v];
      for (size_t j = 0; j < num_refs; ++j) permuted_refs[j][perm[v]] = refs[j][v];
    }
    const TokenSignal permuted =
        FullToken(permuted_target, permuted_refs, static_cast<int64_t>(perm[gt]));
    ASSERT_OK_AND_ASSIGN(double permuted_score, TokenInfoRmiaScore(permuted, AttackConfig{}));
    ASSERT_OK_AND_ASSIGN(double permuted_excluding,
                         TokenInfoRmiaExcludingGroundTruth(permuted, AttackConfig{}));
    EXPECT_TRUE(RelativelyClose(score, permuted_score, 1e-12));
    EXPECT_TRUE(RelativelyClose(excluding, permuted_excluding, 1e-9));
  }
}

TEST(AggregateTest, Mean) {
  ASSERT_OK_AND_ASSIGN(double m, AggregateMean(std::vector<double>{1, 2, 3}));
  EXPECT_EQ(m, 2.0);
  ASSERT_OK_AND_ASSIGN(double single, AggregateMean(std::vector<double>{5}));
  EXPECT_EQ(single, 5.0);
  EXPECT_FALSE(AggregateMean(std::vector<double>{}).ok());
  ASSERT_OK_AND_ASSIGN(double oracle,
                       AggregateMean(std::vector<double>{0.6182, 0.0, 0.2}));
  EXPECT_NEAR(oracle, 0.27273333333333333, 1e-15);
}

TEST(AggregateTest, MeanPermutationInvariant) {
  std::mt19937_64 rng(302);
  std::normal_distribution<double> g(0.0, 3.0);
  std::vector<double> v(37);
  for (double& x : v) x = g(rng);
  ASSERT_OK_AND_ASSIGN(double before, AggregateMean(v));
  std::shuffle(v.begin(), v.end(), rng);
  ASSERT_OK_AND_ASSIGN(double after, AggregateMean(v));
  EXPECT_NEAR(before, after, 1e-15);
}

TEST(AggregateTest, MinK) {
  ASSERT_OK_AND_ASSIGN(double half, AggregateMinK(std::vector<double>{4, 1, 3, 2}, 50));
  EXPECT_EQ(half, 1.5);
  ASSERT_OK_AND_ASSIGN(double single, AggregateMinK(std::vector<double>{7}, 10));
  EXPECT_EQ(single, 7.0);
  ASSERT_OK_AND_ASSIGN(double smallest,
                       AggregateMinK(std::vector<double>{0.6182, 0.0, 0.2}, 34));
  EXPECT_EQ(smallest, 0.0);
  EXPECT_FALSE(AggregateMinK(std::vector<double>{1.0}, 0.0).ok());
  EXPECT_FALSE(AggregateMinK(std::vector<double>{1.0}, 101.0).ok());
}

TEST(AggregateTest, MinKAtHundredEqualsMeanExactly) {
  std::mt19937_64 rng(303);
  std::normal_distribution<double> g(0.0, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(1 + trial % 50);
    for (double& x : v) x = g(rng);
    ASSERT_OK_AND_ASSIGN(double mink, AggregateMinK(v, 100));
    ASSERT_OK_AND_ASSIGN(double mean, AggregateMean(v));
    EXPECT_EQ(mink, mean);
  }
}

TEST(AggregateTest, MinKCount) {
  EXPECT_EQ(MinKCount(3, 34), 1u);
  EXPECT_EQ(MinKCount(4, 50), 2u);
  EXPECT_EQ(MinKCount(1, 10), 1u);
  EXPECT_EQ(MinKCount(10, 20), 2u);
  EXPECT_EQ(MinKCount(10, 100), 10u);
  EXPECT_EQ(MinKCount(3, 100), 3u);
  EXPECT_EQ(MinKCount(20, 35), 7u);
}

TEST(ScoreSequenceViaTokensTest, SingleTokenSequence) {
  SequenceSignal rec;
  rec.id = "two-tokens";
  rec.tokens.push_back(MakeToken(std::log(0.7), {std::log(0.5)}));
  rec.tokens[0].kl_refavg_target = 0.09203285023383187;
  for (TokenAggregation agg : {TokenAggregation::kMean, TokenAggregation::kMinK}) {
    ASSERT_OK_AND_ASSIGN(TokenSequenceScore result, ScoreSequenceViaTokens(rec, agg, AttackConfig{}));
    ASSERT_EQ(result.token_scores.size(), 1u);
    EXPECT_EQ(result.sequence_score, result.token_scores[0]);
  }
}

TEST(ScoreSequenceViaTokensTest, ErrorsNameThePosition) {
  SequenceSignal rec;
  rec.id = "r";
  EXPECT_FALSE(ScoreSequenceViaTokens(rec, TokenAggregation::kMean, AttackConfig{}).ok());
  rec.tokens.push_back(MakeToken(-1.0, {-1.0}));
  rec.tokens[0].kl_refavg_target = 0.0;
  rec.tokens.push_back(MakeToken(-1.0, {-1.0}));
  auto result = ScoreSequenceViaTokens(rec, TokenAggregation::kMean, AttackConfig{});
  ASSERT_FALSE(result.ok());
  EXPECT_THAT(std::string(result.status().message()), ::testing::HasSubstr("2"));
}

TEST(ParseAggregationTest, Names) {
  ASSERT_OK_AND_ASSIGN(TokenAggregation mean, ParseAggregation("mean"));
  EXPECT_EQ(mean, TokenAggregation::kMean);
  ASSERT_OK_AND_ASSIGN(TokenAggregation mink, ParseAggregation("min_k"));
  EXPECT_EQ(mink, TokenAggregation::kMinK);
  EXPECT_FALSE(ParseAggregation("median").ok());
}

}  // namespace
}  // namespace leakscope
