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

// ROC construction and the metrics reported for attack comparisons.

#ifndef LEAKSCOPE_EVALUATION_H_
#define LEAKSCOPE_EVALUATION_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/statusor.h"
#include "leakscope/data_model.h"

namespace leakscope {

using LabelMap = absl::flat_hash_map<std::string, MembershipLabel>;

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  // Records scoring >= threshold are called members. +inf for the origin.
  double threshold = 0.0;
  int64_t false_positives = 0;
  int64_t true_positives = 0;
};

// Starts at (0,0) and ends at (1,1); one point per distinct score, in
// descending threshold order, so tied records cross a threshold together.
struct RocCurve {
  std::vector<RocPoint> points;
  int64_t positives = 0;
  int64_t negatives = 0;
};

absl::StatusOr<RocCurve> ComputeRoc(std::span<const double> member_scores,
                                    std::span<const double> nonmember_scores);

// Uses every id labeled member or nonmember; unknown labels are ignored. A
// labeled id missing from `scores` is an error.
absl::StatusOr<RocCurve> ComputeRoc(const ScoreSet& scores,
                                    const LabelMap& labels);

// Trapezoidal area; equal to the Mann-Whitney statistic with ties as 1/2.
double Auc(const RocCurve& curve);

// TPR at the largest empirical FPR not above `fpr_target`. No interpolation.
double TprAtFpr(const RocCurve& curve, double fpr_target);

struct ComparisonRow {
  std::string attack;
  double auc = 0.0;
  double tpr_at_1pct = 0.0;
  double tpr_at_0p1pct = 0.0;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;

  // Columns: attack,auc,tpr_at_1pct,tpr_at_0p1pct.
  std::string ToCsv() const;
  // Space-aligned table for terminals.
  std::string ToText() const;
};

// Rows follow input order. Fails listing the uncovered ids per attack.
absl::StatusOr<ComparisonTable> CompareAttacks(
    std::span<const ScoreSet> score_sets, const LabelMap& labels);

// Columns: threshold,fpr,tpr.
std::string RocToCsv(const RocCurve& curve);

}  // namespace leakscope

#endif  // LEAKSCOPE_EVALUATION_H_
