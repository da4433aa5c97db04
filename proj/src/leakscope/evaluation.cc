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

#include "leakscope/evaluation.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/string_view.h"

namespace leakscope {

absl::StatusOr<RocCurve> ComputeRoc(std::span<const double> member_scores,
                                    std::span<const double> nonmember_scores) {
  if (member_scores.empty() || nonmember_scores.empty()) {
    return absl::InvalidArgumentError(
        "ROC needs at least one member and one nonmember");
  }
  std::vector<double> members(member_scores.begin(), member_scores.end());
  std::vector<double> nonmembers(nonmember_scores.begin(),
                                 nonmember_scores.end());
  for (const auto* v : {&members, &nonmembers}) {
    for (double s : *v) {
      if (!std::isfinite(s)) return absl::InvalidArgumentError("non-finite score");
    }
  }
  std::sort(members.begin(), members.end(), std::greater<>());
  std::sort(nonmembers.begin(), nonmembers.end(), std::greater<>());

  RocCurve curve;
  curve.positives = static_cast<int64_t>(members.size());
  curve.negatives = static_cast<int64_t>(nonmembers.size());
  const double p = static_cast<double>(curve.positives);
  const double n = static_cast<double>(curve.negatives);
  curve.points.push_back(
      {0.0, 0.0, std::numeric_limits<double>::infinity(), 0, 0});

  size_t i = 0;
  size_t j = 0;
  while (i < members.size() || j < nonmembers.size()) {
    double threshold = -std::numeric_limits<double>::infinity();
    if (i < members.size()) threshold = members[i];
    if (j < nonmembers.size()) threshold = std::max(threshold, nonmembers[j]);
    while (i < members.size() && members[i] == threshold) ++i;
    while (j < nonmembers.size() && nonmembers[j] == threshold) ++j;
    curve.points.push_back({static_cast<double>(j) / n,
                            static_cast<double>(i) / p, threshold,
                            static_cast<int64_t>(j), static_cast<int64_t>(i)});
  }
  return curve;
}

absl::StatusOr<RocCurve> ComputeRoc(const ScoreSet& scores,
                                    const LabelMap& labels) {
  std::vector<std::pair<std::string, MembershipLabel>> labeled(labels.begin(),
                                                               labels.end());
  std::sort(labeled.begin(), labeled.end());
  std::vector<double> members;
  std::vector<double> nonmembers;
  std::vector<std::string> missing;
  for (const auto& [id, label] : labeled) {
    if (label == MembershipLabel::kUnknown) continue;
    const ScoreSet::Entry* entry = scores.Find(id);
    if (entry == nullptr) {
      missing.push_back(id);
      continue;
    }
    (label == MembershipLabel::kMember ? members : nonmembers)
        .push_back(entry->score);
  }
  if (!missing.empty()) {
    const size_t shown = std::min<size_t>(missing.size(), 5);
    return absl::NotFoundError(absl::StrFormat(
        "%s: %d labeled ids have no score (%s%s)", scores.attack_name(),
        missing.size(),
        absl::StrJoin(missing.begin(), missing.begin() + shown, ", "),
        missing.size() > shown ? ", ..." : ""));
  }
  return ComputeRoc(members, nonmembers);
}

double Auc(const RocCurve& curve) {
  if (curve.positives == 0 || curve.negatives == 0) return 0.0;
  // Twice the trapezoid area in count units, exact in integers up to 2^53.
  double doubled = 0.0;
  for (size_t k = 1; k < curve.points.size(); ++k) {
    const RocPoint& a = curve.points[k - 1];
    const RocPoint& b = curve.points[k];
    doubled += static_cast<double>(b.false_positives - a.false_positives) *
               static_cast<double>(a.true_positives + b.true_positives);
  }
  return doubled / (2.0 * static_cast<double>(curve.positives) *
                    static_cast<double>(curve.negatives));
}

double TprAtFpr(const RocCurve& curve, double fpr_target) {
  double best = 0.0;
  for (const RocPoint& point : curve.points) {
    if (point.fpr <= fpr_target) best = std::max(best, point.tpr);
  }
  return best;
}

std::string ComparisonTable::ToCsv() const {
  std::string out = "attack,auc,tpr_at_1pct,tpr_at_0p1pct\n";
  for (const ComparisonRow& row : rows) {
    absl::StrAppendFormat(&out, "%s,%.17g,%.17g,%.17g\n", row.attack, row.auc,
                          row.tpr_at_1pct, row.tpr_at_0p1pct);
  }
  return out;
}

std::string ComparisonTable::ToText() const {
  size_t width = absl::string_view("attack").size();
  for (const ComparisonRow& row : rows) width = std::max(width, row.attack.size());
  const int w = static_cast<int>(width);
  std::string out = absl::StrFormat("%-*s  %8s  %12s  %14s\n", w, "attack",
                                    "AUC", "TPR@1%FPR", "TPR@0.1%FPR");
  for (const ComparisonRow& row : rows) {
    absl::StrAppendFormat(&out, "%-*s  %8.4f  %11.2f%%  %13.2f%%\n", w,
                          row.attack, row.auc, 100.0 * row.tpr_at_1pct,
                          100.0 * row.tpr_at_0p1pct);
  }
  return out;
}

absl::StatusOr<ComparisonTable> CompareAttacks(
    std::span<const ScoreSet> score_sets, const LabelMap& labels) {
  ComparisonTable table;
  std::vector<std::string> problems;
  for (const ScoreSet& scores : score_sets) {
    auto curve = ComputeRoc(scores, labels);
    if (!curve.ok()) {
      problems.push_back(std::string(curve.status().message()));
      continue;
    }
    table.rows.push_back({scores.attack_name(), Auc(*curve),
                          TprAtFpr(*curve, 0.01), TprAtFpr(*curve, 0.001)});
  }
  if (!problems.empty()) {
    return absl::InvalidArgumentError(absl::StrJoin(problems, "; "));
  }
  return table;
}

std::string RocToCsv(const RocCurve& curve) {
  std::string out = "threshold,fpr,tpr\n";
  for (const RocPoint& point : curve.points) {
    absl::StrAppendFormat(&out, "%.17g,%.17g,%.17g\n", point.threshold,
                          point.fpr, point.tpr);
  }
  return out;
}

}  // namespace leakscope
