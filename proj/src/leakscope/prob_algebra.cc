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

#include "leakscope/prob_algebra.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace leakscope {

double LnOfBase(LogBase base) {
  return base == LogBase::kTwo ? std::numbers::ln2 : 1.0;
}

void CompensatedSum::Add(double value) {
  const double t = sum_ + value;
  if (std::abs(sum_) >= std::abs(value)) {
    compensation_ += (sum_ - t) + value;
  } else {
    compensation_ += (value - t) + sum_;
  }
  sum_ = t;
}

double Sum(std::span<const double> values) {
  CompensatedSum sum;
  for (double v : values) sum.Add(v);
  return sum.Total();
}

double LogSumExp(std::span<const double> values) {
  if (values.empty()) return -std::numeric_limits<double>::infinity();
  const double max = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(max)) return max;
  CompensatedSum sum;
  for (double v : values) sum.Add(std::exp(v - max));
  return max + std::log(sum.Total());
}

absl::StatusOr<WeightVector> WeightVector::FromRaw(std::vector<double> weights) {
  bool any_positive = false;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights[i]) || weights[i] < 0) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "weight %d is %g; weights must be finite and non-negative", i,
          weights[i]));
    }
    any_positive |= weights[i] > 0;
  }
  if (!any_positive) {
    return absl::InvalidArgumentError(
        "degenerate weights: no strictly positive entry");
  }
  return WeightVector(std::move(weights), /*normalized=*/false);
}

absl::StatusOr<WeightVector> WeightVector::FromDistribution(
    std::vector<double> probabilities, double tolerance) {
  const double total = Sum(probabilities);
  auto raw = FromRaw(std::move(probabilities));
  if (!raw.ok()) return raw.status();
  if (std::abs(total - 1.0) > tolerance) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "distribution sums to %.17g, not 1 within %g", total, tolerance));
  }
  return WeightVector(std::move(raw->weights_), /*normalized=*/true);
}

absl::StatusOr<WeightVector> Normalize(std::span<const double> weights) {
  auto raw = WeightVector::FromRaw({weights.begin(), weights.end()});
  if (!raw.ok()) return raw.status();
  return Normalize(*raw);
}

WeightVector Normalize(const WeightVector& weights) {
  if (weights.normalized()) return weights;
  const double total = Sum(weights.weights());
  std::vector<double> out;
  out.reserve(weights.size());
  for (double w : weights.weights()) out.push_back(w / total);
  return *WeightVector::FromDistribution(std::move(out),
                                         /*tolerance=*/kNormalizationTolerance);
}

absl::StatusOr<double> KlDivergence(const WeightVector& p, const WeightVector& q,
                                    LogBase base) {
  if (p.size() != q.size()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "KL divergence length mismatch: %d vs %d", p.size(), q.size()));
  }
  if (!p.normalized() || !q.normalized()) {
    return absl::InvalidArgumentError("KL divergence needs normalized inputs");
  }
  CompensatedSum sum;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0) continue;
    sum.Add(p[i] * std::log(p[i] / std::max(q[i], kProbabilityFloor)));
  }
  // Rounding can leave a tiny negative value for identical inputs.
  return std::max(0.0, sum.Total()) / LnOfBase(base);
}

absl::StatusOr<double> WeightedMean(std::span<const double> values,
                                    const WeightVector& weights) {
  if (values.size() != weights.size()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("weighted mean length mismatch: %d values, %d weights",
                        values.size(), weights.size()));
  }
  const WeightVector normalized = Normalize(weights);
  CompensatedSum sum;
  for (size_t i = 0; i < values.size(); ++i) {
    sum.Add(normalized[i] * values[i]);
  }
  return sum.Total();
}

}  // namespace leakscope
