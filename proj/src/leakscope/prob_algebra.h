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

// Numerical kernels shared by every attack: weight normalization,
// compensated summation, log-domain helpers and KL divergence.

#ifndef LEAKSCOPE_PROB_ALGEBRA_H_
#define LEAKSCOPE_PROB_ALGEBRA_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace leakscope {

// Probabilities are clamped to [kProbabilityFloor, 1] before any log.
inline constexpr double kProbabilityFloor = 1e-12;

// Tolerance on the sum of a vector flagged as normalized.
inline constexpr double kNormalizationTolerance = 1e-9;

enum class LogBase { kTwo, kE };

// Natural log of the base; dividing a natural-log quantity by this converts
// it to the base.
double LnOfBase(LogBase base);

// Neumaier's variant of Kahan summation. Terms are accumulated in call order.
class CompensatedSum {
 public:
  void Add(double value);
  double Total() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double Sum(std::span<const double> values);

// Numerically stable log(sum_i exp(values[i])). Empty input gives -inf.
double LogSumExp(std::span<const double> values);

// Non-negative weights with at least one strictly positive entry. A vector
// flagged normalized sums to 1 within kNormalizationTolerance.
class WeightVector {
 public:
  // Validates raw weights: finite, non-negative, not all zero.
  static absl::StatusOr<WeightVector> FromRaw(std::vector<double> weights);

  // Accepts a probability vector as already normalized if its sum is within
  // `tolerance` of 1. Values are kept as given, no rescaling.
  static absl::StatusOr<WeightVector> FromDistribution(
      std::vector<double> probabilities,
      double tolerance = kNormalizationTolerance);

  std::span<const double> weights() const { return weights_; }
  bool normalized() const { return normalized_; }
  size_t size() const { return weights_.size(); }
  double operator[](size_t i) const { return weights_[i]; }

 private:
  WeightVector(std::vector<double> weights, bool normalized)
      : weights_(std::move(weights)), normalized_(normalized) {}

  std::vector<double> weights_;
  bool normalized_;
};

absl::StatusOr<WeightVector> Normalize(std::span<const double> weights);

// Idempotent: a vector already flagged normalized is returned unchanged.
WeightVector Normalize(const WeightVector& weights);

// sum_i p_i * log(p_i / q_i) in `base`, terms with p_i = 0 contributing 0 and
// q floored at kProbabilityFloor. Both inputs must be flagged normalized.
absl::StatusOr<double> KlDivergence(const WeightVector& p, const WeightVector& q,
                                    LogBase base);

// sum_i w_i * values_i with w normalized first.
absl::StatusOr<double> WeightedMean(std::span<const double> values,
                                    const WeightVector& weights);

}  // namespace leakscope

#endif  // LEAKSCOPE_PROB_ALGEBRA_H_
