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

// Offline RMIA: the fraction of population points whose likelihood ratio the
// target record dominates by at least a factor gamma.

#ifndef LEAKSCOPE_RMIA_H_
#define LEAKSCOPE_RMIA_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "leakscope/data_model.h"

namespace leakscope {

// Offline estimate of the prior p(x) from OUT reference probabilities:
//   0.5 * ((1 + a) * mean(p_refs) + (1 - a)).
// With a = 1 this is the plain reference mean.
absl::StatusOr<double> EstimatePrior(std::span<const double> p_refs,
                                     const AttackConfig& config);

// p(.|target) / p(.), strictly positive and finite.
class LikelihoodRatio {
 public:
  static absl::StatusOr<LikelihoodRatio> Compute(
      double p_target, std::span<const double> p_refs,
      const AttackConfig& config);

  double value() const { return value_; }

 private:
  explicit LikelihoodRatio(double value) : value_(value) {}
  double value_;
};

// (1/|Z|) * #{z : lr_x / lr_z >= gamma}, iterating z in the given order.
absl::StatusOr<double> RmiaScoreFromRatios(double lr_x,
                                           std::span<const double> lr_population,
                                           double gamma);

absl::StatusOr<double> RmiaScore(const SequenceSignal& x,
                                 const PopulationDataset& population,
                                 const AttackConfig& config);

// Computes the population ratios once and scores many records against them.
class RmiaScorer {
 public:
  static absl::StatusOr<RmiaScorer> Create(const PopulationDataset& population,
                                           const AttackConfig& config);

  absl::StatusOr<double> Score(const SequenceSignal& x) const;
  absl::StatusOr<double> ScoreRatio(double lr_x) const;

  std::span<const double> population_ratios() const { return ratios_; }

 private:
  RmiaScorer(std::vector<double> ratios, AttackConfig config)
      : ratios_(std::move(ratios)), config_(config) {}

  std::vector<double> ratios_;
  AttackConfig config_;
};

}  // namespace leakscope

#endif  // LEAKSCOPE_RMIA_H_
