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

#include "leakscope/rmia.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "leakscope/base/status_macros.h"
#include "leakscope/prob_algebra.h"

namespace leakscope {

absl::StatusOr<double> EstimatePrior(std::span<const double> p_refs,
                                     const AttackConfig& config) {
  if (p_refs.empty()) {
    return absl::InvalidArgumentError(
        "cannot estimate a prior without reference probabilities");
  }
  const double mean = Sum(p_refs) / static_cast<double>(p_refs.size());
  return 0.5 * ((1.0 + config.a) * mean + (1.0 - config.a));
}

absl::StatusOr<LikelihoodRatio> LikelihoodRatio::Compute(
    double p_target, std::span<const double> p_refs, const AttackConfig& config) {
  ASSIGN_OR_RETURN(double prior, EstimatePrior(p_refs, config));
  const double lr = std::max(p_target, config.epsilon_floor) /
                    std::max(prior, config.epsilon_floor);
  if (!std::isfinite(lr) || lr <= 0.0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("likelihood ratio %g is not finite and positive", lr));
  }
  return LikelihoodRatio(lr);
}

absl::StatusOr<double> RmiaScoreFromRatios(double lr_x,
                                           std::span<const double> lr_population,
                                           double gamma) {
  if (lr_population.empty()) {
    return absl::InvalidArgumentError("RMIA needs a non-empty population");
  }
  if (!(gamma >= 1.0)) {
    return absl::InvalidArgumentError("RMIA threshold gamma must be >= 1");
  }
  int64_t dominated = 0;
  for (double lr_z : lr_population) {
    if (lr_x / lr_z >= gamma) ++dominated;
  }
  return static_cast<double>(dominated) /
         static_cast<double>(lr_population.size());
}

absl::StatusOr<double> RmiaScore(const SequenceSignal& x,
                                 const PopulationDataset& population,
                                 const AttackConfig& config) {
  ASSIGN_OR_RETURN(RmiaScorer scorer, RmiaScorer::Create(population, config));
  return scorer.Score(x);
}

absl::StatusOr<RmiaScorer> RmiaScorer::Create(const PopulationDataset& population,
                                              const AttackConfig& config) {
  RETURN_IF_ERROR(config.Validate());
  if (population.records.empty()) {
    return absl::InvalidArgumentError("RMIA needs a non-empty population");
  }
  std::vector<double> ratios;
  ratios.reserve(population.records.size());
  for (const PopulationSignal& z : population.records) {
    auto lr = LikelihoodRatio::Compute(z.p_target, z.p_refs, config);
    if (!lr.ok()) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "population point '%s': %s", z.id, lr.status().message()));
    }
    ratios.push_back(lr->value());
  }
  return RmiaScorer(std::move(ratios), config);
}

absl::StatusOr<double> RmiaScorer::Score(const SequenceSignal& x) const {
  ASSIGN_OR_RETURN(LikelihoodRatio lr,
                   LikelihoodRatio::Compute(x.p_target, x.p_refs, config_));
  return ScoreRatio(lr.value());
}

absl::StatusOr<double> RmiaScorer::ScoreRatio(double lr_x) const {
  return RmiaScoreFromRatios(lr_x, ratios_, config_.gamma);
}

}  // namespace leakscope
