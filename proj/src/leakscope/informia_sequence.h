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

// Sequence-level InfoRMIA: the expected log-posterior advantage of a record
// over the population, in bits by default.
//
//   score(x) = sum_z p(z) log(p(theta|x) / p(theta|z))
//            = log(p(x|theta) / p(x)) + KL(p(z) || p(z|theta))
//
// where p(z) and p(z|theta) are normalized over the population. The KL term
// does not depend on x and is computed once per population.

#ifndef LEAKSCOPE_INFORMIA_SEQUENCE_H_
#define LEAKSCOPE_INFORMIA_SEQUENCE_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "leakscope/data_model.h"
#include "leakscope/prob_algebra.h"

namespace leakscope {

struct InfoRmiaScoreParts {
  double gain_term = 0.0;  // log(p(x|theta) / p(x))
  double kl_term = 0.0;    // KL(p(z) || p(z|theta)), >= 0
  double total = 0.0;      // gain_term + kl_term
};

// Population prior and target distributions, both normalized over Z, plus
// the cached KL term.
class InfoRmiaPopulation {
 public:
  static absl::StatusOr<InfoRmiaPopulation> Create(
      const PopulationDataset& population, const AttackConfig& config);

  // Builds from already-estimated per-point priors and target probabilities.
  static absl::StatusOr<InfoRmiaPopulation> FromProbabilities(
      std::span<const double> priors, std::span<const double> targets,
      LogBase base);

  const WeightVector& prior() const { return prior_; }
  const WeightVector& target() const { return target_; }
  double kl_term() const { return kl_term_; }
  LogBase base() const { return base_; }
  size_t size() const { return prior_.size(); }

 private:
  InfoRmiaPopulation(WeightVector prior, WeightVector target, double kl_term,
                     LogBase base)
      : prior_(std::move(prior)),
        target_(std::move(target)),
        kl_term_(kl_term),
        base_(base) {}

  WeightVector prior_;
  WeightVector target_;
  double kl_term_;
  LogBase base_;
};

// Decomposed form: gain term plus the cached KL term.
InfoRmiaScoreParts InfoRmiaPartsFromProbabilities(
    double p_x_target, double p_x_prior, const InfoRmiaPopulation& population);

// Undecomposed form, summed term by term over z.
double InfoRmiaDirectFromProbabilities(double p_x_target, double p_x_prior,
                                       const InfoRmiaPopulation& population);

// Like the direct form but weighting each z by `raw_weights` without
// normalizing them. Orders records identically to the normalized score for a
// fixed model and population; the values themselves are not comparable.
absl::StatusOr<double> InfoRmiaUnnormalizedFromProbabilities(
    double p_x_target, double p_x_prior, const InfoRmiaPopulation& population,
    std::span<const double> raw_weights);

absl::StatusOr<InfoRmiaScoreParts> InfoRmiaScore(
    const SequenceSignal& x, const PopulationDataset& population,
    const AttackConfig& config);

absl::StatusOr<double> InfoRmiaScoreDirect(const SequenceSignal& x,
                                           const PopulationDataset& population,
                                           const AttackConfig& config);

absl::StatusOr<double> InfoRmiaScoreUnnormalized(
    const SequenceSignal& x, const PopulationDataset& population,
    std::span<const double> raw_weights, const AttackConfig& config);

// Scores many records against one population.
class InfoRmiaScorer {
 public:
  static absl::StatusOr<InfoRmiaScorer> Create(
      const PopulationDataset& population, const AttackConfig& config);

  absl::StatusOr<InfoRmiaScoreParts> Score(const SequenceSignal& x) const;
  absl::StatusOr<double> ScoreDirect(const SequenceSignal& x) const;
  absl::StatusOr<double> ScoreUnnormalized(
      const SequenceSignal& x, std::span<const double> raw_weights) const;

  const InfoRmiaPopulation& population() const { return population_; }
  // Unnormalized prior estimates of each population point, in file order.
  std::span<const double> raw_priors() const { return raw_priors_; }

 private:
  InfoRmiaScorer(InfoRmiaPopulation population, std::vector<double> raw_priors,
                 AttackConfig config)
      : population_(std::move(population)),
        raw_priors_(std::move(raw_priors)),
        config_(config) {}

  InfoRmiaPopulation population_;
  std::vector<double> raw_priors_;
  AttackConfig config_;
};

}  // namespace leakscope

#endif  // LEAKSCOPE_INFORMIA_SEQUENCE_H_
