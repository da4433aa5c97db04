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

#include "leakscope/informia_sequence.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "leakscope/base/status_macros.h"
#include "leakscope/rmia.h"

namespace leakscope {
namespace {

double SafeLog(double p) { return std::log(std::max(p, kProbabilityFloor)); }

// log p(theta|x) - log p(theta|z) up to the shared model evidence, in nats.
double LogPosteriorRatio(double log_gain_x, const InfoRmiaPopulation& population,
                         size_t z) {
  return log_gain_x + SafeLog(population.prior()[z]) -
         SafeLog(population.target()[z]);
}

double LogGain(double p_x_target, double p_x_prior) {
  return SafeLog(p_x_target) - SafeLog(p_x_prior);
}

struct RecordProbabilities {
  double target;
  double prior;
};

absl::StatusOr<RecordProbabilities> ProbabilitiesOf(const SequenceSignal& x,
                                                    const AttackConfig& config) {
  auto prior = EstimatePrior(x.p_refs, config);
  if (!prior.ok()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("record '%s': %s", x.id, prior.status().message()));
  }
  return RecordProbabilities{x.p_target, *prior};
}

}  // namespace

absl::StatusOr<InfoRmiaPopulation> InfoRmiaPopulation::FromProbabilities(
    std::span<const double> priors, std::span<const double> targets,
    LogBase base) {
  if (priors.empty()) {
    return absl::InvalidArgumentError("InfoRMIA needs a non-empty population");
  }
  if (priors.size() != targets.size()) {
    return absl::InvalidArgumentError("population prior/target size mismatch");
  }
  ASSIGN_OR_RETURN(WeightVector prior, Normalize(priors));
  ASSIGN_OR_RETURN(WeightVector target, Normalize(targets));
  ASSIGN_OR_RETURN(double kl, KlDivergence(prior, target, base));
  return InfoRmiaPopulation(std::move(prior), std::move(target), kl, base);
}

absl::StatusOr<InfoRmiaPopulation> InfoRmiaPopulation::Create(
    const PopulationDataset& population, const AttackConfig& config) {
  RETURN_IF_ERROR(config.Validate());
  std::vector<double> priors;
  std::vector<double> targets;
  priors.reserve(population.records.size());
  targets.reserve(population.records.size());
  for (const PopulationSignal& z : population.records) {
    ASSIGN_OR_RETURN(double prior, EstimatePrior(z.p_refs, config));
    priors.push_back(prior);
    targets.push_back(z.p_target);
  }
  return FromProbabilities(priors, targets, config.log_base);
}

InfoRmiaScoreParts InfoRmiaPartsFromProbabilities(
    double p_x_target, double p_x_prior, const InfoRmiaPopulation& population) {
  InfoRmiaScoreParts parts;
  parts.gain_term = LogGain(p_x_target, p_x_prior) / LnOfBase(population.base());
  parts.kl_term = population.kl_term();
  parts.total = parts.gain_term + parts.kl_term;
  return parts;
}

double InfoRmiaDirectFromProbabilities(double p_x_target, double p_x_prior,
                                       const InfoRmiaPopulation& population) {
  const double log_gain = LogGain(p_x_target, p_x_prior);
  CompensatedSum sum;
  for (size_t z = 0; z < population.size(); ++z) {
    sum.Add(population.prior()[z] * LogPosteriorRatio(log_gain, population, z));
  }
  return sum.Total() / LnOfBase(population.base());
}

absl::StatusOr<double> InfoRmiaUnnormalizedFromProbabilities(
    double p_x_target, double p_x_prior, const InfoRmiaPopulation& population,
    std::span<const double> raw_weights) {
  if (raw_weights.size() != population.size()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "%d raw weights for a population of %d", raw_weights.size(),
        population.size()));
  }
  for (double w : raw_weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      return absl::InvalidArgumentError(
          "unnormalized InfoRMIA weights must be finite and positive");
    }
  }
  const double log_gain = LogGain(p_x_target, p_x_prior);
  CompensatedSum sum;
  for (size_t z = 0; z < population.size(); ++z) {
    sum.Add(raw_weights[z] * LogPosteriorRatio(log_gain, population, z));
  }
  return sum.Total() / LnOfBase(population.base());
}

absl::StatusOr<InfoRmiaScorer> InfoRmiaScorer::Create(
    const PopulationDataset& population, const AttackConfig& config) {
  RETURN_IF_ERROR(config.Validate());
  std::vector<double> raw_priors;
  raw_priors.reserve(population.records.size());
  for (const PopulationSignal& z : population.records) {
    ASSIGN_OR_RETURN(double prior, EstimatePrior(z.p_refs, config));
    raw_priors.push_back(prior);
  }
  ASSIGN_OR_RETURN(InfoRmiaPopulation normalized,
                   InfoRmiaPopulation::Create(population, config));
  return InfoRmiaScorer(std::move(normalized), std::move(raw_priors), config);
}

absl::StatusOr<InfoRmiaScoreParts> InfoRmiaScorer::Score(
    const SequenceSignal& x) const {
  if (!config_.normalize_population) {
    return absl::FailedPreconditionError(
        "the decomposed InfoRMIA score needs a normalized population; use the "
        "unnormalized variant instead");
  }
  ASSIGN_OR_RETURN(RecordProbabilities p, ProbabilitiesOf(x, config_));
  return InfoRmiaPartsFromProbabilities(p.target, p.prior, population_);
}

absl::StatusOr<double> InfoRmiaScorer::ScoreDirect(
    const SequenceSignal& x) const {
  if (!config_.normalize_population) {
    return absl::FailedPreconditionError(
        "the direct InfoRMIA score needs a normalized population");
  }
  ASSIGN_OR_RETURN(RecordProbabilities p, ProbabilitiesOf(x, config_));
  return InfoRmiaDirectFromProbabilities(p.target, p.prior, population_);
}

absl::StatusOr<double> InfoRmiaScorer::ScoreUnnormalized(
    const SequenceSignal& x, std::span<const double> raw_weights) const {
  ASSIGN_OR_RETURN(RecordProbabilities p, ProbabilitiesOf(x, config_));
  return InfoRmiaUnnormalizedFromProbabilities(p.target, p.prior, population_,
                                               raw_weights);
}

absl::StatusOr<InfoRmiaScoreParts> InfoRmiaScore(
    const SequenceSignal& x, const PopulationDataset& population,
    const AttackConfig& config) {
  ASSIGN_OR_RETURN(InfoRmiaScorer scorer,
                   InfoRmiaScorer::Create(population, config));
  return scorer.Score(x);
}

absl::StatusOr<double> InfoRmiaScoreDirect(const SequenceSignal& x,
                                           const PopulationDataset& population,
                                           const AttackConfig& config) {
  ASSIGN_OR_RETURN(InfoRmiaScorer scorer,
                   InfoRmiaScorer::Create(population, config));
  return scorer.ScoreDirect(x);
}

absl::StatusOr<double> InfoRmiaScoreUnnormalized(
    const SequenceSignal& x, const PopulationDataset& population,
    std::span<const double> raw_weights, const AttackConfig& config) {
  ASSIGN_OR_RETURN(InfoRmiaScorer scorer,
                   InfoRmiaScorer::Create(population, config));
  return scorer.ScoreUnnormalized(x, raw_weights);
}

}  // namespace leakscope
