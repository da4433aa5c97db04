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

// Runs one attack over an evaluation dataset and collects a ScoreSet.

#ifndef LEAKSCOPE_SCORING_H_
#define LEAKSCOPE_SCORING_H_


#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "leakscope/data_model.h"
#include "leakscope/informia_token.h"

namespace leakscope {

enum class AttackKind {
  kRmia,
  kInfoRmia,
  kInfoRmiaToken,
  kLoss,
  kZlib,
  kMinK,
  kMinKPlusPlus,
  kRef,
};

absl::StatusOr<AttackKind> ParseAttackKind(absl::string_view name);
absl::string_view AttackKindName(AttackKind kind);

bool NeedsPopulation(AttackKind kind);
bool NeedsTokens(AttackKind kind);

struct ScoreRequest {
  AttackKind attack = AttackKind::kInfoRmia;
  AttackConfig config;
  TokenAggregation aggregation = TokenAggregation::kMean;
  size_t ref_index = 0;
  // Required by RMIA and sequence-level InfoRMIA.
  const PopulationDataset* population = nullptr;
};

// Scores every record in file order. Token-level InfoRMIA also stores the
// per-position scores. Sequence-level InfoRMIA with normalize_population off
// weights the population by the raw prior estimates.
absl::StatusOr<ScoreSet> RunAttack(const EvaluationDataset& dataset,
                                   const ScoreRequest& request);

}  // namespace leakscope

#endif  // LEAKSCOPE_SCORING_H_
