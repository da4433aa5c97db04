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

#include "leakscope/scoring.h"

#include <functional>
#include <optional>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/string_view.h"
#include "leakscope/base/status_macros.h"
#include "leakscope/baselines.h"
#include "leakscope/informia_sequence.h"
#include "leakscope/rmia.h"

namespace leakscope {
namespace {

struct AttackName {
  AttackKind kind;
  absl::string_view name;
};

constexpr AttackName kAttackNames[] = {
    {AttackKind::kRmia, "rmia"},
    {AttackKind::kInfoRmia, "informia"},
    {AttackKind::kInfoRmiaToken, "informia-token"},
    {AttackKind::kLoss, "loss"},
    {AttackKind::kZlib, "zlib"},
    {AttackKind::kMinK, "mink"},
    {AttackKind::kMinKPlusPlus, "minkpp"},
    {AttackKind::kRef, "ref"},
};

absl::StatusOr<ScoreSet> ScoreEach(
    const EvaluationDataset& dataset, absl::string_view name,
    const std::function<absl::StatusOr<double>(const SequenceSignal&)>& score) {
  ScoreSet out{std::string(name)};
  for (const SequenceSignal& rec : dataset.records) {
    ASSIGN_OR_RETURN(double s, score(rec));
    RETURN_IF_ERROR(out.Add(rec.id, s));
  }
  return out;
}

}  // namespace

absl::StatusOr<AttackKind> ParseAttackKind(absl::string_view name) {
  for (const AttackName& a : kAttackNames) {
    if (a.name == name) return a.kind;
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown attack '", name, "'"));
}

absl::string_view AttackKindName(AttackKind kind) {
  for (const AttackName& a : kAttackNames) {
    if (a.kind == kind) return a.name;
  }
  return "unknown";
}

bool NeedsPopulation(AttackKind kind) {
  return kind == AttackKind::kRmia || kind == AttackKind::kInfoRmia;
}

bool NeedsTokens(AttackKind kind) {
  return !NeedsPopulation(kind);
}

absl::StatusOr<ScoreSet> RunAttack(const EvaluationDataset& dataset,
                                   const ScoreRequest& request) {
  RETURN_IF_ERROR(request.config.Validate());
  const AttackConfig& config = request.config;
  const absl::string_view name = AttackKindName(request.attack);
  if (NeedsPopulation(request.attack) && request.population == nullptr) {
    return absl::InvalidArgumentError(
        absl::StrCat(name, " needs a population dataset"));
  }
  if (NeedsTokens(request.attack)) {
    for (const SequenceSignal& rec : dataset.records) {
      if (!rec.has_tokens()) {
        return absl::FailedPreconditionError(absl::StrCat(
            name, " needs token blocks; record '", rec.id, "' has none"));
      }
    }
  }

  switch (request.attack) {
    case AttackKind::kRmia: {
      ASSIGN_OR_RETURN(RmiaScorer scorer,
                       RmiaScorer::Create(*request.population, config));
      return ScoreEach(dataset, name, [&](const SequenceSignal& rec) {
        return scorer.Score(rec);
      });
    }
    case AttackKind::kInfoRmia: {
      ASSIGN_OR_RETURN(InfoRmiaScorer scorer,
                       InfoRmiaScorer::Create(*request.population, config));
      if (!config.normalize_population) {
        const std::vector<double> raw(scorer.raw_priors().begin(),
                                      scorer.raw_priors().end());
        return ScoreEach(dataset, name, [&](const SequenceSignal& rec) {
          return scorer.ScoreUnnormalized(rec, raw);
        });
      }
      return ScoreEach(dataset, name,
                       [&](const SequenceSignal& rec) -> absl::StatusOr<double> {
                         ASSIGN_OR_RETURN(InfoRmiaScoreParts parts,
                                          scorer.Score(rec));
                         return parts.total;
                       });
    }
    case AttackKind::kInfoRmiaToken: {
      ScoreSet out{std::string(name)};
      for (const SequenceSignal& rec : dataset.records) {
        ASSIGN_OR_RETURN(TokenSequenceScore s,
                         ScoreSequenceViaTokens(rec, request.aggregation, config));
        RETURN_IF_ERROR(out.Add(rec.id, s.sequence_score, std::move(s.token_scores)));
      }
      return out;
    }
    case AttackKind::kLoss:
      return ScoreEach(dataset, name, LossAttack);
    case AttackKind::kZlib:
      return ScoreEach(dataset, name, [](const SequenceSignal& rec) {
        return ZlibAttack(rec);
      });
    case AttackKind::kMinK:
      return ScoreEach(dataset, name, [&](const SequenceSignal& rec) {
        return MinKAttack(rec, config.k_percent);
      });
    case AttackKind::kMinKPlusPlus:
      return ScoreEach(dataset, name, [&](const SequenceSignal& rec) {
        return MinKPlusPlusAttack(rec, config.k_percent);
      });
    case AttackKind::kRef:
      return ScoreEach(dataset, name, [&](const SequenceSignal& rec) {
        return RefAttack(rec, request.ref_index);
      });
  }
  return absl::InternalError("unhandled attack kind");
}

}  // namespace leakscope
