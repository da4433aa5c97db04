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

#include "leakscope/baselines.h"

#include <algorithm>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "leakscope/informia_token.h"
#include "leakscope/prob_algebra.h"

namespace leakscope {
namespace {

absl::Status NeedTokens(const SequenceSignal& record) {
  if (!record.has_tokens()) {
    return absl::FailedPreconditionError(
        absl::StrCat("record '", record.id, "' has no token block"));
  }
  return absl::OkStatus();
}

std::vector<double> TargetLogprobs(const SequenceSignal& record) {
  std::vector<double> out;
  out.reserve(record.tokens.size());
  for (const TokenSignal& t : record.tokens) out.push_back(t.gt_logprob_target);
  return out;
}

}  // namespace

absl::StatusOr<double> LossAttack(const SequenceSignal& record) {
  if (absl::Status s = NeedTokens(record); !s.ok()) return s;
  return AggregateMean(TargetLogprobs(record));
}

absl::StatusOr<double> ZlibAttack(const SequenceSignal& record,
                                  int64_t compressed_bytes) {
  if (absl::Status s = NeedTokens(record); !s.ok()) return s;
  if (compressed_bytes < 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "record '%s': compressed length must be >= 1", record.id));
  }
  return Sum(TargetLogprobs(record)) / static_cast<double>(compressed_bytes);
}

absl::StatusOr<double> ZlibAttack(const SequenceSignal& record) {
  if (!record.zlib_bytes) {
    return absl::FailedPreconditionError(
        absl::StrCat("record '", record.id, "' has no zlib_bytes"));
  }
  return ZlibAttack(record, *record.zlib_bytes);
}

absl::StatusOr<double> MinKAttack(const SequenceSignal& record,
                                  double k_percent) {
  if (absl::Status s = NeedTokens(record); !s.ok()) return s;
  return AggregateMinK(TargetLogprobs(record), k_percent);
}

absl::StatusOr<double> MinKPlusPlusAttack(const SequenceSignal& record,
                                          double k_percent) {
  if (absl::Status s = NeedTokens(record); !s.ok()) return s;
  std::vector<double> normalized;
  normalized.reserve(record.tokens.size());
  for (size_t i = 0; i < record.tokens.size(); ++i) {
    const TokenSignal& t = record.tokens[i];
    if (!t.mu_target || !t.sigma_target) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "record '%s' token %d: Min-K%%++ needs mu_target and sigma_target",
          record.id, i + 1));
    }
    normalized.push_back((t.gt_logprob_target - *t.mu_target) /
                         std::max(*t.sigma_target, kMinKPlusPlusSigmaFloor));
  }
  return AggregateMinK(normalized, k_percent);
}

absl::StatusOr<double> RefAttack(const SequenceSignal& record, size_t ref_index) {
  if (absl::Status s = NeedTokens(record); !s.ok()) return s;
  std::vector<double> gaps;
  gaps.reserve(record.tokens.size());
  for (size_t i = 0; i < record.tokens.size(); ++i) {
    const TokenSignal& t = record.tokens[i];
    if (ref_index >= t.gt_logprob_refs.size()) {
      return absl::OutOfRangeError(absl::StrFormat(
          "record '%s' token %d: reference index %d out of %d references",
          record.id, i + 1, ref_index, t.gt_logprob_refs.size()));
    }
    gaps.push_back(t.gt_logprob_target - t.gt_logprob_refs[ref_index]);
  }
  return AggregateMean(gaps);
}

}  // namespace leakscope
