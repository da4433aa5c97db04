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

// Reference-free and reference-based baseline attacks over ground-truth token
// log-probabilities. All scores are member-positive: MIMIR's "lower is more
// member-like" scores are negated where needed.

#ifndef LEAKSCOPE_BASELINES_H_
#define LEAKSCOPE_BASELINES_H_

#include <cstdint>

#include "absl/container/flat_hash_map.h"
#include "absl/status/statusor.h"
#include "leakscope/data_model.h"

namespace leakscope {

// Token id -> corpus frequency. Reserved for frequency-calibrated baselines.
struct FrequencyTable {
  absl::flat_hash_map<int64_t, double> frequencies;
};

// Floor applied to the per-position standard deviation in Min-K%++.
inline constexpr double kMinKPlusPlusSigmaFloor = 1e-8;

// Mean ground-truth log-probability (negated mean loss).
absl::StatusOr<double> LossAttack(const SequenceSignal& record);

// Summed ground-truth log-probability over the compressed text length.
absl::StatusOr<double> ZlibAttack(const SequenceSignal& record,
                                  int64_t compressed_bytes);

// Uses the record's stored zlib_bytes.
absl::StatusOr<double> ZlibAttack(const SequenceSignal& record);

// Mean of the lowest k% ground-truth log-probabilities.
absl::StatusOr<double> MinKAttack(const SequenceSignal& record, double k_percent);

// Min-K% over (logprob - mu) / max(sigma, 1e-8) per position.
absl::StatusOr<double> MinKPlusPlusAttack(const SequenceSignal& record,
                                          double k_percent);

// Mean of target minus reference log-probability over positions.
absl::StatusOr<double> RefAttack(const SequenceSignal& record, size_t ref_index);

}  // namespace leakscope

#endif  // LEAKSCOPE_BASELINES_H_
