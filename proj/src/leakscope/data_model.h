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

// Domain types for evaluation and population signals, the JSONL schema that
// carries them, and load-time validation.
//
// File layout: the first line is a header object
//   {"schema":"leakscope/1","seq_signal":"geo_mean","log":"nat"}
// followed by one record object per line. Field names match the struct
// members below. Stored log-probabilities are natural logs.

#ifndef LEAKSCOPE_DATA_MODEL_H_
#define LEAKSCOPE_DATA_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "leakscope/prob_algebra.h"

namespace leakscope {

inline constexpr absl::string_view kSchemaVersion = "leakscope/1";

enum class MembershipLabel { kMember, kNonmember, kUnknown };

absl::string_view LabelName(MembershipLabel label);
absl::StatusOr<MembershipLabel> ParseLabel(absl::string_view name);

// How the producer defined the sequence-level probability.
enum class SequenceConvention { kTrueClass, kGeoMean, kOther };

absl::string_view ConventionName(SequenceConvention convention);

struct DatasetHeader {
  SequenceConvention seq_signal = SequenceConvention::kOther;
};

// Signals for one predicted position of a sequence.
struct TokenSignal {
  double gt_logprob_target = 0.0;
  std::vector<double> gt_logprob_refs;
  // Moments of log p(v|target) under v ~ p(.|target); consumed by Min-K%++.
  std::optional<double> mu_target;
  std::optional<double> sigma_target;
  // KL(mean reference distribution || target distribution), in nats.
  std::optional<double> kl_refavg_target;
  // Vocabulary index of the ground-truth token; required to evaluate the
  // excluded-ground-truth form from full distributions.
  std::optional<int64_t> gt_token_id;
  // Dense next-token distributions, for small verification fixtures.
  std::optional<std::vector<double>> full_dist_target;
  std::optional<std::vector<std::vector<double>>> full_dist_refs;

  bool has_full_distributions() const {
    return full_dist_target.has_value() && full_dist_refs.has_value();
  }
};

struct SequenceSignal {
  std::string id;
  MembershipLabel label = MembershipLabel::kUnknown;
  double p_target = 1.0;
  std::vector<double> p_refs;
  // Positions 1..k-1 of a length-k sequence. Empty means no token block.
  std::vector<TokenSignal> tokens;
  // k entries when present; index 0 is the unscored first token.
  std::optional<std::vector<std::string>> token_texts;
  std::optional<std::vector<std::string>> tags;
  std::optional<std::vector<bool>> priv_mask;
  // DEFLATE-compressed byte length of the raw text, computed at ingestion.
  std::optional<int64_t> zlib_bytes;

  bool has_tokens() const { return !tokens.empty(); }
};

struct PopulationSignal {
  std::string id;
  double p_target = 1.0;
  std::vector<double> p_refs;
};

template <typename Record>
struct Dataset {
  DatasetHeader header;
  std::vector<Record> records;
  // Number of probabilities raised to the epsilon floor during load.
  int64_t floored_values = 0;
};

using EvaluationDataset = Dataset<SequenceSignal>;
using PopulationDataset = Dataset<PopulationSignal>;

// Attack hyperparameters shared across modules.
struct AttackConfig {
  double gamma = 2.0;             // RMIA threshold, >= 1
  double a = 1.0;                 // offline prior interpolation, in [0, 1]
  double k_percent = 20.0;        // Min-K family and min-k aggregation
  LogBase log_base = LogBase::kTwo;
  bool normalize_population = true;
  double epsilon_floor = kProbabilityFloor;

  absl::Status Validate() const;
};

struct LoadOptions {
  double epsilon_floor = kProbabilityFloor;
};

// Loaded records keep file order. Fails on the first malformed line, with the
// 1-based line number in the message.
absl::StatusOr<EvaluationDataset> LoadEvaluationDataset(
    const std::filesystem::path& path, const LoadOptions& options = {});
absl::StatusOr<PopulationDataset> LoadPopulationDataset(
    const std::filesystem::path& path, const LoadOptions& options = {});

absl::StatusOr<EvaluationDataset> ParseEvaluationDataset(
    std::istream& in, const LoadOptions& options = {});
absl::StatusOr<PopulationDataset> ParsePopulationDataset(
    std::istream& in, const LoadOptions& options = {});

void WriteEvaluationDataset(const EvaluationDataset& dataset, std::ostream& out);
void WritePopulationDataset(const PopulationDataset& dataset, std::ostream& out);

// Checks length alignment and value ranges of one record. Called by the
// loaders; exposed for records built in code.
absl::Status ValidateSequenceSignal(const SequenceSignal& record);

struct TokenBlockReport {
  int64_t positions_checked = 0;
  double max_abs_deviation = 0.0;
};

// Recomputes mu, sigma and the reference-average KL from full distributions
// and compares them with the stored values. Positions without full
// distributions are skipped.
absl::StatusOr<TokenBlockReport> ValidateTokenBlock(
    const SequenceSignal& record, double tolerance = 1e-6);

// Moments and divergence of one position recomputed from full distributions.
struct TokenMoments {
  double mu = 0.0;
  double sigma = 0.0;
  double kl_refavg_target = 0.0;  // nats
};
absl::StatusOr<TokenMoments> RecomputeTokenMoments(const TokenSignal& token);

// Member/nonmember labels by id; unknown labels are left out.
absl::flat_hash_map<std::string, MembershipLabel> CollectLabels(
    const EvaluationDataset& dataset);

// Membership scores of one attack. Higher is more member-like. Entries keep
// insertion order.
class ScoreSet {
 public:
  struct Entry {
    std::string id;
    double score = 0.0;
    // One per predicted position; empty for sequence-only attacks.
    std::vector<double> token_scores;
  };

  ScoreSet() = default;
  explicit ScoreSet(std::string attack_name)
      : attack_name_(std::move(attack_name)) {}

  // Rejects duplicate ids and non-finite values.
  absl::Status Add(std::string id, double score,
                   std::vector<double> token_scores = {});

  const std::string& attack_name() const { return attack_name_; }
  const std::vector<Entry>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool has_token_scores() const;
  const Entry* Find(absl::string_view id) const;

 private:
  std::string attack_name_;
  std::vector<Entry> entries_;
  absl::flat_hash_map<std::string, size_t> index_;
};

}  // namespace leakscope

#endif  // LEAKSCOPE_DATA_MODEL_H_
