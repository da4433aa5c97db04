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

#include "leakscope/data_model.h"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <utility>

#include "absl/container/flat_hash_set.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/string_view.h"
#include "json.hpp"
#include "leakscope/base/status_macros.h"

namespace leakscope {
namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

// Tolerance for stored distributions shipped by producers.
constexpr double kStoredDistributionTolerance = 1e-6;

absl::Status FieldError(absl::string_view field, absl::string_view problem) {
  return absl::InvalidArgumentError(absl::StrCat("field '", field, "' ", problem));
}

absl::StatusOr<const Json*> Required(const Json& obj, absl::string_view field) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) {
    return FieldError(field, "is missing");
  }
  return &*it;
}

const Json* Optional(const Json& obj, absl::string_view field) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

absl::StatusOr<double> AsDouble(const Json& value, absl::string_view field) {
  if (!value.is_number()) return FieldError(field, "must be a number");
  return value.get<double>();
}

absl::StatusOr<std::vector<double>> AsDoubleArray(const Json& value,
                                                  absl::string_view field) {
  if (!value.is_array()) return FieldError(field, "must be an array");
  std::vector<double> out;
  out.reserve(value.size());
  for (const Json& v : value) {
    if (!v.is_number()) return FieldError(field, "must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

absl::StatusOr<std::vector<std::string>> AsStringArray(const Json& value,
                                                       absl::string_view field) {
  if (!value.is_array()) return FieldError(field, "must be an array");
  std::vector<std::string> out;
  out.reserve(value.size());
  for (const Json& v : value) {
    if (!v.is_string()) return FieldError(field, "must contain only strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

absl::StatusOr<std::string> AsString(const Json& value, absl::string_view field) {
  if (!value.is_string()) return FieldError(field, "must be a string");
  return value.get<std::string>();
}

absl::StatusOr<int64_t> AsInteger(const Json& value, absl::string_view field) {
  if (!value.is_number_integer()) return FieldError(field, "must be an integer");
  return value.get<int64_t>();
}

// Applies the epsilon floor. Values outside [0, 1] are rejected.
absl::StatusOr<double> FloorProbability(double p, absl::string_view field,
                                        double floor, int64_t& floored) {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    return FieldError(field, absl::StrFormat("holds %g, outside (0, 1]", p));
  }
  if (p < floor) {
    ++floored;
    return floor;
  }
  return p;
}

absl::Status ParseProbabilities(const Json& obj, double floor, int64_t& floored,
                                double& p_target, std::vector<double>& p_refs) {
  ASSIGN_OR_RETURN(const Json* target_json, Required(obj, "p_target"));
  ASSIGN_OR_RETURN(double target, AsDouble(*target_json, "p_target"));
  ASSIGN_OR_RETURN(p_target,
                   FloorProbability(target, "p_target", floor, floored));
  ASSIGN_OR_RETURN(const Json* refs_json, Required(obj, "p_refs"));
  ASSIGN_OR_RETURN(p_refs, AsDoubleArray(*refs_json, "p_refs"));
  if (p_refs.empty()) return FieldError("p_refs", "must not be empty");
  for (double& p : p_refs) {
    ASSIGN_OR_RETURN(p, FloorProbability(p, "p_refs", floor, floored));
  }
  return absl::OkStatus();
}

absl::StatusOr<TokenSignal> ParseToken(const Json& obj) {
  if (!obj.is_object()) return FieldError("tokens", "must hold objects");
  TokenSignal token;
  ASSIGN_OR_RETURN(const Json* gt, Required(obj, "gt_logprob_target"));
  ASSIGN_OR_RETURN(token.gt_logprob_target, AsDouble(*gt, "gt_logprob_target"));
  if (const Json* refs = Optional(obj, "gt_logprob_refs")) {
    ASSIGN_OR_RETURN(token.gt_logprob_refs,
                     AsDoubleArray(*refs, "gt_logprob_refs"));
  }
  if (const Json* v = Optional(obj, "mu_target")) {
    ASSIGN_OR_RETURN(token.mu_target, AsDouble(*v, "mu_target"));
  }
  if (const Json* v = Optional(obj, "sigma_target")) {
    ASSIGN_OR_RETURN(token.sigma_target, AsDouble(*v, "sigma_target"));
  }
  if (const Json* v = Optional(obj, "kl_refavg_target")) {
    ASSIGN_OR_RETURN(token.kl_refavg_target, AsDouble(*v, "kl_refavg_target"));
  }
  if (const Json* v = Optional(obj, "gt_token_id")) {
    ASSIGN_OR_RETURN(token.gt_token_id, AsInteger(*v, "gt_token_id"));
  }
  if (const Json* v = Optional(obj, "full_dist_target")) {
    ASSIGN_OR_RETURN(token.full_dist_target,
                     AsDoubleArray(*v, "full_dist_target"));
  }
  if (const Json* v = Optional(obj, "full_dist_refs")) {
    if (!v->is_array()) return FieldError("full_dist_refs", "must be an array");
    std::vector<std::vector<double>> refs;
    for (const Json& dist : *v) {
      ASSIGN_OR_RETURN(std::vector<double> d,
                       AsDoubleArray(dist, "full_dist_refs"));
      refs.push_back(std::move(d));
    }
    token.full_dist_refs = std::move(refs);
  }
  return token;
}

absl::StatusOr<SequenceSignal> ParseSequence(const Json& obj, double floor,
                                             int64_t& floored) {
  SequenceSignal rec;
  ASSIGN_OR_RETURN(const Json* id, Required(obj, "id"));
  ASSIGN_OR_RETURN(rec.id, AsString(*id, "id"));
  if (const Json* label = Optional(obj, "label")) {
    ASSIGN_OR_RETURN(std::string name, AsString(*label, "label"));
    ASSIGN_OR_RETURN(rec.label, ParseLabel(name));
  }
  RETURN_IF_ERROR(ParseProbabilities(obj, floor, floored, rec.p_target,
                                     rec.p_refs));
  if (const Json* tokens = Optional(obj, "tokens")) {
    if (!tokens->is_array()) return FieldError("tokens", "must be an array");
    if (tokens->empty()) return FieldError("tokens", "must not be empty");
    rec.tokens.reserve(tokens->size());
    for (const Json& t : *tokens) {
      ASSIGN_OR_RETURN(TokenSignal token, ParseToken(t));
      rec.tokens.push_back(std::move(token));
    }
  }
  if (const Json* v = Optional(obj, "token_texts")) {
    ASSIGN_OR_RETURN(rec.token_texts, AsStringArray(*v, "token_texts"));
  }
  if (const Json* v = Optional(obj, "tags")) {
    ASSIGN_OR_RETURN(rec.tags, AsStringArray(*v, "tags"));
  }
  if (const Json* v = Optional(obj, "priv_mask")) {
    if (!v->is_array()) return FieldError("priv_mask", "must be an array");
    std::vector<bool> mask;
    for (const Json& b : *v) {
      if (!b.is_boolean()) return FieldError("priv_mask", "must hold booleans");
      mask.push_back(b.get<bool>());
    }
    rec.priv_mask = std::move(mask);
  }
  if (const Json* v = Optional(obj, "zlib_bytes")) {
    ASSIGN_OR_RETURN(rec.zlib_bytes, AsInteger(*v, "zlib_bytes"));
  }
  return rec;
}

absl::StatusOr<PopulationSignal> ParsePopulation(const Json& obj, double floor,
                                                 int64_t& floored) {
  PopulationSignal rec;
  ASSIGN_OR_RETURN(const Json* id, Required(obj, "id"));
  ASSIGN_OR_RETURN(rec.id, AsString(*id, "id"));
  RETURN_IF_ERROR(ParseProbabilities(obj, floor, floored, rec.p_target,
                                     rec.p_refs));
  return rec;
}

absl::StatusOr<DatasetHeader> ParseHeader(const Json& obj) {
  if (!obj.is_object()) return absl::InvalidArgumentError("header must be an object");
  ASSIGN_OR_RETURN(const Json* schema, Required(obj, "schema"));
  ASSIGN_OR_RETURN(std::string version, AsString(*schema, "schema"));
  if (version != kSchemaVersion) {
    return absl::InvalidArgumentError(
        absl::StrCat("unsupported schema '", version, "', expected '",
                     kSchemaVersion, "'"));
  }
  DatasetHeader header;
  ASSIGN_OR_RETURN(const Json* seq, Required(obj, "seq_signal"));
  ASSIGN_OR_RETURN(std::string convention, AsString(*seq, "seq_signal"));
  if (convention == "true_class") {
    header.seq_signal = SequenceConvention::kTrueClass;
  } else if (convention == "geo_mean") {
    header.seq_signal = SequenceConvention::kGeoMean;
  } else if (convention == "other") {
    header.seq_signal = SequenceConvention::kOther;
  } else {
    return FieldError("seq_signal", absl::StrCat("has unknown value '",
                                                 convention, "'"));
  }
  ASSIGN_OR_RETURN(const Json* log, Required(obj, "log"));
  ASSIGN_OR_RETURN(std::string log_name, AsString(*log, "log"));
  if (log_name != "nat") {
    return FieldError("log", "must be \"nat\"; stored log-probabilities are natural logs");
  }
  return header;
}

bool IsBlank(absl::string_view line) {
  return line.find_first_not_of(" \t\r") == absl::string_view::npos;
}

template <typename Record, typename ParseFn, typename ValidateFn>
absl::StatusOr<Dataset<Record>> ParseJsonl(std::istream& in,
                                           const LoadOptions& options,
                                           ParseFn parse, ValidateFn validate) {
  if (!(options.epsilon_floor > 0.0) || options.epsilon_floor > 1.0) {
    return absl::InvalidArgumentError("epsilon floor must lie in (0, 1]");
  }
  Dataset<Record> dataset;
  absl::flat_hash_set<std::string> ids;
  std::string line;
  int64_t line_number = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (IsBlank(line)) continue;
    Json obj = Json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (obj.is_discarded()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("line %d: malformed JSON", line_number));
    }
    if (!have_header) {
      auto header = ParseHeader(obj);
      if (!header.ok()) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "line %d: bad header: %s", line_number, header.status().message()));
      }
      dataset.header = *header;
      have_header = true;
      continue;
    }
    if (!obj.is_object()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("line %d: record must be a JSON object", line_number));
    }
    auto record = parse(obj, options.epsilon_floor, dataset.floored_values);
    if (!record.ok()) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "line %d: %s", line_number, record.status().message()));
    }
    if (absl::Status s = validate(*record); !s.ok()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("line %d: %s", line_number, s.message()));
    }
    if (!ids.insert(record->id).second) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "line %d: duplicate id '%s'", line_number, record->id));
    }
    dataset.records.push_back(*std::move(record));
  }
  if (!have_header) {
    return absl::InvalidArgumentError("missing header line");
  }
  return dataset;
}

absl::Status ValidatePopulationSignal(const PopulationSignal& rec) {
  if (rec.id.empty()) return FieldError("id", "must not be empty");
  return absl::OkStatus();
}

absl::StatusOr<std::ifstream> OpenForRead(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(
        absl::StrCat("cannot open '", path.string(), "' for reading"));
  }
  return in;
}

OrderedJson HeaderJson(const DatasetHeader& header) {
  OrderedJson obj;
  obj["schema"] = kSchemaVersion;
  obj["seq_signal"] = ConventionName(header.seq_signal);
  obj["log"] = "nat";
  return obj;
}

OrderedJson TokenJson(const TokenSignal& t) {
  OrderedJson obj;
  obj["gt_logprob_target"] = t.gt_logprob_target;
  obj["gt_logprob_refs"] = t.gt_logprob_refs;
  if (t.mu_target) obj["mu_target"] = *t.mu_target;
  if (t.sigma_target) obj["sigma_target"] = *t.sigma_target;
  if (t.kl_refavg_target) obj["kl_refavg_target"] = *t.kl_refavg_target;
  if (t.gt_token_id) obj["gt_token_id"] = *t.gt_token_id;
  if (t.full_dist_target) obj["full_dist_target"] = *t.full_dist_target;
  if (t.full_dist_refs) obj["full_dist_refs"] = *t.full_dist_refs;
  return obj;
}

}  // namespace

absl::string_view LabelName(MembershipLabel label) {
  switch (label) {
    case MembershipLabel::kMember:
      return "member";
    case MembershipLabel::kNonmember:
      return "nonmember";
    case MembershipLabel::kUnknown:
      return "unknown";
  }
  return "unknown";
}

absl::StatusOr<MembershipLabel> ParseLabel(absl::string_view name) {
  if (name == "member") return MembershipLabel::kMember;
  if (name == "nonmember") return MembershipLabel::kNonmember;
  if (name == "unknown") return MembershipLabel::kUnknown;
  return FieldError("label", absl::StrCat("has unknown value '", name, "'"));
}

absl::string_view ConventionName(SequenceConvention convention) {
  switch (convention) {
    case SequenceConvention::kTrueClass:
      return "true_class";
    case SequenceConvention::kGeoMean:
      return "geo_mean";
    case SequenceConvention::kOther:
      return "other";
  }
  return "other";
}

absl::Status AttackConfig::Validate() const {
  if (!(gamma >= 1.0) || !std::isfinite(gamma)) {
    return absl::InvalidArgumentError("gamma must be a finite value >= 1");
  }
  if (!(a >= 0.0 && a <= 1.0)) {
    return absl::InvalidArgumentError("a must lie in [0, 1]");
  }
  if (!(k_percent > 0.0 && k_percent <= 100.0)) {
    return absl::InvalidArgumentError("k_percent must lie in (0, 100]");
  }
  if (!(epsilon_floor > 0.0 && epsilon_floor <= 1.0)) {
    return absl::InvalidArgumentError("epsilon_floor must lie in (0, 1]");
  }
  return absl::OkStatus();
}

absl::Status ValidateSequenceSignal(const SequenceSignal& rec) {
  auto in_record = [&rec](absl::Status s) {
    return absl::InvalidArgumentError(
        absl::StrCat("record '", rec.id, "': ", s.message()));
  };
  if (rec.id.empty()) return FieldError("id", "must not be empty");
  if (!(rec.p_target > 0.0 && rec.p_target <= 1.0)) {
    return in_record(FieldError("p_target", "must lie in (0, 1]"));
  }
  if (rec.p_refs.empty()) return in_record(FieldError("p_refs", "must not be empty"));
  for (double p : rec.p_refs) {
    if (!(p > 0.0 && p <= 1.0)) {
      return in_record(FieldError("p_refs", "must lie in (0, 1]"));
    }
  }
  for (size_t i = 0; i < rec.tokens.size(); ++i) {
    const TokenSignal& t = rec.tokens[i];
    auto at = [&](absl::string_view field, absl::string_view problem) {
      return in_record(FieldError(
          field, absl::StrFormat("at token %d %s", i + 1, problem)));
    };
    if (!std::isfinite(t.gt_logprob_target) || t.gt_logprob_target > 0.0) {
      return at("gt_logprob_target", "must be a finite value <= 0");
    }
    for (double v : t.gt_logprob_refs) {
      if (!std::isfinite(v) || v > 0.0) {
        return at("gt_logprob_refs", "must hold finite values <= 0");
      }
    }
    if (t.mu_target && !std::isfinite(*t.mu_target)) {
      return at("mu_target", "must be finite");
    }
    if (t.sigma_target && !(*t.sigma_target >= 0.0)) {
      return at("sigma_target", "must be >= 0");
    }
    if (t.kl_refavg_target && !(*t.kl_refavg_target >= 0.0)) {
      return at("kl_refavg_target", "must be >= 0");
    }
    if (t.full_dist_target.has_value() != t.full_dist_refs.has_value()) {
      return at("full_dist_target", "and full_dist_refs must appear together");
    }
    if (t.has_full_distributions()) {
      const size_t vocab = t.full_dist_target->size();
      if (t.full_dist_refs->empty()) {
        return at("full_dist_refs", "must not be empty");
      }
      std::vector<const std::vector<double>*> dists = {&*t.full_dist_target};
      for (const auto& d : *t.full_dist_refs) dists.push_back(&d);
      for (const auto* d : dists) {
        if (d->size() != vocab || vocab == 0) {
          return at("full_dist_refs", "must match the target vocabulary size");
        }
        if (!WeightVector::FromDistribution(*d, kStoredDistributionTolerance)
                 .ok()) {
          return at("full_dist_target",
                    "distributions must be non-negative and sum to 1 +- 1e-6");
        }
      }
      if (t.gt_token_id &&
          (*t.gt_token_id < 0 || *t.gt_token_id >= static_cast<int64_t>(vocab))) {
        return at("gt_token_id", "is outside the vocabulary");
      }
    }
  }
  size_t aligned_length = 0;
  absl::string_view aligned_with;
  if (rec.token_texts) {
    if (rec.has_tokens() && rec.token_texts->size() != rec.tokens.size() + 1) {
      return in_record(absl::InvalidArgumentError(absl::StrFormat(
          "token_texts has %d entries but %d tokens need %d",
          rec.token_texts->size(), rec.tokens.size(), rec.tokens.size() + 1)));
    }
    aligned_length = rec.token_texts->size();
    aligned_with = "token_texts";
  } else if (rec.has_tokens()) {
    aligned_length = rec.tokens.size() + 1;
    aligned_with = "tokens + 1";
  }
  auto check_aligned = [&](absl::string_view field, size_t size) -> absl::Status {
    if (aligned_with.empty()) {
      return in_record(FieldError(field, "needs token_texts or tokens"));
    }
    if (size != aligned_length) {
      return in_record(absl::InvalidArgumentError(
          absl::StrFormat("%s has %d entries but %s has %d", field, size,
                          aligned_with, aligned_length)));
    }
    return absl::OkStatus();
  };
  if (rec.tags) RETURN_IF_ERROR(check_aligned("tags", rec.tags->size()));
  if (rec.priv_mask) {
    RETURN_IF_ERROR(check_aligned("priv_mask", rec.priv_mask->size()));
  }
  if (rec.zlib_bytes && *rec.zlib_bytes < 1) {
    return in_record(FieldError("zlib_bytes", "must be >= 1"));
  }
  return absl::OkStatus();
}

absl::StatusOr<EvaluationDataset> ParseEvaluationDataset(
    std::istream& in, const LoadOptions& options) {
  return ParseJsonl<SequenceSignal>(in, options, ParseSequence,
                                    ValidateSequenceSignal);
}

absl::StatusOr<PopulationDataset> ParsePopulationDataset(
    std::istream& in, const LoadOptions& options) {
  return ParseJsonl<PopulationSignal>(in, options, ParsePopulation,
                                      ValidatePopulationSignal);
}

absl::StatusOr<EvaluationDataset> LoadEvaluationDataset(
    const std::filesystem::path& path, const LoadOptions& options) {
  ASSIGN_OR_RETURN(std::ifstream in, OpenForRead(path));
  auto dataset = ParseEvaluationDataset(in, options);
  if (!dataset.ok()) {
    return absl::Status(dataset.status().code(),
                        absl::StrCat(path.string(), ": ",
                                     dataset.status().message()));
  }
  return dataset;
}

absl::StatusOr<PopulationDataset> LoadPopulationDataset(
    const std::filesystem::path& path, const LoadOptions& options) {
  ASSIGN_OR_RETURN(std::ifstream in, OpenForRead(path));
  auto dataset = ParsePopulationDataset(in, options);
  if (!dataset.ok()) {
    return absl::Status(dataset.status().code(),
                        absl::StrCat(path.string(), ": ",
                                     dataset.status().message()));
  }
  return dataset;
}

void WriteEvaluationDataset(const EvaluationDataset& dataset, std::ostream& out) {
  out << HeaderJson(dataset.header).dump() << '\n';
  for (const SequenceSignal& rec : dataset.records) {
    OrderedJson obj;
    obj["id"] = rec.id;
    obj["label"] = LabelName(rec.label);
    obj["p_target"] = rec.p_target;
    obj["p_refs"] = rec.p_refs;
    if (rec.has_tokens()) {
      OrderedJson tokens = OrderedJson::array();
      for (const TokenSignal& t : rec.tokens) tokens.push_back(TokenJson(t));
      obj["tokens"] = std::move(tokens);
    }
    if (rec.token_texts) obj["token_texts"] = *rec.token_texts;
    if (rec.tags) obj["tags"] = *rec.tags;
    if (rec.priv_mask) obj["priv_mask"] = *rec.priv_mask;
    if (rec.zlib_bytes) obj["zlib_bytes"] = *rec.zlib_bytes;
    out << obj.dump() << '\n';
  }
}

void WritePopulationDataset(const PopulationDataset& dataset, std::ostream& out) {
  out << HeaderJson(dataset.header).dump() << '\n';
  for (const PopulationSignal& rec : dataset.records) {
    OrderedJson obj;
    obj["id"] = rec.id;
    obj["p_target"] = rec.p_target;
    obj["p_refs"] = rec.p_refs;
    out << obj.dump() << '\n';
  }
}

absl::StatusOr<TokenMoments> RecomputeTokenMoments(const TokenSignal& token) {
  if (!token.has_full_distributions()) {
    return absl::FailedPreconditionError("token has no full distributions");
  }
  const std::vector<double>& target = *token.full_dist_target;
  const auto& refs = *token.full_dist_refs;
  if (refs.empty()) return absl::InvalidArgumentError("no reference distributions");
  const size_t vocab = target.size();

  CompensatedSum mu_sum;
  for (double p : target) {
    if (p > 0.0) mu_sum.Add(p * std::log(p));
  }
  TokenMoments moments;
  moments.mu = mu_sum.Total();
  CompensatedSum var_sum;
  for (double p : target) {
    if (p > 0.0) {
      const double d = std::log(p) - moments.mu;
      var_sum.Add(p * d * d);
    }
  }
  moments.sigma = std::sqrt(std::max(0.0, var_sum.Total()));

  std::vector<double> ref_avg(vocab, 0.0);
  for (size_t v = 0; v < vocab; ++v) {
    CompensatedSum s;
    for (const auto& r : refs) {
      if (r.size() != vocab) {
        return absl::InvalidArgumentError("reference vocabulary size mismatch");
      }
      s.Add(r[v]);
    }
    ref_avg[v] = s.Total() / static_cast<double>(refs.size());
  }
  ASSIGN_OR_RETURN(WeightVector p,
                   WeightVector::FromDistribution(std::move(ref_avg),
                                                  kStoredDistributionTolerance));
  ASSIGN_OR_RETURN(WeightVector q, WeightVector::FromDistribution(
                                       target, kStoredDistributionTolerance));
  ASSIGN_OR_RETURN(moments.kl_refavg_target, KlDivergence(p, q, LogBase::kE));
  return moments;
}

absl::StatusOr<TokenBlockReport> ValidateTokenBlock(const SequenceSignal& record,
                                                    double tolerance) {
  if (!record.has_tokens()) {
    return absl::FailedPreconditionError(
        absl::StrCat("record '", record.id, "' has no token block"));
  }
  TokenBlockReport report;
  for (size_t i = 0; i < record.tokens.size(); ++i) {
    const TokenSignal& token = record.tokens[i];
    if (!token.has_full_distributions()) continue;
    ASSIGN_OR_RETURN(TokenMoments moments, RecomputeTokenMoments(token));
    struct Check {
      absl::string_view field;
      std::optional<double> stored;
      double recomputed;
    };
    std::vector<Check> checks = {
        {"mu_target", token.mu_target, moments.mu},
        {"sigma_target", token.sigma_target, moments.sigma},
        {"kl_refavg_target", token.kl_refavg_target, moments.kl_refavg_target},
    };
    if (token.gt_token_id) {
      const size_t gt = static_cast<size_t>(*token.gt_token_id);
      checks.push_back({"gt_logprob_target", token.gt_logprob_target,
                        std::log((*token.full_dist_target)[gt])});
      for (size_t j = 0; j < token.full_dist_refs->size() &&
                         j < token.gt_logprob_refs.size();
           ++j) {
        checks.push_back({"gt_logprob_refs", token.gt_logprob_refs[j],
                          std::log((*token.full_dist_refs)[j][gt])});
      }
    }
    for (const Check& check : checks) {
      if (!check.stored) continue;
      const double deviation = std::abs(*check.stored - check.recomputed);
      report.max_abs_deviation = std::max(report.max_abs_deviation, deviation);
      if (!(deviation <= tolerance)) {
        return absl::DataLossError(absl::StrFormat(
            "record '%s' token %d: stored %s = %.17g but full distributions "
            "give %.17g (deviation %g > %g)",
            record.id, i + 1, check.field, *check.stored, check.recomputed,
            deviation, tolerance));
      }
    }
    ++report.positions_checked;
  }
  return report;
}

absl::flat_hash_map<std::string, MembershipLabel> CollectLabels(
    const EvaluationDataset& dataset) {
  absl::flat_hash_map<std::string, MembershipLabel> labels;
  for (const SequenceSignal& rec : dataset.records) {
    if (rec.label != MembershipLabel::kUnknown) labels[rec.id] = rec.label;
  }
  return labels;
}

absl::Status ScoreSet::Add(std::string id, double score,
                           std::vector<double> token_scores) {
  if (!std::isfinite(score)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "%s: non-finite score for '%s'", attack_name_, id));
  }
  for (double s : token_scores) {
    if (!std::isfinite(s)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "%s: non-finite token score for '%s'", attack_name_, id));
    }
  }
  if (index_.contains(id)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("%s: duplicate score for '%s'", attack_name_, id));
  }
  index_.emplace(id, entries_.size());
  entries_.push_back({std::move(id), score, std::move(token_scores)});
  return absl::OkStatus();
}

bool ScoreSet::has_token_scores() const {
  for (const Entry& e : entries_) {
    if (!e.token_scores.empty()) return true;
  }
  return false;
}

const ScoreSet::Entry* ScoreSet::Find(absl::string_view id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

}  // namespace leakscope
