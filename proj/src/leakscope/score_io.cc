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

#include "leakscope/score_io.h"

#include <charconv>
#include <optional>
#include <fstream>
#include <sstream>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"
#include "json.hpp"
#include "leakscope/base/status_macros.h"

namespace leakscope {
namespace {

using Json = nlohmann::json;

std::string FormatReal(double value) { return absl::StrFormat("%.17g", value); }

// Splits one CSV line honoring double-quoted fields.
absl::StatusOr<std::vector<std::string>> SplitCsvLine(absl::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back().push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back().push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back().push_back(c);
    }
  }
  if (quoted) return absl::InvalidArgumentError("unterminated quoted field");
  return fields;
}

absl::StatusOr<double> ParseReal(absl::string_view text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    return absl::InvalidArgumentError(absl::StrCat("bad number '", text, "'"));
  }
  return value;
}

absl::StatusOr<int64_t> ParsePosition(absl::string_view text) {
  int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    return absl::InvalidArgumentError(absl::StrCat("bad position '", text, "'"));
  }
  return value;
}

// Accumulates rows in file order into ScoreSet entries.
class ScoreSetBuilder {
 public:
  void SetAttack(std::string name) { attack_ = std::move(name); }

  absl::Status SequenceRow(std::string id, double score) {
    RETURN_IF_ERROR(Flush());
    pending_ = ScoreSet::Entry{std::move(id), score, {}};
    return absl::OkStatus();
  }

  absl::Status TokenRow(absl::string_view id, int64_t position, double score) {
    if (!pending_ || pending_->id != id) {
      return absl::InvalidArgumentError(absl::StrCat(
          "token row for '", id, "' does not follow its sequence row"));
    }
    if (position != static_cast<int64_t>(pending_->token_scores.size()) + 1) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "token rows for '%s' out of order at position %d", id, position));
    }
    pending_->token_scores.push_back(score);
    return absl::OkStatus();
  }

  absl::StatusOr<ScoreSet> Finish() {
    RETURN_IF_ERROR(Flush());
    ScoreSet out(attack_);
    for (auto& e : entries_) {
      RETURN_IF_ERROR(out.Add(std::move(e.id), e.score, std::move(e.token_scores)));
    }
    return out;
  }

 private:
  absl::Status Flush() {
    if (pending_) entries_.push_back(*std::move(pending_));
    pending_.reset();
    return absl::OkStatus();
  }

  std::string attack_;
  std::optional<ScoreSet::Entry> pending_;
  std::vector<ScoreSet::Entry> entries_;
};

absl::StatusOr<ScoreSet> ParseCsv(absl::string_view content) {
  ScoreSetBuilder builder;
  int64_t line_number = 0;
  bool have_header = false;
  for (absl::string_view line : absl::StrSplit(content, '\n')) {
    ++line_number;
    if (line.empty() || line == "\r") continue;
    auto at_line = [line_number](const absl::Status& s) {
      return absl::InvalidArgumentError(
          absl::StrFormat("line %d: %s", line_number, s.message()));
    };
    auto fields = SplitCsvLine(line);
    if (!fields.ok()) return at_line(fields.status());
    if (!have_header) {
      if (*fields != std::vector<std::string>{"attack", "id", "position", "score"}) {
        return at_line(absl::InvalidArgumentError("unexpected score CSV header"));
      }
      have_header = true;
      continue;
    }
    if (fields->size() != 4) {
      return at_line(absl::InvalidArgumentError("expected 4 fields"));
    }
    const auto& f = *fields;
    builder.SetAttack(f[0]);
    auto score = ParseReal(f[3]);
    if (!score.ok()) return at_line(score.status());
    absl::Status s;
    if (f[2].empty()) {
      s = builder.SequenceRow(f[1], *score);
    } else {
      auto position = ParsePosition(f[2]);
      if (!position.ok()) return at_line(position.status());
      s = builder.TokenRow(f[1], *position, *score);
    }
    if (!s.ok()) return at_line(s);
  }
  if (!have_header) return absl::InvalidArgumentError("empty score file");
  return builder.Finish();
}

absl::StatusOr<ScoreSet> ParseJsonl(absl::string_view content) {
  ScoreSetBuilder builder;
  int64_t line_number = 0;
  bool have_header = false;
  for (absl::string_view line : absl::StrSplit(content, '\n')) {
    ++line_number;
    if (line.empty()) continue;
    auto at_line = [line_number](absl::string_view message) {
      return absl::InvalidArgumentError(
          absl::StrFormat("line %d: %s", line_number, message));
    };
    Json obj = Json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (obj.is_discarded() || !obj.is_object()) return at_line("malformed JSON");
    if (!have_header) {
      if (!obj.contains("attack") || !obj["attack"].is_string()) {
        return at_line("score header needs an 'attack' string");
      }
      builder.SetAttack(obj["attack"].get<std::string>());
      have_header = true;
      continue;
    }
    if (!obj.contains("id") || !obj["id"].is_string() || !obj.contains("score") ||
        !obj["score"].is_number()) {
      return at_line("score rows need 'id' and 'score'");
    }
    std::string id = obj["id"].get<std::string>();
    const double score = obj["score"].get<double>();
    absl::Status s;
    if (obj.contains("position")) {
      if (!obj["position"].is_number_integer()) return at_line("bad position");
      s = builder.TokenRow(id, obj["position"].get<int64_t>(), score);
    } else {
      s = builder.SequenceRow(std::move(id), score);
    }
    if (!s.ok()) return at_line(s.message());
  }
  if (!have_header) return absl::InvalidArgumentError("empty score file");
  return builder.Finish();
}

}  // namespace

absl::StatusOr<ScoreFormat> ParseScoreFormat(absl::string_view name) {
  if (name == "csv") return ScoreFormat::kCsv;
  if (name == "jsonl") return ScoreFormat::kJsonl;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown score format '", name, "' (expected csv or jsonl)"));
}

ScoreFormat ScoreFormatForPath(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? ScoreFormat::kCsv : ScoreFormat::kJsonl;
}

std::string CsvField(absl::string_view field) {
  if (field.find_first_of(",\"\r\n") == absl::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string FormatScores(const ScoreSet& scores, ScoreFormat format) {
  std::string out;
  if (format == ScoreFormat::kCsv) {
    out = "attack,id,position,score\n";
    const std::string attack = CsvField(scores.attack_name());
    for (const ScoreSet::Entry& e : scores.entries()) {
      const std::string id = CsvField(e.id);
      absl::StrAppend(&out, attack, ",", id, ",,", FormatReal(e.score), "\n");
      for (size_t i = 0; i < e.token_scores.size(); ++i) {
        absl::StrAppend(&out, attack, ",", id, ",", i + 1, ",",
                        FormatReal(e.token_scores[i]), "\n");
      }
    }
    return out;
  }
  absl::StrAppend(&out, "{\"attack\":", Json(scores.attack_name()).dump(),
                  ",\"orientation\":\"higher_is_member\"}\n");
  for (const ScoreSet::Entry& e : scores.entries()) {
    const std::string id = Json(e.id).dump();
    absl::StrAppend(&out, "{\"id\":", id, ",\"score\":", FormatReal(e.score),
                    "}\n");
    for (size_t i = 0; i < e.token_scores.size(); ++i) {
      absl::StrAppend(&out, "{\"id\":", id, ",\"position\":", i + 1,
                      ",\"score\":", FormatReal(e.token_scores[i]), "}\n");
    }
  }
  return out;
}

absl::StatusOr<ScoreSet> ParseScores(absl::string_view content,
                                     ScoreFormat format) {
  return format == ScoreFormat::kCsv ? ParseCsv(content) : ParseJsonl(content);
}

absl::Status WriteTextFile(const std::filesystem::path& path,
                           absl::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot open '", path.string(), "' for writing"));
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) {
    return absl::DataLossError(absl::StrCat("failed writing '", path.string(), "'"));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::string> ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(
        absl::StrCat("cannot open '", path.string(), "' for reading"));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

absl::Status WriteScores(const ScoreSet& scores, const std::filesystem::path& path,
                         ScoreFormat format) {
  return WriteTextFile(path, FormatScores(scores, format));
}

absl::StatusOr<ScoreSet> ReadScores(const std::filesystem::path& path) {
  ASSIGN_OR_RETURN(std::string content, ReadTextFile(path));
  auto scores = ParseScores(content, ScoreFormatForPath(path));
  if (!scores.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(path.string(), ": ", scores.status().message()));
  }
  return scores;
}

}  // namespace leakscope
