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

// Score files. Both formats carry one row per record and, for token-level
// attacks, one row per (record, position) with 1-based positions over the
// predicted tokens. Reals are written with 17 significant digits.
//
// CSV:   attack,id,position,score   (position empty on sequence rows)
// JSONL: {"attack":...,"orientation":"higher_is_member"} then
//        {"id":...,"score":...} and {"id":...,"position":p,"score":...}

#ifndef LEAKSCOPE_SCORE_IO_H_
#define LEAKSCOPE_SCORE_IO_H_

#include <filesystem>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "leakscope/data_model.h"

namespace leakscope {

enum class ScoreFormat { kCsv, kJsonl };

absl::StatusOr<ScoreFormat> ParseScoreFormat(absl::string_view name);

// .csv selects CSV, anything else JSONL.
ScoreFormat ScoreFormatForPath(const std::filesystem::path& path);

std::string FormatScores(const ScoreSet& scores, ScoreFormat format);
absl::StatusOr<ScoreSet> ParseScores(absl::string_view content, ScoreFormat format);

absl::Status WriteScores(const ScoreSet& scores, const std::filesystem::path& path,
                         ScoreFormat format);
absl::StatusOr<ScoreSet> ReadScores(const std::filesystem::path& path);

// Quotes a CSV field when it holds a comma, quote or line break.
std::string CsvField(absl::string_view field);

// Whole-file helpers shared by the writers.
absl::Status WriteTextFile(const std::filesystem::path& path,
                           absl::string_view content);
absl::StatusOr<std::string> ReadTextFile(const std::filesystem::path& path);

}  // namespace leakscope

#endif  // LEAKSCOPE_SCORE_IO_H_
