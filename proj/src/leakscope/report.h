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

// Static HTML heatmaps of token-level membership scores. The highlight of a
// token grows with its score: intensity = clamp((s - p1) / (p99 - p1), 0, 1)
// with p1 and p99 taken over every scored token in the report.

#ifndef LEAKSCOPE_REPORT_H_
#define LEAKSCOPE_REPORT_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "leakscope/data_model.h"

namespace leakscope {

struct HeatmapToken {
  std::string text;
  std::optional<double> score;  // absent for the unscored first token
  double intensity = 0.0;
  std::string tag;
  bool is_private = false;
};

struct HeatmapPayload {
  std::string id;
  std::optional<double> sequence_score;
  std::optional<double> private_token_mean;
  std::vector<HeatmapToken> tokens;
};

struct HeatmapOptions {
  std::string title = "Token membership heatmap";
};

// One payload per record that has token scores. With `ids` empty the records
// are emitted in ascending id order, otherwise in the order given.
absl::StatusOr<std::vector<HeatmapPayload>> BuildHeatmapPayloads(
    const EvaluationDataset& dataset, const ScoreSet& scores,
    std::span<const std::string> ids = {});

// Fills every token's intensity from the scores across all payloads. Equal
// p1 and p99 map every scored token to 0.5.
void AssignIntensities(std::vector<HeatmapPayload>& payloads);

// Self-contained HTML: inline styles, no external resources. Each token is a
// span carrying data-score and data-intensity attributes. Intensities are
// recomputed from the scores.
absl::StatusOr<std::string> RenderHeatmap(std::span<const HeatmapPayload> payloads,
                                          const HeatmapOptions& options = {});

absl::Status WriteHeatmap(std::span<const HeatmapPayload> payloads,
                          const std::filesystem::path& path,
                          const HeatmapOptions& options = {});

std::string EscapeHtml(absl::string_view text);

}  // namespace leakscope

#endif  // LEAKSCOPE_REPORT_H_
