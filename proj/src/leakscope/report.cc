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

#include "leakscope/report.h"

#include <algorithm>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/string_view.h"
#include "leakscope/audit_stats.h"
#include "leakscope/score_io.h"

namespace leakscope {
namespace {

constexpr absl::string_view kStyle = R"(body{font-family:sans-serif;margin:2em;color:#222}
.legend{color:#555;font-size:0.9em}
.seq{border-top:1px solid #ddd;padding:0.6em 0}
.meta{font-size:0.8em;color:#666;margin-bottom:0.3em}
.tokens{font-family:monospace;white-space:pre-wrap;line-height:1.7}
.tok{border-radius:2px}
.tok.unscored{color:#999}
.tok.private{outline:1px dashed #1f4e9e}
)";

std::string Real(double v) { return absl::StrFormat("%.17g", v); }

}  // namespace

std::string EscapeHtml(absl::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      case '\'':
        out += "&#39;";
        break;
      default:
        out.push_back(c);
    }
  }
  return out;
}

absl::StatusOr<std::vector<HeatmapPayload>> BuildHeatmapPayloads(
    const EvaluationDataset& dataset, const ScoreSet& scores,
    std::span<const std::string> ids) {
  std::vector<const SequenceSignal*> records;
  if (ids.empty()) {
    for (const SequenceSignal& rec : dataset.records) {
      const ScoreSet::Entry* entry = scores.Find(rec.id);
      if (entry != nullptr && !entry->token_scores.empty()) records.push_back(&rec);
    }
    std::sort(records.begin(), records.end(),
              [](const SequenceSignal* a, const SequenceSignal* b) {
                return a->id < b->id;
              });
  } else {
    for (const std::string& id : ids) {
      auto it = std::find_if(dataset.records.begin(), dataset.records.end(),
                             [&](const SequenceSignal& r) { return r.id == id; });
      if (it == dataset.records.end()) {
        return absl::NotFoundError(absl::StrCat("no record '", id, "'"));
      }
      records.push_back(&*it);
    }
  }

  std::vector<HeatmapPayload> payloads;
  for (const SequenceSignal* rec : records) {
    const ScoreSet::Entry* entry = scores.Find(rec->id);
    if (entry == nullptr || entry->token_scores.size() != rec->tokens.size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "record '", rec->id, "' has no token scores aligned with its tokens"));
    }
    HeatmapPayload payload;
    payload.id = rec->id;
    payload.sequence_score = entry->score;
    const size_t length = rec->tokens.size() + 1;
    std::vector<double> private_scores;
    for (size_t pos = 0; pos < length; ++pos) {
      HeatmapToken token;
      token.text = rec->token_texts ? (*rec->token_texts)[pos]
                                    : absl::StrCat("[", pos, "]");
      if (pos > 0) token.score = entry->token_scores[pos - 1];
      if (rec->tags) token.tag = (*rec->tags)[pos];
      if (rec->priv_mask) token.is_private = (*rec->priv_mask)[pos];
      if (token.is_private && token.score) private_scores.push_back(*token.score);
      payload.tokens.push_back(std::move(token));
    }
    if (!private_scores.empty()) {
      double sum = 0.0;
      for (double s : private_scores) sum += s;
      payload.private_token_mean = sum / static_cast<double>(private_scores.size());
    }
    payloads.push_back(std::move(payload));
  }
  return payloads;
}

void AssignIntensities(std::vector<HeatmapPayload>& payloads) {
  std::vector<double> all;
  for (const HeatmapPayload& p : payloads) {
    for (const HeatmapToken& t : p.tokens) {
      if (t.score) all.push_back(*t.score);
    }
  }
  if (all.empty()) return;
  std::sort(all.begin(), all.end());
  const double p1 = NearestRankPercentile(all, 1);
  const double p99 = NearestRankPercentile(all, 99);
  for (HeatmapPayload& p : payloads) {
    for (HeatmapToken& t : p.tokens) {
      if (!t.score) {
        t.intensity = 0.0;
      } else if (p99 == p1) {
        t.intensity = 0.5;
      } else {
        t.intensity = std::clamp((*t.score - p1) / (p99 - p1), 0.0, 1.0);
      }
    }
  }
}

absl::StatusOr<std::string> RenderHeatmap(std::span<const HeatmapPayload> payloads,
                                          const HeatmapOptions& options) {
  if (payloads.empty()) {
    return absl::InvalidArgumentError("nothing to render: no payloads");
  }
  std::vector<HeatmapPayload> shaded(payloads.begin(), payloads.end());
  AssignIntensities(shaded);

  std::string html = "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n";
  absl::StrAppend(&html, "<meta charset=\"utf-8\"/>\n<title>",
                  EscapeHtml(options.title), "</title>\n<style>\n", kStyle,
                  "</style>\n</head>\n<body>\n<h1>", EscapeHtml(options.title),
                  "</h1>\n");
  absl::StrAppend(&html,
                  "<p class=\"legend\">Darker highlight means a higher "
                  "membership score. Shading is clipped to the 1st and 99th "
                  "percentile of token scores in this report. Dashed outlines "
                  "mark private tokens; the first token of each sequence is "
                  "not scored.</p>\n");
  for (const HeatmapPayload& p : shaded) {
    absl::StrAppend(&html, "<div class=\"seq\" data-id=\"", EscapeHtml(p.id), "\"");
    if (p.sequence_score) {
      absl::StrAppend(&html, " data-sequence-score=\"", Real(*p.sequence_score), "\"");
    }
    if (p.private_token_mean) {
      absl::StrAppend(&html, " data-private-mean=\"", Real(*p.private_token_mean),
                      "\"");
    }
    absl::StrAppend(&html, ">\n<div class=\"meta\">", EscapeHtml(p.id));
    if (p.sequence_score) {
      absl::StrAppendFormat(&html, " &#183; sequence score %.4f", *p.sequence_score);
    }
    if (p.private_token_mean) {
      absl::StrAppendFormat(&html, " &#183; private-token mean %.4f",
                            *p.private_token_mean);
    }
    absl::StrAppend(&html, "</div>\n<p class=\"tokens\">");
    for (size_t pos = 0; pos < p.tokens.size(); ++pos) {
      const HeatmapToken& t = p.tokens[pos];
      std::string classes = t.score ? "tok" : "tok unscored";
      if (t.is_private) classes += " private";
      absl::StrAppend(&html, "<span class=\"", classes, "\" data-position=\"", pos,
                      "\"");
      if (t.score) {
        absl::StrAppend(&html, " data-score=\"", Real(*t.score), "\"");
      }
      absl::StrAppend(&html, " data-intensity=\"", Real(t.intensity), "\"");
      if (!t.tag.empty()) {
        absl::StrAppend(&html, " data-tag=\"", EscapeHtml(t.tag), "\"");
      }
      if (t.is_private) absl::StrAppend(&html, " data-private=\"true\"");
      if (t.score) {
        absl::StrAppendFormat(&html,
                              " style=\"background-color:rgba(214,39,40,%.3f)\""
                              " title=\"score %.4f\"",
                              t.intensity, *t.score);
      }
      absl::StrAppend(&html, ">", EscapeHtml(t.text), "</span>");
    }
    absl::StrAppend(&html, "</p>\n</div>\n");
  }
  absl::StrAppend(&html, "</body>\n</html>\n");
  return html;
}

absl::Status WriteHeatmap(std::span<const HeatmapPayload> payloads,
                          const std::filesystem::path& path,
                          const HeatmapOptions& options) {
  auto html = RenderHeatmap(payloads, options);
  if (!html.ok()) return html.status();
  return WriteTextFile(path, *html);
}

}  // namespace leakscope
