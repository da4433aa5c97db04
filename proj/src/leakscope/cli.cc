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

#include "leakscope/cli.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/string_view.h"
#include "json.hpp"
#include "leakscope/audit_stats.h"
#include "leakscope/data_model.h"
#include "leakscope/evaluation.h"
#include "leakscope/report.h"
#include "leakscope/score_io.h"
#include "leakscope/scoring.h"

namespace leakscope {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

// A usage problem detected after parsing (exit 2), as opposed to bad data.
struct UsageError {
  std::string message;
};

// Binds config-file keys to option variables. A key only applies when the
// option was not given on the command line.
class ConfigBindings {
 public:
  template <typename T>
  void Bind(CLI::Option* option, std::string key, T* target) {
    bindings_.push_back({option, std::move(key), [target](const Json& v) {
                           *target = v.get<T>();
                         }});
  }

  absl::Status Apply(const std::string& path) const {
    std::ifstream in(path);
    if (!in) return absl::NotFoundError(absl::StrCat("cannot open config '", path, "'"));
    Json config = Json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (config.is_discarded() || !config.is_object()) {
      return absl::InvalidArgumentError(
          absl::StrCat("config '", path, "' is not a JSON object"));
    }
    for (const auto& [key, value] : config.items()) {
      const Binding* binding = nullptr;
      for (const Binding& b : bindings_) {
        if (b.key == key) binding = &b;
      }
      if (binding == nullptr) {
        return absl::InvalidArgumentError(
            absl::StrCat("config key '", key, "' is not an option of this command"));
      }
      if (binding->option->count() > 0) continue;
      try {
        binding->assign(value);
      } catch (const Json::exception&) {
        return absl::InvalidArgumentError(
            absl::StrCat("config key '", key, "' has the wrong type"));
      }
    }
    return absl::OkStatus();
  }

 private:
  struct Binding {
    CLI::Option* option;
    std::string key;
    std::function<void(const Json&)> assign;
  };
  std::vector<Binding> bindings_;
};

fs::path DefaultOutDir() {
  if (const char* dir = std::getenv(kOutDirEnv); dir != nullptr && *dir != '\0') {
    return dir;
  }
  return ".";
}

// Resolves an output path: explicit value, else `name` in the default dir.
fs::path OutputPath(const std::string& explicit_path, absl::string_view name) {
  if (!explicit_path.empty()) return explicit_path;
  return DefaultOutDir() / std::string(name);
}

absl::Status EnsureDirectory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot create '", dir.string(), "': ", ec.message()));
  }
  return absl::OkStatus();
}

int Fail(std::ostream& err, const absl::Status& status) {
  err << "error: " << status.message() << "\n";
  return kExitFailure;
}

int Usage(std::ostream& err, absl::string_view message) {
  err << "usage error: " << message << "\n";
  return kExitUsage;
}

std::optional<LogBase> ParseBase(absl::string_view name) {
  if (name == "2" || name == "bits") return LogBase::kTwo;
  if (name == "e" || name == "nat" || name == "nats") return LogBase::kE;
  return std::nullopt;
}

struct CommonOptions {
  std::string config_path;
  double epsilon_floor = kProbabilityFloor;
};

struct ValidateOptions {
  std::string data;
  std::string population;
};

struct ScoreOptions {
  std::string data;
  std::string attack;
  std::string population;
  double gamma = 2.0;
  double a = 1.0;
  double k = 20.0;
  std::string agg = "mean";
  std::string base = "2";
  int ref_index = 0;
  bool normalize_population = true;
  std::string format;
  std::string out;
};

struct EvalOptions {
  std::vector<std::string> scores;
  std::string labels;
  std::string out;
  std::string roc_dir;
};

struct StatsOptions {
  std::string data;
  std::string scores;
  std::string sequence_scores;
  std::string out_dir;
  int top_k = 10;
};

struct ReportOptions {
  std::string data;
  std::string scores;
  std::string out_dir;
  int top_k = 10;
  std::string title = "Token membership heatmap";
};

int RunValidate(const ValidateOptions& opts, const CommonOptions& common,
                std::ostream& out, std::ostream& err) {
  const LoadOptions load{common.epsilon_floor};
  auto dataset = LoadEvaluationDataset(opts.data, load);
  if (!dataset.ok()) return Fail(err, dataset.status());
  int64_t positions = 0;
  double max_deviation = 0.0;
  for (const SequenceSignal& rec : dataset->records) {
    if (!rec.has_tokens()) continue;
    auto report = ValidateTokenBlock(rec);
    if (!report.ok()) return Fail(err, report.status());
    positions += report->positions_checked;
    max_deviation = std::max(max_deviation, report->max_abs_deviation);
  }
  out << absl::StrFormat(
      "%s: %d records, %d probabilities floored, %d token positions "
      "recomputed from full distributions (max deviation %.3g)\n",
      opts.data, dataset->records.size(), dataset->floored_values, positions,
      max_deviation);
  if (!opts.population.empty()) {
    auto population = LoadPopulationDataset(opts.population, load);
    if (!population.ok()) return Fail(err, population.status());
    out << absl::StrFormat("%s: %d population records, %d probabilities floored\n",
                           opts.population, population->records.size(),
                           population->floored_values);
  }
  out << "validation OK\n";
  return kExitOk;
}

int RunScore(const ScoreOptions& opts, const CommonOptions& common,
             std::ostream& out, std::ostream& err) {
  auto attack = ParseAttackKind(opts.attack);
  if (!attack.ok()) return Usage(err, attack.status().message());
  auto aggregation = ParseAggregation(opts.agg);
  if (!aggregation.ok()) return Usage(err, aggregation.status().message());
  std::optional<LogBase> base = ParseBase(opts.base);
  if (!base) return Usage(err, "--base must be 2 or e");
  if (opts.ref_index < 0) return Usage(err, "--ref-index must be >= 0");
  if (NeedsPopulation(*attack) && opts.population.empty()) {
    return Usage(err, absl::StrCat(opts.attack, " requires --population"));
  }

  ScoreRequest request;
  request.attack = *attack;
  request.aggregation = *aggregation;
  request.ref_index = static_cast<size_t>(opts.ref_index);
  request.config.gamma = opts.gamma;
  request.config.a = opts.a;
  request.config.k_percent = opts.k;
  request.config.log_base = *base;
  request.config.normalize_population = opts.normalize_population;
  request.config.epsilon_floor = common.epsilon_floor;
  if (absl::Status s = request.config.Validate(); !s.ok()) {
    return Usage(err, s.message());
  }

  const fs::path out_path = OutputPath(
      opts.out, absl::StrCat(opts.attack, ".scores.",
                             opts.format.empty() ? "jsonl" : opts.format));
  ScoreFormat format = ScoreFormatForPath(out_path);
  if (!opts.format.empty()) {
    auto parsed = ParseScoreFormat(opts.format);
    if (!parsed.ok()) return Usage(err, parsed.status().message());
    format = *parsed;
  }

  const LoadOptions load{common.epsilon_floor};
  auto dataset = LoadEvaluationDataset(opts.data, load);
  if (!dataset.ok()) return Fail(err, dataset.status());
  std::optional<PopulationDataset> population;
  if (!opts.population.empty()) {
    auto loaded = LoadPopulationDataset(opts.population, load);
    if (!loaded.ok()) return Fail(err, loaded.status());
    population = *std::move(loaded);
    request.population = &*population;
  }
  auto scores = RunAttack(*dataset, request);
  if (!scores.ok()) return Fail(err, scores.status());
  if (absl::Status s = WriteScores(*scores, out_path, format); !s.ok()) {
    return Fail(err, s);
  }
  out << absl::StrFormat("%s: scored %d records -> %s\n", opts.attack,
                         scores->size(), out_path.string());
  return kExitOk;
}

int RunEval(const EvalOptions& opts, const CommonOptions& common,
            std::ostream& out, std::ostream& err) {
  auto dataset = LoadEvaluationDataset(opts.labels, LoadOptions{common.epsilon_floor});
  if (!dataset.ok()) return Fail(err, dataset.status());
  const LabelMap labels = CollectLabels(*dataset);
  std::vector<ScoreSet> sets;
  for (const std::string& path : opts.scores) {
    auto scores = ReadScores(path);
    if (!scores.ok()) return Fail(err, scores.status());
    sets.push_back(*std::move(scores));
  }
  auto table = CompareAttacks(sets, labels);
  if (!table.ok()) return Fail(err, table.status());
  const fs::path out_path = OutputPath(opts.out, "comparison.csv");
  if (absl::Status s = WriteTextFile(out_path, table->ToCsv()); !s.ok()) {
    return Fail(err, s);
  }
  if (!opts.roc_dir.empty()) {
    if (absl::Status s = EnsureDirectory(opts.roc_dir); !s.ok()) return Fail(err, s);
    for (const ScoreSet& set : sets) {
      auto curve = ComputeRoc(set, labels);
      if (!curve.ok()) return Fail(err, curve.status());
      const fs::path roc_path =
          fs::path(opts.roc_dir) / absl::StrCat(set.attack_name(), ".roc.csv");
      if (absl::Status s = WriteTextFile(roc_path, RocToCsv(*curve)); !s.ok()) {
        return Fail(err, s);
      }
    }
  }
  out << table->ToText();
  return kExitOk;
}

std::string RankedCsv(std::span<const RankedSequence> ranked, absl::string_view key) {
  std::string csv = "rank,id,sequence_mean,private_token_mean,ranked_by\n";
  for (size_t i = 0; i < ranked.size(); ++i) {
    const RankedSequence& r = ranked[i];
    absl::StrAppendFormat(&csv, "%d,%s,%.17g,%s,%s\n", i + 1, CsvField(r.id),
                          r.sequence_mean,
                          r.private_token_mean
                              ? absl::StrFormat("%.17g", *r.private_token_mean)
                              : "",
                          key);
  }
  return csv;
}

int RunStats(const StatsOptions& opts, const CommonOptions& common,
             std::ostream& out, std::ostream& err) {
  if (opts.top_k < 1) return Usage(err, "--top-k must be >= 1");
  auto dataset = LoadEvaluationDataset(opts.data, LoadOptions{common.epsilon_floor});
  if (!dataset.ok()) return Fail(err, dataset.status());
  auto token_scores = ReadScores(opts.scores);
  if (!token_scores.ok()) return Fail(err, token_scores.status());
  if (!token_scores->has_token_scores()) {
    return Fail(err, absl::InvalidArgumentError(absl::StrCat(
                         opts.scores, " carries no token-level scores")));
  }
  ScoreSet sequence_scores = *token_scores;
  if (!opts.sequence_scores.empty()) {
    auto loaded = ReadScores(opts.sequence_scores);
    if (!loaded.ok()) return Fail(err, loaded.status());
    sequence_scores = *std::move(loaded);
  }
  const fs::path dir = opts.out_dir.empty() ? DefaultOutDir() : fs::path(opts.out_dir);
  if (absl::Status s = EnsureDirectory(dir); !s.ok()) return Fail(err, s);

  Json summary;
  summary["attack"] = token_scores->attack_name();

  auto tokens = CollectTaggedTokens(*dataset, *token_scores);
  if (!tokens.ok()) return Fail(err, tokens.status());
  auto groups = GroupSummaries(*tokens);
  if (!groups.ok()) return Fail(err, groups.status());
  std::string groups_csv =
      "entity,count,mean_score,median_score,p95,n_high,high_rate\n";
  for (const GroupSummary& g : *groups) {
    absl::StrAppendFormat(&groups_csv, "%s,%d,%.17g,%.17g,%.17g,%d,%.17g\n",
                          CsvField(g.key), g.count, g.mean_score, g.median_score,
                          g.p95, g.n_high, g.high_rate);
  }
  if (absl::Status s = WriteTextFile(dir / "entity_groups.csv", groups_csv); !s.ok()) {
    return Fail(err, s);
  }
  summary["scored_tokens"] = tokens->size();
  summary["high_threshold"] = *HighScoreThreshold(*tokens);

  auto split = PrivateSplitStats(*dataset, *token_scores);
  if (split.ok()) {
    std::string split_csv = "token,count,mean,std,min,p10,p50,p90,max\n";
    for (const auto* row : {&split->non_private_row, &split->private_row}) {
      if (!row->has_value()) continue;
      const DistributionSummary& r = **row;
      absl::StrAppendFormat(&split_csv, "%s,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                            r.key, r.count, r.mean, r.std, r.min, r.p10, r.p50,
                            r.p90, r.max);
    }
    if (absl::Status s = WriteTextFile(dir / "private_split.csv", split_csv); !s.ok()) {
      return Fail(err, s);
    }
    std::string pairs_csv = "id,sequence_mean,private_mean\n";
    for (const SequencePrivatePair& p : split->pairs) {
      absl::StrAppendFormat(
          &pairs_csv, "%s,%.17g,%s\n", CsvField(p.id), p.sequence_mean,
          p.private_mean ? absl::StrFormat("%.17g", *p.private_mean) : "");
    }
    if (absl::Status s = WriteTextFile(dir / "sequence_private_means.csv", pairs_csv);
        !s.ok()) {
      return Fail(err, s);
    }
    summary["private_row_absent"] = !split->private_row.has_value();
    summary["masked_tokens"] = split->masked_tokens;
    if (!split->private_row) {
      out << "private row absent: no scored token is flagged private\n";
    }
    auto correlation = SequencePrivateCorrelation(sequence_scores, *split);
    summary["correlation_method"] = "pearson";
    if (correlation.ok()) {
      summary["sequence_private_correlation"] = *correlation;
    } else {
      summary["sequence_private_correlation"] = nullptr;
      summary["correlation_note"] = std::string(correlation.status().message());
    }

    std::string bits_csv = "id,priv_bits,all_bits\n";
    for (const SequenceSignal& rec : dataset->records) {
      if (!rec.priv_mask || !rec.has_tokens()) continue;
      auto bits = ComputePrivBits(rec);
      if (!bits.ok()) return Fail(err, bits.status());
      absl::StrAppendFormat(&bits_csv, "%s,%.17g,%.17g\n", CsvField(rec.id),
                            bits->private_bits, bits->all_bits);
    }
    if (absl::Status s = WriteTextFile(dir / "priv_bits.csv", bits_csv); !s.ok()) {
      return Fail(err, s);
    }
  } else {
    summary["private_row_absent"] = true;
    out << "private split skipped: " << split.status().message() << "\n";
  }

  const std::vector<RankedSequence> ranked =
      BuildRankedSequences(*dataset, sequence_scores);
  const size_t k = static_cast<size_t>(opts.top_k);
  std::string top_csv = RankedCsv(
      TopKSequences(ranked, k, RankingKey::kSequenceMean), "sequence_mean");
  const std::string private_csv = RankedCsv(
      TopKSequences(ranked, k, RankingKey::kPrivateTokenMean), "private_token_mean");
  top_csv += private_csv.substr(private_csv.find('\n') + 1);
  if (absl::Status s = WriteTextFile(dir / "top_sequences.csv", top_csv); !s.ok()) {
    return Fail(err, s);
  }
  if (absl::Status s = WriteTextFile(dir / "stats.json", summary.dump(2) + "\n");
      !s.ok()) {
    return Fail(err, s);
  }
  out << absl::StrFormat("stats for %d scored tokens in %d groups -> %s\n",
                         tokens->size(), groups->size(), dir.string());
  return kExitOk;
}

int RunReport(const ReportOptions& opts, const CommonOptions& common,
              std::ostream& out, std::ostream& err) {
  if (opts.top_k < 1) return Usage(err, "--top-k must be >= 1");
  auto dataset = LoadEvaluationDataset(opts.data, LoadOptions{common.epsilon_floor});
  if (!dataset.ok()) return Fail(err, dataset.status());
  auto scores = ReadScores(opts.scores);
  if (!scores.ok()) return Fail(err, scores.status());
  const fs::path dir = opts.out_dir.empty() ? DefaultOutDir() : fs::path(opts.out_dir);
  if (absl::Status s = EnsureDirectory(dir); !s.ok()) return Fail(err, s);

  auto all = BuildHeatmapPayloads(*dataset, *scores);
  if (!all.ok()) return Fail(err, all.status());
  if (absl::Status s = WriteHeatmap(*all, dir / "heatmap.html", {opts.title});
      !s.ok()) {
    return Fail(err, s);
  }
  int pages = 1;
  const std::vector<RankedSequence> ranked = BuildRankedSequences(*dataset, *scores);
  const size_t k = static_cast<size_t>(opts.top_k);
  struct Page {
    RankingKey key;
    const char* file;
    const char* title;
  };
  for (const Page& page :
       {Page{RankingKey::kSequenceMean, "top_sequences.html",
             "Top sequences by sequence score"},
        Page{RankingKey::kPrivateTokenMean, "top_private_tokens.html",
             "Top sequences by private-token mean"}}) {
    std::vector<std::string> ids;
    for (const RankedSequence& r : TopKSequences(ranked, k, page.key)) {
      ids.push_back(r.id);
    }
    if (ids.empty()) continue;
    auto payloads = BuildHeatmapPayloads(*dataset, *scores, ids);
    if (!payloads.ok()) return Fail(err, payloads.status());
    if (absl::Status s = WriteHeatmap(*payloads, dir / page.file, {page.title});
        !s.ok()) {
      return Fail(err, s);
    }
    ++pages;
  }
  out << absl::StrFormat("wrote %d report pages for %d sequences -> %s\n", pages,
                         all->size(), dir.string());
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"leakscope: membership-inference scoring and token-level privacy audits"};
  app.require_subcommand(1);
  CommonOptions common;

  auto add_common = [&](CLI::App* cmd, ConfigBindings& bindings) {
    cmd->add_option("--config", common.config_path,
                    "JSON file whose keys mirror the long flag names");
    bindings.Bind(cmd->add_option("--epsilon-floor", common.epsilon_floor,
                                  "floor applied to probabilities before logs"),
                  "epsilon-floor", &common.epsilon_floor);
  };

  ValidateOptions validate_opts;
  ConfigBindings validate_bindings;
  CLI::App* validate = app.add_subcommand("validate", "check dataset files");
  validate_bindings.Bind(
      validate->add_option("--data", validate_opts.data, "evaluation JSONL"),
      "data", &validate_opts.data);
  validate_bindings.Bind(
      validate->add_option("--population", validate_opts.population,
                           "population JSONL"),
      "population", &validate_opts.population);
  add_common(validate, validate_bindings);

  ScoreOptions score_opts;
  ConfigBindings score_bindings;
  CLI::App* score = app.add_subcommand("score", "run one attack and write scores");
  score_bindings.Bind(score->add_option("--data", score_opts.data, "evaluation JSONL"),
                      "data", &score_opts.data);
  score_bindings.Bind(
      score->add_option("--attack", score_opts.attack,
                        "rmia|informia|informia-token|loss|zlib|mink|minkpp|ref"),
      "attack", &score_opts.attack);
  score_bindings.Bind(
      score->add_option("--population", score_opts.population, "population JSONL"),
      "population", &score_opts.population);
  score_bindings.Bind(score->add_option("--gamma", score_opts.gamma, "RMIA threshold"),
                      "gamma", &score_opts.gamma);
  score_bindings.Bind(score->add_option("--a", score_opts.a, "offline prior parameter"),
                      "a", &score_opts.a);
  score_bindings.Bind(score->add_option("--k", score_opts.k, "percent kept by Min-K"),
                      "k", &score_opts.k);
  score_bindings.Bind(score->add_option("--agg", score_opts.agg, "mean|min_k"),
                      "agg", &score_opts.agg);
  score_bindings.Bind(score->add_option("--base", score_opts.base, "log base: 2|e"),
                      "base", &score_opts.base);
  score_bindings.Bind(
      score->add_option("--ref-index", score_opts.ref_index, "reference for ref"),
      "ref-index", &score_opts.ref_index);
  score_bindings.Bind(
      score->add_option("--normalize-population", score_opts.normalize_population,
                        "normalize population weights (InfoRMIA)"),
      "normalize-population", &score_opts.normalize_population);
  score_bindings.Bind(score->add_option("--format", score_opts.format, "csv|jsonl"),
                      "format", &score_opts.format);
  score_bindings.Bind(score->add_option("--out", score_opts.out, "output path"),
                      "out", &score_opts.out);
  add_common(score, score_bindings);

  EvalOptions eval_opts;
  ConfigBindings eval_bindings;
  CLI::App* eval = app.add_subcommand("eval", "compare attacks: AUC and TPR@FPR");
  eval_bindings.Bind(eval->add_option("--scores", eval_opts.scores, "score files"),
                     "scores", &eval_opts.scores);
  eval_bindings.Bind(
      eval->add_option("--labels", eval_opts.labels, "labeled evaluation JSONL"),
      "labels", &eval_opts.labels);
  eval_bindings.Bind(eval->add_option("--out", eval_opts.out, "comparison CSV"), "out",
                     &eval_opts.out);
  eval_bindings.Bind(
      eval->add_option("--roc-dir", eval_opts.roc_dir, "write ROC points here"),
      "roc-dir", &eval_opts.roc_dir);
  add_common(eval, eval_bindings);

  StatsOptions stats_opts;
  ConfigBindings stats_bindings;
  CLI::App* stats = app.add_subcommand("stats", "token-level privacy statistics");
  stats_bindings.Bind(stats->add_option("--data", stats_opts.data, "evaluation JSONL"),
                      "data", &stats_opts.data);
  stats_bindings.Bind(
      stats->add_option("--scores", stats_opts.scores, "token-level score file"),
      "scores", &stats_opts.scores);
  stats_bindings.Bind(stats->add_option("--sequence-scores", stats_opts.sequence_scores,
                                        "sequence scores for correlation/ranking"),
                      "sequence-scores", &stats_opts.sequence_scores);
  stats_bindings.Bind(stats->add_option("--out-dir", stats_opts.out_dir, "output dir"),
                      "out-dir", &stats_opts.out_dir);
  stats_bindings.Bind(stats->add_option("--top-k", stats_opts.top_k, "ranking size"),
                      "top-k", &stats_opts.top_k);
  add_common(stats, stats_bindings);

  ReportOptions report_opts;
  ConfigBindings report_bindings;
  CLI::App* report = app.add_subcommand("report", "render HTML heatmaps");
  report_bindings.Bind(report->add_option("--data", report_opts.data, "evaluation JSONL"),
                       "data", &report_opts.data);
  report_bindings.Bind(
      report->add_option("--scores", report_opts.scores, "token-level score file"),
      "scores", &report_opts.scores);
  report_bindings.Bind(
      report->add_option("--out-dir", report_opts.out_dir, "output dir"), "out-dir",
      &report_opts.out_dir);
  report_bindings.Bind(report->add_option("--top-k", report_opts.top_k, "ranking size"),
                       "top-k", &report_opts.top_k);
  report_bindings.Bind(report->add_option("--title", report_opts.title, "page title"),
                       "title", &report_opts.title);
  add_common(report, report_bindings);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::ostringstream captured;
    app.exit(e, captured, captured);
    err << captured.str();
    return kExitUsage;
  }

  struct Command {
    CLI::App* app;
    ConfigBindings* bindings;
    std::vector<std::pair<std::string*, const char*>> required;
    std::function<int()> run;
  };
  std::vector<Command> commands = {
      {validate, &validate_bindings, {{&validate_opts.data, "--data"}},
       [&] { return RunValidate(validate_opts, common, out, err); }},
      {score, &score_bindings,
       {{&score_opts.data, "--data"}, {&score_opts.attack, "--attack"}},
       [&] { return RunScore(score_opts, common, out, err); }},
      {eval, &eval_bindings, {{&eval_opts.labels, "--labels"}},
       [&] {
         if (eval_opts.scores.empty()) return Usage(err, "eval requires --scores");
         return RunEval(eval_opts, common, out, err);
       }},
      {stats, &stats_bindings,
       {{&stats_opts.data, "--data"}, {&stats_opts.scores, "--scores"}},
       [&] { return RunStats(stats_opts, common, out, err); }},
      {report, &report_bindings,
       {{&report_opts.data, "--data"}, {&report_opts.scores, "--scores"}},
       [&] { return RunReport(report_opts, common, out, err); }},
  };
  for (Command& cmd : commands) {
    if (!cmd.app->parsed()) continue;
    if (!common.config_path.empty()) {
      if (absl::Status s = cmd.bindings->Apply(common.config_path); !s.ok()) {
        return Usage(err, s.message());
      }
    }
    for (const auto& [value, flag] : cmd.required) {
      if (value->empty()) {
        return Usage(err, absl::StrCat(cmd.app->get_name(), " requires ", flag));
      }
    }
    return cmd.run();
  }
  return Usage(err, "no subcommand");
}

}  // namespace leakscope
