// src/cli.cc

// Copyright 2026  The alsel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "alsel/cli.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "alsel/al_loop.h"
#include "alsel/analytics.h"
#include "alsel/corpus.h"
#include "alsel/errors.h"
#include "alsel/experiment.h"
#include "alsel/fileio.h"
#include "alsel/prng.h"
#include "alsel/protocol.h"
#include "alsel/scorers.h"
#include "alsel/selection.h"
#include "alsel/text.h"

namespace alsel {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::uint64_t ParseSeed(const std::string &text, const std::string &from) {
  std::uint64_t v = 0;
  const char *end = text.data() + text.size();
  auto r = std::from_chars(text.data(), end, v);
  if (text.empty() || r.ec != std::errc() || r.ptr != end)
    throw Error("invalid seed '" + text + "' from " + from);
  return v;
}

std::string UtcNow() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Writes to `path` (write-once) or to `out` when path is empty.
void Emit(const std::string &path, const std::string &content,
          std::ostream &out) {
  if (path.empty()) {
    out << content;
  } else {
    WriteFileOnce(path, content);
  }
}

struct ScorerFlags {
  bool mock = false;
  std::uint64_t mock_key = MockModelClient::kDefaultKey;
  std::string forward_url, reverse_url, quality_url;
  std::size_t max_batch = 64;
  std::size_t batch_size = 64;
  std::size_t max_in_flight = 4;
  int max_attempts = 3;
  long timeout_ms = 30000;

  void Register(CLI::App *cmd) {
    cmd->add_flag("--mock-scorer", mock,
                  "Use the built-in deterministic mock for all model roles");
    cmd->add_option("--mock-key", mock_key, "Key of the mock scorer");
    cmd->add_option("--forward-url", forward_url,
                    "Forward translation endpoint (http://host:port)");
    cmd->add_option("--reverse-url", reverse_url,
                    "Reverse model endpoint for RTTL log-probs");
    cmd->add_option("--quality-url", quality_url,
                    "Quality estimation endpoint");
    cmd->add_option("--max-batch", max_batch, "Endpoint batch limit")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--batch-size", batch_size, "Items per request")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-in-flight", max_in_flight, "Concurrent requests")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-attempts", max_attempts, "Attempts per batch")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--timeout-ms", timeout_ms, "Per-request timeout")
        ->check(CLI::PositiveNumber);
  }

  bool configured() const {
    return mock || !forward_url.empty() || !reverse_url.empty() ||
           !quality_url.empty();
  }

  ScoringClients Clients() const {
    if (mock) {
      if (!forward_url.empty() || !reverse_url.empty() || !quality_url.empty())
        throw Error("--mock-scorer cannot be combined with endpoint URLs");
      return ScoringClients::Mock(mock_key);
    }
    auto make = [&](const std::string &url,
                    Direction d) -> std::shared_ptr<ModelClient> {
      if (url.empty()) return nullptr;
      ModelEndpoint e;
      e.base_address = url;
      e.direction = d;
      e.timeout = std::chrono::milliseconds(timeout_ms);
      e.max_batch = max_batch;
      return std::make_shared<HttpModelClient>(e);
    };
    ScoringClients c;
    c.forward = make(forward_url, Direction::kForward);
    c.reverse = make(reverse_url, Direction::kReverse);
    c.quality = make(quality_url, Direction::kQuality);
    return c;
  }

  ScoreOptions Options() const {
    ScoreOptions o;
    o.batch_size = batch_size;
    o.max_in_flight = max_in_flight;
    o.max_attempts = max_attempts;
    return o;
  }

  json Resolved() const {
    if (mock) return {{"mock_scorer", true}, {"mock_key", mock_key}};
    return {{"mock_scorer", false},           {"forward_url", forward_url},
            {"reverse_url", reverse_url},     {"quality_url", quality_url},
            {"max_batch", max_batch},         {"batch_size", batch_size},
            {"max_in_flight", max_in_flight}, {"max_attempts", max_attempts},
            {"timeout_ms", timeout_ms}};
  }
};

struct SelectFlags {
  std::string strategy;
  std::size_t budget = 0;
  std::size_t bin_width = 10;
  std::string reference = "train";

  void Register(CLI::App *cmd) {
    cmd->add_option("--strategy", strategy, "random | rttl | srttl | qe | sqe")
        ->required();
    cmd->add_option("--budget,-N", budget, "Sentences to select")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--bin-width", bin_width,
                    "Length bin width for stratified strategies")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--reference", reference,
                    "Length reference for stratified strategies: train | test");
  }

  IterationRequest Request() const {
    IterationRequest r;
    r.strategy = ParseStrategy(strategy);
    r.budget = budget;
    r.bin_width = bin_width;
    r.reference = ParseReference(reference);
    return r;
  }

  json Resolved() const {
    return {{"strategy", strategy},
            {"budget", budget},
            {"bin_width", bin_width},
            {"reference", reference}};
  }
};

class Cli {
 public:
  Cli(std::ostream &out, std::ostream &err) : out_(out), err_(err) {}

  int Run(const std::vector<std::string> &args);

 private:
  void Preprocess();
  void Split();
  void Score();
  void Select();
  void Iterate();
  void Report();

  std::uint64_t ResolveSeed() const;
  std::string dir_;
  json resolved_ = json::object();

  std::ostream &out_;
  std::ostream &err_;

  // preprocess
  std::string input_, format_ = "tsv", output_, report_path_;
  std::size_t max_words_ = 100;
  std::string limit_side_ = "both";
  // split
  std::string corpus_, corpus_format_ = "jsonl", training_config_;
  std::optional<std::string> seed_;
  std::size_t k_ = 5, fold_ = 0, train_size_ = 30000, val_size_ = 1000;
  std::size_t bpe_merges_ = 4000;
  // score / select / iterate
  ScorerFlags scorer_;
  SelectFlags select_;
  std::string score_kind_;
  std::size_t iterations_ = 1;
  std::optional<std::size_t> stop_total_, stop_iterations_;
  bool stop_exhausted_ = false;
  // report
  std::vector<std::string> dirs_;
  std::string history_, bleu_, report_format_ = "csv";
  bool case_sensitive_ = false, keep_symbols_ = false;
};

std::uint64_t Cli::ResolveSeed() const {
  if (seed_) return ParseSeed(*seed_, "--seed");
  if (const char *env = std::getenv("ALSEL_SEED"))
    return ParseSeed(env, "ALSEL_SEED");
  throw Error("no seed given: pass --seed or set ALSEL_SEED");
}

void Cli::Preprocess() {
  CleanOptions opt;
  opt.max_words = max_words_;
  opt.limit_source = limit_side_ == "both" || limit_side_ == "source";
  opt.limit_target = limit_side_ == "both" || limit_side_ == "target";
  if (!opt.limit_source && !opt.limit_target)
    throw Error("--limit-side must be both, source or target");
  resolved_ = {{"input", input_},           {"format", format_},
               {"output", output_},         {"max_words", max_words_},
               {"limit_side", limit_side_}, {"report", report_path_}};
  const ParallelCorpus raw = LoadParallel(input_, ParseCorpusFormat(format_));
  auto [clean, report] = Clean(raw, opt);
  const std::string report_json = ToJson(report).dump(2) + "\n";
  WriteFileOnce(output_, CorpusToJsonl(clean));
  if (!report_path_.empty()) WriteFileOnce(report_path_, report_json);
  out_ << report_json;
}

void Cli::Split() {
  const std::uint64_t seed = ResolveSeed();
  resolved_ = {{"corpus", corpus_},
               {"format", corpus_format_},
               {"k", k_},
               {"fold", fold_},
               {"train_size", train_size_},
               {"val_size", val_size_},
               {"seed", seed},
               {"training_config", training_config_},
               {"bpe_merges", bpe_merges_}};
  ExperimentConfig config;
  config.base_seed = seed;
  config.k = k_;
  config.test_fold = fold_;
  if (!training_config_.empty()) {
    try {
      config.training_config = json::parse(ReadFileOrThrow(training_config_));
    } catch (const json::exception &e) {
      throw Error(training_config_ + ": not valid JSON: " + e.what());
    }
  }
  config.external_preprocessing = {
      {"bpe", {{"merges", bpe_merges_}, {"applied", "external"}}}};

  const ParallelCorpus corpus =
      LoadParallel(corpus_, ParseCorpusFormat(corpus_format_));
  WriterLock lock(dir_);
  const FoldSpec folds = SplitFolds(corpus, k_, KeyedHash(seed, 0, "folds"));
  const SplitSet split =
      MaterializeSplit(corpus, folds, fold_, train_size_, val_size_,
                       KeyedHash(seed, 0, "split"));
  const ExperimentState state = CreateExperiment(dir_, split, folds, config);
  out_ << json{{"train", split.train.size()},
               {"validation", split.validation.size()},
               {"test", split.test.size()},
               {"pool", split.pool.size()},
               {"folds", folds.FoldSizes()},
               {"oracle_sha256", state.config.oracle_sha256}}
              .dump(2)
       << "\n";
}

void Cli::Score() {
  ScoreKind kind;
  if (!score_kind_.empty()) {
    kind = ParseScoreKind(score_kind_);
  } else if (!select_.strategy.empty()) {
    auto k = ScoreKindOf(ParseStrategy(select_.strategy));
    if (!k) throw Error("strategy random does not use scores");
    kind = *k;
  } else {
    throw Error("pass --kind rttl|qe or a scored --strategy");
  }
  resolved_ = {{"kind", ScoreKindName(kind)}, {"scorer", scorer_.Resolved()}};
  if (!scorer_.configured())
    throw Error("no scorer: pass --mock-scorer or endpoint URLs");
  WriterLock lock(dir_);
  const ExperimentState state = Resume(dir_);
  if (state.pool.available() == 0) throw Error("pool is exhausted");
  const PoolScores scores =
      ScorePool(state.pool, scorer_.Clients(), kind, scorer_.Options());
  WriteScores(dir_, state.iteration, scores);
  out_ << json{{"iteration", state.iteration},
               {"kind", ScoreKindName(kind)},
               {"scored", scores.candidates.size()},
               {"file", ExperimentPaths(dir_).scores(state.iteration).string()}}
              .dump(2)
       << "\n";
}

void Cli::Select() {
  resolved_ = select_.Resolved();
  const IterationRequest request = select_.Request();
  WriterLock lock(dir_);
  const ExperimentState state = Resume(dir_);
  if (state.pool.available() == 0) throw Error("pool is exhausted");
  std::vector<ScoredCandidate> candidates;
  if (ScoreKindOf(request.strategy)) {
    auto stored = ReadScores(dir_, state.iteration);
    if (!stored)
      throw Error("no scores for iteration " + std::to_string(state.iteration) +
                  "; run 'alsel score' first");
    candidates = ScoresFromJsonl(stored->jsonl);
  }
  const SelectionBatch batch = SelectStep(state, request, candidates);
  WriteSelection(dir_, batch);
  out_ << json{{"iteration", batch.iteration},
               {"strategy", batch.strategy},
               {"selected", batch.ids.size()},
               {"fill", FillToJson(batch.fill)}}
              .dump(2)
       << "\n";
}

void Cli::Iterate() {
  IterationRequest request = select_.Request();
  int stops = (stop_total_ ? 1 : 0) + (stop_iterations_ ? 1 : 0) +
              (stop_exhausted_ ? 1 : 0);
  if (stops > 1) throw Error("give at most one stopping criterion");
  if (stop_total_) request.stop = TotalBudget{*stop_total_};
  if (stop_iterations_) request.stop = MaxIterations{*stop_iterations_};
  if (stop_exhausted_) request.stop = PoolExhausted{};
  resolved_ = select_.Resolved();
  resolved_["iterations"] = iterations_;
  resolved_["scorer"] = scorer_.Resolved();
  resolved_["stop"] = stop_total_ ? json{{"total_budget", *stop_total_}}
                      : stop_iterations_
                          ? json{{"max_iterations", *stop_iterations_}}
                      : stop_exhausted_ ? json("pool_exhausted")
                                        : json(nullptr);

  WriterLock lock(dir_);
  ExperimentState state = Resume(dir_);
  const OracleStore oracle = LoadOracle(dir_, state.config);
  std::optional<ScoringClients> clients;
  for (std::size_t n = 0; n < iterations_; ++n) {
    if (n > 0 && ((request.stop && ShouldStop(state, *request.stop)) ||
                  state.pool.available() == 0))
      break;
    const auto t0 = std::chrono::steady_clock::now();
    IterationInputs inputs;
    inputs.oracle = &oracle;
    inputs.score_options = scorer_.Options();
    if (ScoreKindOf(request.strategy)) {
      if (auto stored = ReadScores(dir_, state.iteration)) {
        inputs.precomputed_scores_jsonl = std::move(stored->jsonl);
        inputs.score_meta = std::move(stored->meta);
      } else {
        if (!scorer_.configured())
          throw Error("no scores for iteration " +
                      std::to_string(state.iteration) +
                      " and no scorer: pass --mock-scorer or endpoint URLs");
        if (!clients) clients = scorer_.Clients();
        inputs.clients = *clients;
      }
    }
    IterationOutcome outcome = RunIteration(state, request, inputs);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    CommitIteration(dir_, outcome, secs);
    const IterationManifest &m = outcome.manifest;
    out_ << json{{"iteration", m.iteration},
                 {"strategy", m.strategy},
                 {"selected", m.selected_ids.size()},
                 {"labelled", m.labelled_after},
                 {"pool_available", m.pool_available_after},
                 {"manifest",
                  ExperimentPaths(dir_).manifest(m.iteration).string()}}
                .dump()
         << "\n";
    state = std::move(outcome.state);
  }
}

void Cli::Report() {
  const ReportFormat format = ParseReportFormat(report_format_);
  resolved_ = {{"dirs", dirs_},
               {"history", history_},
               {"bleu", bleu_},
               {"format", report_format_},
               {"output", output_},
               {"case_sensitive", case_sensitive_},
               {"keep_symbols", keep_symbols_}};
  if (dirs_.empty() == history_.empty())
    throw Error("pass either --dir (one or more) or --history");
  std::vector<BatchStats> history;
  if (!history_.empty()) {
    try {
      history = HistoryFromJson(json::parse(ReadFileOrThrow(history_)));
    } catch (const json::exception &e) {
      throw Error(history_ + ": not valid JSON: " + e.what());
    }
  }
  WordOptions words;
  words.case_fold = !case_sensitive_;
  words.strip_symbols = !keep_symbols_;
  for (const std::string &d : dirs_) {
    const ExperimentState state = Resume(d);
    for (const IterationManifest &m : state.history) {
      std::vector<std::string> sources;
      sources.reserve(m.selected_ids.size());
      for (SentenceId id : m.selected_ids)
        sources.push_back(state.pool.Find(id)->source);
      BatchStats s = ComputeBatchStats(sources, SizeLabel(m.labelled_after),
                                       m.strategy, words);
      s.cumulative_sentences = m.labelled_after - state.config.train_size;
      s.delta_bleu = m.external_bleu;
      history.push_back(std::move(s));
    }
  }
  if (!bleu_.empty()) {
    // label \t strategy \t delta_bleu
    std::map<std::pair<std::string, std::string>, double> bleu;
    const std::string content = ReadFileOrThrow(bleu_);
    std::size_t line_no = 0, pos = 0;
    while (pos < content.size()) {
      std::size_t eol = content.find('\n', pos);
      if (eol == std::string::npos) eol = content.size();
      std::string_view line(content.data() + pos, eol - pos);
      pos = eol + 1;
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.empty()) continue;
      const auto a = line.find('\t');
      const auto b = a == line.npos ? line.npos : line.find('\t', a + 1);
      double v = 0.0;
      if (b == line.npos ||
          std::from_chars(line.data() + b + 1, line.data() + line.size(), v)
                  .ptr != line.data() + line.size())
        throw Error(bleu_ + ":" + std::to_string(line_no) +
                    ": expected label<TAB>strategy<TAB>delta_bleu");
      bleu[{std::string(line.substr(0, a)),
            std::string(line.substr(a + 1, b - a - 1))}] = v;
    }
    for (BatchStats &s : history) {
      auto it = bleu.find({s.label, s.strategy});
      if (it != bleu.end()) s.delta_bleu = it->second;
    }
  }
  Emit(output_, RenderReport(history, format), out_);
}

int Cli::Run(const std::vector<std::string> &args) {
  CLI::App app{"Active-learning data selection engine for machine translation",
               "alsel"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  auto *pre = app.add_subcommand("preprocess", "Clean a parallel corpus");
  pre->add_option("--input", input_, "Raw corpus")->required();
  pre->add_option("--format", format_, "tsv | jsonl");
  pre->add_option("--output", output_, "Cleaned corpus (JSONL)")->required();
  pre->add_option("--max-words", max_words_, "Longest sentence kept")
      ->check(CLI::PositiveNumber);
  pre->add_option("--limit-side", limit_side_,
                  "Sides the word limit applies to: both | source | target");
  pre->add_option("--report", report_path_, "Also write the report here");
  pre->add_option("--dir", dir_, "Experiment directory to log into");

  auto *split = app.add_subcommand("split", "Create an experiment split");
  split->add_option("--corpus", corpus_, "Cleaned corpus")->required();
  split->add_option("--format", corpus_format_, "tsv | jsonl");
  split->add_option("--dir", dir_, "Experiment directory")->required();
  split->add_option("--k", k_, "Number of folds")->check(CLI::PositiveNumber);
  split->add_option("--fold", fold_, "Test fold index");
  split->add_option("--train-size", train_size_, "Base training sentences");
  split->add_option("--val-size", val_size_, "Validation sentences");
  split->add_option("--seed", seed_, "Base seed (overrides ALSEL_SEED)");
  split->add_option("--training-config", training_config_,
                    "JSON training configuration stored with checkpoints");
  split->add_option("--bpe-merges", bpe_merges_,
                    "Recorded external BPE merge count");

  auto *score = app.add_subcommand("score", "Score the unconsumed pool");
  score->add_option("--dir", dir_, "Experiment directory")->required();
  score->add_option("--kind", score_kind_, "rttl | qe");
  score->add_option("--strategy", select_.strategy,
                    "Scored strategy (alternative to --kind)");
  scorer_.Register(score);

  auto *select = app.add_subcommand("select", "Select the next batch");
  select->add_option("--dir", dir_, "Experiment directory")->required();
  select_.Register(select);

  auto *iterate = app.add_subcommand("iterate", "Run active-learning cycles");
  iterate->add_option("--dir", dir_, "Experiment directory")->required();
  select_.Register(iterate);
  scorer_.Register(iterate);
  iterate->add_option("--iterations", iterations_, "Cycles to run")
      ->check(CLI::PositiveNumber);
  iterate->add_option("--stop-total", stop_total_,
                      "Stop once this many sentences were selected");
  iterate->add_option("--stop-iterations", stop_iterations_,
                      "Stop after this many iterations");
  iterate->add_flag("--stop-when-exhausted", stop_exhausted_,
                    "Stop when the pool is empty");

  auto *report = app.add_subcommand("report", "Batch statistics report");
  report->add_option("--dir", dirs_, "Experiment directories");
  report->add_option("--history", history_, "BatchStats JSON array");
  report->add_option("--bleu", bleu_,
                     "TSV of label, strategy, delta BLEU to attach");
  report->add_option("--format", report_format_,
                     "csv | json | plotdata | table");
  report->add_option("--output", output_, "Output file (default stdout)");
  report->add_flag("--case-sensitive", case_sensitive_,
                   "Do not case-fold words");
  report->add_flag("--keep-symbols", keep_symbols_,
                   "Keep boundary punctuation on words");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out_, err_);
    return code == 0 ? kExitOk : kExitInput;
  }

  CLI::App *cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  json entry = {{"command", name}, {"argv", args}, {"started", UtcNow()}};
  int code = kExitOk;
  try {
    if (cmd == pre) Preprocess();
    if (cmd == split) Split();
    if (cmd == score) Score();
    if (cmd == select) Select();
    if (cmd == iterate) Iterate();
    if (cmd == report) Report();
  } catch (const Error &e) {
    err_ << "alsel " << name << ": " << e.what() << "\n";
    code = e.exit_code();
    entry["error"] = e.what();
  } catch (const std::exception &e) {
    err_ << "alsel " << name << ": " << e.what() << "\n";
    code = kExitInput;
    entry["error"] = e.what();
  }
  entry["resolved"] = resolved_;
  entry["exit_code"] = code;
  std::vector<std::string> log_dirs = dirs_;
  if (!dir_.empty()) log_dirs.push_back(dir_);
  for (const std::string &d : log_dirs) {
    if (!fs::is_directory(d)) continue;
    try {
      AppendRunLog(d, entry);
    } catch (const std::exception &e) {
      err_ << "alsel: cannot write run log: " << e.what() << "\n";
    }
  }
  return code;
}

}  // namespace

int RunCli(const std::vector<std::string> &args, std::ostream &out,
           std::ostream &err) {
  try {
    Cli cli(out, err);
    return cli.Run(args);
  } catch (const std::exception &e) {
    err << "alsel: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace alsel
