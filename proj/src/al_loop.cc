// src/al_loop.cc

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

#include "alsel/al_loop.h"

#include <algorithm>
#include <unordered_map>

#include "alsel/errors.h"
#include "alsel/fileio.h"

namespace alsel {

using nlohmann::json;

std::string_view StrategyName(Strategy s) {
  switch (s) {
    case Strategy::kRandom:
      return "random";
    case Strategy::kRttl:
      return "rttl";
    case Strategy::kSrttl:
      return "srttl";
    case Strategy::kQe:
      return "qe";
    case Strategy::kSqe:
      return "sqe";
  }
  return "";
}

Strategy ParseStrategy(std::string_view name) {
  for (Strategy s : {Strategy::kRandom, Strategy::kRttl, Strategy::kSrttl,
                     Strategy::kQe, Strategy::kSqe})
    if (StrategyName(s) == name) return s;
  throw Error("unknown strategy '" + std::string(name) +
              "' (expected random, rttl, srttl, qe or sqe)");
}

std::optional<ScoreKind> ScoreKindOf(Strategy s) {
  switch (s) {
    case Strategy::kRandom:
      return std::nullopt;
    case Strategy::kRttl:
    case Strategy::kSrttl:
      return ScoreKind::kRttl;
    case Strategy::kQe:
    case Strategy::kSqe:
      return ScoreKind::kQe;
  }
  return std::nullopt;
}

bool IsStratified(Strategy s) {
  return s == Strategy::kSrttl || s == Strategy::kSqe;
}

std::string_view ReferenceName(LengthReference r) {
  return r == LengthReference::kTrain ? "train" : "test";
}

LengthReference ParseReference(std::string_view name) {
  if (name == "train") return LengthReference::kTrain;
  if (name == "test") return LengthReference::kTest;
  throw Error("unknown length reference '" + std::string(name) + "'");
}

json ToJson(const ExperimentConfig &c) {
  return {{"base_seed", c.base_seed},
          {"k", c.k},
          {"test_fold", c.test_fold},
          {"train_size", c.train_size},
          {"val_size", c.val_size},
          {"prng", c.prng},
          {"training_config", c.training_config},
          {"external_preprocessing", c.external_preprocessing},
          {"checksums",
           {{"train", c.train_sha256},
            {"validation", c.validation_sha256},
            {"test", c.test_sha256},
            {"pool", c.pool_sha256},
            {"oracle", c.oracle_sha256}}}};
}

ExperimentConfig ExperimentConfigFromJson(const json &j) {
  ExperimentConfig c;
  try {
    c.base_seed = j.at("base_seed").get<std::uint64_t>();
    c.k = j.at("k").get<std::size_t>();
    c.test_fold = j.at("test_fold").get<std::size_t>();
    c.train_size = j.at("train_size").get<std::size_t>();
    c.val_size = j.at("val_size").get<std::size_t>();
    c.prng = j.at("prng").get<std::string>();
    c.training_config = j.at("training_config");
    c.external_preprocessing = j.at("external_preprocessing");
    const json &sums = j.at("checksums");
    c.train_sha256 = sums.at("train").get<std::string>();
    c.validation_sha256 = sums.at("validation").get<std::string>();
    c.test_sha256 = sums.at("test").get<std::string>();
    c.pool_sha256 = sums.at("pool").get<std::string>();
    c.oracle_sha256 = sums.at("oracle").get<std::string>();
  } catch (const json::exception &e) {
    throw Error(std::string("malformed experiment config: ") + e.what());
  }
  return c;
}

json ToJson(const IterationManifest &m) {
  return {
      {"iteration", m.iteration},
      {"strategy", m.strategy},
      {"base_seed", m.base_seed},
      {"seed", m.seed},
      {"budget", m.budget},
      {"bin_width", m.bin_width == 0 ? json(nullptr) : json(m.bin_width)},
      {"reference", m.reference.empty() ? json(nullptr) : json(m.reference)},
      {"selected_ids", m.selected_ids},
      {"selected_priorities", m.selected_priorities.empty()
                                  ? json(nullptr)
                                  : json(m.selected_priorities)},
      {"labelled_before", m.labelled_before},
      {"labelled_after", m.labelled_after},
      {"pool_available_before", m.pool_available_before},
      {"pool_available_after", m.pool_available_after},
      {"checksums",
       {{"scores", m.scores_sha256 ? json(*m.scores_sha256) : json(nullptr)},
        {"selection", m.selection_sha256},
        {"labelled", m.labelled_sha256},
        {"oracle", m.oracle_sha256},
        {"validation", m.validation_sha256},
        {"test", m.test_sha256},
        {"previous_manifest", m.previous_manifest_sha256}}},
      {"fill", FillToJson(m.fill)},
      {"decode_mode", m.decode_mode},
      {"models", m.models},
      {"external_bleu",
       m.external_bleu ? json(*m.external_bleu) : json(nullptr)},
  };
}

IterationManifest ManifestFromJson(const json &j) {
  IterationManifest m;
  try {
    m.iteration = j.at("iteration").get<std::size_t>();
    m.strategy = j.at("strategy").get<std::string>();
    m.base_seed = j.at("base_seed").get<std::uint64_t>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.budget = j.at("budget").get<std::size_t>();
    if (!j.at("bin_width").is_null())
      m.bin_width = j.at("bin_width").get<std::size_t>();
    if (!j.at("reference").is_null())
      m.reference = j.at("reference").get<std::string>();
    m.selected_ids = j.at("selected_ids").get<std::vector<SentenceId>>();
    if (!j.at("selected_priorities").is_null())
      m.selected_priorities =
          j.at("selected_priorities").get<std::vector<double>>();
    m.labelled_before = j.at("labelled_before").get<std::size_t>();
    m.labelled_after = j.at("labelled_after").get<std::size_t>();
    m.pool_available_before = j.at("pool_available_before").get<std::size_t>();
    m.pool_available_after = j.at("pool_available_after").get<std::size_t>();
    const json &sums = j.at("checksums");
    if (!sums.at("scores").is_null())
      m.scores_sha256 = sums.at("scores").get<std::string>();
    m.selection_sha256 = sums.at("selection").get<std::string>();
    m.labelled_sha256 = sums.at("labelled").get<std::string>();
    m.oracle_sha256 = sums.at("oracle").get<std::string>();
    m.validation_sha256 = sums.at("validation").get<std::string>();
    m.test_sha256 = sums.at("test").get<std::string>();
    m.previous_manifest_sha256 =
        sums.at("previous_manifest").get<std::string>();
    m.fill = FillFromJson(j.at("fill"));
    m.decode_mode = j.at("decode_mode").get<std::string>();
    m.models = j.at("models");
    if (!j.at("external_bleu").is_null())
      m.external_bleu = j.at("external_bleu").get<double>();
  } catch (const json::exception &e) {
    throw Error(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

std::string SerializeManifest(const IterationManifest &manifest) {
  return ToJson(manifest).dump(2) + "\n";
}

ExperimentState InitialState(const SplitSet &split, ExperimentConfig config) {
  ExperimentState state;
  state.labelled = split.train;
  state.pool = split.pool;
  state.validation = split.validation;
  state.test = split.test;
  for (const auto &r : split.train.records)
    state.train_lengths.push_back(r.source_len);
  config.train_size = split.train.size();
  config.val_size = split.validation.size();
  config.train_sha256 = Sha256Hex(CorpusToJsonl(split.train));
  config.validation_sha256 = Sha256Hex(CorpusToJsonl(split.validation));
  config.test_sha256 = Sha256Hex(CorpusToJsonl(split.test));
  config.pool_sha256 = Sha256Hex(CorpusToJsonl(
      ParallelCorpus{split.pool.records(), split.train.provenance}));
  config.oracle_sha256 = Sha256Hex(split.oracle.ToJsonl());
  state.config = std::move(config);
  return state;
}

bool ShouldStop(const ExperimentState &state, const StopCriterion &criterion) {
  struct Visitor {
    const ExperimentState &s;
    bool operator()(const TotalBudget &c) const {
      std::size_t spent = 0;
      for (const auto &m : s.history) spent += m.selected_ids.size();
      return spent >= c.sentences;
    }
    bool operator()(const MaxIterations &c) const {
      return s.history.size() >= c.iterations;
    }
    bool operator()(const PoolExhausted &) const {
      return s.pool.available() == 0;
    }
  };
  return std::visit(Visitor{state}, criterion);
}

std::uint64_t IterationSeed(const ExperimentState &state) {
  return DeriveSeed(state.config.base_seed, state.iteration);
}

PoolScores ScoreStep(const ExperimentState &state, Strategy strategy,
                     const ScoringClients &clients,
                     const ScoreOptions &options) {
  auto kind = ScoreKindOf(strategy);
  if (!kind)
    throw Error("strategy " + std::string(StrategyName(strategy)) +
                " does not use scores");
  return ScorePool(state.pool, clients, *kind, options);
}

SelectionBatch SelectStep(const ExperimentState &state,
                          const IterationRequest &request,
                          std::span<const ScoredCandidate> candidates) {
  if (request.budget == 0) throw Error("budget must be >= 1");
  SelectionBatch batch;
  if (request.strategy == Strategy::kRandom) {
    batch = SelectRandom(state.pool, request.budget, IterationSeed(state));
  } else {
    for (const auto &c : candidates) {
      if (!state.pool.Find(c.id) || state.pool.IsConsumed(c.id))
        throw Error("candidate " + std::to_string(c.id) +
                    " is not an unconsumed pool sentence");
      if (c.strategy != *ScoreKindOf(request.strategy))
        throw Error("candidate " + std::to_string(c.id) + " was scored with " +
                    std::string(ScoreKindName(c.strategy)));
    }
    if (IsStratified(request.strategy)) {
      std::vector<std::size_t> ref_lengths;
      if (request.reference == LengthReference::kTrain) {
        ref_lengths = state.train_lengths;
      } else {
        for (const auto &r : state.test.records)
          ref_lengths.push_back(r.source_len);
      }
      const LengthDistribution dist =
          BuildLengthHistogram(ref_lengths, request.bin_width,
                               std::string(ReferenceName(request.reference)));
      std::unordered_map<SentenceId, std::size_t> lengths;
      for (const SentenceRecord *r : state.pool.Available())
        lengths.emplace(r->id, r->source_len);
      batch = SelectStratified(candidates, lengths, dist, request.budget);
    } else {
      batch = SelectTopK(candidates, request.budget);
    }
  }
  batch.iteration = state.iteration;
  batch.strategy = std::string(StrategyName(request.strategy));
  batch.seed = IterationSeed(state);
  return batch;
}

IterationOutcome RunIteration(const ExperimentState &state,
                              const IterationRequest &request,
                              const IterationInputs &inputs) {
  if (request.stop && ShouldStop(state, *request.stop))
    throw Error("stopping criterion already met after iteration " +
                std::to_string(state.history.size()));
  if (state.pool.available() == 0) throw Error("pool is exhausted");
  if (!inputs.oracle)
    throw Error("sealed oracle store is unavailable; annotation needs it");

  IterationOutcome out;
  std::vector<ScoredCandidate> candidates;
  if (auto kind = ScoreKindOf(request.strategy)) {
    if (inputs.precomputed_scores_jsonl) {
      candidates = ScoresFromJsonl(*inputs.precomputed_scores_jsonl);
      out.score_meta = inputs.score_meta;
      out.scores_jsonl = *inputs.precomputed_scores_jsonl;
      const auto available = state.pool.Available();
      bool covers = candidates.size() == available.size();
      for (std::size_t i = 0; covers && i < candidates.size(); ++i)
        covers = candidates[i].id == available[i]->id;
      if (!covers)
        throw Error("ingested scores do not cover the unconsumed pool");
    } else {
      PoolScores scores = ScoreStep(state, request.strategy, inputs.clients,
                                    inputs.score_options);
      out.score_meta = ScoreMetaJson(scores);
      candidates = std::move(scores.candidates);
      out.scores_jsonl = ScoresToJsonl(candidates);
    }
  }

  out.selection = SelectStep(state, request, candidates);
  const SelectionBatch &sel = out.selection;

  std::vector<SentenceRecord> added;
  added.reserve(sel.ids.size());
  for (SentenceId id : sel.ids) {
    const SentenceRecord *r = state.pool.Find(id);
    if (!r || state.pool.IsConsumed(id))
      throw IntegrityError("selected id " + std::to_string(id) +
                           " is not available in the pool");
    SentenceRecord labelled = *r;
    labelled.target = inputs.oracle->Lookup(id);
    added.push_back(std::move(labelled));
  }
  std::sort(added.begin(), added.end(),
            [](const auto &a, const auto &b) { return a.id < b.id; });

  ExperimentState next = state;
  std::vector<SentenceRecord> merged;
  merged.reserve(state.labelled.size() + added.size());
  std::merge(state.labelled.records.begin(), state.labelled.records.end(),
             added.begin(), added.end(), std::back_inserter(merged),
             [](const auto &a, const auto &b) { return a.id < b.id; });
  for (std::size_t i = 1; i < merged.size(); ++i)
    if (merged[i].id == merged[i - 1].id)
      throw IntegrityError("id " + std::to_string(merged[i].id) +
                           " is already labelled");
  next.labelled.records = std::move(merged);
  next.pool.Consume(sel.ids);
  out.labelled_jsonl = CorpusToJsonl(next.labelled);

  IterationManifest &m = out.manifest;
  m.iteration = state.iteration;
  m.strategy = sel.strategy;
  m.base_seed = state.config.base_seed;
  m.seed = sel.seed;
  m.budget = request.budget;
  if (IsStratified(request.strategy)) {
    m.bin_width = request.bin_width;
    m.reference = std::string(ReferenceName(request.reference));
  }
  m.selected_ids = sel.ids;
  m.selected_priorities = sel.priorities;
  m.labelled_before = state.labelled.size();
  m.labelled_after = next.labelled.size();
  m.pool_available_before = state.pool.available();
  m.pool_available_after = next.pool.available();
  if (out.scores_jsonl) m.scores_sha256 = Sha256Hex(*out.scores_jsonl);
  m.selection_sha256 = Sha256Hex(SerializeSelection(sel));
  m.labelled_sha256 = Sha256Hex(out.labelled_jsonl);
  m.oracle_sha256 = state.config.oracle_sha256;
  m.validation_sha256 = Sha256Hex(CorpusToJsonl(state.validation));
  m.test_sha256 = Sha256Hex(CorpusToJsonl(state.test));
  m.previous_manifest_sha256 = state.head_sha256;
  m.fill = sel.fill;
  if (out.score_meta.is_object()) {
    m.decode_mode = out.score_meta.value("decode_mode", std::string());
    m.models = out.score_meta.value("models", json::object());
  }

  next.iteration = state.iteration + 1;
  next.head_sha256 = Sha256Hex(SerializeManifest(m));
  next.history.push_back(m);
  out.state = std::move(next);
  return out;
}

std::string SizeLabel(std::size_t labelled_size) {
  if (labelled_size > 0 && labelled_size % 1000 == 0)
    return std::to_string(labelled_size / 1000) + "k";
  return std::to_string(labelled_size);
}

}  // namespace alsel
