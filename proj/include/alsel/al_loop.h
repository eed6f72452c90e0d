// alsel/al_loop.h

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

#ifndef ALSEL_AL_LOOP_H_
#define ALSEL_AL_LOOP_H_

// One active-learning cycle: score the pool, select a batch, pull the
// batch's targets from the sealed oracle store, grow the labelled set and
// record a manifest. Model training happens outside the engine; each
// iteration leaves a labelled snapshot plus the training config for it.
//
// Everything here is in memory. experiment.h maps states and outcomes onto
// an experiment directory.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "alsel/corpus.h"
#include "alsel/prng.h"
#include "alsel/scorers.h"
#include "alsel/selection.h"
#include "json.hpp"

namespace alsel {

enum class Strategy {
  kRandom,
  kRttl,
  kSrttl,  // length-stratified RTTL
  kQe,
  kSqe,  // length-stratified QE
};

std::string_view StrategyName(Strategy s);
Strategy ParseStrategy(std::string_view name);
/// The scorer a strategy ranks by; nullopt for random.
std::optional<ScoreKind> ScoreKindOf(Strategy s);
bool IsStratified(Strategy s);

enum class LengthReference { kTrain, kTest };

std::string_view ReferenceName(LengthReference r);
LengthReference ParseReference(std::string_view name);

struct ExperimentConfig {
  std::uint64_t base_seed = 0;
  std::size_t k = 5;
  std::size_t test_fold = 0;
  std::size_t train_size = 0;
  std::size_t val_size = 0;
  std::string prng{kPrngId};
  nlohmann::json training_config = nlohmann::json::object();
  nlohmann::json external_preprocessing = nlohmann::json::object();
  std::string train_sha256;
  std::string validation_sha256;
  std::string test_sha256;
  std::string pool_sha256;
  std::string oracle_sha256;
};

nlohmann::json ToJson(const ExperimentConfig &config);
ExperimentConfig ExperimentConfigFromJson(const nlohmann::json &j);

struct IterationManifest {
  std::size_t iteration = 0;
  std::string strategy;
  std::uint64_t base_seed = 0;
  std::uint64_t seed = 0;
  std::size_t budget = 0;
  std::size_t bin_width = 0;  // stratified only
  std::string reference;      // stratified only
  std::vector<SentenceId> selected_ids;
  std::vector<double> selected_priorities;  // empty for random
  std::size_t labelled_before = 0;
  std::size_t labelled_after = 0;
  std::size_t pool_available_before = 0;
  std::size_t pool_available_after = 0;
  std::optional<std::string> scores_sha256;
  std::string selection_sha256;
  std::string labelled_sha256;
  std::string oracle_sha256;
  std::string validation_sha256;
  std::string test_sha256;
  std::string previous_manifest_sha256;
  std::vector<BinFill> fill;
  std::string decode_mode;
  nlohmann::json models = nlohmann::json::object();
  std::optional<double> external_bleu;
};

nlohmann::json ToJson(const IterationManifest &manifest);
IterationManifest ManifestFromJson(const nlohmann::json &j);
/// Canonical bytes: sorted keys, two-space indent, trailing newline.
std::string SerializeManifest(const IterationManifest &manifest);

struct ExperimentState {
  std::size_t iteration = 0;
  ParallelCorpus labelled;
  MonoPool pool;
  ParallelCorpus validation;
  ParallelCorpus test;
  std::vector<std::size_t> train_lengths;  // base training set
  ExperimentConfig config;
  std::vector<IterationManifest> history;
  std::string head_sha256;  // SHA-256 of the last serialized manifest
};

/// Iteration-0 state of a split. Fills the config's checksums.
ExperimentState InitialState(const SplitSet &split, ExperimentConfig config);

struct TotalBudget {
  std::size_t sentences;
};
struct MaxIterations {
  std::size_t iterations;
};
struct PoolExhausted {};
using StopCriterion = std::variant<TotalBudget, MaxIterations, PoolExhausted>;

bool ShouldStop(const ExperimentState &state, const StopCriterion &criterion);

struct IterationRequest {
  Strategy strategy = Strategy::kRandom;
  std::size_t budget = 0;
  std::size_t bin_width = 10;
  LengthReference reference = LengthReference::kTrain;
  std::optional<StopCriterion> stop;
};

std::uint64_t IterationSeed(const ExperimentState &state);

/// Scores the unconsumed pool for a scored strategy.
PoolScores ScoreStep(const ExperimentState &state, Strategy strategy,
                     const ScoringClients &clients,
                     const ScoreOptions &options = {});

/// Picks the batch. `candidates` is ignored for random.
SelectionBatch SelectStep(const ExperimentState &state,
                          const IterationRequest &request,
                          std::span<const ScoredCandidate> candidates);

struct IterationInputs {
  const OracleStore *oracle = nullptr;
  ScoringClients clients;
  ScoreOptions score_options;
  /// Ingested score file bytes (e.g. from an external scorer run); must
  /// cover the unconsumed pool exactly. When set, no client is called and
  /// the manifest checksums these exact bytes.
  std::optional<std::string> precomputed_scores_jsonl;
  nlohmann::json score_meta = nlohmann::json::object();
};

struct IterationOutcome {
  ExperimentState state;
  IterationManifest manifest;
  std::optional<std::string> scores_jsonl;
  nlohmann::json score_meta;
  SelectionBatch selection;
  std::string labelled_jsonl;
};

/// Runs one cycle. The input state is not modified. Throws if the stop
/// criterion is already met, nothing is left to select, or the oracle
/// cannot supply a selected id (IntegrityError).
IterationOutcome RunIteration(const ExperimentState &state,
                              const IterationRequest &request,
                              const IterationInputs &inputs);

/// Labels such as "35k" for 35000, otherwise the plain number.
std::string SizeLabel(std::size_t labelled_size);

}  // namespace alsel

#endif  // ALSEL_AL_LOOP_H_
