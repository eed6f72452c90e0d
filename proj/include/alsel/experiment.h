// alsel/experiment.h

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

#ifndef ALSEL_EXPERIMENT_H_
#define ALSEL_EXPERIMENT_H_

// On-disk experiment directory:
//
//   config.json                  seeds, split sizes, checksums, training blob
//   split/{train,validation,test,pool}.jsonl, split/folds.json
//   oracle.jsonl, oracle.sha256  sealed pool targets
//   scores/iter_<i>.jsonl        + iter_<i>.meta.json (batch checksums)
//   selections/iter_<i>.json
//   checkpoints/iter_<i>/        labelled.jsonl + training.json
//   manifests/iter_<i>.json      commit point of iteration i
//   manifests/iter_<i>.timing.json
//   runs.log                     one JSON line per command invocation
//
// Manifests are append-only and chained by the SHA-256 of their
// predecessor. Only one writer may hold the directory (see WriterLock).

#include <filesystem>
#include <optional>
#include <string>

#include "alsel/al_loop.h"
#include "alsel/corpus.h"
#include "json.hpp"

namespace alsel {

class ExperimentPaths {
 public:
  explicit ExperimentPaths(std::filesystem::path root)
      : root_(std::move(root)) {}

  const std::filesystem::path &root() const { return root_; }
  std::filesystem::path config() const { return root_ / "config.json"; }
  std::filesystem::path train() const { return root_ / "split/train.jsonl"; }
  std::filesystem::path validation() const {
    return root_ / "split/validation.jsonl";
  }
  std::filesystem::path test() const { return root_ / "split/test.jsonl"; }
  std::filesystem::path pool() const { return root_ / "split/pool.jsonl"; }
  std::filesystem::path folds() const { return root_ / "split/folds.json"; }
  std::filesystem::path oracle() const { return root_ / "oracle.jsonl"; }
  std::filesystem::path oracle_checksum() const {
    return root_ / "oracle.sha256";
  }
  std::filesystem::path scores(std::size_t i) const;
  std::filesystem::path score_meta(std::size_t i) const;
  std::filesystem::path selection(std::size_t i) const;
  std::filesystem::path checkpoint(std::size_t i) const;
  std::filesystem::path manifest(std::size_t i) const;
  std::filesystem::path timing(std::size_t i) const;
  std::filesystem::path runs_log() const { return root_ / "runs.log"; }

 private:
  std::filesystem::path root_;
};

/// Writes the split, the sealed oracle and config.json. Re-running with
/// identical inputs is a no-op; differing content fails with "already
/// exists". Returns the iteration-0 state.
ExperimentState CreateExperiment(const std::filesystem::path &dir,
                                 const SplitSet &split, const FoldSpec &folds,
                                 ExperimentConfig config);

/// Rebuilds the state after the last committed manifest. Verifies the split
/// files, the manifest chain and every referenced score, selection and
/// checkpoint file; the first inconsistency raises IntegrityError naming
/// the manifest. Never reads the oracle store.
ExperimentState Resume(const std::filesystem::path &dir);

/// Loads the sealed store and checks it against config.json.
OracleStore LoadOracle(const std::filesystem::path &dir,
                       const ExperimentConfig &config);

/// Persists a scoring run for iteration `iteration` (write-once).
void WriteScores(const std::filesystem::path &dir, std::size_t iteration,
                 const PoolScores &scores);

struct StoredScores {
  std::string jsonl;
  nlohmann::json meta = nlohmann::json::object();
};

std::optional<StoredScores> ReadScores(const std::filesystem::path &dir,
                                       std::size_t iteration);

void WriteSelection(const std::filesystem::path &dir,
                    const SelectionBatch &batch);

/// Writes every artifact of an iteration; the manifest goes last.
void CommitIteration(const std::filesystem::path &dir,
                     const IterationOutcome &outcome, double wall_seconds);

void AppendRunLog(const std::filesystem::path &dir,
                  const nlohmann::json &entry);

}  // namespace alsel

#endif  // ALSEL_EXPERIMENT_H_
