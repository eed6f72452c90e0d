// src/experiment.cc

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

#include "alsel/experiment.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <regex>
#include <set>

#include "alsel/errors.h"
#include "alsel/fileio.h"

namespace alsel {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string Iter(std::size_t i) { return "iter_" + std::to_string(i); }

json ParseJsonFile(const fs::path &path) {
  const std::string bytes = ReadFileOrThrow(path);
  try {
    return json::parse(bytes);
  } catch (const json::exception &e) {
    throw IntegrityError(path.string() + ": not valid JSON: " + e.what());
  }
}

ParallelCorpus LoadChecked(const fs::path &path, const std::string &expected,
                           const std::string &what) {
  if (!fs::exists(path))
    throw IntegrityError(what + " file " + path.string() + " is missing");
  const std::string bytes = ReadFileOrThrow(path);
  if (Sha256Hex(bytes) != expected)
    throw IntegrityError(what + " file " + path.string() +
                         " does not match the checksum in config.json");
  return ParseParallel(bytes, CorpusFormat::kJsonl, path.string());
}

// Number of manifests/iter_<i>.json files, ignoring timing sidecars.
std::size_t CountManifestFiles(const fs::path &dir) {
  if (!fs::is_directory(dir)) return 0;
  static const std::regex kName(R"(iter_\d+\.json)");
  std::size_t n = 0;
  for (const auto &e : fs::directory_iterator(dir))
    if (std::regex_match(e.path().filename().string(), kName)) ++n;
  return n;
}

std::vector<SentenceId> Ids(const ParallelCorpus &c) {
  std::vector<SentenceId> ids;
  ids.reserve(c.size());
  for (const auto &r : c.records) ids.push_back(r.id);
  return ids;
}

}  // namespace

fs::path ExperimentPaths::scores(std::size_t i) const {
  return root_ / "scores" / (Iter(i) + ".jsonl");
}
fs::path ExperimentPaths::score_meta(std::size_t i) const {
  return root_ / "scores" / (Iter(i) + ".meta.json");
}
fs::path ExperimentPaths::selection(std::size_t i) const {
  return root_ / "selections" / (Iter(i) + ".json");
}
fs::path ExperimentPaths::checkpoint(std::size_t i) const {
  return root_ / "checkpoints" / Iter(i);
}
fs::path ExperimentPaths::manifest(std::size_t i) const {
  return root_ / "manifests" / (Iter(i) + ".json");
}
fs::path ExperimentPaths::timing(std::size_t i) const {
  return root_ / "manifests" / (Iter(i) + ".timing.json");
}

ExperimentState CreateExperiment(const fs::path &dir, const SplitSet &split,
                                 const FoldSpec &folds,
                                 ExperimentConfig config) {
  ExperimentState state = InitialState(split, std::move(config));
  const ExperimentPaths p(dir);
  const std::string oracle = split.oracle.ToJsonl();
  WriteFileOnce(p.train(), CorpusToJsonl(split.train));
  WriteFileOnce(p.validation(), CorpusToJsonl(split.validation));
  WriteFileOnce(p.test(), CorpusToJsonl(split.test));
  WriteFileOnce(p.pool(), CorpusToJsonl(ParallelCorpus{
                              split.pool.records(), split.train.provenance}));
  WriteFileOnce(p.folds(), ToJson(folds).dump() + "\n");
  WriteFileOnce(p.oracle(), oracle);
  WriteFileOnce(p.oracle_checksum(),
                state.config.oracle_sha256 + "  oracle.jsonl\n");
  WriteFileOnce(p.config(), ToJson(state.config).dump(2) + "\n");
  return state;
}

ExperimentState Resume(const fs::path &dir) {
  const ExperimentPaths p(dir);
  if (!fs::is_directory(dir)) throw Error(dir.string() + " is not a directory");
  if (!fs::exists(p.config()))
    throw Error(dir.string() +
                " is not an experiment directory (no config.json)");

  ExperimentState state;
  try {
    state.config = ExperimentConfigFromJson(ParseJsonFile(p.config()));
  } catch (const IntegrityError &) {
    throw;
  } catch (const Error &e) {
    throw IntegrityError(p.config().string() + ": " + e.what());
  }
  const ExperimentConfig &cfg = state.config;
  state.labelled = LoadChecked(p.train(), cfg.train_sha256, "train");
  state.validation =
      LoadChecked(p.validation(), cfg.validation_sha256, "validation");
  state.test = LoadChecked(p.test(), cfg.test_sha256, "test");
  state.pool = PoolFromCorpus(LoadChecked(p.pool(), cfg.pool_sha256, "pool"));
  for (const auto &r : state.labelled.records)
    state.train_lengths.push_back(r.source_len);
  const std::string val_sha = Sha256Hex(CorpusToJsonl(state.validation));
  const std::string test_sha = Sha256Hex(CorpusToJsonl(state.test));

  std::size_t i = 0;
  for (; fs::exists(p.manifest(i)); ++i) {
    const fs::path mpath = p.manifest(i);
    auto fail = [&](const std::string &msg) {
      throw IntegrityError("corrupt manifest " + mpath.string() + ": " + msg);
    };
    const std::string bytes = ReadFileOrThrow(mpath);
    IterationManifest m;
    try {
      m = ManifestFromJson(json::parse(bytes));
    } catch (const json::exception &e) {
      fail(std::string("not valid JSON: ") + e.what());
    } catch (const Error &e) {
      fail(e.what());
    }
    if (SerializeManifest(m) != bytes) fail("not in canonical form");
    if (m.iteration != i)
      fail("iteration field is " + std::to_string(m.iteration));
    if (m.previous_manifest_sha256 != state.head_sha256)
      fail("previous-manifest checksum breaks the chain");
    if (m.base_seed != cfg.base_seed) fail("base seed differs from config");
    if (m.oracle_sha256 != cfg.oracle_sha256)
      fail("oracle checksum differs from config");
    if (m.validation_sha256 != val_sha || m.test_sha256 != test_sha)
      fail("validation/test checksums differ from the split");
    if (m.labelled_before != state.labelled.size() ||
        m.pool_available_before != state.pool.available())
      fail("pre-iteration sizes do not match the replayed state");

    auto check_file = [&](const fs::path &f, const std::string &sha,
                          const std::string &what) -> std::string {
      if (!fs::exists(f)) fail(what + " file " + f.string() + " is missing");
      std::string content = ReadFileOrThrow(f);
      if (Sha256Hex(content) != sha)
        fail(what + " file " + f.string() + " checksum mismatch");
      return content;
    };
    if (m.scores_sha256) check_file(p.scores(i), *m.scores_sha256, "score");
    const std::string sel_bytes =
        check_file(p.selection(i), m.selection_sha256, "selection");
    try {
      const SelectionBatch sel = SelectionBatchFromJson(json::parse(sel_bytes));
      if (sel.ids != m.selected_ids) fail("selection ids differ");
    } catch (const json::exception &e) {
      fail(std::string("selection file unreadable: ") + e.what());
    } catch (const IntegrityError &) {
      throw;
    } catch (const Error &e) {
      fail(std::string("selection file unreadable: ") + e.what());
    }
    const std::string lab_bytes = check_file(p.checkpoint(i) / "labelled.jsonl",
                                             m.labelled_sha256, "checkpoint");

    try {
      state.pool.Consume(m.selected_ids);
    } catch (const Error &e) {
      fail(e.what());
    }
    ParallelCorpus next =
        ParseParallel(lab_bytes, CorpusFormat::kJsonl,
                      (p.checkpoint(i) / "labelled.jsonl").string());
    std::vector<SentenceId> expected = Ids(state.labelled);
    std::vector<SentenceId> added = m.selected_ids;
    std::sort(added.begin(), added.end());
    std::vector<SentenceId> merged;
    std::merge(expected.begin(), expected.end(), added.begin(), added.end(),
               std::back_inserter(merged));
    if (Ids(next) != merged)
      fail("checkpoint ids are not the previous labelled set plus the batch");
    if (next.size() != m.labelled_after ||
        state.pool.available() != m.pool_available_after)
      fail("post-iteration sizes do not match the replayed state");

    state.labelled = std::move(next);
    state.head_sha256 = Sha256Hex(bytes);
    state.history.push_back(std::move(m));
  }
  state.iteration = i;
  if (CountManifestFiles(dir / "manifests") != i)
    throw IntegrityError("manifest chain has a gap: " + p.manifest(i).string() +
                         " is missing but later manifests exist");
  return state;
}

OracleStore LoadOracle(const fs::path &dir, const ExperimentConfig &config) {
  const ExperimentPaths p(dir);
  if (!fs::exists(p.oracle()))
    throw IntegrityError("sealed oracle store " + p.oracle().string() +
                         " is missing");
  const std::string bytes = ReadFileOrThrow(p.oracle());
  if (Sha256Hex(bytes) != config.oracle_sha256)
    throw IntegrityError("oracle store " + p.oracle().string() +
                         " does not match its recorded checksum");
  return OracleStore::FromJsonl(bytes);
}

void WriteScores(const fs::path &dir, std::size_t iteration,
                 const PoolScores &scores) {
  const ExperimentPaths p(dir);
  WriteFileOnce(p.scores(iteration), ScoresToJsonl(scores.candidates));
  WriteFileOnce(p.score_meta(iteration), ScoreMetaJson(scores).dump(2) + "\n");
}

std::optional<StoredScores> ReadScores(const fs::path &dir,
                                       std::size_t iteration) {
  const ExperimentPaths p(dir);
  if (!fs::exists(p.scores(iteration))) return std::nullopt;
  StoredScores s;
  s.jsonl = ReadFileOrThrow(p.scores(iteration));
  if (fs::exists(p.score_meta(iteration)))
    s.meta = ParseJsonFile(p.score_meta(iteration));
  return s;
}

void WriteSelection(const fs::path &dir, const SelectionBatch &batch) {
  WriteFileOnce(ExperimentPaths(dir).selection(batch.iteration),
                SerializeSelection(batch));
}

void CommitIteration(const fs::path &dir, const IterationOutcome &outcome,
                     double wall_seconds) {
  const ExperimentPaths p(dir);
  const std::size_t i = outcome.manifest.iteration;
  if (outcome.scores_jsonl) {
    WriteFileOnce(p.scores(i), *outcome.scores_jsonl);
    WriteFileOnce(p.score_meta(i), outcome.score_meta.dump(2) + "\n");
  }
  WriteSelection(dir, outcome.selection);
  WriteFileOnce(p.checkpoint(i) / "labelled.jsonl", outcome.labelled_jsonl);
  json training = {
      {"iteration", i},
      {"labelled", "labelled.jsonl"},
      {"labelled_size", outcome.state.labelled.size()},
      {"validation", "../../split/validation.jsonl"},
      {"test", "../../split/test.jsonl"},
      {"training_config", outcome.state.config.training_config},
      {"external_preprocessing", outcome.state.config.external_preprocessing},
  };
  WriteFileOnce(p.checkpoint(i) / "training.json", training.dump(2) + "\n");
  WriteFileOnce(p.manifest(i), SerializeManifest(outcome.manifest));
  json timing = {{"iteration", i}, {"wall_seconds", wall_seconds}};
  WriteFileAtomic(p.timing(i), timing.dump(2) + "\n");
}

void AppendRunLog(const fs::path &dir, const json &entry) {
  const fs::path path = ExperimentPaths(dir).runs_log();
  fs::create_directories(dir);
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw Error("cannot open " + path.string());
  out << entry.dump() << '\n';
  if (!out) throw Error("cannot append to " + path.string());
}

}  // namespace alsel
