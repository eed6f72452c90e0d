// tests/experiment_util.h

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

#ifndef ALSEL_TESTS_EXPERIMENT_UTIL_H_
#define ALSEL_TESTS_EXPERIMENT_UTIL_H_

#include <filesystem>
#include <string>
#include <vector>

#include "alsel/al_loop.h"
#include "alsel/experiment.h"
#include "alsel/fileio.h"
#include "test_util.h"

namespace alsel::testing {

/// Split of a synthetic corpus of n pairs with k = 5, test fold 0.
inline SplitSet SyntheticSplit(std::size_t n, std::size_t train,
                               std::size_t val, std::uint64_t seed,
                               std::size_t max_len = 30) {
  const ParallelCorpus c = SyntheticCorpus(n, seed, max_len);
  const FoldSpec spec = SplitFolds(c, 5, seed + 1);
  return MaterializeSplit(c, spec, 0, train, val, seed + 2);
}

inline ExperimentConfig ConfigFor(std::uint64_t seed) {
  ExperimentConfig config;
  config.base_seed = seed;
  config.training_config = {{"model", "transformer"}, {"epochs", 30}};
  return config;
}

/// Runs and commits `iterations` cycles against an experiment directory.
inline ExperimentState RunCommitted(const std::filesystem::path &dir,
                                    const IterationRequest &request,
                                    std::size_t iterations,
                                    const ScoringClients &clients) {
  ExperimentState state = Resume(dir);
  const OracleStore oracle = LoadOracle(dir, state.config);
  for (std::size_t i = 0; i < iterations; ++i) {
    IterationInputs inputs;
    inputs.oracle = &oracle;
    inputs.clients = clients;
    IterationOutcome out = RunIteration(state, request, inputs);
    CommitIteration(dir, out, 0.0);
    state = std::move(out.state);
  }
  return state;
}

inline std::vector<SentenceId> AvailableIds(const MonoPool &pool) {
  std::vector<SentenceId> ids;
  for (const SentenceRecord *r : pool.Available()) ids.push_back(r->id);
  return ids;
}

/// Concatenated manifest bytes of a directory, in iteration order.
inline std::string ManifestChain(const std::filesystem::path &dir) {
  ExperimentPaths paths(dir);
  std::string all;
  for (std::size_t i = 0; std::filesystem::exists(paths.manifest(i)); ++i)
    all += ReadFileOrThrow(paths.manifest(i));
  return all;
}

}  // namespace alsel::testing

#endif  // ALSEL_TESTS_EXPERIMENT_UTIL_H_
