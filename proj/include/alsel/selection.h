// alsel/selection.h

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

#ifndef ALSEL_SELECTION_H_
#define ALSEL_SELECTION_H_

// Batch selection under a budget N: uniform random, top-k by priority, and
// length-stratified top-k (S-RTTL).
//
// Ranking everywhere is (priority desc, id asc), a total order.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "alsel/corpus.h"
#include "alsel/scorers.h"
#include "json.hpp"

namespace alsel {

/// Sentence-length strata. Bin b covers [bin_edges[b], bin_edges[b+1]).
struct LengthDistribution {
  std::vector<std::size_t> bin_edges;
  std::vector<double> proportions;
  std::string source = "train";

  std::size_t bins() const { return proportions.size(); }
  std::optional<std::size_t> BinOf(std::size_t length) const;
};

/// Throws unless edges ascend, sizes agree and proportions sum to 1 within
/// 1e-9.
void ValidateDistribution(const LengthDistribution &dist);

struct StrataQuota {
  std::vector<std::size_t> quotas;
  std::size_t total = 0;
};

struct BinFill {
  std::size_t lo = 0;
  std::size_t hi = 0;    // exclusive
  bool outside = false;  // lengths not covered by any reference bin
  double proportion = 0.0;
  std::size_t quota = 0;
  std::size_t available = 0;
  std::size_t filled = 0;
  std::size_t deficit = 0;  // max(0, quota - available)
};

struct SelectionBatch {
  std::size_t iteration = 0;
  std::string strategy;
  std::vector<SentenceId> ids;     // selection rank order
  std::vector<double> priorities;  // parallel to ids; empty for random
  std::uint64_t seed = 0;
  std::vector<BinFill> fill;  // stratified runs only
};

nlohmann::json FillToJson(std::span<const BinFill> fill);
std::vector<BinFill> FillFromJson(const nlohmann::json &j);

nlohmann::json ToJson(const SelectionBatch &batch);
SelectionBatch SelectionBatchFromJson(const nlohmann::json &j);
/// Canonical bytes of a selection file.
std::string SerializeSelection(const SelectionBatch &batch);

/// Uniform sample without replacement of min(n, available) unconsumed ids
/// (partial Fisher-Yates over ascending ids). Throws if nothing is
/// available or n == 0.
SelectionBatch SelectRandom(const MonoPool &pool, std::size_t n,
                            std::uint64_t seed);

/// The min(n, |candidates|) highest-priority candidates.
SelectionBatch SelectTopK(std::span<const ScoredCandidate> candidates,
                          std::size_t n);

/// Half-open bins [1, 1+w), [1+w, 1+2w), ... up to the longest sentence.
LengthDistribution BuildLengthHistogram(std::span<const std::size_t> lengths,
                                        std::size_t bin_width,
                                        std::string source = "train");
LengthDistribution BuildLengthHistogram(const ParallelCorpus &reference,
                                        std::size_t bin_width,
                                        std::string source = "train");

/// Hamilton apportionment of n seats over non-negative weights (normalized
/// internally). Remainder ties go to the lower index.
std::vector<std::size_t> LargestRemainder(std::span<const double> weights,
                                          std::size_t n);

StrataQuota AllocateStrata(const LengthDistribution &dist, std::size_t n);

/// Per-bin top-quota selection. Bins with fewer candidates than their quota
/// pass the deficit on: largest remainder is re-run over the original
/// proportions of the bins that still have candidates, until the budget is
/// met or those bins run dry. Anything still missing is then taken from
/// zero-proportion and out-of-range candidates in rank order, so the batch
/// always holds min(n, |candidates|) ids.
SelectionBatch SelectStratified(
    std::span<const ScoredCandidate> candidates,
    const std::unordered_map<SentenceId, std::size_t> &lengths,
    const LengthDistribution &dist, std::size_t n);

}  // namespace alsel

#endif  // ALSEL_SELECTION_H_
