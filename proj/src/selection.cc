// src/selection.cc

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

#include "alsel/selection.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "alsel/errors.h"
#include "alsel/prng.h"

namespace alsel {

using nlohmann::json;

namespace {

bool RanksBefore(const ScoredCandidate &a, const ScoredCandidate &b) {
  if (a.priority != b.priority) return a.priority > b.priority;
  return a.id < b.id;
}

void CheckFinite(std::span<const ScoredCandidate> candidates) {
  for (const auto &c : candidates)
    if (!std::isfinite(c.priority))
      throw Error("candidate " + std::to_string(c.id) +
                  " has a non-finite priority");
}

}  // namespace

std::optional<std::size_t> LengthDistribution::BinOf(std::size_t length) const {
  if (bin_edges.size() < 2 || length < bin_edges.front() ||
      length >= bin_edges.back())
    return std::nullopt;
  auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), length);
  return static_cast<std::size_t>(it - bin_edges.begin()) - 1;
}

void ValidateDistribution(const LengthDistribution &dist) {
  if (dist.proportions.empty()) throw Error("length distribution has no bins");
  if (dist.bin_edges.size() != dist.proportions.size() + 1)
    throw Error("length distribution needs bins + 1 edges");
  for (std::size_t i = 1; i < dist.bin_edges.size(); ++i)
    if (dist.bin_edges[i] <= dist.bin_edges[i - 1])
      throw Error("bin edges must be strictly ascending");
  double sum = 0.0;
  for (double p : dist.proportions) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw Error("bin proportions must be finite and non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw Error("bin proportions sum to " + std::to_string(sum) + ", not 1");
}

json FillToJson(std::span<const BinFill> fill) {
  json out = json::array();
  for (const auto &f : fill) {
    json j = {{"proportion", f.proportion}, {"quota", f.quota},
              {"available", f.available},   {"filled", f.filled},
              {"deficit", f.deficit},       {"outside", f.outside}};
    j["lo"] = f.outside ? json(nullptr) : json(f.lo);
    j["hi"] = f.outside ? json(nullptr) : json(f.hi);
    out.push_back(std::move(j));
  }
  return out;
}

std::vector<BinFill> FillFromJson(const json &j) {
  std::vector<BinFill> out;
  try {
    for (const auto &f : j) {
      BinFill b;
      b.outside = f.at("outside").get<bool>();
      if (!b.outside) {
        b.lo = f.at("lo").get<std::size_t>();
        b.hi = f.at("hi").get<std::size_t>();
      }
      b.proportion = f.at("proportion").get<double>();
      b.quota = f.at("quota").get<std::size_t>();
      b.available = f.at("available").get<std::size_t>();
      b.filled = f.at("filled").get<std::size_t>();
      b.deficit = f.at("deficit").get<std::size_t>();
      out.push_back(b);
    }
  } catch (const json::exception &e) {
    throw Error(std::string("malformed fill report: ") + e.what());
  }
  return out;
}

json ToJson(const SelectionBatch &batch) {
  return {{"iteration", batch.iteration},
          {"strategy", batch.strategy},
          {"seed", batch.seed},
          {"ids", batch.ids},
          {"priorities", batch.priorities},
          {"fill", FillToJson(batch.fill)}};
}

SelectionBatch SelectionBatchFromJson(const json &j) {
  SelectionBatch batch;
  try {
    batch.iteration = j.at("iteration").get<std::size_t>();
    batch.strategy = j.at("strategy").get<std::string>();
    batch.seed = j.at("seed").get<std::uint64_t>();
    batch.ids = j.at("ids").get<std::vector<SentenceId>>();
    batch.priorities = j.at("priorities").get<std::vector<double>>();
    batch.fill = FillFromJson(j.at("fill"));
  } catch (const json::exception &e) {
    throw Error(std::string("malformed selection batch: ") + e.what());
  }
  if (!batch.priorities.empty() && batch.priorities.size() != batch.ids.size())
    throw Error("selection batch priorities do not match ids");
  return batch;
}

std::string SerializeSelection(const SelectionBatch &batch) {
  return ToJson(batch).dump(2) + "\n";
}

SelectionBatch SelectRandom(const MonoPool &pool, std::size_t n,
                            std::uint64_t seed) {
  if (n == 0) throw Error("budget must be >= 1");
  if (pool.available() == 0) throw Error("pool has no unconsumed sentences");
  std::vector<SentenceId> ids;
  ids.reserve(pool.available());
  for (const SentenceRecord *r : pool.Available()) ids.push_back(r->id);

  const std::size_t k = std::min(n, ids.size());
  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(rng.Below(ids.size() - i));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(k);

  SelectionBatch batch;
  batch.strategy = "random";
  batch.seed = seed;
  batch.ids = std::move(ids);
  return batch;
}

SelectionBatch SelectTopK(std::span<const ScoredCandidate> candidates,
                          std::size_t n) {
  if (candidates.empty()) throw Error("no candidates to select from");
  CheckFinite(candidates);
  std::vector<const ScoredCandidate *> order;
  order.reserve(candidates.size());
  for (const auto &c : candidates) order.push_back(&c);
  const std::size_t k = std::min(n, order.size());
  std::partial_sort(order.begin(), order.begin() + k, order.end(),
                    [](const ScoredCandidate *a, const ScoredCandidate *b) {
                      return RanksBefore(*a, *b);
                    });
  SelectionBatch batch;
  batch.strategy = "topk";
  for (std::size_t i = 0; i < k; ++i) {
    batch.ids.push_back(order[i]->id);
    batch.priorities.push_back(order[i]->priority);
  }
  return batch;
}

LengthDistribution BuildLengthHistogram(std::span<const std::size_t> lengths,
                                        std::size_t bin_width,
                                        std::string source) {
  if (bin_width < 1) throw Error("bin width must be >= 1");
  if (lengths.empty()) throw Error("reference corpus is empty");
  const std::size_t max_len = *std::max_element(lengths.begin(), lengths.end());
  if (*std::min_element(lengths.begin(), lengths.end()) < 1)
    throw Error("reference sentences must have at least one token");
  const std::size_t n_bins = (max_len - 1) / bin_width + 1;

  std::vector<std::size_t> counts(n_bins, 0);
  for (std::size_t len : lengths) ++counts[(len - 1) / bin_width];

  LengthDistribution dist;
  dist.source = std::move(source);
  for (std::size_t b = 0; b <= n_bins; ++b)
    dist.bin_edges.push_back(1 + b * bin_width);
  const double total = static_cast<double>(lengths.size());
  for (std::size_t c : counts)
    dist.proportions.push_back(static_cast<double>(c) / total);
  return dist;
}

LengthDistribution BuildLengthHistogram(const ParallelCorpus &reference,
                                        std::size_t bin_width,
                                        std::string source) {
  std::vector<std::size_t> lengths;
  lengths.reserve(reference.size());
  for (const auto &r : reference.records) lengths.push_back(r.source_len);
  return BuildLengthHistogram(lengths, bin_width, std::move(source));
}

std::vector<std::size_t> LargestRemainder(std::span<const double> weights,
                                          std::size_t n) {
  std::vector<std::size_t> quotas(weights.size(), 0);
  if (n == 0 || weights.empty()) return quotas;
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw Error("apportionment weights must be finite and non-negative");
    total += w;
  }
  if (total <= 0.0) throw Error("apportionment weights sum to zero");

  // Exact shares, snapped to integers when within rounding noise so that
  // e.g. 0.1 * 5000 yields exactly 500.
  std::vector<long long> frac_key(weights.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double share = static_cast<double>(n) * (weights[i] / total);
    const double nearest = std::round(share);
    if (std::abs(share - nearest) <= 1e-9 * std::max(1.0, share))
      share = nearest;
    const double fl = std::floor(share);
    quotas[i] = static_cast<std::size_t>(fl);
    frac_key[i] = std::llround((share - fl) * 1e12);
    assigned += quotas[i];
  }

  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(
      order.begin(), order.end(),
      [&](std::size_t a, std::size_t b) { return frac_key[a] > frac_key[b]; });
  for (std::size_t i = 0; assigned < n; i = (i + 1) % order.size()) {
    if (weights[order[i]] > 0.0) {
      ++quotas[order[i]];
      ++assigned;
    }
  }
  // Only reachable when snapping pushed the floors past n.
  for (auto it = order.rbegin(); assigned > n; ++it) {
    if (it == order.rend()) it = order.rbegin();
    if (quotas[*it] > 0) {
      --quotas[*it];
      --assigned;
    }
  }
  return quotas;
}

StrataQuota AllocateStrata(const LengthDistribution &dist, std::size_t n) {
  if (n == 0) throw Error("budget must be >= 1");
  ValidateDistribution(dist);
  return {LargestRemainder(dist.proportions, n), n};
}

SelectionBatch SelectStratified(
    std::span<const ScoredCandidate> candidates,
    const std::unordered_map<SentenceId, std::size_t> &lengths,
    const LengthDistribution &dist, std::size_t n) {
  if (candidates.empty()) throw Error("no candidates to select from");
  CheckFinite(candidates);
  const StrataQuota quota = AllocateStrata(dist, n);
  const std::size_t n_bins = dist.bins();

  // Group n_bins holds candidates outside every reference bin.
  std::vector<std::vector<const ScoredCandidate *>> groups(n_bins + 1);
  for (const auto &c : candidates) {
    auto it = lengths.find(c.id);
    if (it == lengths.end())
      throw Error("candidate " + std::to_string(c.id) + " has no length");
    groups[dist.BinOf(it->second).value_or(n_bins)].push_back(&c);
  }
  for (auto &g : groups)
    std::sort(g.begin(), g.end(),
              [](const ScoredCandidate *a, const ScoredCandidate *b) {
                return RanksBefore(*a, *b);
              });

  std::vector<std::size_t> filled(n_bins + 1, 0);
  std::size_t taken = 0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    filled[b] = std::min(quota.quotas[b], groups[b].size());
    taken += filled[b];
  }
  const std::size_t target = std::min(n, candidates.size());

  while (taken < target) {
    std::vector<std::size_t> open;
    std::vector<double> weights;
    for (std::size_t b = 0; b < n_bins; ++b) {
      if (dist.proportions[b] > 0.0 && filled[b] < groups[b].size()) {
        open.push_back(b);
        weights.push_back(dist.proportions[b]);
      }
    }
    if (open.empty()) break;
    const auto extra = LargestRemainder(weights, target - taken);
    for (std::size_t i = 0; i < open.size(); ++i) {
      const std::size_t b = open[i];
      const std::size_t add = std::min(extra[i], groups[b].size() - filled[b]);
      filled[b] += add;
      taken += add;
    }
  }

  std::vector<const ScoredCandidate *> selected;
  selected.reserve(target);
  for (std::size_t b = 0; b <= n_bins; ++b)
    selected.insert(selected.end(), groups[b].begin(),
                    groups[b].begin() + filled[b]);

  if (taken < target) {
    // Every positive-proportion bin is exhausted; top up by rank from the
    // rest.
    std::vector<std::pair<const ScoredCandidate *, std::size_t>> leftovers;
    for (std::size_t b = 0; b <= n_bins; ++b)
      for (std::size_t i = filled[b]; i < groups[b].size(); ++i)
        leftovers.emplace_back(groups[b][i], b);
    std::sort(leftovers.begin(), leftovers.end(),
              [](const auto &a, const auto &b) {
                return RanksBefore(*a.first, *b.first);
              });
    for (std::size_t i = 0; taken < target; ++i) {
      selected.push_back(leftovers[i].first);
      ++filled[leftovers[i].second];
      ++taken;
    }
  }

  std::sort(selected.begin(), selected.end(),
            [](const ScoredCandidate *a, const ScoredCandidate *b) {
              return RanksBefore(*a, *b);
            });

  SelectionBatch batch;
  batch.strategy = "stratified";
  for (const ScoredCandidate *c : selected) {
    batch.ids.push_back(c->id);
    batch.priorities.push_back(c->priority);
  }
  for (std::size_t b = 0; b < n_bins; ++b) {
    BinFill f;
    f.lo = dist.bin_edges[b];
    f.hi = dist.bin_edges[b + 1];
    f.proportion = dist.proportions[b];
    f.quota = quota.quotas[b];
    f.available = groups[b].size();
    f.filled = filled[b];
    f.deficit = f.quota > f.available ? f.quota - f.available : 0;
    batch.fill.push_back(f);
  }
  if (!groups[n_bins].empty()) {
    BinFill f;
    f.outside = true;
    f.available = groups[n_bins].size();
    f.filled = filled[n_bins];
    batch.fill.push_back(f);
  }
  return batch;
}

}  // namespace alsel
