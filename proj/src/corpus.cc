// src/corpus.cc

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

#include "alsel/corpus.h"

#include <algorithm>

#include "alsel/errors.h"
#include "alsel/fileio.h"
#include "alsel/prng.h"
#include "alsel/text.h"

namespace alsel {

namespace {

// Calls fn(line_number, line) for each '\n'-terminated line, 1-based,
// with a trailing '\r' removed.
template <typename Fn>
void ForEachLine(std::string_view content, Fn &&fn) {
  std::size_t line_no = 0, pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(++line_no, line);
    pos = end + 1;
  }
}

std::string LineError(const std::string &provenance, std::size_t line_no,
                      const std::string &what) {
  return provenance + ":" + std::to_string(line_no) + ": " + what;
}

void CheckUtf8(std::string_view text, const std::string &provenance,
               std::size_t line_no) {
  if (!IsValidUtf8(text))
    throw Error(LineError(provenance, line_no, "invalid UTF-8"));
}

}  // namespace

SentenceRecord MakeRecord(SentenceId id, std::string source,
                          std::optional<std::string> target) {
  SentenceRecord r;
  r.id = id;
  r.source_len = CountTokens(source);
  r.source = std::move(source);
  r.target = std::move(target);
  return r;
}

MonoPool::MonoPool(std::vector<SentenceRecord> records)
    : records_(std::move(records)) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (records_[i].target)
      throw Error("pool record " + std::to_string(records_[i].id) +
                  " carries a target");
    if (i > 0 && records_[i].id <= records_[i - 1].id)
      throw Error("pool ids must be strictly increasing");
  }
}

const SentenceRecord *MonoPool::Find(SentenceId id) const {
  auto it = std::lower_bound(
      records_.begin(), records_.end(), id,
      [](const SentenceRecord &r, SentenceId v) { return r.id < v; });
  if (it == records_.end() || it->id != id) return nullptr;
  return &*it;
}

std::vector<const SentenceRecord *> MonoPool::Available() const {
  std::vector<const SentenceRecord *> out;
  out.reserve(available());
  for (const auto &r : records_)
    if (!IsConsumed(r.id)) out.push_back(&r);
  return out;
}

void MonoPool::Consume(std::span<const SentenceId> ids) {
  std::set<SentenceId> batch;
  for (SentenceId id : ids) {
    if (!Find(id))
      throw Error("cannot consume unknown pool id " + std::to_string(id));
    if (IsConsumed(id) || !batch.insert(id).second)
      throw Error("pool id " + std::to_string(id) + " already consumed");
  }
  consumed_.insert(batch.begin(), batch.end());
}

std::vector<std::size_t> FoldSpec::FoldSizes() const {
  std::vector<std::size_t> sizes(k, 0);
  for (const auto &[id, fold] : assignments) ++sizes.at(fold);
  return sizes;
}

void OracleStore::Add(SentenceId id, std::string target) {
  if (!targets_.emplace(id, std::move(target)).second)
    throw Error("duplicate oracle id " + std::to_string(id));
}

const std::string &OracleStore::Lookup(SentenceId id) const {
  auto it = targets_.find(id);
  if (it == targets_.end())
    throw IntegrityError("oracle store has no target for id " +
                         std::to_string(id));
  return it->second;
}

std::string OracleStore::ToJsonl() const {
  std::string out;
  for (const auto &[id, target] : targets_) {
    nlohmann::ordered_json row;
    row["id"] = id;
    row["target"] = target;
    out += row.dump();
    out += '\n';
  }
  return out;
}

OracleStore OracleStore::FromJsonl(std::string_view content) {
  OracleStore store;
  ForEachLine(content, [&](std::size_t line_no, std::string_view line) {
    if (TrimWhitespace(line).empty()) return;
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
      store.Add(row.at("id").get<SentenceId>(),
                row.at("target").get<std::string>());
    } catch (const nlohmann::json::exception &e) {
      throw IntegrityError(LineError("oracle", line_no, e.what()));
    }
  });
  return store;
}

CorpusFormat ParseCorpusFormat(std::string_view name) {
  if (name == "tsv") return CorpusFormat::kTsv;
  if (name == "jsonl") return CorpusFormat::kJsonl;
  throw Error("unknown corpus format '" + std::string(name) + "'");
}

ParallelCorpus ParseParallel(std::string_view content, CorpusFormat format,
                             std::string provenance) {
  ParallelCorpus corpus;
  corpus.provenance = std::move(provenance);
  const std::string &prov = corpus.provenance;
  std::optional<bool> explicit_ids;
  std::set<SentenceId> seen;

  auto add = [&](std::size_t line_no, std::optional<SentenceId> id,
                 std::string source, std::optional<std::string> target) {
    if (explicit_ids && *explicit_ids != id.has_value())
      throw Error(LineError(prov, line_no, "mixed explicit and implicit ids"));
    explicit_ids = id.has_value();
    SentenceId assigned = id.value_or(corpus.records.size());
    if (id) {
      if (!seen.insert(*id).second)
        throw Error(
            LineError(prov, line_no, "duplicate id " + std::to_string(*id)));
      if (!corpus.records.empty() && *id <= corpus.records.back().id)
        throw Error(LineError(prov, line_no, "ids must be increasing"));
    }
    corpus.records.push_back(
        MakeRecord(assigned, std::move(source), std::move(target)));
  };

  ForEachLine(content, [&](std::size_t line_no, std::string_view line) {
    CheckUtf8(line, prov, line_no);
    if (format == CorpusFormat::kTsv) {
      const std::size_t tab = line.find('\t');
      if (tab == std::string_view::npos ||
          line.find('\t', tab + 1) != std::string_view::npos)
        throw Error(
            LineError(prov, line_no, "expected 2 tab-separated columns"));
      add(line_no, std::nullopt, std::string(line.substr(0, tab)),
          std::string(line.substr(tab + 1)));
      return;
    }
    if (TrimWhitespace(line).empty()) return;
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error &e) {
      throw Error(LineError(prov, line_no, e.what()));
    }
    if (!row.is_object())
      throw Error(LineError(prov, line_no, "expected a JSON object"));
    auto src = row.find("source");
    if (src == row.end() || !src->is_string())
      throw Error(LineError(prov, line_no, "missing string field 'source'"));
    std::optional<std::string> target;
    if (auto t = row.find("target"); t != row.end() && !t->is_null()) {
      if (!t->is_string())
        throw Error(LineError(prov, line_no, "'target' must be a string"));
      target = t->get<std::string>();
    }
    std::optional<SentenceId> id;
    if (auto i = row.find("id"); i != row.end()) {
      if (!i->is_number_unsigned())
        throw Error(LineError(prov, line_no, "'id' must be unsigned"));
      id = i->get<SentenceId>();
    }
    add(line_no, id, src->get<std::string>(), std::move(target));
  });
  return corpus;
}

ParallelCorpus LoadParallel(const std::filesystem::path &path,
                            CorpusFormat format) {
  if (!std::filesystem::exists(path))
    throw Error("input file " + path.string() + " does not exist");
  return ParseParallel(ReadFileOrThrow(path), format, path.string());
}

std::string CorpusToJsonl(const ParallelCorpus &corpus) {
  std::string out;
  for (const auto &r : corpus.records) {
    nlohmann::ordered_json row;
    row["id"] = r.id;
    row["source"] = r.source;
    if (r.target) row["target"] = *r.target;
    out += row.dump();
    out += '\n';
  }
  return out;
}

std::pair<ParallelCorpus, CleanReport> Clean(const ParallelCorpus &corpus,
                                             const CleanOptions &options) {
  if (options.max_words < 1) throw Error("max_words must be >= 1");
  CleanReport report;
  report.input_count = corpus.size();
  ParallelCorpus out;
  out.provenance = corpus.provenance;
  for (const auto &r : corpus.records) {
    const std::string_view src = TrimWhitespace(r.source);
    if (!r.target || src.empty() || TrimWhitespace(*r.target).empty()) {
      ++report.removed_missing_target;
      continue;
    }
    const std::string_view tgt = TrimWhitespace(*r.target);
    if ((options.limit_source && r.source_len > options.max_words) ||
        (options.limit_target && CountTokens(tgt) > options.max_words)) {
      ++report.removed_overlong;
      continue;
    }
    if (src == tgt) {
      ++report.removed_identical;
      continue;
    }
    out.records.push_back(r);
  }
  report.output_count = out.size();
  return {std::move(out), report};
}

FoldSpec SplitFolds(const ParallelCorpus &corpus, std::size_t k,
                    std::uint64_t seed) {
  if (k == 0) throw Error("fold count must be positive");
  if (k > corpus.size())
    throw InfeasibleError("fold count " + std::to_string(k) +
                          " exceeds corpus size " +
                          std::to_string(corpus.size()));
  std::vector<SentenceId> ids;
  ids.reserve(corpus.size());
  for (const auto &r : corpus.records) ids.push_back(r.id);
  Rng rng(seed);
  rng.Shuffle(&ids);

  FoldSpec spec;
  spec.k = k;
  spec.seed = seed;
  const std::size_t base = ids.size() / k, extra = ids.size() % k;
  std::size_t pos = 0;
  for (std::size_t fold = 0; fold < k; ++fold) {
    const std::size_t n = base + (fold < extra ? 1 : 0);
    for (std::size_t i = 0; i < n; ++i) spec.assignments[ids[pos++]] = fold;
  }
  return spec;
}

SplitSet MaterializeSplit(const ParallelCorpus &corpus, const FoldSpec &spec,
                          std::size_t test_fold, std::size_t train_size,
                          std::size_t val_size, std::uint64_t seed) {
  if (test_fold >= spec.k)
    throw Error("test fold " + std::to_string(test_fold) +
                " out of range [0, " + std::to_string(spec.k) + ")");
  if (spec.assignments.size() != corpus.size())
    throw Error("fold assignments do not cover the corpus");

  SplitSet split;
  split.train.provenance = split.validation.provenance = split.test.provenance =
      corpus.provenance;
  std::vector<std::size_t> rest;  // indices into corpus.records
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto it = spec.assignments.find(corpus.records[i].id);
    if (it == spec.assignments.end())
      throw Error("id " + std::to_string(corpus.records[i].id) +
                  " has no fold assignment");
    if (!corpus.records[i].target)
      throw Error("id " + std::to_string(corpus.records[i].id) +
                  " has no target; clean the corpus first");
    if (it->second == test_fold)
      split.test.records.push_back(corpus.records[i]);
    else
      rest.push_back(i);
  }
  if (train_size + val_size > rest.size())
    throw InfeasibleError(
        "split requires " + std::to_string(train_size + val_size) +
        " non-test records (train " + std::to_string(train_size) + " + val " +
        std::to_string(val_size) + ") but only " + std::to_string(rest.size()) +
        " are available");

  std::vector<std::size_t> order = rest;
  Rng rng(seed);
  rng.Shuffle(&order);
  // 0 = train, 1 = validation, 2 = pool, indexed like corpus.records
  std::vector<int> part(corpus.size(), -1);
  for (std::size_t i = 0; i < order.size(); ++i)
    part[order[i]] = i < train_size ? 0 : (i < train_size + val_size ? 1 : 2);

  std::vector<SentenceRecord> pool_records;
  for (std::size_t i : rest) {
    const SentenceRecord &r = corpus.records[i];
    switch (part[i]) {
      case 0:
        split.train.records.push_back(r);
        break;
      case 1:
        split.validation.records.push_back(r);
        break;
      default: {
        SentenceRecord sealed = r;
        split.oracle.Add(r.id, *sealed.target);
        sealed.target.reset();
        pool_records.push_back(std::move(sealed));
      }
    }
  }
  split.pool = MonoPool(std::move(pool_records));
  return split;
}

MonoPool PoolFromCorpus(const ParallelCorpus &corpus) {
  std::vector<SentenceRecord> records = corpus.records;
  for (auto &r : records) r.target.reset();
  return MonoPool(std::move(records));
}

nlohmann::json ToJson(const CleanReport &report) {
  return {{"input_count", report.input_count},
          {"removed_missing_target", report.removed_missing_target},
          {"removed_overlong", report.removed_overlong},
          {"removed_identical", report.removed_identical},
          {"output_count", report.output_count}};
}

nlohmann::json ToJson(const FoldSpec &spec) {
  nlohmann::json assignments = nlohmann::json::array();
  for (const auto &[id, fold] : spec.assignments)
    assignments.push_back({id, fold});
  return {{"k", spec.k},
          {"seed", spec.seed},
          {"prng", kPrngId},
          {"assignments", std::move(assignments)}};
}

FoldSpec FoldSpecFromJson(const nlohmann::json &j) {
  FoldSpec spec;
  try {
    spec.k = j.at("k").get<std::size_t>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    for (const auto &pair : j.at("assignments")) {
      const std::size_t fold = pair.at(1).get<std::size_t>();
      if (fold >= spec.k) throw Error("fold index out of range");
      spec.assignments[pair.at(0).get<SentenceId>()] = fold;
    }
  } catch (const nlohmann::json::exception &e) {
    throw Error(std::string("malformed fold spec: ") + e.what());
  }
  return spec;
}

}  // namespace alsel
