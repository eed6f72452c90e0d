// alsel/corpus.h

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

#ifndef ALSEL_CORPUS_H_
#define ALSEL_CORPUS_H_

// Parallel corpora and monolingual pools: ingestion, cleaning, fold
// construction and the train / validation / test / pool split.
//
// A freshly loaded ParallelCorpus may still contain records without a target
// or with an empty source; Clean() removes those, after which every record
// satisfies the SentenceRecord invariants (non-empty source, source_len >= 1).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace alsel {

using SentenceId = std::uint64_t;

struct SentenceRecord {
  SentenceId id = 0;
  std::string source;
  std::optional<std::string> target;
  std::size_t source_len = 0;  // whitespace tokens of source
};

/// Builds a record and fills in source_len.
SentenceRecord MakeRecord(SentenceId id, std::string source,
                          std::optional<std::string> target);

/// Ordered records, ids strictly increasing.
struct ParallelCorpus {
  std::vector<SentenceRecord> records;
  std::string provenance;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
};

/// Unlabelled pool. Records carry no targets; ids that earlier iterations
/// selected are tracked in consumed_ids() and excluded from Available().
class MonoPool {
 public:
  MonoPool() = default;
  /// Throws if any record has a target or ids are not strictly increasing.
  explicit MonoPool(std::vector<SentenceRecord> records);

  const std::vector<SentenceRecord> &records() const { return records_; }
  const std::set<SentenceId> &consumed_ids() const { return consumed_; }

  std::size_t size() const { return records_.size(); }
  std::size_t available() const { return records_.size() - consumed_.size(); }
  bool IsConsumed(SentenceId id) const { return consumed_.count(id) > 0; }
  const SentenceRecord *Find(SentenceId id) const;

  /// Unconsumed records in id order.
  std::vector<const SentenceRecord *> Available() const;

  /// Marks ids consumed. Unknown or already-consumed ids throw, leaving the
  /// pool unchanged.
  void Consume(std::span<const SentenceId> ids);

 private:
  std::vector<SentenceRecord> records_;
  std::set<SentenceId> consumed_;
};

struct CleanReport {
  std::size_t input_count = 0;
  std::size_t removed_missing_target = 0;  // includes empty sources
  std::size_t removed_overlong = 0;
  std::size_t removed_identical = 0;
  std::size_t output_count = 0;
};

struct CleanOptions {
  std::size_t max_words = 100;
  bool limit_source = true;
  bool limit_target = true;
};

struct FoldSpec {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::map<SentenceId, std::size_t> assignments;  // id -> fold in [0, k)

  std::vector<std::size_t> FoldSizes() const;
};

/// Withheld pool targets. Only the loop's annotation step reads it.
class OracleStore {
 public:
  void Add(SentenceId id, std::string target);
  bool Contains(SentenceId id) const { return targets_.count(id) > 0; }
  /// Throws IntegrityError for ids the store does not hold.
  const std::string &Lookup(SentenceId id) const;
  std::size_t size() const { return targets_.size(); }

  /// One {"id","target"} object per line, ascending id.
  std::string ToJsonl() const;
  static OracleStore FromJsonl(std::string_view content);

 private:
  std::map<SentenceId, std::string> targets_;
};

struct SplitSet {
  ParallelCorpus train;
  ParallelCorpus validation;
  ParallelCorpus test;
  MonoPool pool;
  OracleStore oracle;
};

enum class CorpusFormat { kTsv, kJsonl };

CorpusFormat ParseCorpusFormat(std::string_view name);

/// Parses corpus text. TSV rows are "source\ttarget" without header; JSONL
/// rows are {"source", "target" (nullable), "id" (optional)}. Ids are either
/// all explicit (strictly increasing) or all implicit (0..n-1).
ParallelCorpus ParseParallel(std::string_view content, CorpusFormat format,
                             std::string provenance);

ParallelCorpus LoadParallel(const std::filesystem::path &path,
                            CorpusFormat format);

/// Canonical JSONL; "target" omitted for records without one.
std::string CorpusToJsonl(const ParallelCorpus &corpus);

/// Applies, in order of precedence: missing/empty target or source,
/// source or target longer than max_words, source == target after trimming.
std::pair<ParallelCorpus, CleanReport> Clean(const ParallelCorpus &corpus,
                                             const CleanOptions &options = {});

/// Seeded permutation of ids, cut into k contiguous chunks; the first
/// (n mod k) folds get one extra record.
FoldSpec SplitFolds(const ParallelCorpus &corpus, std::size_t k,
                    std::uint64_t seed);

/// test = records of test_fold. The rest is shuffled with `seed`; the first
/// train_size go to train, the next val_size to validation, the remainder to
/// the pool, whose targets move to the oracle store. Each part keeps
/// ascending id order.
SplitSet MaterializeSplit(const ParallelCorpus &corpus, const FoldSpec &spec,
                          std::size_t test_fold, std::size_t train_size,
                          std::size_t val_size, std::uint64_t seed);

MonoPool PoolFromCorpus(const ParallelCorpus &corpus);

nlohmann::json ToJson(const CleanReport &report);
nlohmann::json ToJson(const FoldSpec &spec);
FoldSpec FoldSpecFromJson(const nlohmann::json &j);

}  // namespace alsel

#endif  // ALSEL_CORPUS_H_
