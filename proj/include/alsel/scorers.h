// alsel/scorers.h

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

#ifndef ALSEL_SCORERS_H_
#define ALSEL_SCORERS_H_

// Sentence priorities. Every scorer maps onto one convention: a higher
// priority means the sentence is selected earlier.
//
//   RTTL: priority = -(1/L) * sum_t log P_rev(x_t | y_hat)   (>= 0)
//   QE:   priority = -quality
//
// L is the whitespace token count of the raw source sentence.

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "alsel/corpus.h"
#include "alsel/protocol.h"
#include "json.hpp"

namespace alsel {

/// Round-trip translation likelihood of one sentence from the reverse
/// model's per-token natural-log probabilities. Throws on an empty
/// sequence, a length mismatch, or any positive entry.
double RttlScore(std::span<const double> reverse_logprobs, std::size_t length);

/// Lowest quality first: returns -quality. Throws on non-finite input.
double QePriority(double quality);

enum class ScoreKind { kRttl, kQe };

std::string_view ScoreKindName(ScoreKind kind);
ScoreKind ParseScoreKind(std::string_view name);

/// Model outputs gathered for one pool sentence.
struct CandidateRecord {
  SentenceId id = 0;
  std::string source;
  std::string hypothesis;
  std::vector<double> reverse_logprobs;
  std::optional<double> quality;
};

struct ScoredCandidate {
  SentenceId id = 0;
  double priority = 0.0;
  ScoreKind strategy = ScoreKind::kRttl;
  double raw = 0.0;  // phi for RTTL, quality for QE
  std::string hypothesis;
};

/// Turns gathered model outputs into a scored candidate.
ScoredCandidate Score(const CandidateRecord &record, std::size_t source_len,
                      ScoreKind kind);

struct ScoringClients {
  std::shared_ptr<ModelClient> forward;
  std::shared_ptr<ModelClient> reverse;
  std::shared_ptr<ModelClient> quality;

  /// All three roles served by one MockModelClient.
  static ScoringClients Mock(std::uint64_t key = MockModelClient::kDefaultKey);
};

struct ScoreOptions {
  std::size_t batch_size = 64;
  std::size_t max_in_flight = 4;
  int max_attempts = 3;
  std::chrono::milliseconds backoff{100};  // doubled after each failure
};

/// Request/response checksums of one batch, one entry per model call.
struct BatchTrace {
  std::size_t index = 0;
  std::vector<std::string> kinds;
  std::vector<std::string> request_sha256;
  std::vector<std::string> response_sha256;
};

struct PoolScores {
  ScoreKind kind = ScoreKind::kRttl;
  std::vector<ScoredCandidate> candidates;  // ascending id
  std::vector<BatchTrace> batches;
  std::string decode_mode;
  std::map<std::string, std::string> models;  // role -> descriptor
};

/// Raised when a batch still fails after all retries. No partial results
/// are returned.
class ScoringError : public Error {
 public:
  ScoringError(std::size_t batch_index, const std::string &what)
      : Error("scoring failed at batch " + std::to_string(batch_index) + ": " +
              what),
        batch_index_(batch_index) {}
  std::size_t batch_index() const { return batch_index_; }

 private:
  std::size_t batch_index_;
};

/// Scores every unconsumed pool record. RTTL needs forward + reverse
/// clients, QE needs forward + quality. Batches run concurrently up to
/// options.max_in_flight; pool targets are never read.
PoolScores ScorePool(const MonoPool &pool, const ScoringClients &clients,
                     ScoreKind kind, const ScoreOptions &options = {});

/// JSONL rows {"id","strategy","priority","raw","hypothesis"}.
std::string ScoresToJsonl(std::span<const ScoredCandidate> candidates);
std::vector<ScoredCandidate> ScoresFromJsonl(std::string_view content);

/// Batch traces, decode mode and model descriptors.
nlohmann::json ScoreMetaJson(const PoolScores &scores);

}  // namespace alsel

#endif  // ALSEL_SCORERS_H_
