// src/scorers.cc

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

#include "alsel/scorers.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "alsel/fileio.h"
#include "alsel/text.h"

namespace alsel {

using nlohmann::json;

double RttlScore(std::span<const double> reverse_logprobs, std::size_t length) {
  if (reverse_logprobs.empty()) throw Error("RTTL needs at least one token");
  if (length != reverse_logprobs.size())
    throw Error("RTTL length " + std::to_string(length) + " does not match " +
                std::to_string(reverse_logprobs.size()) + " log-probs");
  double sum = 0.0;
  for (double lp : reverse_logprobs) {
    if (!std::isfinite(lp) || lp > 0.0)
      throw Error("reverse log-probs must be finite and <= 0");
    sum += lp;
  }
  if (sum == 0.0) return 0.0;
  return -sum / static_cast<double>(length);
}

double QePriority(double quality) {
  if (!std::isfinite(quality)) throw Error("quality score must be finite");
  return quality == 0.0 ? 0.0 : -quality;
}

std::string_view ScoreKindName(ScoreKind kind) {
  return kind == ScoreKind::kRttl ? "rttl" : "qe";
}

ScoreKind ParseScoreKind(std::string_view name) {
  if (name == "rttl") return ScoreKind::kRttl;
  if (name == "qe") return ScoreKind::kQe;
  throw Error("unknown score kind '" + std::string(name) + "'");
}

ScoredCandidate Score(const CandidateRecord &record, std::size_t source_len,
                      ScoreKind kind) {
  ScoredCandidate c;
  c.id = record.id;
  c.strategy = kind;
  c.hypothesis = record.hypothesis;
  if (kind == ScoreKind::kRttl) {
    c.raw = RttlScore(record.reverse_logprobs, source_len);
    c.priority = c.raw;
  } else {
    if (!record.quality)
      throw Error("id " + std::to_string(record.id) + " has no quality score");
    c.raw = *record.quality;
    c.priority = QePriority(c.raw);
  }
  return c;
}

ScoringClients ScoringClients::Mock(std::uint64_t key) {
  auto mock = std::make_shared<MockModelClient>(key);
  return {mock, mock, mock};
}

namespace {

struct BatchResult {
  std::vector<ScoredCandidate> candidates;
  BatchTrace trace;
  std::string decode_mode;
};

// Sends with bounded retries; returns the validated response and records
// checksums of the exchange.
ScorerResponse Exchange(ModelClient &client, const ScorerRequest &request,
                        const ScoreOptions &options, BatchTrace *trace) {
  auto delay = options.backoff;
  for (int attempt = 1;; ++attempt) {
    try {
      ScorerResponse response = client.Send(request);
      ValidateResponse(request, response);
      trace->kinds.emplace_back(KindName(request.kind));
      trace->request_sha256.push_back(Sha256Hex(ToJson(request).dump()));
      trace->response_sha256.push_back(
          Sha256Hex(ToJson(response, request.kind).dump()));
      return response;
    } catch (const Error &) {
      if (attempt >= options.max_attempts) throw;
    }
    if (delay.count() > 0) std::this_thread::sleep_for(delay);
    delay *= 2;
  }
}

BatchResult ScoreBatch(std::span<const SentenceRecord *const> records,
                       std::size_t index, const ScoringClients &clients,
                       ScoreKind kind, const ScoreOptions &options) {
  BatchResult out;
  out.trace.index = index;

  std::vector<RequestItem> items;
  for (const SentenceRecord *r : records) {
    RequestItem item;
    item.id = r->id;
    item.source = r->source;
    items.push_back(std::move(item));
  }
  const ScorerResponse translated =
      Exchange(*clients.forward, MakeRequest(RequestKind::kTranslate, items),
               options, &out.trace);

  std::vector<CandidateRecord> gathered(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    gathered[i].id = records[i]->id;
    gathered[i].source = records[i]->source;
    gathered[i].hypothesis = translated.results[i].hypothesis;
    if (i == 0) out.decode_mode = translated.results[i].decode_mode;
  }

  std::vector<RequestItem> second;
  for (std::size_t i = 0; i < records.size(); ++i) {
    RequestItem item;
    item.id = records[i]->id;
    item.hypothesis = gathered[i].hypothesis;
    if (kind == ScoreKind::kRttl) {
      for (auto tok : SplitWhitespace(records[i]->source))
        item.source_tokens.emplace_back(tok);
    } else {
      item.source = records[i]->source;
    }
    second.push_back(std::move(item));
  }
  if (kind == ScoreKind::kRttl) {
    const ScorerResponse lp = Exchange(
        *clients.reverse, MakeRequest(RequestKind::kLogprob, std::move(second)),
        options, &out.trace);
    for (std::size_t i = 0; i < records.size(); ++i)
      gathered[i].reverse_logprobs = lp.results[i].token_logprobs;
  } else {
    const ScorerResponse q = Exchange(
        *clients.quality, MakeRequest(RequestKind::kQuality, std::move(second)),
        options, &out.trace);
    for (std::size_t i = 0; i < records.size(); ++i)
      gathered[i].quality = q.results[i].score;
  }

  for (std::size_t i = 0; i < records.size(); ++i)
    out.candidates.push_back(Score(gathered[i], records[i]->source_len, kind));
  return out;
}

}  // namespace

PoolScores ScorePool(const MonoPool &pool, const ScoringClients &clients,
                     ScoreKind kind, const ScoreOptions &options) {
  if (pool.available() == 0) throw Error("pool has no unconsumed sentences");
  if (!clients.forward) throw Error("scoring needs a forward endpoint");
  if (kind == ScoreKind::kRttl && !clients.reverse)
    throw Error("RTTL scoring needs a reverse endpoint");
  if (kind == ScoreKind::kQe && !clients.quality)
    throw Error("QE scoring needs a quality endpoint");
  if (options.batch_size < 1) throw Error("batch size must be >= 1");

  const ModelClient &second =
      kind == ScoreKind::kRttl ? *clients.reverse : *clients.quality;
  const std::size_t batch_size = std::max<std::size_t>(
      1, std::min({options.batch_size, clients.forward->max_batch(),
                   second.max_batch()}));

  const std::vector<const SentenceRecord *> records = pool.Available();
  const std::size_t n_batches = (records.size() + batch_size - 1) / batch_size;
  std::vector<BatchResult> results(n_batches);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mu;
  std::optional<std::size_t> failed_index;
  std::string failure;

  auto worker = [&] {
    for (;;) {
      if (failed.load()) return;
      const std::size_t b = next.fetch_add(1);
      if (b >= n_batches) return;
      const std::size_t lo = b * batch_size;
      const std::size_t hi = std::min(records.size(), lo + batch_size);
      try {
        results[b] =
            ScoreBatch(std::span<const SentenceRecord *const>(records).subspan(
                           lo, hi - lo),
                       b, clients, kind, options);
      } catch (const std::exception &e) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failed_index || b < *failed_index) {
          failed_index = b;
          failure = e.what();
        }
        failed.store(true);
      }
    }
  };

  const std::size_t n_threads =
      std::max<std::size_t>(1, std::min(options.max_in_flight, n_batches));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  }
  if (failed_index) throw ScoringError(*failed_index, failure);

  PoolScores scores;
  scores.kind = kind;
  scores.candidates.reserve(records.size());
  for (auto &batch : results) {
    for (auto &c : batch.candidates) scores.candidates.push_back(std::move(c));
    scores.batches.push_back(std::move(batch.trace));
  }
  if (!results.empty()) scores.decode_mode = results.front().decode_mode;
  scores.models["forward"] = clients.forward->descriptor();
  if (kind == ScoreKind::kRttl)
    scores.models["reverse"] = clients.reverse->descriptor();
  else
    scores.models["quality"] = clients.quality->descriptor();
  return scores;
}

std::string ScoresToJsonl(std::span<const ScoredCandidate> candidates) {
  std::string out;
  for (const auto &c : candidates) {
    nlohmann::ordered_json row;
    row["id"] = c.id;
    row["strategy"] = ScoreKindName(c.strategy);
    row["priority"] = c.priority;
    row["raw"] = c.raw;
    row["hypothesis"] = c.hypothesis;
    out += row.dump();
    out += '\n';
  }
  return out;
}

std::vector<ScoredCandidate> ScoresFromJsonl(std::string_view content) {
  std::vector<ScoredCandidate> out;
  std::size_t line_no = 0, pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    const std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (TrimWhitespace(line).empty()) continue;
    try {
      const json row = json::parse(line);
      ScoredCandidate c;
      c.id = row.at("id").get<SentenceId>();
      c.strategy = ParseScoreKind(row.at("strategy").get<std::string>());
      c.priority = row.at("priority").get<double>();
      c.raw = row.at("raw").get<double>();
      c.hypothesis = row.value("hypothesis", std::string());
      if (!std::isfinite(c.priority))
        throw Error("non-finite priority for id " + std::to_string(c.id));
      if (!out.empty() && c.id <= out.back().id)
        throw Error("score ids must be increasing");
      out.push_back(std::move(c));
    } catch (const json::exception &e) {
      throw Error("score file line " + std::to_string(line_no) + ": " +
                  e.what());
    } catch (const Error &e) {
      throw Error("score file line " + std::to_string(line_no) + ": " +
                  e.what());
    }
  }
  return out;
}

json ScoreMetaJson(const PoolScores &scores) {
  json batches = json::array();
  for (const auto &b : scores.batches) {
    json calls = json::array();
    for (std::size_t i = 0; i < b.kinds.size(); ++i)
      calls.push_back({{"kind", b.kinds[i]},
                       {"request_sha256", b.request_sha256[i]},
                       {"response_sha256", b.response_sha256[i]}});
    batches.push_back({{"index", b.index}, {"calls", std::move(calls)}});
  }
  return {{"strategy", ScoreKindName(scores.kind)},
          {"decode_mode", scores.decode_mode},
          {"models", scores.models},
          {"batch_count", scores.batches.size()},
          {"batches", std::move(batches)}};
}

}  // namespace alsel
