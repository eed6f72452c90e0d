// alsel/protocol.h

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

#ifndef ALSEL_PROTOCOL_H_
#define ALSEL_PROTOCOL_H_

// Client side of the model gateway protocol: HTTP + JSON, one POST endpoint
// per request kind (/translate, /logprob, /quality) plus GET /health.
//
//   request:  {"batch_id", "kind", "items": [...]}
//   response: {"batch_id", "model", "results": [...]}
//   error:    {"error": {"code", "message", "batch_id"}}
//
// Log-probabilities are natural logs and must be <= 0. Batch ids are the
// first 16 hex digits of the SHA-256 of the canonical {"items","kind"} JSON.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "alsel/corpus.h"
#include "alsel/errors.h"
#include "json.hpp"

namespace alsel {

enum class RequestKind { kTranslate, kLogprob, kQuality };

std::string_view KindName(RequestKind kind);
RequestKind ParseRequestKind(std::string_view name);

struct RequestItem {
  SentenceId id = 0;
  std::string source;                      // translate, quality
  std::vector<std::string> source_tokens;  // logprob
  std::string hypothesis;                  // logprob, quality
};

struct ScorerRequest {
  RequestKind kind = RequestKind::kTranslate;
  std::string batch_id;
  std::vector<RequestItem> items;
};

struct ResultItem {
  SentenceId id = 0;
  std::string hypothesis;              // translate
  std::string decode_mode;             // translate
  std::vector<double> token_logprobs;  // logprob
  double score = 0.0;                  // quality
};

struct ScorerResponse {
  std::string batch_id;
  std::string model;
  std::vector<ResultItem> results;
};

/// Protocol-level failure. code() is one of the gateway's error codes
/// (oversized_batch, bad_schema, backend_failure) or "transport" for
/// connection problems seen by the client.
class ProtocolError : public Error {
 public:
  ProtocolError(std::string code, const std::string &message,
                std::string batch_id = "")
      : Error(code + ": " + message),
        code_(std::move(code)),
        batch_id_(std::move(batch_id)) {}
  const std::string &code() const { return code_; }
  const std::string &batch_id() const { return batch_id_; }

 private:
  std::string code_;
  std::string batch_id_;
};

std::string ContentBatchId(RequestKind kind,
                           const std::vector<RequestItem> &items);

/// Builds a request with its content-addressed batch id.
ScorerRequest MakeRequest(RequestKind kind, std::vector<RequestItem> items);

nlohmann::json ToJson(const ScorerRequest &request);
nlohmann::json ToJson(const ScorerResponse &response, RequestKind kind);

/// Schema-checked parsing; failures raise ProtocolError("bad_schema").
ScorerRequest RequestFromJson(const nlohmann::json &j);
ScorerResponse ResponseFromJson(const nlohmann::json &j, RequestKind kind);

/// Parses a response body, turning an {"error": ...} body into the
/// corresponding ProtocolError.
ScorerResponse ParseResponseBody(std::string_view body, RequestKind kind);

/// Checks the response against its request: echoed batch id, one result
/// per item in order, logprob lengths and signs, finite values.
void ValidateResponse(const ScorerRequest &request,
                      const ScorerResponse &response);

std::string ErrorBody(std::string_view code, std::string_view message,
                      std::string_view batch_id);

enum class Direction { kForward, kReverse, kQuality };

std::string_view DirectionName(Direction d);
RequestKind KindFor(Direction d);

struct ModelEndpoint {
  std::string base_address;  // e.g. http://127.0.0.1:8080
  Direction direction = Direction::kForward;
  std::string model;  // descriptor; filled from /health if empty
  std::chrono::milliseconds timeout{30000};
  std::size_t max_batch = 64;
};

/// One model behind the protocol.
class ModelClient {
 public:
  virtual ~ModelClient() = default;
  virtual ScorerResponse Send(const ScorerRequest &request) = 0;
  virtual std::string descriptor() const = 0;
  virtual std::size_t max_batch() const = 0;
};

class HttpModelClient : public ModelClient {
 public:
  explicit HttpModelClient(ModelEndpoint endpoint);
  ScorerResponse Send(const ScorerRequest &request) override;
  std::string descriptor() const override;
  std::size_t max_batch() const override { return endpoint_.max_batch; }

  /// GET /health; the parsed JSON body.
  nlohmann::json Health() const;

 private:
  ModelEndpoint endpoint_;
};

/// Deterministic stand-in for all three model roles. Scores are a keyed
/// hash of (id, role):
///   translate -> source tokens in reverse order, decode_mode "mock"
///   logprob   -> every token gets -u with u in [0, 10), so RTTL == u
///   quality   -> score in [-1, 1)
class MockModelClient : public ModelClient {
 public:
  static constexpr std::uint64_t kDefaultKey = 0x616c73656cULL;

  explicit MockModelClient(std::uint64_t key = kDefaultKey,
                           std::size_t max_batch = 1 << 20)
      : key_(key), max_batch_(max_batch) {}

  ScorerResponse Send(const ScorerRequest &request) override;
  std::string descriptor() const override;
  std::size_t max_batch() const override { return max_batch_; }

  /// The values the mock assigns, exposed for tests.
  double Uncertainty(SentenceId id) const;
  double Quality(SentenceId id) const;

 private:
  std::uint64_t key_;
  std::size_t max_batch_;
};

}  // namespace alsel

#endif  // ALSEL_PROTOCOL_H_
