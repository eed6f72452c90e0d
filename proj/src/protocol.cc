// src/protocol.cc

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

#include "alsel/protocol.h"

#include <cmath>
#include <set>

#include "alsel/fileio.h"
#include "alsel/prng.h"
#include "alsel/text.h"

namespace alsel {

using nlohmann::json;

namespace {

[[noreturn]] void BadSchema(const std::string &message,
                            const std::string &batch_id = "") {
  throw ProtocolError("bad_schema", message, batch_id);
}

json ItemsToJson(RequestKind kind, const std::vector<RequestItem> &items) {
  json out = json::array();
  for (const auto &item : items) {
    json j = {{"id", item.id}};
    switch (kind) {
      case RequestKind::kTranslate:
        j["source"] = item.source;
        break;
      case RequestKind::kLogprob:
        j["source_tokens"] = item.source_tokens;
        j["hypothesis"] = item.hypothesis;
        break;
      case RequestKind::kQuality:
        j["source"] = item.source;
        j["hypothesis"] = item.hypothesis;
        break;
    }
    out.push_back(std::move(j));
  }
  return out;
}

const json &Field(const json &obj, const char *name, json::value_t type,
                  const std::string &where) {
  auto it = obj.find(name);
  if (it == obj.end()) BadSchema(where + ": missing field '" + name + "'");
  const bool ok =
      type == json::value_t::number_float
          ? it->is_number()
          : (type == json::value_t::number_unsigned ? it->is_number_unsigned()
                                                    : it->type() == type);
  if (!ok) BadSchema(where + ": field '" + name + "' has the wrong type");
  return *it;
}

std::string StringField(const json &obj, const char *name,
                        const std::string &where) {
  return Field(obj, name, json::value_t::string, where).get<std::string>();
}

}  // namespace

std::string_view KindName(RequestKind kind) {
  switch (kind) {
    case RequestKind::kTranslate:
      return "translate";
    case RequestKind::kLogprob:
      return "logprob";
    case RequestKind::kQuality:
      return "quality";
  }
  return "";
}

RequestKind ParseRequestKind(std::string_view name) {
  if (name == "translate") return RequestKind::kTranslate;
  if (name == "logprob") return RequestKind::kLogprob;
  if (name == "quality") return RequestKind::kQuality;
  BadSchema("unknown request kind '" + std::string(name) + "'");
}

std::string ContentBatchId(RequestKind kind,
                           const std::vector<RequestItem> &items) {
  const json canonical = {{"items", ItemsToJson(kind, items)},
                          {"kind", KindName(kind)}};
  return Sha256Hex(canonical.dump()).substr(0, 16);
}

ScorerRequest MakeRequest(RequestKind kind, std::vector<RequestItem> items) {
  ScorerRequest request;
  request.kind = kind;
  request.batch_id = ContentBatchId(kind, items);
  request.items = std::move(items);
  return request;
}

json ToJson(const ScorerRequest &request) {
  return {{"batch_id", request.batch_id},
          {"kind", KindName(request.kind)},
          {"items", ItemsToJson(request.kind, request.items)}};
}

json ToJson(const ScorerResponse &response, RequestKind kind) {
  json results = json::array();
  for (const auto &r : response.results) {
    json j = {{"id", r.id}};
    switch (kind) {
      case RequestKind::kTranslate:
        j["hypothesis"] = r.hypothesis;
        j["decode_mode"] = r.decode_mode;
        break;
      case RequestKind::kLogprob:
        j["token_logprobs"] = r.token_logprobs;
        break;
      case RequestKind::kQuality:
        j["score"] = r.score;
        break;
    }
    results.push_back(std::move(j));
  }
  return {{"batch_id", response.batch_id},
          {"model", response.model},
          {"results", std::move(results)}};
}

ScorerRequest RequestFromJson(const json &j) {
  if (!j.is_object()) BadSchema("request must be an object");
  ScorerRequest request;
  request.batch_id = StringField(j, "batch_id", "request");
  request.kind = ParseRequestKind(StringField(j, "kind", "request"));
  const json &items = Field(j, "items", json::value_t::array, "request");
  if (items.empty()) BadSchema("request has no items", request.batch_id);
  std::set<SentenceId> ids;
  for (const auto &item : items) {
    if (!item.is_object())
      BadSchema("item must be an object", request.batch_id);
    RequestItem r;
    r.id = Field(item, "id", json::value_t::number_unsigned, "item")
               .get<SentenceId>();
    if (!ids.insert(r.id).second)
      BadSchema("duplicate id " + std::to_string(r.id), request.batch_id);
    const std::string where = "item " + std::to_string(r.id);
    if (request.kind != RequestKind::kLogprob)
      r.source = StringField(item, "source", where);
    if (request.kind != RequestKind::kTranslate)
      r.hypothesis = StringField(item, "hypothesis", where);
    if (request.kind == RequestKind::kLogprob) {
      for (const auto &tok :
           Field(item, "source_tokens", json::value_t::array, where)) {
        if (!tok.is_string()) BadSchema(where + ": tokens must be strings");
        r.source_tokens.push_back(tok.get<std::string>());
      }
    }
    request.items.push_back(std::move(r));
  }
  return request;
}

ScorerResponse ResponseFromJson(const json &j, RequestKind kind) {
  if (!j.is_object()) BadSchema("response must be an object");
  ScorerResponse response;
  response.batch_id = StringField(j, "batch_id", "response");
  response.model = StringField(j, "model", "response");
  for (const auto &item :
       Field(j, "results", json::value_t::array, "response")) {
    if (!item.is_object())
      BadSchema("result must be an object", response.batch_id);
    ResultItem r;
    r.id = Field(item, "id", json::value_t::number_unsigned, "result")
               .get<SentenceId>();
    const std::string where = "result " + std::to_string(r.id);
    switch (kind) {
      case RequestKind::kTranslate:
        r.hypothesis = StringField(item, "hypothesis", where);
        r.decode_mode = StringField(item, "decode_mode", where);
        break;
      case RequestKind::kLogprob:
        for (const auto &v :
             Field(item, "token_logprobs", json::value_t::array, where)) {
          if (!v.is_number()) BadSchema(where + ": log-probs must be numbers");
          r.token_logprobs.push_back(v.get<double>());
        }
        break;
      case RequestKind::kQuality:
        r.score = Field(item, "score", json::value_t::number_float, where)
                      .get<double>();
        break;
    }
    response.results.push_back(std::move(r));
  }
  return response;
}

ScorerResponse ParseResponseBody(std::string_view body, RequestKind kind) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) BadSchema("response body is not valid JSON");
  if (j.is_object() && j.contains("error")) {
    const json &e = j["error"];
    if (!e.is_object()) BadSchema("malformed error body");
    throw ProtocolError(e.value("code", std::string("backend_failure")),
                        e.value("message", std::string()),
                        e.value("batch_id", std::string()));
  }
  return ResponseFromJson(j, kind);
}

void ValidateResponse(const ScorerRequest &request,
                      const ScorerResponse &response) {
  const std::string &bid = request.batch_id;
  if (response.batch_id != bid)
    BadSchema("batch id mismatch: sent " + bid + ", got " + response.batch_id,
              bid);
  if (response.results.size() != request.items.size())
    BadSchema("expected " + std::to_string(request.items.size()) +
                  " results, got " + std::to_string(response.results.size()),
              bid);
  for (std::size_t i = 0; i < request.items.size(); ++i) {
    const RequestItem &item = request.items[i];
    const ResultItem &r = response.results[i];
    if (r.id != item.id)
      BadSchema("result " + std::to_string(i) + " has id " +
                    std::to_string(r.id) + ", expected " +
                    std::to_string(item.id),
                bid);
    if (request.kind == RequestKind::kLogprob) {
      if (r.token_logprobs.size() != item.source_tokens.size())
        BadSchema("id " + std::to_string(r.id) + ": " +
                      std::to_string(r.token_logprobs.size()) +
                      " log-probs for " +
                      std::to_string(item.source_tokens.size()) + " tokens",
                  bid);
      for (double lp : r.token_logprobs)
        if (!std::isfinite(lp) || lp > 0.0)
          BadSchema("id " + std::to_string(r.id) +
                        ": log-probs must be finite and <= 0",
                    bid);
    } else if (request.kind == RequestKind::kQuality) {
      if (!std::isfinite(r.score))
        BadSchema("id " + std::to_string(r.id) + ": non-finite quality", bid);
    }
  }
}

std::string ErrorBody(std::string_view code, std::string_view message,
                      std::string_view batch_id) {
  return json{
      {"error", {{"code", code}, {"message", message}, {"batch_id", batch_id}}}}
      .dump();
}

std::string_view DirectionName(Direction d) {
  switch (d) {
    case Direction::kForward:
      return "forward";
    case Direction::kReverse:
      return "reverse";
    case Direction::kQuality:
      return "quality";
  }
  return "";
}

RequestKind KindFor(Direction d) {
  switch (d) {
    case Direction::kForward:
      return RequestKind::kTranslate;
    case Direction::kReverse:
      return RequestKind::kLogprob;
    case Direction::kQuality:
      return RequestKind::kQuality;
  }
  return RequestKind::kTranslate;
}

double MockModelClient::Uncertainty(SentenceId id) const {
  return 10.0 * UnitInterval(KeyedHash(key_, id, "rttl"));
}

double MockModelClient::Quality(SentenceId id) const {
  return 2.0 * UnitInterval(KeyedHash(key_, id, "qe")) - 1.0;
}

std::string MockModelClient::descriptor() const {
  return "mock/v1 key=" + std::to_string(key_);
}

ScorerResponse MockModelClient::Send(const ScorerRequest &request) {
  if (request.items.size() > max_batch_)
    throw ProtocolError("oversized_batch",
                        std::to_string(request.items.size()) + " > " +
                            std::to_string(max_batch_),
                        request.batch_id);
  ScorerResponse response;
  response.batch_id = request.batch_id;
  response.model = descriptor();
  for (const auto &item : request.items) {
    ResultItem r;
    r.id = item.id;
    switch (request.kind) {
      case RequestKind::kTranslate: {
        auto tokens = SplitWhitespace(item.source);
        for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
          if (!r.hypothesis.empty()) r.hypothesis += ' ';
          r.hypothesis.append(*it);
        }
        r.decode_mode = "mock";
        break;
      }
      case RequestKind::kLogprob:
        r.token_logprobs.assign(item.source_tokens.size(),
                                -Uncertainty(item.id));
        break;
      case RequestKind::kQuality:
        r.score = Quality(item.id);
        break;
    }
    response.results.push_back(std::move(r));
  }
  return response;
}

}  // namespace alsel
