// src/http_client.cc

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
#include "httplib.h"

namespace alsel {

namespace {

httplib::Client MakeClient(const ModelEndpoint &endpoint) {
  httplib::Client client(endpoint.base_address);
  const auto secs =
      std::chrono::duration_cast<std::chrono::seconds>(endpoint.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(
      endpoint.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  return client;
}

std::string PathFor(RequestKind kind) {
  return "/" + std::string(KindName(kind));
}

}  // namespace

HttpModelClient::HttpModelClient(ModelEndpoint endpoint)
    : endpoint_(std::move(endpoint)) {
  if (endpoint_.max_batch < 1) throw Error("endpoint max batch must be >= 1");
}

std::string HttpModelClient::descriptor() const {
  if (!endpoint_.model.empty()) return endpoint_.model;
  return std::string(DirectionName(endpoint_.direction)) + "@" +
         endpoint_.base_address;
}

ScorerResponse HttpModelClient::Send(const ScorerRequest &request) {
  if (request.kind != KindFor(endpoint_.direction))
    throw Error("endpoint " + endpoint_.base_address + " serves " +
                std::string(DirectionName(endpoint_.direction)) +
                " requests, not " + std::string(KindName(request.kind)));
  httplib::Client client = MakeClient(endpoint_);
  auto result = client.Post(PathFor(request.kind), ToJson(request).dump(),
                            "application/json");
  if (!result)
    throw ProtocolError(
        "transport",
        endpoint_.base_address + ": " + httplib::to_string(result.error()),
        request.batch_id);
  if (result->status != 200) {
    // Error bodies carry their own code; anything else is a backend failure.
    auto body = nlohmann::json::parse(result->body, nullptr, false);
    if (body.is_object() && body.contains("error"))
      ParseResponseBody(result->body, request.kind);
    throw ProtocolError("backend_failure",
                        "HTTP status " + std::to_string(result->status),
                        request.batch_id);
  }
  return ParseResponseBody(result->body, request.kind);
}

nlohmann::json HttpModelClient::Health() const {
  httplib::Client client = MakeClient(endpoint_);
  auto result = client.Get("/health");
  if (!result)
    throw ProtocolError("transport", endpoint_.base_address + ": " +
                                         httplib::to_string(result.error()));
  if (result->status != 200)
    throw ProtocolError("backend_failure", "health probe returned " +
                                               std::to_string(result->status));
  auto j = nlohmann::json::parse(result->body, nullptr, false);
  if (j.is_discarded())
    throw ProtocolError("bad_schema", "health body is not valid JSON");
  return j;
}

}  // namespace alsel
