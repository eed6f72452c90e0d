// tests/protocol_test.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "alsel/protocol.h"

#include <filesystem>
#include <sstream>
#include <thread>

#include "alsel/fileio.h"
#include "alsel/scorers.h"
#include "doctest.h"
#include "httplib.h"
#include "test_util.h"

using namespace alsel;
using alsel::testing::Gen;
using nlohmann::json;

namespace {

const std::filesystem::path kFixtures =
    std::filesystem::path(ALSEL_FIXTURES) / "protocol";

std::string Fixture(const std::string &name) {
  return ReadFileOrThrow(kFixtures / name);
}

// Gateway stand-in: the mock backend behind the HTTP wire format.
class FakeGateway {
 public:
  explicit FakeGateway(std::size_t max_batch = 32)
      : backend_(MockModelClient::kDefaultKey, max_batch),
        max_batch_(max_batch) {
    for (const char *kind : {"translate", "logprob", "quality"}) {
      server_.Post(std::string("/") + kind,
                   [this](const httplib::Request &req, httplib::Response &res) {
                     Handle(req, res);
                   });
    }
    server_.Get(
        "/health", [this](const httplib::Request &, httplib::Response &res) {
          res.set_content(json{{"status", "ok"},
                               {"deterministic", true},
                               {"max_batch", max_batch_},
                               {"models", {{"forward", backend_.descriptor()}}}}
                              .dump(),
                          "application/json");
        });
    server_.Post("/broken",
                 [](const httplib::Request &, httplib::Response &res) {
                   res.status = 500;
                   res.set_content("internal error", "text/plain");
                 });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeGateway() {
    server_.stop();
    thread_.join();
  }

  std::string address() const {
    return "http://127.0.0.1:" + std::to_string(port_);
  }

  // Replaces the next response body for a kind.
  void Override(const std::string &path, int status, std::string body) {
    std::lock_guard<std::mutex> lock(mu_);
    overrides_[path] = {status, std::move(body)};
  }

 private:
  void Handle(const httplib::Request &req, httplib::Response &res) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = overrides_.find(req.path);
      if (it != overrides_.end()) {
        res.status = it->second.first;
        res.set_content(it->second.second, "application/json");
        overrides_.erase(it);
        return;
      }
    }
    ScorerRequest request;
    try {
      request = RequestFromJson(json::parse(req.body));
      if ("/" + std::string(KindName(request.kind)) != req.path)
        throw ProtocolError("bad_schema", "kind does not match the endpoint",
                            request.batch_id);
      const ScorerResponse response = backend_.Send(request);
      res.set_content(ToJson(response, request.kind).dump(),
                      "application/json");
    } catch (const ProtocolError &e) {
      res.status = e.code() == "oversized_batch" ? 413 : 400;
      res.set_content(ErrorBody(e.code(), e.what(), e.batch_id()),
                      "application/json");
    } catch (const std::exception &e) {
      res.status = 400;
      res.set_content(ErrorBody("bad_schema", e.what(), ""),
                      "application/json");
    }
  }

  httplib::Server server_;
  MockModelClient backend_;
  std::size_t max_batch_;
  int port_ = 0;
  std::thread thread_;
  std::mutex mu_;
  std::map<std::string, std::pair<int, std::string>> overrides_;
};

HttpModelClient Client(const FakeGateway &gw, Direction d,
                       std::size_t max_batch = 32) {
  ModelEndpoint e;
  e.base_address = gw.address();
  e.direction = d;
  e.max_batch = max_batch;
  e.timeout = std::chrono::milliseconds(5000);
  return HttpModelClient(e);
}

std::string ProtocolCode(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const ProtocolError &e) {
    return e.code();
  } catch (const std::exception &e) {
    return std::string("other: ") + e.what();
  }
  return "none";
}

}  // namespace

TEST_CASE("fixture checksums are stable") {
  std::istringstream sums(Fixture("SHA256SUMS"));
  std::string sha, name;
  int n = 0;
  while (sums >> sha >> name) {
    CHECK_MESSAGE(Sha256Hex(Fixture(name)) == sha, name);
    ++n;
  }
  CHECK(n == 7);
}

TEST_CASE("request fixtures round-trip byte-exactly") {
  for (const char *name : {"translate_request.json", "logprob_request.json",
                           "quality_request.json"}) {
    const std::string bytes = Fixture(name);
    const ScorerRequest req = RequestFromJson(json::parse(bytes));
    CHECK_MESSAGE(ToJson(req).dump() + "\n" == bytes, name);
    // Batch ids in the fixtures were computed by a separate encoder.
    CHECK_MESSAGE(ContentBatchId(req.kind, req.items) == req.batch_id, name);
    CHECK(MakeRequest(req.kind, req.items).batch_id == req.batch_id);
  }
}

TEST_CASE("response fixtures parse and round-trip byte-exactly") {
  const std::pair<const char *, const char *> pairs[] = {
      {"translate_request.json", "translate_response.json"},
      {"logprob_request.json", "logprob_response.json"},
      {"quality_request.json", "quality_response.json"}};
  for (auto [req_name, resp_name] : pairs) {
    const ScorerRequest req = RequestFromJson(json::parse(Fixture(req_name)));
    const std::string bytes = Fixture(resp_name);
    const ScorerResponse resp = ParseResponseBody(bytes, req.kind);
    CHECK_NOTHROW(ValidateResponse(req, resp));
    CHECK_MESSAGE(ToJson(resp, req.kind).dump() + "\n" == bytes, resp_name);
  }
  const ScorerResponse lp = ParseResponseBody(Fixture("logprob_response.json"),
                                              RequestKind::kLogprob);
  CHECK(lp.results[0].token_logprobs ==
        std::vector<double>{-0.25, -1.5, -0.125});
  CHECK(lp.model == "fake/v1 reverse");
  const ScorerResponse tr = ParseResponseBody(
      Fixture("translate_response.json"), RequestKind::kTranslate);
  CHECK(tr.results[1].hypothesis == "i love you very much");
  CHECK(tr.results[1].decode_mode == "greedy");
}

TEST_CASE("corrupted and invalid fixtures raise protocol errors") {
  CHECK(ProtocolCode([] {
          ParseResponseBody(Fixture("corrupted_response.json"),
                            RequestKind::kLogprob);
        }) == "bad_schema");
  const ScorerRequest req =
      RequestFromJson(json::parse(Fixture("logprob_request.json")));
  CHECK(ProtocolCode([&] {
          ValidateResponse(req,
                           ParseResponseBody(Fixture("badsign_response.json"),
                                             RequestKind::kLogprob));
        }) == "bad_schema");
  try {
    ParseResponseBody(Fixture("error_oversized.json"), RequestKind::kQuality);
    FAIL("expected a protocol error");
  } catch (const ProtocolError &e) {
    CHECK(e.code() == "oversized_batch");
    CHECK(
        e.batch_id() ==
        RequestFromJson(json::parse(Fixture("quality_request.json"))).batch_id);
  }
}

TEST_CASE("schema checks") {
  auto code = [](const std::string &text) {
    return ProtocolCode([&] { RequestFromJson(json::parse(text)); });
  };
  CHECK(code(R"({"batch_id":"x","kind":"translate","items":[]})") ==
        "bad_schema");
  CHECK(
      code(
          R"({"batch_id":"x","kind":"translate","items":[{"id":1,"source":"a"},{"id":1,"source":"b"}]})") ==
      "bad_schema");
  CHECK(
      code(
          R"({"batch_id":"x","kind":"logprob","items":[{"id":1,"hypothesis":"a"}]})") ==
      "bad_schema");
  CHECK(
      code(
          R"({"batch_id":"x","kind":"quality","items":[{"id":-1,"source":"a","hypothesis":"b"}]})") ==
      "bad_schema");
  CHECK(code(R"([1,2])") == "bad_schema");

  const ScorerRequest req =
      MakeRequest(RequestKind::kTranslate,
                  {RequestItem{1, "a", {}, ""}, RequestItem{2, "b", {}, ""}});
  ScorerResponse resp;
  resp.batch_id = req.batch_id;
  resp.results.resize(2);
  resp.results[0].id = 1;
  resp.results[1].id = 2;
  CHECK_NOTHROW(ValidateResponse(req, resp));
  std::swap(resp.results[0], resp.results[1]);
  CHECK(ProtocolCode([&] { ValidateResponse(req, resp); }) == "bad_schema");
  std::swap(resp.results[0], resp.results[1]);
  resp.batch_id = "0000";
  CHECK(ProtocolCode([&] { ValidateResponse(req, resp); }) == "bad_schema");
  resp.batch_id = req.batch_id;
  resp.results.pop_back();
  CHECK(ProtocolCode([&] { ValidateResponse(req, resp); }) == "bad_schema");
}

TEST_CASE("batch ids are content addressed") {
  const std::vector<RequestItem> a = {RequestItem{1, "habari", {}, ""}};
  const std::vector<RequestItem> b = {RequestItem{1, "habari!", {}, ""}};
  CHECK(ContentBatchId(RequestKind::kTranslate, a).size() == 16);
  CHECK(ContentBatchId(RequestKind::kTranslate, a) ==
        ContentBatchId(RequestKind::kTranslate, a));
  CHECK(ContentBatchId(RequestKind::kTranslate, a) !=
        ContentBatchId(RequestKind::kTranslate, b));
  CHECK(ContentBatchId(RequestKind::kTranslate, a) !=
        ContentBatchId(RequestKind::kQuality, a));
}

TEST_CASE("http client against a fake gateway") {
  FakeGateway gw;
  HttpModelClient forward = Client(gw, Direction::kForward);
  const json health = forward.Health();
  CHECK(health["status"] == "ok");
  CHECK(health["models"]["forward"] == MockModelClient().descriptor());

  const ScorerRequest req =
      RequestFromJson(json::parse(Fixture("translate_request.json")));
  const ScorerResponse resp = forward.Send(req);
  CHECK_NOTHROW(ValidateResponse(req, resp));
  CHECK(resp.results[0].hypothesis == "asubuhi ya habari");
  CHECK(resp.results[0].decode_mode == "mock");
  CHECK(forward.descriptor().find("forward@http://127.0.0.1:") == 0);

  // The client refuses to send a request kind its endpoint does not serve.
  const ScorerRequest q =
      RequestFromJson(json::parse(Fixture("quality_request.json")));
  CHECK_THROWS_AS(forward.Send(q), Error);
}

TEST_CASE("logprob responses satisfy shape and sign on random requests") {
  FakeGateway gw(64);
  HttpModelClient reverse = Client(gw, Direction::kReverse, 64);
  Gen g(404);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<RequestItem> items;
    const std::size_t n = g.Size(1, 20);
    SentenceId id = g.Size(0, 1000);
    for (std::size_t i = 0; i < n; ++i) {
      RequestItem item;
      item.id = id;
      id += g.Size(1, 50);
      const std::size_t len = g.Size(1, 30);
      for (std::size_t t = 0; t < len; ++t)
        item.source_tokens.push_back(g.Word());
      item.hypothesis = g.Sentence(g.Size(1, 10));
      items.push_back(std::move(item));
    }
    const ScorerRequest req = MakeRequest(RequestKind::kLogprob, items);
    const ScorerResponse resp = reverse.Send(req);
    REQUIRE(resp.results.size() == n);
    CHECK(resp.batch_id == req.batch_id);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(resp.results[i].id == items[i].id);
      CHECK(resp.results[i].token_logprobs.size() ==
            items[i].source_tokens.size());
      for (double lp : resp.results[i].token_logprobs) {
        CHECK(std::isfinite(lp));
        CHECK(lp <= 0.0);
      }
    }
  }
}

TEST_CASE("gateway errors map onto protocol error codes") {
  FakeGateway gw(2);
  HttpModelClient forward = Client(gw, Direction::kForward, 64);
  const ScorerRequest three =
      MakeRequest(RequestKind::kTranslate,
                  {RequestItem{1, "a", {}, ""}, RequestItem{2, "b", {}, ""},
                   RequestItem{3, "c", {}, ""}});
  CHECK(ProtocolCode([&] { forward.Send(three); }) == "oversized_batch");

  const ScorerRequest one =
      MakeRequest(RequestKind::kTranslate, {RequestItem{1, "a b", {}, ""}});
  gw.Override("/translate", 500, "<html>oops</html>");
  CHECK(ProtocolCode([&] { forward.Send(one); }) == "backend_failure");
  gw.Override("/translate", 503,
              ErrorBody("backend_failure", "model not loaded", one.batch_id));
  CHECK(ProtocolCode([&] { forward.Send(one); }) == "backend_failure");
  gw.Override("/translate", 200, "{\"batch_id\":");
  CHECK(ProtocolCode([&] { forward.Send(one); }) == "bad_schema");
  CHECK(ProtocolCode([&] { forward.Send(one); }) == "none");

  ModelEndpoint dead;
  dead.base_address = "http://127.0.0.1:1";
  dead.timeout = std::chrono::milliseconds(500);
  HttpModelClient nowhere(dead);
  CHECK(ProtocolCode([&] { nowhere.Send(one); }) == "transport");
  CHECK(ProtocolCode([&] { nowhere.Health(); }) == "transport");
}

TEST_CASE("pool scoring over http equals direct mock scoring") {
  FakeGateway gw(16);
  auto fwd =
      std::make_shared<HttpModelClient>(Client(gw, Direction::kForward, 16));
  auto rev =
      std::make_shared<HttpModelClient>(Client(gw, Direction::kReverse, 16));
  auto qe =
      std::make_shared<HttpModelClient>(Client(gw, Direction::kQuality, 16));
  const MonoPool pool = PoolFromCorpus(testing::SyntheticCorpus(120, 3, 25));
  ScoreOptions o;
  o.batch_size = 64;  // capped to the endpoint's 16
  for (ScoreKind kind : {ScoreKind::kRttl, ScoreKind::kQe}) {
    const PoolScores http =
        ScorePool(pool, ScoringClients{fwd, rev, qe}, kind, o);
    auto capped =
        std::make_shared<MockModelClient>(MockModelClient::kDefaultKey, 16);
    const PoolScores direct =
        ScorePool(pool, ScoringClients{capped, capped, capped}, kind, o);
    CHECK(ScoresToJsonl(http.candidates) == ScoresToJsonl(direct.candidates));
    CHECK(http.batches.size() == 8);
    // Request checksums cover content only, so they agree too.
    CHECK(http.batches[3].request_sha256 == direct.batches[3].request_sha256);
  }
}
