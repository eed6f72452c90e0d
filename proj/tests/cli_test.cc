// tests/cli_test.cc

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
#include "alsel/cli.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "alsel/errors.h"
#include "alsel/experiment.h"
#include "alsel/fileio.h"
#include "doctest.h"
#include "test_util.h"

using namespace alsel;
using namespace alsel::testing;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

void WriteText(const fs::path &path, const std::string &text) {
  std::ofstream(path, std::ios::binary) << text;
}

/// Splits a 300-pair synthetic corpus into 100 train, 10 validation,
/// 130 pool (k = 5).
fs::path MakeExperiment(const TempDir &tmp, const std::string &name = "exp") {
  const fs::path corpus = tmp / (name + ".jsonl");
  WriteText(corpus, CorpusToJsonl(SyntheticCorpus(300, 3, 25)));
  const fs::path dir = tmp / name;
  const Result r =
      Run({"split", "--corpus", corpus.string(), "--dir", dir.string(),
           "--train-size", "100", "--val-size", "10", "--seed", "7"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  return dir;
}

json Manifest(const fs::path &dir, std::size_t i) {
  return json::parse(ReadFileOrThrow(ExperimentPaths(dir).manifest(i)));
}

}  // namespace

TEST_CASE("preprocess: 5 rows with 2 violations keep 3") {
  TempDir tmp;
  WriteText(tmp / "raw.tsv",
            "habari ya asubuhi\tgood morning\n"
            "sawa\tsawa\n"
            "a b c d e f g\tshort\n"
            "nakupenda\tI love you\n"
            "asante sana\tthank you very much\n");
  const Result r =
      Run({"preprocess", "--input", (tmp / "raw.tsv").string(), "--output",
           (tmp / "clean.jsonl").string(), "--max-words", "5"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const json report = json::parse(r.out);
  CHECK(report["input_count"] == 5);
  CHECK(report["output_count"] == 3);
  CHECK(report["removed_identical"] == 1);
  CHECK(report["removed_overlong"] == 1);
  const ParallelCorpus clean =
      LoadParallel(tmp / "clean.jsonl", CorpusFormat::kJsonl);
  CHECK(clean.size() == 3);

  // Same inputs again reproduce the same bytes.
  CHECK(Run({"preprocess", "--input", (tmp / "raw.tsv").string(), "--output",
             (tmp / "clean.jsonl").string(), "--max-words", "5"})
            .code == 0);
  // Different settings refuse to overwrite.
  const Result again =
      Run({"preprocess", "--input", (tmp / "raw.tsv").string(), "--output",
           (tmp / "clean.jsonl").string(), "--max-words", "100"});
  CHECK(again.code == kExitInput);
  CHECK(again.err.find("already exists") != std::string::npos);
}

TEST_CASE("preprocess: missing input") {
  TempDir tmp;
  const Result r = Run({"preprocess", "--input", (tmp / "absent.tsv").string(),
                        "--output", (tmp / "out.jsonl").string()});
  CHECK(r.code != 0);
  CHECK(r.err.find("absent.tsv") != std::string::npos);
  CHECK(r.out.empty());
  CHECK_FALSE(fs::exists(tmp / "out.jsonl"));
}

TEST_CASE("split: k = 2 on 4 rows") {
  TempDir tmp;
  WriteText(tmp / "c.tsv", "a\tA\nb\tB\nc\tC\nd\tD\n");
  const Result r =
      Run({"split", "--corpus", (tmp / "c.tsv").string(), "--format", "tsv",
           "--dir", (tmp / "e").string(), "--k", "2", "--train-size", "1",
           "--val-size", "0", "--seed", "1"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const json j = json::parse(r.out);
  CHECK(j["folds"] == json::array({2, 2}));
  CHECK(j["test"] == 2);
  CHECK(j["train"] == 1);
  CHECK(j["pool"] == 1);
}

TEST_CASE("split: infeasible sizes exit with 2") {
  TempDir tmp;
  WriteText(tmp / "c.tsv", "a\tA\nb\tB\nc\tC\nd\tD\n");
  const Result r = Run({"split", "--corpus", (tmp / "c.tsv").string(),
                        "--format", "tsv", "--dir", (tmp / "e").string(), "--k",
                        "2", "--train-size", "100", "--seed", "1"});
  CHECK(r.code == kExitInfeasible);
  CHECK_FALSE(r.err.empty());
  CHECK_FALSE(fs::exists(tmp / "e" / "config.json"));
}

TEST_CASE("split: seed from ALSEL_SEED, overridden by --seed") {
  TempDir tmp;
  WriteText(tmp / "c.jsonl", CorpusToJsonl(SyntheticCorpus(50, 1, 5)));
  const std::string corpus = (tmp / "c.jsonl").string();
  auto seed_of = [](const fs::path &dir) {
    return json::parse(ReadFileOrThrow(dir / "config.json"))["base_seed"];
  };
  ::unsetenv("ALSEL_SEED");
  const Result none =
      Run({"split", "--corpus", corpus, "--dir", (tmp / "a").string(),
           "--train-size", "10", "--val-size", "1"});
  CHECK(none.code == kExitInput);
  CHECK(none.err.find("ALSEL_SEED") != std::string::npos);

  ::setenv("ALSEL_SEED", "4242", 1);
  REQUIRE(Run({"split", "--corpus", corpus, "--dir", (tmp / "b").string(),
               "--train-size", "10", "--val-size", "1"})
              .code == 0);
  CHECK(seed_of(tmp / "b") == 4242);
  REQUIRE(Run({"split", "--corpus", corpus, "--dir", (tmp / "c").string(),
               "--train-size", "10", "--val-size", "1", "--seed", "9"})
              .code == 0);
  CHECK(seed_of(tmp / "c") == 9);
  ::setenv("ALSEL_SEED", "not-a-number", 1);
  CHECK(Run({"split", "--corpus", corpus, "--dir", (tmp / "d").string(),
             "--train-size", "10", "--val-size", "1"})
            .code == kExitInput);
  ::unsetenv("ALSEL_SEED");
}

TEST_CASE("split: rerun is idempotent or refuses") {
  TempDir tmp;
  const fs::path dir = MakeExperiment(tmp);
  const std::string config = ReadFileOrThrow(dir / "config.json");
  const std::string corpus = (tmp / "exp.jsonl").string();
  CHECK(Run({"split", "--corpus", corpus, "--dir", dir.string(), "--train-size",
             "100", "--val-size", "10", "--seed", "7"})
            .code == 0);
  CHECK(ReadFileOrThrow(dir / "config.json") == config);
  const Result other =
      Run({"split", "--corpus", corpus, "--dir", dir.string(), "--train-size",
           "100", "--val-size", "10", "--seed", "8"});
  CHECK(other.code != 0);
  CHECK(other.err.find("already exists") != std::string::npos);
  CHECK(ReadFileOrThrow(dir / "config.json") == config);
}

TEST_CASE("iterate: random with the mock scorer") {
  TempDir tmp;
  const fs::path dir = MakeExperiment(tmp);
  const Result r = Run({"iterate", "--dir", dir.string(), "--strategy",
                        "random", "-N", "50", "--mock-scorer"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const json m = Manifest(dir, 0);
  CHECK(m["selected_ids"].size() == 50);
  CHECK(m["labelled_after"] == 150);
  CHECK(m["strategy"] == "random");
}

TEST_CASE("iterate: srttl records the per-bin fill") {
  TempDir tmp;
  const fs::path dir = MakeExperiment(tmp);
  const Result r =
      Run({"iterate", "--dir", dir.string(), "--strategy", "srttl", "-N", "40",
           "--bin-width", "10", "--mock-scorer", "--iterations", "2"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  for (std::size_t i = 0; i < 2; ++i) {
    const json m = Manifest(dir, i);
    REQUIRE(m["fill"].is_array());
    CHECK_FALSE(m["fill"].empty());
    std::size_t filled = 0;
    for (const auto &f : m["fill"]) filled += f["filled"].get<std::size_t>();
    CHECK(filled == 40);
    CHECK(m["bin_width"] == 10);
    CHECK(m["checksums"]["scores"].is_string());
  }
  // One JSON summary line per iteration.
  std::istringstream lines(r.out);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    CHECK(json::parse(line).is_object());
    ++count;
  }
  CHECK(count == 2);
}

TEST_CASE("iterate: second writer fails on the lock") {
  TempDir tmp;
  const fs::path dir = MakeExperiment(tmp);
  {
    WriterLock holder(dir);
    const Result r = Run(
        {"iterate", "--dir", dir.string(), "--strategy", "random", "-N", "5"});
    CHECK(r.code != 0);
    CHECK(r.err.find("locked") != std::string::npos);
    CHECK_FALSE(fs::exists(ExperimentPaths(dir).manifest(0)));
  }
  CHECK(
      Run({"iterate", "--dir", dir.string(), "--strategy", "random", "-N", "5"})
          .code == 0);
}

TEST_CASE("iterate: stop criteria") {
  TempDir tmp;
  const fs::path dir = MakeExperiment(tmp);
  const Result r =
      Run({"iterate", "--dir", dir.string(), "--strategy", "qe", "-N", "30",
           "--mock-scorer", "--iterations", "10", "--stop-total", "60"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(fs::exists(ExperimentPaths(dir).manifest(1)));
  CHECK_FALSE(fs::exists(ExperimentPaths(dir).manifest(2)));
  const Result exhausted =
      Run({"iterate", "--dir", dir.string(), "--strategy", "qe", "-N", "30",
           "--mock-scorer", "--iterations", "100", "--stop-when-exhausted"});
  REQUIRE_MESSAGE(exhausted.code == 0, exhausted.err);
  CHECK(Resume(dir).pool.available() == 0);
  CHECK(Run({"iterate", "--dir", dir.string(), "--strategy", "qe", "-N", "5",
             "--mock-scorer", "--stop-total", "10", "--stop-iterations", "2"})
            .code == kExitInput);
}

TEST_CASE("score and select communicate through files") {
  TempDir tmp;
  const fs::path dir = MakeExperiment(tmp);
  const ExperimentPaths p(dir);
  CHECK(Run({"select", "--dir", dir.string(), "--strategy", "rttl", "-N", "10"})
            .code != 0);
  REQUIRE(
      Run({"score", "--dir", dir.string(), "--kind", "rttl", "--mock-scorer"})
          .code == 0);
  CHECK(fs::exists(p.scores(0)));
  const Result sel =
      Run({"select", "--dir", dir.string(), "--strategy", "rttl", "-N", "10"});
  REQUIRE_MESSAGE(sel.code == 0, sel.err);
  const json batch = json::parse(ReadFileOrThrow(p.selection(0)));
  CHECK(batch["ids"].size() == 10);
  // iterate consumes the stored scores and selects the same batch.
  REQUIRE(
      Run({"iterate", "--dir", dir.string(), "--strategy", "rttl", "-N", "10"})
          .code == 0);
  CHECK(Manifest(dir, 0)["selected_ids"] == batch["ids"]);
}

TEST_CASE("tampering exits with 3") {
  TempDir tmp;
  const fs::path dir = MakeExperiment(tmp);
  REQUIRE(
      Run({"iterate", "--dir", dir.string(), "--strategy", "random", "-N", "5"})
          .code == 0);
  const fs::path sel = ExperimentPaths(dir).selection(0);
  std::string bytes = ReadFileOrThrow(sel);
  bytes[bytes.size() / 2] ^= 0x01;
  WriteText(sel, bytes);
  const Result r = Run(
      {"iterate", "--dir", dir.string(), "--strategy", "random", "-N", "5"});
  CHECK(r.code == kExitIntegrity);
  CHECK(r.err.find("iter_0.json") != std::string::npos);
}

TEST_CASE("report from experiment directories") {
  TempDir tmp;
  const fs::path dir = MakeExperiment(tmp);
  REQUIRE(Run({"iterate", "--dir", dir.string(), "--strategy", "srttl", "-N",
               "20", "--mock-scorer", "--iterations", "3"})
              .code == 0);
  WriteText(tmp / "bleu.tsv", "120\tsrttl\t0.5\n140\tsrttl\t-0.25\n");
  const Result csv = Run(
      {"report", "--dir", dir.string(), "--bleu", (tmp / "bleu.tsv").string()});
  REQUIRE_MESSAGE(csv.code == 0, csv.err);
  std::istringstream in(csv.out);
  std::vector<std::string> rows;
  for (std::string l; std::getline(in, l);) rows.push_back(l);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] ==
        "iteration,strategy,mean_len,mean_symbols,unique_words,delta_bleu");
  CHECK(rows[1].rfind("120,srttl,", 0) == 0);
  CHECK(rows[1].substr(rows[1].size() - 4) == ",0.5");
  CHECK(rows[2].substr(rows[2].size() - 6) == ",-0.25");
  CHECK(rows[3].back() == ',');

  const Result plot =
      Run({"report", "--dir", dir.string(), "--bleu",
           (tmp / "bleu.tsv").string(), "--format", "plotdata"});
  CHECK(plot.out == "series\tx\ty\nsrttl\t20\t0.5\nsrttl\t40\t-0.25\n");

  const fs::path out = tmp / "report.json";
  REQUIRE(Run({"report", "--dir", dir.string(), "--format", "json", "--output",
               out.string()})
              .code == 0);
  const json j = json::parse(ReadFileOrThrow(out));
  CHECK(j.size() == 3);
  CHECK(j[0]["sentence_count"] == 20);
  CHECK(Run({"report", "--dir", dir.string(), "--format", "json", "--output",
             out.string()})
            .code == 0);
  CHECK(Run({"report", "--dir", dir.string(), "--format", "pdf"}).code ==
        kExitInput);
}

TEST_CASE("every run logs its resolved configuration") {
  TempDir tmp;
  const fs::path dir = MakeExperiment(tmp);
  Run({"iterate", "--dir", dir.string(), "--strategy", "random", "-N", "5"});
  Run({"iterate", "--dir", dir.string(), "--strategy", "bogus", "-N", "5"});
  std::istringstream log(ReadFileOrThrow(ExperimentPaths(dir).runs_log()));
  std::vector<json> entries;
  for (std::string l; std::getline(log, l);) entries.push_back(json::parse(l));
  REQUIRE(entries.size() == 3);
  CHECK(entries[0]["command"] == "split");
  CHECK(entries[0]["resolved"]["seed"] == 7);
  CHECK(entries[1]["command"] == "iterate");
  CHECK(entries[1]["exit_code"] == 0);
  CHECK(entries[1]["resolved"]["budget"] == 5);
  CHECK(entries[2]["exit_code"] == kExitInput);
  CHECK(entries[2]["error"].is_string());
}

TEST_CASE("command-line parsing") {
  CHECK(Run({"--help"}).code == 0);
  CHECK(Run({}).code != 0);
  CHECK(Run({"frobnicate"}).code == kExitInput);
  CHECK(Run({"iterate"}).code == kExitInput);
  const Result r = Run({"iterate", "--dir", "/nonexistent/x", "--strategy",
                        "random", "-N", "3"});
  CHECK(r.code == kExitInput);
  CHECK(r.err.rfind("alsel iterate: ", 0) == 0);
}
