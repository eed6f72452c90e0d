// src/analytics.cc

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

#include "alsel/analytics.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <unordered_set>

#include "alsel/errors.h"
#include "alsel/text.h"

namespace alsel {

using json = nlohmann::json;

BatchStats ComputeBatchStats(std::span<const std::string> sources,
                             std::string label, std::string strategy,
                             const WordOptions &words) {
  if (sources.empty()) throw Error("batch statistics need a non-empty batch");
  std::size_t tokens = 0, symbols = 0;
  std::unordered_set<std::string> vocab;
  for (const std::string &s : sources) {
    const auto toks = SplitWhitespace(s);
    tokens += toks.size();
    symbols += CountSymbols(s);
    for (std::string_view t : toks) {
      std::string w = NormalizeWord(t, words.case_fold, words.strip_symbols);
      if (!w.empty()) vocab.insert(std::move(w));
    }
  }
  BatchStats st;
  st.label = std::move(label);
  st.strategy = std::move(strategy);
  st.sentence_count = sources.size();
  const double n = static_cast<double>(sources.size());
  st.mean_sentence_length = static_cast<double>(tokens) / n;
  st.mean_symbol_count = static_cast<double>(symbols) / n;
  st.unique_words = vocab.size();
  return st;
}

DistributionDivergence Divergence(std::span<const std::size_t> selected_lengths,
                                  const LengthDistribution &reference) {
  if (selected_lengths.empty())
    throw Error("divergence needs a non-empty selection");
  ValidateDistribution(reference);
  const std::size_t bins = reference.bins();
  std::vector<std::size_t> counts(bins + 1, 0);
  for (std::size_t len : selected_lengths)
    ++counts[reference.BinOf(len).value_or(bins)];
  const double n = static_cast<double>(selected_lengths.size());
  DistributionDivergence d;
  d.deviations.resize(bins + 1);
  double sum = 0.0;
  for (std::size_t b = 0; b <= bins; ++b) {
    const double p = b < bins ? reference.proportions[b] : 0.0;
    d.deviations[b] = std::fabs(static_cast<double>(counts[b]) / n - p);
    sum += d.deviations[b];
  }
  d.total_variation = std::clamp(0.5 * sum, 0.0, 1.0);
  return d;
}

ReportFormat ParseReportFormat(std::string_view name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  if (name == "plotdata") return ReportFormat::kPlotData;
  if (name == "table") return ReportFormat::kTable;
  throw Error("unknown report format '" + std::string(name) +
              "' (expected csv, json, plotdata or table)");
}

json ToJson(const BatchStats &s) {
  return {
      {"iteration", s.label},
      {"strategy", s.strategy},
      {"mean_sentence_length", s.mean_sentence_length},
      {"mean_symbol_count", s.mean_symbol_count},
      {"unique_words", s.unique_words},
      {"sentence_count", s.sentence_count},
      {"cumulative_sentences",
       s.cumulative_sentences ? json(*s.cumulative_sentences) : json(nullptr)},
      {"delta_bleu", s.delta_bleu ? json(*s.delta_bleu) : json(nullptr)},
  };
}

BatchStats BatchStatsFromJson(const json &j) {
  BatchStats s;
  try {
    s.label = j.at("iteration").get<std::string>();
    s.strategy = j.at("strategy").get<std::string>();
    s.mean_sentence_length = j.at("mean_sentence_length").get<double>();
    s.mean_symbol_count = j.at("mean_symbol_count").get<double>();
    s.unique_words = j.at("unique_words").get<std::size_t>();
    s.sentence_count = j.at("sentence_count").get<std::size_t>();
    if (j.contains("cumulative_sentences") &&
        !j["cumulative_sentences"].is_null())
      s.cumulative_sentences = j["cumulative_sentences"].get<std::size_t>();
    if (j.contains("delta_bleu") && !j["delta_bleu"].is_null())
      s.delta_bleu = j["delta_bleu"].get<double>();
  } catch (const json::exception &e) {
    throw Error(std::string("malformed batch statistics: ") + e.what());
  }
  if (s.sentence_count == 0)
    throw Error("batch statistics with sentence_count 0");
  if (!(s.mean_sentence_length >= 0) || !(s.mean_symbol_count >= 0))
    throw Error("batch statistics with negative means");
  return s;
}

std::vector<BatchStats> HistoryFromJson(const json &j) {
  if (!j.is_array()) throw Error("history must be a JSON array");
  std::vector<BatchStats> out;
  for (const auto &e : j) out.push_back(BatchStatsFromJson(e));
  return out;
}

std::string FormatFixed(double value, int decimals) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof(buf), value,
                         std::chars_format::fixed, decimals);
  std::string s(buf, r.ptr);
  if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-')
    s.erase(0, 1);  // no "-0.0"
  return s;
}

namespace {

std::string Shortest(double value) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, r.ptr);
}

// Two decimals with trailing zeros dropped: 14.20 -> 14.2, 11.00 -> 11.
std::string FormatAverage(double value) {
  std::string s = FormatFixed(value, 2);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

std::string GroupThousands(std::size_t v) {
  std::string digits = std::to_string(v), out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return out;
}

std::string CsvField(const std::string &s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<std::string> FirstSeen(std::span<const BatchStats> history,
                                   std::string BatchStats::*field) {
  std::vector<std::string> out;
  for (const auto &s : history)
    if (std::find(out.begin(), out.end(), s.*field) == out.end())
      out.push_back(s.*field);
  return out;
}

std::string RenderCsv(std::span<const BatchStats> history) {
  std::string out =
      "iteration,strategy,mean_len,mean_symbols,unique_words,delta_bleu\n";
  for (const auto &s : history) {
    out += CsvField(s.label) + ',' + CsvField(s.strategy) + ',' +
           FormatFixed(s.mean_sentence_length, 1) + ',' +
           FormatFixed(s.mean_symbol_count, 1) + ',' +
           std::to_string(s.unique_words) + ',' +
           (s.delta_bleu ? Shortest(*s.delta_bleu) : std::string()) + "\n";
  }
  return out;
}

std::string RenderPlotData(std::span<const BatchStats> history) {
  std::string out = "series\tx\ty\n";
  for (const std::string &series : FirstSeen(history, &BatchStats::strategy))
    for (const auto &s : history)
      if (s.strategy == series && s.cumulative_sentences && s.delta_bleu)
        out += series + '\t' + std::to_string(*s.cumulative_sentences) + '\t' +
               Shortest(*s.delta_bleu) + '\n';
  return out;
}

// Left-aligned first column, right-aligned others, two spaces apart.
std::string Grid(const std::vector<std::vector<std::string>> &rows) {
  std::vector<std::size_t> width;
  for (const auto &r : rows) {
    width.resize(std::max(width.size(), r.size()), 0);
    for (std::size_t c = 0; c < r.size(); ++c)
      width[c] = std::max(width[c], r[c].size());
  }
  std::string out;
  for (const auto &r : rows) {
    std::string line;
    for (std::size_t c = 0; c < r.size(); ++c) {
      const std::string pad(width[c] - r[c].size(), ' ');
      if (c == 0) {
        line += r[c] + pad;
      } else {
        line += "  " + pad + r[c];
      }
    }
    out += line + '\n';
  }
  return out;
}

std::string RenderTable(std::span<const BatchStats> history) {
  const auto labels = FirstSeen(history, &BatchStats::label);
  const auto strategies = FirstSeen(history, &BatchStats::strategy);
  std::map<std::pair<std::string, std::string>, const BatchStats *> cell;
  for (const auto &s : history) cell[{s.label, s.strategy}] = &s;

  std::vector<std::string> header = {"Iteration"};
  for (const auto &st : strategies) header.push_back(StrategyDisplayName(st));

  std::string out;
  auto block = [&](const std::string &title, auto value, bool average) {
    std::vector<std::vector<std::string>> rows = {header};
    std::vector<double> sum(strategies.size(), 0.0);
    std::vector<std::size_t> count(strategies.size(), 0);
    for (const auto &label : labels) {
      std::vector<std::string> row = {label};
      for (std::size_t c = 0; c < strategies.size(); ++c) {
        auto it = cell.find({label, strategies[c]});
        if (it == cell.end()) {
          row.push_back("-");
          continue;
        }
        auto [text, number] = value(*it->second);
        row.push_back(text);
        sum[c] += number;
        ++count[c];
      }
      rows.push_back(std::move(row));
    }
    if (average) {
      std::vector<std::string> row = {"Average"};
      for (std::size_t c = 0; c < strategies.size(); ++c)
        row.push_back(count[c] ? FormatAverage(sum[c] / count[c]) : "-");
      rows.push_back(std::move(row));
    }
    if (!out.empty()) out += '\n';
    out += title + '\n' + Grid(rows);
  };
  // Averages are taken over the one-decimal values shown in the rows.
  auto rounded = [](double v) {
    const std::string t = FormatFixed(v, 1);
    double r = 0.0;
    std::from_chars(t.data(), t.data() + t.size(), r);
    return r;
  };
  block(
      "Sentence length",
      [&](const BatchStats &s) {
        return std::pair{FormatFixed(s.mean_sentence_length, 1),
                         rounded(s.mean_sentence_length)};
      },
      true);
  block(
      "Number of symbols",
      [&](const BatchStats &s) {
        return std::pair{FormatFixed(s.mean_symbol_count, 1),
                         rounded(s.mean_symbol_count)};
      },
      true);
  block(
      "Unique words",
      [](const BatchStats &s) {
        return std::pair{GroupThousands(s.unique_words),
                         static_cast<double>(s.unique_words)};
      },
      false);
  return out;
}

}  // namespace

std::string StrategyDisplayName(std::string_view strategy) {
  if (strategy == "random") return "Random";
  if (strategy == "rttl") return "RTTL";
  if (strategy == "srttl") return "S-RTTL";
  if (strategy == "qe") return "COMET-QE";
  if (strategy == "sqe") return "S-COMET-QE";
  return std::string(strategy);
}

std::string RenderReport(std::span<const BatchStats> history,
                         ReportFormat format) {
  if (history.empty()) throw Error("report needs a non-empty history");
  switch (format) {
    case ReportFormat::kCsv:
      return RenderCsv(history);
    case ReportFormat::kJson: {
      json arr = json::array();
      for (const auto &s : history) arr.push_back(ToJson(s));
      return arr.dump(2) + "\n";
    }
    case ReportFormat::kPlotData:
      return RenderPlotData(history);
    case ReportFormat::kTable:
      return RenderTable(history);
  }
  throw Error("unknown report format");
}

}  // namespace alsel
