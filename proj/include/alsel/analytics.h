// alsel/analytics.h

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

#ifndef ALSEL_ANALYTICS_H_
#define ALSEL_ANALYTICS_H_

// Batch-composition statistics and report rendering.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "alsel/selection.h"
#include "json.hpp"

namespace alsel {

struct BatchStats {
  std::string label;  // e.g. "35k"
  std::string strategy;
  double mean_sentence_length = 0.0;
  double mean_symbol_count = 0.0;
  std::size_t unique_words = 0;
  std::size_t sentence_count = 0;
  std::optional<std::size_t> cumulative_sentences;  // plot x axis
  std::optional<double> delta_bleu;                 // ingested, never computed
};

struct WordOptions {
  bool case_fold = true;
  bool strip_symbols = true;  // at token boundaries
};

/// Throws on an empty batch.
BatchStats ComputeBatchStats(std::span<const std::string> sources,
                             std::string label, std::string strategy,
                             const WordOptions &words = {});

struct DistributionDivergence {
  /// |selected - reference| per reference bin, then one trailing entry for
  /// lengths outside every bin (reference mass 0 there).
  std::vector<double> deviations;
  double total_variation = 0.0;
};

/// Throws on an empty selection.
DistributionDivergence Divergence(std::span<const std::size_t> selected_lengths,
                                  const LengthDistribution &reference);

enum class ReportFormat { kCsv, kJson, kPlotData, kTable };

ReportFormat ParseReportFormat(std::string_view name);

nlohmann::json ToJson(const BatchStats &stats);
BatchStats BatchStatsFromJson(const nlohmann::json &j);
/// Accepts a JSON array of BatchStats objects.
std::vector<BatchStats> HistoryFromJson(const nlohmann::json &j);

/// Fixed-point rendering, "C" locale regardless of the environment.
std::string FormatFixed(double value, int decimals);

/// csv:      iteration,strategy,mean_len,mean_symbols,unique_words,delta_bleu
///           with means at one decimal, delta_bleu blank when absent.
/// json:     array, full precision.
/// plotdata: series\tx\ty per strategy, x = cumulative sentences,
///           y = delta_bleu; rows lacking either are skipped.
/// table:    iterations down, strategies across; length and symbol blocks
///           with an Average row, then unique words.
/// Throws on an empty history.
std::string RenderReport(std::span<const BatchStats> history,
                         ReportFormat format);

/// "Random", "RTTL", ... for known strategy ids; others unchanged.
std::string StrategyDisplayName(std::string_view strategy);

}  // namespace alsel

#endif  // ALSEL_ANALYTICS_H_
