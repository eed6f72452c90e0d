// alsel/text.h

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

#ifndef ALSEL_TEXT_H_
#define ALSEL_TEXT_H_

// UTF-8 text helpers. Every sentence length in the engine is a count of
// tokens produced by SplitWhitespace() on raw (pre-BPE) text.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace alsel {

bool IsValidUtf8(std::string_view text);

/// Splits on Unicode White_Space code points; empty tokens are dropped.
std::vector<std::string_view> SplitWhitespace(std::string_view text);

std::size_t CountTokens(std::string_view text);

/// Removes leading and trailing Unicode whitespace.
std::string_view TrimWhitespace(std::string_view text);

/// Number of code points that are neither letters (general category L*),
/// decimal digits, nor whitespace.
std::size_t CountSymbols(std::string_view text);

/// Case-folds a token and strips non-letter/non-digit code points from both
/// ends. A token consisting only of symbols is returned case-folded but
/// otherwise intact, so it still counts as a word.
std::string NormalizeWord(std::string_view token, bool case_fold = true,
                          bool strip_symbols = true);

}  // namespace alsel

#endif  // ALSEL_TEXT_H_
