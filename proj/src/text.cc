// src/text.cc

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

#include "alsel/text.h"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <cstdint>

namespace alsel {

namespace {

// One decoded code point and its byte span. Malformed sequences decode to a
// negative value and are treated as opaque non-space symbols.
struct CodePoint {
  UChar32 value;
  std::size_t begin;
  std::size_t end;
};

template <typename Fn>
void ForEachCodePoint(std::string_view text, Fn &&fn) {
  const auto *bytes = reinterpret_cast<const std::uint8_t *>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t begin = i;
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (!fn(CodePoint{c, static_cast<std::size_t>(begin),
                      static_cast<std::size_t>(i)}))
      return;
  }
}

bool IsSpace(UChar32 c) { return c >= 0 && u_isUWhiteSpace(c); }

bool IsWordChar(UChar32 c) {
  if (c < 0) return false;
  return u_isalpha(c) || u_charType(c) == U_DECIMAL_DIGIT_NUMBER;
}

void AppendUtf8(UChar32 c, std::string *out) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t n = 0;
  UBool error = false;
  U8_APPEND(buf, n, U8_MAX_LENGTH, c, error);
  if (!error) out->append(reinterpret_cast<const char *>(buf), n);
}

}  // namespace

bool IsValidUtf8(std::string_view text) {
  bool ok = true;
  ForEachCodePoint(text, [&](const CodePoint &cp) {
    ok = cp.value >= 0;
    return ok;
  });
  return ok;
}

std::vector<std::string_view> SplitWhitespace(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t start = std::string_view::npos;
  ForEachCodePoint(text, [&](const CodePoint &cp) {
    if (IsSpace(cp.value)) {
      if (start != std::string_view::npos) {
        tokens.push_back(text.substr(start, cp.begin - start));
        start = std::string_view::npos;
      }
    } else if (start == std::string_view::npos) {
      start = cp.begin;
    }
    return true;
  });
  if (start != std::string_view::npos) tokens.push_back(text.substr(start));
  return tokens;
}

std::size_t CountTokens(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  ForEachCodePoint(text, [&](const CodePoint &cp) {
    const bool space = IsSpace(cp.value);
    if (!space && !in_token) ++count;
    in_token = !space;
    return true;
  });
  return count;
}

std::string_view TrimWhitespace(std::string_view text) {
  std::size_t first = text.size(), last = 0;
  ForEachCodePoint(text, [&](const CodePoint &cp) {
    if (!IsSpace(cp.value)) {
      if (first == text.size()) first = cp.begin;
      last = cp.end;
    }
    return true;
  });
  if (first == text.size()) return text.substr(0, 0);
  return text.substr(first, last - first);
}

std::size_t CountSymbols(std::string_view text) {
  std::size_t count = 0;
  ForEachCodePoint(text, [&](const CodePoint &cp) {
    if (!IsSpace(cp.value) && !IsWordChar(cp.value)) ++count;
    return true;
  });
  return count;
}

std::string NormalizeWord(std::string_view token, bool case_fold,
                          bool strip_symbols) {
  std::vector<CodePoint> cps;
  ForEachCodePoint(token, [&](const CodePoint &cp) {
    cps.push_back(cp);
    return true;
  });
  std::size_t lo = 0, hi = cps.size();
  if (strip_symbols) {
    while (lo < hi && !IsWordChar(cps[lo].value)) ++lo;
    while (hi > lo && !IsWordChar(cps[hi - 1].value)) --hi;
  }
  if (lo == hi) {
    lo = 0;
    hi = cps.size();
  }
  std::string out;
  out.reserve(token.size());
  for (std::size_t i = lo; i < hi; ++i) {
    const CodePoint &cp = cps[i];
    if (cp.value < 0 || !case_fold) {
      out.append(token.substr(cp.begin, cp.end - cp.begin));
    } else {
      AppendUtf8(u_foldCase(cp.value, U_FOLD_CASE_DEFAULT), &out);
    }
  }
  return out;
}

}  // namespace alsel
