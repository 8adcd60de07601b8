// Copyright 2026 The cfaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cfaudit/text.h"

#include <unicode/brkiter.h>
#include <unicode/uchar.h>
#include <unicode/ubrk.h>
#include <unicode/unistr.h>
#include <unicode/utext.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <array>
#include <memory>

#include "cfaudit/common.h"

namespace cfaudit {
namespace {

struct BreakIterCloser {
  void operator()(UBreakIterator* it) const { ubrk_close(it); }
};
struct UTextCloser {
  void operator()(UText* ut) const { utext_close(ut); }
};

bool all_whitespace(std::string_view s) {
  int32_t i = 0;
  const auto len = static_cast<int32_t>(s.size());
  while (i < len) {
    UChar32 c;
    U8_NEXT(s.data(), i, len, c);
    if (c < 0 || !u_isUWhiteSpace(c)) return false;
  }
  return true;
}

// Raw UAX #29 segments, whitespace dropped.
std::vector<Token> segment_words(std::string_view text) {
  std::vector<Token> out;
  if (text.empty()) return out;
  UErrorCode status = U_ZERO_ERROR;
  std::unique_ptr<UText, UTextCloser> ut(
      utext_openUTF8(nullptr, text.data(), static_cast<int64_t>(text.size()), &status));
  std::unique_ptr<UBreakIterator, BreakIterCloser> bi(
      ubrk_open(UBRK_WORD, "en", nullptr, 0, &status));
  if (U_FAILURE(status)) throw std::runtime_error("ICU word break iterator unavailable");
  ubrk_setUText(bi.get(), ut.get(), &status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU could not attach text");

  int32_t start = ubrk_first(bi.get());
  for (int32_t end = ubrk_next(bi.get()); end != UBRK_DONE;
       start = end, end = ubrk_next(bi.get())) {
    const int32_t status_tag = ubrk_getRuleStatus(bi.get());
    const auto b = static_cast<std::size_t>(start);
    const auto e = static_cast<std::size_t>(end);
    std::string_view piece = text.substr(b, e - b);
    const bool word = status_tag >= UBRK_WORD_NONE_LIMIT;
    if (!word && all_whitespace(piece)) continue;
    out.push_back(Token{std::string(piece), b, e, 0, word});
  }
  return out;
}

bool is_hyphen(const Token& t) { return !t.is_word && t.text == "-"; }

std::vector<Token> join_hyphenated(std::vector<Token> raw) {
  std::vector<Token> out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!out.empty() && out.back().is_word && i + 1 < raw.size() && is_hyphen(raw[i]) &&
        raw[i + 1].is_word && out.back().end == raw[i].start && raw[i].end == raw[i + 1].start) {
      Token& w = out.back();
      w.text += raw[i].text;
      w.text += raw[i + 1].text;
      w.end = raw[i + 1].end;
      ++i;
      continue;
    }
    out.push_back(std::move(raw[i]));
  }
  return out;
}

// Length in bytes of a trailing "'s" / "’s" clitic, or 0.
std::size_t clitic_length(std::string_view w) {
  static constexpr std::array<std::string_view, 4> kClitics = {"'s", "'S", "’s", "’S"};
  for (auto c : kClitics) {
    if (w.size() > c.size() && w.substr(w.size() - c.size()) == c) return c.size();
  }
  return 0;
}

std::vector<Token> split_clitics(std::vector<Token> in) {
  std::vector<Token> out;
  out.reserve(in.size());
  for (auto& t : in) {
    const std::size_t n = t.is_word ? clitic_length(t.text) : 0;
    if (n == 0) {
      out.push_back(std::move(t));
      continue;
    }
    const std::size_t cut = t.end - n;
    out.push_back(Token{t.text.substr(0, t.text.size() - n), t.start, cut, 0, true});
    out.push_back(Token{t.text.substr(t.text.size() - n), cut, t.end, 0, true});
  }
  return out;
}

bool in_list(std::string_view word, std::span<const std::string_view> list) {
  const std::string lower = to_lower_ascii(word);
  return std::find(list.begin(), list.end(), lower) != list.end();
}

constexpr std::array<std::string_view, 13> kCommaOpeners = {
    "a", "an", "the", "he", "she", "they", "we", "i", "it", "his", "her", "my", "our"};
constexpr std::array<std::string_view, 6> kSubjectPronouns = {"he", "she", "they", "we", "i", "it"};
constexpr std::array<std::string_view, 3> kConjunctions = {"and", "but", "or"};
constexpr std::array<std::string_view, 4> kTerminators = {".", "!", "?", ";"};

const Token* next_word(std::span<const Token> tokens, std::size_t from) {
  for (std::size_t j = from; j < tokens.size(); ++j) {
    if (tokens[j].is_word) return &tokens[j];
  }
  return nullptr;
}

}  // namespace

std::size_t ParsedDoc::word_count() const {
  return static_cast<std::size_t>(
      std::count_if(tokens.begin(), tokens.end(), [](const Token& t) { return t.is_word; }));
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens = split_clitics(join_hyphenated(segment_words(text)));
  for (std::size_t i = 0; i < tokens.size(); ++i) tokens[i].index = i;
  return tokens;
}

std::vector<Clause> segment_clauses(std::span<const Token> tokens) {
  std::vector<Clause> clauses;
  Clause current;
  auto close = [&] {
    if (current.token_indices.empty()) return;
    current.id = clauses.size();
    clauses.push_back(std::move(current));
    current = Clause{};
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    if (t.is_word) {
      if (in_list(t.text, kConjunctions)) {
        const Token* next = next_word(tokens, i + 1);
        if (next && in_list(next->text, kSubjectPronouns)) close();
      }
      current.token_indices.push_back(i);
      continue;
    }
    if (std::find(kTerminators.begin(), kTerminators.end(), t.text) != kTerminators.end()) {
      close();
    } else if (t.text == ",") {
      const Token* next = next_word(tokens, i + 1);
      if (next && in_list(next->text, kCommaOpeners)) close();
    }
  }
  close();
  return clauses;
}

ParsedDoc make_parsed_doc(std::string_view text, std::vector<Token> tokens,
                          std::vector<Clause> clauses) {
  ParsedDoc doc;
  doc.text = std::string(text);
  doc.tokens = std::move(tokens);
  doc.clauses = std::move(clauses);
  doc.token_clause.assign(doc.tokens.size(), std::nullopt);
  for (const auto& c : doc.clauses) {
    for (std::size_t t : c.token_indices) doc.token_clause[t] = c.id;
  }
  return doc;
}

ParsedDoc parse_document(std::string_view text) {
  auto tokens = tokenize(text);
  auto clauses = segment_clauses(tokens);
  return make_parsed_doc(text, std::move(tokens), std::move(clauses));
}

ParsedDoc parse_document(std::string_view text, std::string_view conllu) {
  auto clauses = ingest_conllu(text, conllu);
  return make_parsed_doc(text, tokenize(text), std::move(clauses));
}

CaseShape detect_case_shape(std::string_view word) {
  int letters = 0, uppers = 0;
  bool first_upper = false;
  bool upper_after_first = false;
  int32_t i = 0;
  const auto len = static_cast<int32_t>(word.size());
  while (i < len) {
    UChar32 c;
    U8_NEXT(word.data(), i, len, c);
    if (c < 0 || !u_isalpha(c)) continue;
    const bool up = u_isupper(c) || u_istitle(c);
    if (letters == 0) {
      first_upper = up;
    } else if (up) {
      upper_after_first = true;
    }
    ++letters;
    uppers += up ? 1 : 0;
  }
  if (uppers == 0) return CaseShape::kLower;
  if (uppers == letters && letters > 1) return CaseShape::kUpper;
  if (first_upper && !upper_after_first) return CaseShape::kCapitalized;
  return CaseShape::kMixed;
}

std::string apply_case_shape(CaseShape shape, std::string_view replacement) {
  switch (shape) {
    case CaseShape::kLower:
    case CaseShape::kMixed:
      return std::string(replacement);
    case CaseShape::kUpper: {
      std::string out;
      icu::UnicodeString::fromUTF8(icu::StringPiece(replacement.data(),
                                                    static_cast<int32_t>(replacement.size())))
          .toUpper()
          .toUTF8String(out);
      return out;
    }
    case CaseShape::kCapitalized: {
      if (replacement.empty()) return {};
      int32_t i = 0;
      UChar32 c;
      U8_NEXT(replacement.data(), i, static_cast<int32_t>(replacement.size()), c);
      if (c < 0) return std::string(replacement);
      char buf[U8_MAX_LENGTH];
      int32_t n = 0;
      U8_APPEND_UNSAFE(buf, n, u_toupper(c));
      return std::string(buf, static_cast<std::size_t>(n)) + std::string(replacement.substr(i));
    }
  }
  return std::string(replacement);
}

std::string_view case_shape_name(CaseShape shape) {
  switch (shape) {
    case CaseShape::kLower: return "lower";
    case CaseShape::kCapitalized: return "capitalized";
    case CaseShape::kUpper: return "upper";
    case CaseShape::kMixed: return "mixed";
  }
  return "mixed";
}

std::string to_lower(std::string_view text) {
  std::string out;
  icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())))
      .toLower()
      .toUTF8String(out);
  return out;
}

}  // namespace cfaudit
