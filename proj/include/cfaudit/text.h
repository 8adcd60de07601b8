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

#ifndef CFAUDIT_TEXT_H_
#define CFAUDIT_TEXT_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cfaudit {

struct Token {
  std::string text;
  std::size_t start = 0;  // byte offsets into the source, [start, end)
  std::size_t end = 0;
  std::size_t index = 0;
  bool is_word = false;
};

enum class CaseShape { kLower, kCapitalized, kUpper, kMixed };

struct Clause {
  std::size_t id = 0;
  std::vector<std::size_t> token_indices;  // word tokens only, ascending
};

struct ParsedDoc {
  std::string text;
  std::vector<Token> tokens;
  std::vector<Clause> clauses;
  // Clause id per token; nullopt for non-word tokens.
  std::vector<std::optional<std::size_t>> token_clause;

  std::size_t word_count() const;
};

// Unicode (UAX #29) word segmentation with two adjustments: words joined by
// an internal hyphen stay one token ("slow-learner"), and a trailing "'s"
// clitic becomes its own word token ("son's" -> "son", "'s"). Anything that is
// neither a word nor whitespace is emitted as a non-word token.
std::vector<Token> tokenize(std::string_view text);

// Heuristic clause segmentation over word tokens:
//  - split after . ! ? ;
//  - split after "," when the next word is one of
//    {a, an, the, he, she, they, we, i, it, his, her, my, our}
//  - split before "and"/"but"/"or" when the next word is a subject pronoun
//    {he, she, they, we, i, it}
std::vector<Clause> segment_clauses(std::span<const Token> tokens);

// Clauses from a CoNLL-U parse of `doc_text`. Every sentence root opens a
// clause, and so does any token attached to a clause head by conj or
// parataxis; all other tokens belong to the clause of their nearest
// clause-head ancestor. Throws DataError on malformed input or when the parse
// tokens do not align with tokenize(doc_text).
std::vector<Clause> ingest_conllu(std::string_view doc_text, std::string_view conllu);

ParsedDoc parse_document(std::string_view text);
ParsedDoc parse_document(std::string_view text, std::string_view conllu);
// Builds a ParsedDoc from already-computed tokens and clauses.
ParsedDoc make_parsed_doc(std::string_view text, std::vector<Token> tokens,
                          std::vector<Clause> clauses);

CaseShape detect_case_shape(std::string_view word);
// `replacement` is lowercase. Mixed shape leaves it unchanged.
std::string apply_case_shape(CaseShape shape, std::string_view replacement);

std::string_view case_shape_name(CaseShape shape);

// Unicode-aware lowercase (UTF-8 in, UTF-8 out).
std::string to_lower(std::string_view text);

}  // namespace cfaudit

#endif  // CFAUDIT_TEXT_H_
