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

#include <gtest/gtest.h>

#include <set>

#include "cfaudit/common.h"
#include "cfaudit/text.h"

namespace cfaudit {
namespace {

std::string fixture(const std::string& name) {
  return read_file(std::filesystem::path(CFAUDIT_TEST_FIXTURES) / name);
}

std::vector<std::set<std::string>> clause_words(const ParsedDoc& doc) {
  std::vector<std::set<std::string>> out;
  for (const auto& c : doc.clauses) {
    std::set<std::string> words;
    for (std::size_t i : c.token_indices) words.insert(doc.tokens[i].text);
    out.push_back(std::move(words));
  }
  return out;
}

constexpr const char* kChurch = "She is going to church, a white guy will be there too.";

TEST(Conllu, ParataxisStartsSecondClause) {
  const auto parsed = parse_document(kChurch, fixture("church_parataxis.conllu"));
  ASSERT_EQ(parsed.clauses.size(), 2u);
  const auto words = clause_words(parsed);
  EXPECT_EQ(words[0], (std::set<std::string>{"She", "is", "going", "to", "church"}));
  EXPECT_EQ(words[1], (std::set<std::string>{"a", "white", "guy", "will", "be", "there", "too"}));
  // Same grouping as the built-in heuristic.
  EXPECT_EQ(words, clause_words(parse_document(kChurch)));
}

TEST(Conllu, SingleRootIsOneClause) {
  const auto parsed = parse_document("He likes the temple.", fixture("simple.conllu"));
  ASSERT_EQ(parsed.clauses.size(), 1u);
  EXPECT_EQ(parsed.clauses[0].token_indices, (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(Conllu, ConjChildOpensClauseButNestedConjDoesNot) {
  // "He sang and she danced ." with danced conj of sang; "loud" conj of an
  // adjective deeper in the tree stays in its clause.
  const std::string conllu =
      "1\tHe\t_\t_\t_\t_\t2\tnsubj\t_\t_\n"
      "2\tsang\t_\t_\t_\t_\t0\troot\t_\t_\n"
      "3\tand\t_\t_\t_\t_\t5\tcc\t_\t_\n"
      "4\tshe\t_\t_\t_\t_\t5\tnsubj\t_\t_\n"
      "5\tdanced\t_\t_\t_\t_\t2\tconj\t_\t_\n"
      "6\twildly\t_\t_\t_\t_\t5\tadvmod\t_\t_\n"
      "7\tand\t_\t_\t_\t_\t8\tcc\t_\t_\n"
      "8\tloud\t_\t_\t_\t_\t6\tconj\t_\t_\n"
      "9\t.\t_\t_\t_\t_\t2\tpunct\t_\t_\n";
  const auto parsed = parse_document("He sang and she danced wildly and loud.", conllu);
  ASSERT_EQ(parsed.clauses.size(), 2u);
  EXPECT_EQ(clause_words(parsed)[1],
            (std::set<std::string>{"and", "she", "danced", "wildly", "loud"}));
}

TEST(Conllu, TokenCountMismatchIsAnError) {
  // Five parse tokens against a six-token document.
  const std::string five =
      "1\tHe\t_\t_\t_\t_\t2\tnsubj\t_\t_\n"
      "2\tlikes\t_\t_\t_\t_\t0\troot\t_\t_\n"
      "3\tthe\t_\t_\t_\t_\t4\tdet\t_\t_\n"
      "4\ttemple\t_\t_\t_\t_\t2\tobj\t_\t_\n"
      "5\t.\t_\t_\t_\t_\t2\tpunct\t_\t_\n";
  EXPECT_THROW(ingest_conllu("He likes the old temple.", five), DataError);
  try {
    ingest_conllu("He likes the old temple.", five);
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("alignment"), std::string::npos);
  }
}

TEST(Conllu, FormMismatchAndMalformedRows) {
  std::string conllu = fixture("simple.conllu");
  EXPECT_THROW(ingest_conllu("He likes the mosque.", conllu), DataError);
  EXPECT_THROW(ingest_conllu("He", "1\tHe\t_\n"), DataError);
  EXPECT_THROW(ingest_conllu("He", "x\tHe\t_\t_\t_\t_\t0\troot\t_\t_\n"), DataError);
  EXPECT_THROW(ingest_conllu("He", "1\tHe\t_\t_\t_\t_\t4\tnsubj\t_\t_\n"), DataError);
}

TEST(Conllu, MultiwordRangeAlignsOnSurfaceForm) {
  // The range line carries the surface; its syntactic words are skipped for
  // alignment but still structure the tree.
  const std::string conllu =
      "1\tI\t_\t_\t_\t_\t4\tnsubj\t_\t_\n"
      "2-3\tgonna\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "2\tgon\t_\t_\t_\t_\t4\taux\t_\t_\n"
      "3\tna\t_\t_\t_\t_\t4\taux\t_\t_\n"
      "4\tsing\t_\t_\t_\t_\t0\troot\t_\t_\n";
  const auto parsed = parse_document("I gonna sing", conllu);
  ASSERT_EQ(parsed.clauses.size(), 1u);
  EXPECT_EQ(parsed.clauses[0].token_indices, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Conllu, TwoSentencesGiveSeparateClauses) {
  const std::string conllu =
      "1\tHe\t_\t_\t_\t_\t2\tnsubj\t_\t_\n"
      "2\tsang\t_\t_\t_\t_\t0\troot\t_\t_\n"
      "3\t.\t_\t_\t_\t_\t2\tpunct\t_\t_\n"
      "\n"
      "1\tShe\t_\t_\t_\t_\t2\tnsubj\t_\t_\n"
      "2\tdanced\t_\t_\t_\t_\t0\troot\t_\t_\n";
  const auto parsed = parse_document("He sang. She danced", conllu);
  ASSERT_EQ(parsed.clauses.size(), 2u);
  EXPECT_EQ(parsed.clauses[1].token_indices, (std::vector<std::size_t>{3, 4}));
}

}  // namespace
}  // namespace cfaudit
