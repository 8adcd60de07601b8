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

#include "cfaudit/corpus.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include "cfaudit/common.h"

namespace cfaudit {
namespace {

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

TEST(Jsonl, ParsesRowsInOrder) {
  const auto docs = parse_jsonl(
      "{\"id\":\"a\",\"text\":\"He left.\",\"label\":1}\n\n"
      "{\"id\":7,\"text\":\"She stayed.\",\"label\":0,\"extra\":true}\n");
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[0].id, "a");
  EXPECT_EQ(docs[1].id, "7");
  EXPECT_EQ(docs[1].text, "She stayed.");
  EXPECT_EQ(*docs[0].label, 1);
}

TEST(Jsonl, LabelOptionalWhenNotRequired) {
  const auto docs = parse_jsonl("{\"id\":\"a\",\"text\":\"x\"}\n", false);
  ASSERT_EQ(docs.size(), 1u);
  EXPECT_FALSE(docs[0].label.has_value());
}

TEST(Jsonl, Errors) {
  EXPECT_NE(error_of([] { parse_jsonl("{\"id\":\"a\",\"text\":\"x\"}\n", true, "c.jsonl"); })
                .find("missing column 'label'"),
            std::string::npos);
  EXPECT_NE(error_of([] {
              parse_jsonl("{\"id\":\"a\",\"text\":\"x\",\"label\":0}\n"
                          "{\"id\":\"b\",\"text\":\"y\",\"label\":2}\n",
                          true, "c.jsonl");
            }).find("c.jsonl:2"),
            std::string::npos);
  EXPECT_NE(error_of([] {
              parse_jsonl("{\"id\":\"a\",\"text\":\"x\",\"label\":0}\n"
                          "{\"id\":\"a\",\"text\":\"y\",\"label\":1}\n");
            }).find("duplicate document id"),
            std::string::npos);
  EXPECT_THROW(parse_jsonl("{\"id\":\"a\",\"text\":\"\",\"label\":0}\n"), DataError);
  EXPECT_THROW(parse_jsonl("{not json}\n"), DataError);
  EXPECT_THROW(parse_jsonl("\n\n"), DataError);
  EXPECT_THROW(parse_jsonl("{\"text\":\"x\",\"label\":0}\n"), DataError);
  EXPECT_THROW(parse_jsonl("{\"id\":\"a\",\"text\":\"x\",\"label\":\"yes\"}\n"), DataError);
}

TEST(Csv, QuotedFieldsAndHeaderOrder) {
  const auto docs = parse_csv(
      "label,text,id\r\n"
      "1,\"He said \"\"hi\"\", then left\",d1\r\n"
      "0,\"line one\nline two\",d2\n");
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[0].text, "He said \"hi\", then left");
  EXPECT_EQ(docs[1].text, "line one\nline two");
  EXPECT_EQ(docs[1].id, "d2");
  EXPECT_EQ(*docs[0].label, 1);
}

TEST(Csv, Errors) {
  EXPECT_NE(error_of([] { parse_csv("id,text\nd1,x\n"); }).find("missing column 'label'"),
            std::string::npos);
  EXPECT_NO_THROW(parse_csv("id,text\nd1,x\n", false));
  EXPECT_NE(error_of([] { parse_csv("id,text,label\nd1,x,1\nd2,y,maybe\n", true, "c.csv"); })
                .find("non-binary label"),
            std::string::npos);
  EXPECT_THROW(parse_csv("id,text,label\nd1,\"open,1\n"), DataError);
  EXPECT_THROW(parse_csv("id,text,label\nd1,x\n"), DataError);
  EXPECT_THROW(parse_csv("id,text,label\n"), DataError);
  EXPECT_THROW(parse_csv("id,text,label\nd1,x,1\nd1,y,0\n"), DataError);
}

TEST(Ingest, FormatByExtensionAndMissingFile) {
  EXPECT_EQ(corpus_format_for("a/b.jsonl"), CorpusFormat::kJsonl);
  EXPECT_EQ(corpus_format_for("b.CSV"), CorpusFormat::kCsv);
  EXPECT_THROW(corpus_format_for("b.txt"), UsageError);
  EXPECT_THROW(ingest_corpus("/nonexistent/x.jsonl"), DataError);

  const auto path = std::filesystem::temp_directory_path() / "cfaudit_corpus_test.csv";
  write_file_atomic(path, "id,text,label\nd1,hello,1\n");
  EXPECT_EQ(ingest_corpus(path).size(), 1u);
  std::filesystem::remove(path);
}

TEST(Split, DeterministicPartition) {
  std::vector<Document> docs;
  for (int i = 0; i < 101; ++i) docs.push_back(Document{"d" + std::to_string(i), "t", i % 2});
  const auto [train, test] = split_corpus(docs, 0.8, 42);
  EXPECT_EQ(train.size(), 81u);
  EXPECT_EQ(test.size(), 20u);
  std::set<std::string> ids;
  for (const auto& d : train) ids.insert(d.id);
  for (const auto& d : test) ids.insert(d.id);
  EXPECT_EQ(ids.size(), 101u);
  const auto [train2, test2] = split_corpus(docs, 0.8, 42);
  ASSERT_EQ(train2.size(), train.size());
  for (std::size_t i = 0; i < train.size(); ++i) EXPECT_EQ(train[i].id, train2[i].id);
  const auto [train3, test3] = split_corpus(docs, 0.8, 43);
  bool differs = false;
  for (std::size_t i = 0; i < train.size(); ++i) differs |= train[i].id != train3[i].id;
  EXPECT_TRUE(differs);
  EXPECT_THROW(split_corpus(docs, 1.0, 1), UsageError);
  EXPECT_THROW(split_corpus({docs[0]}, 0.8, 1), DataError);
}

TEST(Accessors, LabelsNeedLabels) {
  const std::vector<Document> docs = {Document{"a", "x", 1}, Document{"b", "y", std::nullopt}};
  EXPECT_EQ(texts_of(docs), (std::vector<std::string>{"x", "y"}));
  EXPECT_THROW(labels_of(docs), DataError);
}

}  // namespace
}  // namespace cfaudit
