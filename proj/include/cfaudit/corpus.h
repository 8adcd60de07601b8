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

#ifndef CFAUDIT_CORPUS_H_
#define CFAUDIT_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cfaudit {

struct Document {
  std::string id;
  std::string text;
  std::optional<int> label;  // 0 or 1; absent for generate-only corpora
};

enum class CorpusFormat { kJsonl, kCsv };

// From the file extension: .jsonl/.json -> JSONL, .csv -> CSV.
CorpusFormat corpus_format_for(const std::filesystem::path& path);

// JSONL: one object {id, text, label} per line. CSV (RFC 4180): header row
// naming id, text and label columns. Labels 0/1, true/false and 0.0/1.0 are
// accepted. Throws DataError on a missing column, a non-binary label (naming
// the row), a duplicate id, empty text or an empty corpus. With
// require_label = false the label column may be absent.
std::vector<Document> parse_jsonl(std::string_view content, bool require_label = true,
                                  std::string_view source = "<memory>");
std::vector<Document> parse_csv(std::string_view content, bool require_label = true,
                                std::string_view source = "<memory>");
std::vector<Document> ingest_corpus(const std::filesystem::path& path, CorpusFormat format,
                                    bool require_label = true);
std::vector<Document> ingest_corpus(const std::filesystem::path& path, bool require_label = true);

// Seeded shuffle, then the first round(ratio * n) documents train and the
// rest test. Both parts keep the shuffled order. Throws UsageError unless
// 0 < ratio < 1, DataError when either part would be empty.
std::pair<std::vector<Document>, std::vector<Document>> split_corpus(
    const std::vector<Document>& docs, double ratio, std::uint64_t seed);

std::vector<std::string> texts_of(const std::vector<Document>& docs);
// Throws DataError if any document lacks a label.
std::vector<int> labels_of(const std::vector<Document>& docs);

}  // namespace cfaudit

#endif  // CFAUDIT_CORPUS_H_
