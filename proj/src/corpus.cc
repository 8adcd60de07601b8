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

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "cfaudit/common.h"
#include "json.hpp"

namespace cfaudit {
namespace {

using nlohmann::json;

std::optional<int> coerce_label(std::string_view raw) {
  const std::string v = to_lower_ascii(trim(raw));
  if (v == "0" || v == "0.0" || v == "false") return 0;
  if (v == "1" || v == "1.0" || v == "true") return 1;
  return std::nullopt;
}

void check_documents(const std::vector<Document>& docs, std::string_view source) {
  if (docs.empty()) throw DataError(std::string(source) + ": corpus is empty");
  std::unordered_set<std::string> ids;
  for (const auto& d : docs) {
    if (!ids.insert(d.id).second) {
      throw DataError(std::string(source) + ": duplicate document id '" + d.id + "'");
    }
  }
}

// RFC 4180 records: quoted fields may contain commas, newlines and "" escapes.
std::vector<std::vector<std::string>> csv_records(std::string_view s, std::string_view source) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, field_started = false;
  std::size_t i = 0;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    const bool blank = row.size() == 1 && row[0].empty();
    if (!blank) rows.push_back(std::move(row));
    row.clear();
  };
  while (i < s.size()) {
    const char c = s[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < s.size() && s[i + 1] == '"') {
          field += '"';
          i += 2;
          continue;
        }
        quoted = false;
      } else {
        field += c;
      }
      ++i;
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r' && i + 1 < s.size() && s[i + 1] == '\n') {
      // CRLF handled on the '\n'.
    } else if (c == '\n') {
      end_row();
    } else {
      field += c;
      field_started = true;
    }
    ++i;
  }
  if (quoted) throw DataError(std::string(source) + ": unterminated quoted CSV field");
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

}  // namespace

CorpusFormat corpus_format_for(const std::filesystem::path& path) {
  const std::string ext = to_lower_ascii(path.extension().string());
  if (ext == ".jsonl" || ext == ".json" || ext == ".ndjson") return CorpusFormat::kJsonl;
  if (ext == ".csv") return CorpusFormat::kCsv;
  throw UsageError("cannot infer corpus format from '" + path.string() +
                   "'; use a .jsonl or .csv file or pass --format");
}

std::vector<Document> parse_jsonl(std::string_view content, bool require_label,
                                  std::string_view source) {
  std::vector<Document> docs;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    std::size_t end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    const std::string_view line = trim(content.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no) + ": ";
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception&) {
      throw DataError(where + "invalid JSON");
    }
    if (!j.is_object()) throw DataError(where + "expected a JSON object");
    Document d;
    if (!j.contains("id")) throw DataError(where + "missing column 'id'");
    if (j["id"].is_string()) {
      d.id = j["id"].get<std::string>();
    } else if (j["id"].is_number_integer()) {
      d.id = j["id"].dump();
    } else {
      throw DataError(where + "'id' must be a string or integer");
    }
    if (!j.contains("text") || !j["text"].is_string()) {
      throw DataError(where + "missing column 'text'");
    }
    d.text = j["text"].get<std::string>();
    if (d.text.empty()) throw DataError(where + "empty text for id '" + d.id + "'");
    if (j.contains("label") && !j["label"].is_null()) {
      const json& l = j["label"];
      std::optional<int> label;
      if (l.is_boolean()) {
        label = l.get<bool>() ? 1 : 0;
      } else if (l.is_number()) {
        const double v = l.get<double>();
        if (v == 0.0 || v == 1.0) label = static_cast<int>(v);
      } else if (l.is_string()) {
        label = coerce_label(l.get<std::string>());
      }
      if (!label) {
        throw DataError(where + "non-binary label " + l.dump() + " for id '" + d.id + "'");
      }
      d.label = label;
    } else if (require_label) {
      throw DataError(where + "missing column 'label'");
    }
    docs.push_back(std::move(d));
  }
  check_documents(docs, source);
  return docs;
}

std::vector<Document> parse_csv(std::string_view content, bool require_label,
                                std::string_view source) {
  if (content.size() >= 3 && content.substr(0, 3) == "\xEF\xBB\xBF") content.remove_prefix(3);
  const auto rows = csv_records(content, source);
  if (rows.empty()) throw DataError(std::string(source) + ": corpus is empty");
  const auto& header = rows.front();
  auto column = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (to_lower_ascii(trim(header[i])) == name) return i;
    }
    return std::nullopt;
  };
  const auto id_col = column("id");
  const auto text_col = column("text");
  const auto label_col = column("label");
  if (!id_col) throw DataError(std::string(source) + ": missing column 'id'");
  if (!text_col) throw DataError(std::string(source) + ": missing column 'text'");
  if (!label_col && require_label) throw DataError(std::string(source) + ": missing column 'label'");

  std::vector<Document> docs;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = std::string(source) + ": row " + std::to_string(r) + ": ";
    if (row.size() != header.size()) {
      throw DataError(where + "expected " + std::to_string(header.size()) + " fields, got " +
                      std::to_string(row.size()));
    }
    Document d{row[*id_col], row[*text_col], std::nullopt};
    if (d.text.empty()) throw DataError(where + "empty text for id '" + d.id + "'");
    if (label_col) {
      d.label = coerce_label(row[*label_col]);
      if (!d.label) {
        throw DataError(where + "non-binary label '" + row[*label_col] + "' for id '" + d.id + "'");
      }
    }
    docs.push_back(std::move(d));
  }
  check_documents(docs, source);
  return docs;
}

std::vector<Document> ingest_corpus(const std::filesystem::path& path, CorpusFormat format,
                                    bool require_label) {
  const std::string content = read_file(path);
  return format == CorpusFormat::kJsonl ? parse_jsonl(content, require_label, path.string())
                                        : parse_csv(content, require_label, path.string());
}

std::vector<Document> ingest_corpus(const std::filesystem::path& path, bool require_label) {
  return ingest_corpus(path, corpus_format_for(path), require_label);
}

std::pair<std::vector<Document>, std::vector<Document>> split_corpus(
    const std::vector<Document>& docs, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw UsageError("split ratio must be in (0, 1)");
  std::vector<std::size_t> order(docs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(derive_seed(seed, "split"));
  rng.shuffle(order);
  const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(docs.size())));
  if (n_train == 0 || n_train == docs.size()) {
    throw DataError("corpus of " + std::to_string(docs.size()) +
                    " documents is too small to split");
  }
  std::pair<std::vector<Document>, std::vector<Document>> out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_train ? out.first : out.second).push_back(docs[order[i]]);
  }
  return out;
}

std::vector<std::string> texts_of(const std::vector<Document>& docs) {
  std::vector<std::string> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(d.text);
  return out;
}

std::vector<int> labels_of(const std::vector<Document>& docs) {
  std::vector<int> out;
  out.reserve(docs.size());
  for (const auto& d : docs) {
    if (!d.label) throw DataError("document '" + d.id + "' has no label");
    out.push_back(*d.label);
  }
  return out;
}

}  // namespace cfaudit
