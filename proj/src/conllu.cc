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

#include <algorithm>
#include <charconv>
#include <map>

#include "cfaudit/common.h"
#include "cfaudit/text.h"

namespace cfaudit {
namespace {

struct Node {
  int head = 0;
  std::string deprel;
};

// A surface unit of the parse: either a plain word or a multiword range
// ("3-4 don't"), represented by the id of its first syntactic word.
struct Unit {
  std::string form;
  std::size_t sentence = 0;
  int first_id = 0;
};

struct Sentence {
  std::map<int, Node> nodes;
};

int parse_int(std::string_view s, std::size_t line) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError("CoNLL-U line " + std::to_string(line) + ": bad integer '" + std::string(s) +
                    "'");
  }
  return v;
}

std::string base_relation(std::string_view deprel) {
  const auto colon = deprel.find(':');
  return std::string(deprel.substr(0, colon));
}

}  // namespace

std::vector<Clause> ingest_conllu(std::string_view doc_text, std::string_view conllu) {
  std::vector<Sentence> sentences(1);
  std::vector<Unit> units;
  int range_end = 0;  // last id covered by the current multiword range

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < conllu.size()) {
    std::size_t end = conllu.find('\n', pos);
    if (end == std::string_view::npos) end = conllu.size();
    std::string_view line = conllu.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) {
      if (!sentences.back().nodes.empty()) sentences.emplace_back();
      range_end = 0;
      continue;
    }
    if (line.front() == '#') continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 10) {
      throw DataError("CoNLL-U line " + std::to_string(line_no) + ": expected 10 columns, got " +
                      std::to_string(cols.size()));
    }
    const std::string& id = cols[0];
    if (id.find('.') != std::string::npos) continue;  // empty node
    const std::string form(trim(cols[1]));
    if (const auto dash = id.find('-'); dash != std::string::npos) {
      const int first = parse_int(std::string_view(id).substr(0, dash), line_no);
      range_end = parse_int(std::string_view(id).substr(dash + 1), line_no);
      units.push_back(Unit{form, sentences.size() - 1, first});
      continue;
    }
    const int word_id = parse_int(id, line_no);
    if (cols[6] == "_") {
      throw DataError("CoNLL-U line " + std::to_string(line_no) + ": missing HEAD");
    }
    Node node{parse_int(cols[6], line_no), cols[7]};
    auto& nodes = sentences.back().nodes;
    if (!nodes.emplace(word_id, std::move(node)).second) {
      throw DataError("CoNLL-U line " + std::to_string(line_no) + ": duplicate id " + id);
    }
    if (word_id > range_end) units.push_back(Unit{form, sentences.size() - 1, word_id});
  }
  if (sentences.back().nodes.empty()) sentences.pop_back();

  const std::vector<Token> tokens = tokenize(doc_text);
  if (tokens.size() != units.size()) {
    throw DataError("CoNLL-U alignment: parse has " + std::to_string(units.size()) +
                    " tokens, document has " + std::to_string(tokens.size()));
  }
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].text != units[i].form) {
      throw DataError("CoNLL-U alignment: token " + std::to_string(i) + " is '" + tokens[i].text +
                      "' in the document but '" + units[i].form + "' in the parse");
    }
  }

  // Clause head of every node, per sentence.
  std::vector<std::map<int, int>> clause_head(sentences.size());
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const auto& nodes = sentences[s].nodes;
    for (const auto& [id, node] : nodes) {
      if (node.head != 0 && !nodes.count(node.head)) {
        throw DataError("CoNLL-U: head " + std::to_string(node.head) + " of word " +
                        std::to_string(id) + " does not exist");
      }
    }
    std::map<int, bool> is_head_memo;
    auto is_clause_head = [&](int id) {
      // Walk up until the answer is known; the chain length bounds cycles.
      std::vector<int> chain;
      bool answer = false;
      int cur = id;
      while (true) {
        if (auto it = is_head_memo.find(cur); it != is_head_memo.end()) {
          answer = it->second;
          break;
        }
        const Node& n = nodes.at(cur);
        if (n.head == 0) {
          answer = true;
          chain.push_back(cur);
          break;
        }
        const std::string rel = base_relation(n.deprel);
        if (rel != "conj" && rel != "parataxis") {
          answer = false;
          chain.push_back(cur);
          break;
        }
        chain.push_back(cur);
        if (chain.size() > nodes.size()) throw DataError("CoNLL-U: cycle in dependency heads");
        cur = n.head;
      }
      // Every node in the chain is a conj/parataxis link except possibly the
      // last; they are clause heads exactly when the chain ends at a root.
      for (int c : chain) is_head_memo[c] = answer;
      return is_head_memo.at(id);
    };
    for (const auto& [id, node] : nodes) {
      int cur = id;
      std::size_t steps = 0;
      while (!is_clause_head(cur)) {
        cur = nodes.at(cur).head;
        if (++steps > nodes.size()) throw DataError("CoNLL-U: cycle in dependency heads");
      }
      clause_head[s][id] = cur;
    }
  }

  std::map<std::pair<std::size_t, int>, std::size_t> clause_ids;
  std::vector<Clause> clauses;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!tokens[i].is_word) continue;
    const Unit& u = units[i];
    const auto key = std::make_pair(u.sentence, clause_head[u.sentence].at(u.first_id));
    auto [it, inserted] = clause_ids.emplace(key, clauses.size());
    if (inserted) clauses.push_back(Clause{clauses.size(), {}});
    clauses[it->second].token_indices.push_back(i);
  }
  return clauses;
}

}  // namespace cfaudit
