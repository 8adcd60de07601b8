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

#include "cfaudit/explain.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>

#include "cfaudit/common.h"
#include "cfaudit/lexicon.h"

namespace cfaudit {
namespace {

std::vector<std::size_t> word_positions(const std::vector<Token>& tokens) {
  std::vector<std::size_t> out;
  for (const auto& t : tokens) {
    if (t.is_word) out.push_back(t.index);
  }
  return out;
}

// Rebuilds the text with per-token replacements; nullopt keeps the original
// token, an empty string drops it along with the gap before it.
std::string rebuild(std::string_view text, const std::vector<Token>& tokens,
                    const std::vector<std::optional<std::string>>& replacement) {
  std::string out;
  std::size_t cursor = 0;
  for (const auto& t : tokens) {
    const auto& r = replacement[t.index];
    if (r && r->empty()) {
      cursor = t.end;
      continue;
    }
    out.append(text, cursor, t.start - cursor);
    out += r ? *r : t.text;
    cursor = t.end;
  }
  out.append(text.substr(cursor));
  return out;
}

std::string set_key(const std::vector<std::size_t>& s) {
  std::string key = "anchor";
  for (std::size_t i : s) key += ":" + std::to_string(i);
  return key;
}

}  // namespace

Explanation explain_local_linear(const Classifier& model, std::string_view text,
                                 const LocalLinearConfig& config) {
  const std::vector<Token> tokens = tokenize(text);
  const std::vector<std::size_t> words = word_positions(tokens);
  const std::size_t n = words.size();
  if (n < 2) throw UsageError("local-linear explanation needs at least two words");
  if (config.n_samples < 1) throw UsageError("n_samples must be at least 1");

  const auto m = static_cast<Eigen::Index>(config.n_samples);
  const auto p = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd Z(m, p);
  Rng rng(derive_seed(config.seed, "local-linear"));
  for (Eigen::Index s = 0; s < m; ++s) {
    for (Eigen::Index j = 0; j < p; ++j) Z(s, j) = (s == 0 || rng.bernoulli(0.5)) ? 1.0 : 0.0;
  }

  Eigen::VectorXd y(m), w(m);
  for (Eigen::Index s = 0; s < m; ++s) {
    std::vector<std::optional<std::string>> rep(tokens.size());
    for (Eigen::Index j = 0; j < p; ++j) {
      if (Z(s, j) == 0.0) rep[words[static_cast<std::size_t>(j)]] = std::string();
    }
    y[s] = model.predict_proba(rebuild(text, tokens, rep));
    const double k = Z.row(s).sum();
    const double d = 1.0 - std::sqrt(k / static_cast<double>(n));  // cosine distance to all-ones
    w[s] = std::exp(-(d * d) / (config.kernel_width * config.kernel_width));
  }

  // Weighted ridge with an unpenalized intercept.
  Eigen::MatrixXd A(m, p + 1);
  A.leftCols(p) = Z;
  A.col(p).setOnes();
  Eigen::MatrixXd lhs = A.transpose() * w.asDiagonal() * A;
  lhs.diagonal().head(p).array() += config.ridge_alpha;
  const Eigen::VectorXd rhs = A.transpose() * w.asDiagonal() * y;
  const Eigen::VectorXd beta = lhs.ldlt().solve(rhs);

  Explanation ex;
  ex.intercept = beta[p];
  for (std::size_t j = 0; j < n; ++j) {
    ex.weights.push_back(TokenWeight{words[j], beta[static_cast<Eigen::Index>(j)]});
  }
  std::stable_sort(ex.weights.begin(), ex.weights.end(),
                   [](const TokenWeight& a, const TokenWeight& b) {
                     return std::abs(a.weight) > std::abs(b.weight);
                   });
  if (ex.weights.size() > config.top_k) ex.weights.resize(config.top_k);
  return ex;
}

Anchor explain_anchor(const Classifier& model, std::string_view text,
                      const std::vector<std::string>& vocabulary, const AnchorConfig& config) {
  const std::vector<Token> tokens = tokenize(text);
  const std::vector<std::size_t> words = word_positions(tokens);
  if (words.empty()) throw UsageError("anchor explanation needs at least one word");
  if (config.n_samples < 1 || config.beam < 1) {
    throw UsageError("anchor n_samples and beam must be at least 1");
  }
  const int target = model.predict(text);
  std::size_t samples_used = 0;

  // Each candidate set draws from its own stream, so results do not depend
  // on evaluation order.
  auto precision = [&](const std::vector<std::size_t>& anchor) {
    Rng rng(derive_seed(config.seed, set_key(anchor)));
    std::size_t hits = 0;
    for (std::size_t s = 0; s < config.n_samples; ++s) {
      std::vector<std::optional<std::string>> rep(tokens.size());
      for (std::size_t w : words) {
        if (std::binary_search(anchor.begin(), anchor.end(), w)) continue;
        if (!rng.bernoulli(0.5)) continue;
        rep[w] = vocabulary.empty() ? std::string()
                                    : vocabulary[rng.uniform_index(vocabulary.size())];
      }
      hits += model.predict(rebuild(text, tokens, rep)) == target ? 1 : 0;
    }
    samples_used += config.n_samples;
    return static_cast<double>(hits) / static_cast<double>(config.n_samples);
  };

  struct Candidate {
    std::vector<std::size_t> set;
    double precision;
  };
  auto better = [](const Candidate& a, const Candidate& b) {
    if (a.precision != b.precision) return a.precision > b.precision;
    if (a.set.size() != b.set.size()) return a.set.size() < b.set.size();
    return a.set < b.set;
  };

  Candidate best{{}, precision({})};
  if (best.precision >= config.precision_threshold) {
    return Anchor{{}, best.precision, samples_used, false};
  }
  std::vector<Candidate> beam{best};
  for (std::size_t size = 1; size <= words.size(); ++size) {
    std::set<std::vector<std::size_t>> seen;
    std::vector<Candidate> level;
    for (const auto& c : beam) {
      for (std::size_t w : words) {
        if (std::binary_search(c.set.begin(), c.set.end(), w)) continue;
        auto next = c.set;
        next.insert(std::upper_bound(next.begin(), next.end(), w), w);
        if (!seen.insert(next).second) continue;
        const double prec = precision(next);
        level.push_back(Candidate{std::move(next), prec});
      }
    }
    if (level.empty()) break;
    std::sort(level.begin(), level.end(), better);
    if (better(level.front(), best)) best = level.front();
    if (level.front().precision >= config.precision_threshold) {
      return Anchor{level.front().set, level.front().precision, samples_used, false};
    }
    if (level.size() > config.beam) level.resize(config.beam);
    beam = std::move(level);
  }
  return Anchor{best.set, best.precision, samples_used, true};
}

std::vector<std::string> corpus_vocabulary(const std::vector<std::string>& texts) {
  std::set<std::string> vocab;
  for (const auto& t : texts) {
    for (const auto& tok : tokenize(t)) {
      if (tok.is_word) vocab.insert(to_lower(tok.text));
    }
  }
  return {vocab.begin(), vocab.end()};
}

void AntonymLexicon::add(std::string word, std::vector<std::string> antonyms) {
  if (antonyms.empty()) throw DataError("antonym list for '" + word + "' is empty");
  for (const auto& a : antonyms) {
    if (a.empty()) throw DataError("empty antonym for '" + word + "'");
    if (a == word) throw DataError("'" + word + "' lists itself as an antonym");
  }
  if (!entries_.emplace(word, std::move(antonyms)).second) {
    throw DataError("duplicate antonym entry '" + word + "'");
  }
}

const std::vector<std::string>* AntonymLexicon::lookup(std::string_view word) const {
  const auto it = entries_.find(to_lower(word));
  return it == entries_.end() ? nullptr : &it->second;
}

void load_antonyms_into(AntonymLexicon& lexicon, std::string_view tsv, std::string_view source) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < tsv.size()) {
    std::size_t end = tsv.find('\n', pos);
    if (end == std::string_view::npos) end = tsv.size();
    std::string_view line = tsv.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty() || line.front() == '#') continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no) + ": ";
    const auto cols = split(line, '\t');
    if (cols.size() != 2) throw DataError(where + "expected 2 tab-separated columns");
    const std::string word = to_lower(trim(cols[0]));
    std::vector<std::string> antonyms;
    for (const auto& a : split(cols[1], ',')) antonyms.push_back(to_lower(trim(a)));
    try {
      lexicon.add(word, std::move(antonyms));
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
  }
}

AntonymLexicon load_antonyms(const std::filesystem::path& path) {
  AntonymLexicon lex;
  load_antonyms_into(lex, read_file(path), path.string());
  return lex;
}

AntonymLexicon load_default_antonyms() { return load_antonyms(default_data_dir() / "antonyms.tsv"); }

std::vector<AgreementGroup> merge_tokens(const std::vector<SensitiveHit>& hits,
                                         const std::vector<std::size_t>& expl_tokens,
                                         const AntonymLexicon& antonyms, const ParsedDoc& doc) {
  std::vector<AgreementGroup> groups = group_hits(hits, doc.clauses);
  if (hits.empty()) return groups;

  std::set<std::size_t> sensitive;
  for (const auto& h : hits) sensitive.insert(h.token_index);
  std::set<std::size_t> added;
  for (std::size_t idx : expl_tokens) {
    if (idx >= doc.tokens.size() || !doc.tokens[idx].is_word) continue;
    if (sensitive.count(idx) || !added.insert(idx).second) continue;
    const auto clause = doc.token_clause[idx];
    if (!clause) continue;
    const auto* list = antonyms.lookup(doc.tokens[idx].text);
    if (!list) continue;
    groups.push_back(AgreementGroup{0, *clause, std::nullopt, {GroupMember{idx, nullptr}},
                                    list->front()});
  }
  std::stable_sort(groups.begin(), groups.end(),
                   [](const AgreementGroup& a, const AgreementGroup& b) {
                     if (a.clause_id != b.clause_id) return a.clause_id < b.clause_id;
                     return a.anchor_token() < b.anchor_token();
                   });
  for (std::size_t i = 0; i < groups.size(); ++i) groups[i].id = i;
  return groups;
}

}  // namespace cfaudit
