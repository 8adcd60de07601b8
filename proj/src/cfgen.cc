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

#include "cfaudit/cfgen.h"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_set>

namespace cfaudit {
namespace {

bool starts_with_vowel(std::string_view word) {
  if (word.empty()) return false;
  switch (word.front()) {
    case 'a': case 'e': case 'i': case 'o': case 'u':
    case 'A': case 'E': case 'I': case 'O': case 'U':
      return true;
    default:
      return false;
  }
}

// Emits all k-subsets of `ids` in lexicographic order.
void combinations(const std::vector<std::size_t>& ids, std::size_t k, std::size_t clause,
                  std::vector<CounterfactualSpec>& out) {
  const std::size_t n = ids.size();
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    CounterfactualSpec spec;
    spec.clause_id = clause;
    spec.flipped_group_ids.reserve(k);
    for (std::size_t i : idx) spec.flipped_group_ids.push_back(ids[i]);
    out.push_back(std::move(spec));
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

std::string_view gen_mode_name(GenMode mode) {
  return mode == GenMode::kSingle ? "single" : "multi";
}

GenMode parse_gen_mode(std::string_view name) {
  if (name == "single") return GenMode::kSingle;
  if (name == "multi") return GenMode::kMulti;
  throw UsageError("mode must be 'single' or 'multi', got '" + std::string(name) + "'");
}

void validate(const GenConfig& config) {
  if (config.max_groups_per_clause < 1 || config.max_counterfactuals_per_doc < 1) {
    throw UsageError("generation caps must be at least 1");
  }
}

std::vector<SensitiveHit> identify(const ParsedDoc& doc, const Lexicon& lexicon,
                                   const AttributeSet& filter) {
  std::vector<SensitiveHit> hits;
  for (const Token& t : doc.tokens) {
    if (!t.is_word) continue;
    const auto clause = doc.token_clause.at(t.index);
    if (!clause) continue;
    for (const LexiconEntry* e : lexicon.lookup(to_lower(t.text))) {
      if (!filter.contains(e->attribute)) continue;
      hits.push_back(SensitiveHit{t.index, e->attribute, e, *clause});
    }
  }
  return hits;
}

std::vector<AgreementGroup> group_hits(const std::vector<SensitiveHit>& hits,
                                       const std::vector<Clause>& clauses) {
  std::map<std::size_t, std::vector<const SensitiveHit*>> by_clause;
  for (const auto& c : clauses) by_clause[c.id];
  for (const auto& h : hits) by_clause[h.clause_id].push_back(&h);

  std::vector<AgreementGroup> groups;
  for (auto& [clause_id, clause_hits] : by_clause) {
    std::stable_sort(clause_hits.begin(), clause_hits.end(),
                     [](const SensitiveHit* a, const SensitiveHit* b) {
                       return a->token_index < b->token_index;
                     });
    std::vector<AgreementGroup> local;
    std::map<std::string, std::size_t> numbered;  // number tag -> position in local
    std::vector<const SensitiveHit*> neutral;
    for (const SensitiveHit* h : clause_hits) {
      const GroupMember member{h->token_index, h->entry};
      if (h->attribute != SensitiveAttribute::kGender) {
        local.push_back(AgreementGroup{0, clause_id, h->attribute, {member}, {}});
        continue;
      }
      const std::string& number = h->entry->group_key;
      if (number.empty()) {
        neutral.push_back(h);
        continue;
      }
      auto [it, inserted] = numbered.emplace(number, local.size());
      if (inserted) {
        local.push_back(AgreementGroup{0, clause_id, SensitiveAttribute::kGender, {}, {}});
      }
      local[it->second].members.push_back(member);
    }
    if (!neutral.empty()) {
      if (numbered.empty()) {
        AgreementGroup g{0, clause_id, SensitiveAttribute::kGender, {}, {}};
        for (const SensitiveHit* h : neutral) g.members.push_back({h->token_index, h->entry});
        local.push_back(std::move(g));
      } else {
        for (const SensitiveHit* h : neutral) {
          // Nearest numbered gender hit; ties go to the earlier token.
          std::size_t best_group = 0, best_dist = SIZE_MAX, best_token = SIZE_MAX;
          for (const auto& [tag, pos] : numbered) {
            for (const auto& m : local[pos].members) {
              const std::size_t d = m.token_index > h->token_index
                                        ? m.token_index - h->token_index
                                        : h->token_index - m.token_index;
              if (d < best_dist || (d == best_dist && m.token_index < best_token)) {
                best_dist = d;
                best_token = m.token_index;
                best_group = pos;
              }
            }
          }
          auto& members = local[best_group].members;
          const GroupMember member{h->token_index, h->entry};
          members.insert(std::upper_bound(members.begin(), members.end(), member,
                                          [](const GroupMember& a, const GroupMember& b) {
                                            return a.token_index < b.token_index;
                                          }),
                         member);
        }
      }
    }
    std::stable_sort(local.begin(), local.end(),
                     [](const AgreementGroup& a, const AgreementGroup& b) {
                       return a.anchor_token() < b.anchor_token();
                     });
    for (auto& g : local) {
      g.id = groups.size();
      groups.push_back(std::move(g));
    }
  }
  return groups;
}

std::vector<CounterfactualSpec> enumerate_specs(const std::vector<AgreementGroup>& groups,
                                                const GenConfig& config) {
  std::map<std::size_t, std::vector<std::size_t>> by_clause;
  for (const auto& g : groups) by_clause[g.clause_id].push_back(g.id);

  std::vector<CounterfactualSpec> specs;
  for (auto& [clause, ids] : by_clause) {
    std::sort(ids.begin(), ids.end());
    const std::size_t g = ids.size();
    if (config.mode == GenMode::kSingle) {
      combinations(ids, 1, clause, specs);
    } else if (g <= config.max_groups_per_clause) {
      for (std::size_t k = 1; k <= g; ++k) combinations(ids, k, clause, specs);
    } else {
      combinations(ids, 1, clause, specs);
      specs.push_back(CounterfactualSpec{ids, clause});
    }
  }
  if (specs.size() <= config.max_counterfactuals_per_doc) return specs;

  // Keep the highest-priority specs by (size, clause, lex), then restore the
  // (clause, size, lex) output order. `specs` is already lex-ordered within
  // each (clause, size) run, so positions break ties.
  std::vector<std::size_t> order(specs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto sa = specs[a].flipped_group_ids.size(), sb = specs[b].flipped_group_ids.size();
    if (sa != sb) return sa < sb;
    return specs[a].clause_id < specs[b].clause_id;
  });
  order.resize(config.max_counterfactuals_per_doc);
  std::sort(order.begin(), order.end());
  std::vector<CounterfactualSpec> kept;
  kept.reserve(order.size());
  for (std::size_t i : order) kept.push_back(std::move(specs[i]));
  return kept;
}

std::uint64_t document_seed(std::uint64_t seed, std::string_view doc_id) {
  return derive_seed(seed, doc_id);
}

RealizationPlan::RealizationPlan(const ParsedDoc& doc, const std::vector<AgreementGroup>& groups,
                                 const Lexicon& lexicon, std::uint64_t doc_seed) {
  // One coherence key per document, never one of the religions already named
  // by the document's coherent religion words.
  std::set<std::string> own;
  bool has_coherent = false;
  for (const auto& g : groups) {
    for (const auto& m : g.members) {
      if (m.entry && m.entry->attribute == SensitiveAttribute::kReligion) {
        if (auto c = lexicon.coherence_of(m.entry->surface)) {
          has_coherent = true;
          own.emplace(c->first);
        }
      }
    }
  }
  if (has_coherent) {
    std::vector<std::string> candidates;
    for (const auto& key : lexicon.coherence_groups()) {
      if (!own.count(key)) candidates.push_back(key);
    }
    if (!candidates.empty()) {
      Rng rng(derive_seed(doc_seed, "religion-coherence"));
      coherence_key_ = candidates[rng.uniform_index(candidates.size())];
    }
  }

  std::size_t max_id = 0;
  for (const auto& g : groups) max_id = std::max(max_id, g.id);
  position_of_id_.assign(groups.empty() ? 0 : max_id + 1, SIZE_MAX);
  replacements_.resize(groups.size());
  for (std::size_t p = 0; p < groups.size(); ++p) {
    const auto& g = groups[p];
    position_of_id_[g.id] = p;
    Rng rng(derive_seed(doc_seed, static_cast<std::uint64_t>(g.anchor_token())));
    for (const auto& m : g.members) {
      const Token& token = doc.tokens.at(m.token_index);
      std::string word;
      if (m.entry) {
        std::optional<std::string_view> ctx;
        if (m.entry->attribute == SensitiveAttribute::kReligion && coherence_key_) {
          ctx = *coherence_key_;
        }
        word = lexicon.choose_perturbation(*m.entry, rng, ctx);
      } else {
        word = g.antonym;
      }
      replacements_[p].push_back(apply_case_shape(detect_case_shape(token.text), word));
    }
  }
}

const std::vector<std::string>& RealizationPlan::replacements(std::size_t group_id) const {
  return replacements_.at(position_of_id_.at(group_id));
}

Counterfactual realize(const CounterfactualSpec& spec, const ParsedDoc& doc,
                       const std::vector<AgreementGroup>& groups, const RealizationPlan& plan,
                       std::string_view doc_id) {
  Counterfactual cf;
  cf.spec = spec;
  cf.parent_doc_id = std::string(doc_id);

  std::map<std::size_t, std::string> replaced;  // token index -> replacement
  std::set<std::string> attrs;
  for (std::size_t gid : spec.flipped_group_ids) {
    const auto it = std::find_if(groups.begin(), groups.end(),
                                 [gid](const AgreementGroup& g) { return g.id == gid; });
    if (it == groups.end()) throw std::out_of_range("unknown group id in spec");
    const auto& reps = plan.replacements(gid);
    for (std::size_t i = 0; i < it->members.size(); ++i) {
      const Token& t = doc.tokens.at(it->members[i].token_index);
      if (to_lower(reps[i]) == to_lower(t.text)) continue;
      replaced[t.index] = reps[i];
    }
    attrs.insert(it->attribute ? std::string(attribute_name(*it->attribute)) : "explainability");
  }
  cf.flipped_attributes.assign(attrs.begin(), attrs.end());

  // a/an agreement with the replacement that directly follows the article.
  std::map<std::size_t, std::string> articles;
  for (const auto& [index, replacement] : replaced) {
    if (index == 0) continue;
    const Token& prev = doc.tokens[index - 1];
    if (!prev.is_word || replaced.count(prev.index)) continue;
    if (doc.token_clause[prev.index] != doc.token_clause[index]) continue;
    const std::string lower = to_lower_ascii(prev.text);
    if (lower != "a" && lower != "an") continue;
    const std::string wanted = starts_with_vowel(replacement) ? "an" : "a";
    if (wanted == lower) continue;
    articles[prev.index] = apply_case_shape(detect_case_shape(prev.text), wanted);
  }
  replaced.merge(articles);

  std::size_t cursor = 0;
  for (const auto& [index, replacement] : replaced) {
    const Token& t = doc.tokens[index];
    cf.text.append(doc.text, cursor, t.start - cursor);
    cf.text += replacement;
    cursor = t.end;
    cf.substitutions.push_back(Substitution{t.start, t.end, t.text, replacement});
  }
  cf.text.append(doc.text, cursor, std::string::npos);
  return cf;
}

FilterResult filter_cf(std::vector<Counterfactual> candidates, const ScoreFilter& filter) {
  FilterResult result;
  if (!filter.scorer) {
    result.kept = std::move(candidates);
    return result;
  }
  for (auto& cf : candidates) {
    double score = 0.0;
    try {
      score = filter.scorer->score(cf.text);
    } catch (const std::exception& e) {
      result.advisories.push_back("scorer failed on counterfactual of " + cf.parent_doc_id +
                                  " (kept): " + e.what());
      result.kept.push_back(std::move(cf));
      continue;
    }
    if (score >= filter.threshold) result.kept.push_back(std::move(cf));
  }
  return result;
}

GenerationResult generate_from_groups(std::string_view doc_id, const ParsedDoc& doc,
                                      const std::vector<AgreementGroup>& groups,
                                      const Lexicon& lexicon, const GenConfig& config,
                                      const ScoreFilter& filter) {
  validate(config);
  GenerationResult result;
  const auto specs = enumerate_specs(groups, config);
  result.n_specs = specs.size();
  if (specs.empty()) return result;

  const RealizationPlan plan(doc, groups, lexicon, document_seed(config.seed, doc_id));
  std::unordered_set<std::string> seen;
  std::vector<Counterfactual> candidates;
  for (const auto& spec : specs) {
    Counterfactual cf = realize(spec, doc, groups, plan, doc_id);
    if (cf.substitutions.empty() || cf.text == doc.text) continue;
    if (!seen.insert(cf.text).second) continue;
    candidates.push_back(std::move(cf));
  }
  if (config.filter_enabled) {
    auto filtered = filter_cf(std::move(candidates), filter);
    result.counterfactuals = std::move(filtered.kept);
    result.advisories = std::move(filtered.advisories);
  } else {
    result.counterfactuals = std::move(candidates);
  }
  return result;
}

GenerationResult generate(std::string_view doc_id, std::string_view text, const Lexicon& lexicon,
                          const GenConfig& config, std::optional<std::string_view> conllu,
                          const ScoreFilter& filter) {
  const ParsedDoc doc = conllu ? parse_document(text, *conllu) : parse_document(text);
  const auto hits = identify(doc, lexicon, config.attribute_filter);
  const auto groups = group_hits(hits, doc.clauses);
  auto result = generate_from_groups(doc_id, doc, groups, lexicon, config, filter);
  result.n_hits = hits.size();
  return result;
}

}  // namespace cfaudit
