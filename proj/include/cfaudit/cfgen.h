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

#ifndef CFAUDIT_CFGEN_H_
#define CFAUDIT_CFGEN_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cfaudit/lexicon.h"
#include "cfaudit/text.h"

namespace cfaudit {

struct SensitiveHit {
  std::size_t token_index = 0;
  SensitiveAttribute attribute = SensitiveAttribute::kAge;
  const LexiconEntry* entry = nullptr;
  std::size_t clause_id = 0;
};

struct GroupMember {
  std::size_t token_index = 0;
  // Null for explainability members, which perturb to the group's antonym.
  const LexiconEntry* entry = nullptr;
};

// Tokens that flip together. Sensitive groups carry an attribute;
// explainability groups (merged in by the explain module) do not and have a
// single member whose replacement is `antonym`.
struct AgreementGroup {
  std::size_t id = 0;
  std::size_t clause_id = 0;
  std::optional<SensitiveAttribute> attribute;
  std::vector<GroupMember> members;
  std::string antonym;

  bool is_explainability() const { return !attribute.has_value(); }
  std::size_t anchor_token() const { return members.front().token_index; }
};

struct CounterfactualSpec {
  std::vector<std::size_t> flipped_group_ids;  // ascending, non-empty
  std::size_t clause_id = 0;

  friend bool operator==(const CounterfactualSpec&, const CounterfactualSpec&) = default;
};

struct Substitution {
  std::size_t start = 0;  // byte span in the parent text
  std::size_t end = 0;
  std::string original;
  std::string replacement;
};

struct Counterfactual {
  std::string text;
  CounterfactualSpec spec;
  std::vector<Substitution> substitutions;  // ordered by start
  std::string parent_doc_id;
  // Attribute names of the flipped groups, plus "explainability" when an
  // explainability group is flipped. Sorted, unique.
  std::vector<std::string> flipped_attributes;
};

enum class GenMode { kSingle, kMulti };

std::string_view gen_mode_name(GenMode mode);
GenMode parse_gen_mode(std::string_view name);

struct GenConfig {
  AttributeSet attribute_filter = AttributeSet::all();
  GenMode mode = GenMode::kMulti;
  std::size_t max_groups_per_clause = 8;
  std::size_t max_counterfactuals_per_doc = 256;
  std::uint64_t seed = 0;
  bool filter_enabled = false;
};

// Throws UsageError when a cap is zero.
void validate(const GenConfig& config);

// Pluggable realism scorer (grammar checker, language model, ...). A
// candidate is kept when score >= threshold. score may throw; the candidate
// is then kept and an advisory recorded.
class TextScorer {
 public:
  virtual ~TextScorer() = default;
  virtual double score(std::string_view text) const = 0;
};

struct ScoreFilter {
  const TextScorer* scorer = nullptr;
  double threshold = 0.0;
};

struct FilterResult {
  std::vector<Counterfactual> kept;
  std::vector<std::string> advisories;
};

// One hit per (word token, lexicon entry) with attribute in `filter`, ordered
// by token index then attribute.
std::vector<SensitiveHit> identify(const ParsedDoc& doc, const Lexicon& lexicon,
                                   const AttributeSet& filter = AttributeSet::all());

// Agreement groups, ids assigned in clause order then token order.
// Non-gender hits are singleton groups. Gender hits in a clause are grouped by
// grammatical number (the entry's group_key, "sg" or "pl"); number-neutral
// gender words join the nearest numbered gender hit of the clause, or form
// one neutral group when the clause has none.
std::vector<AgreementGroup> group_hits(const std::vector<SensitiveHit>& hits,
                                       const std::vector<Clause>& clauses);

// Clause-local group subsets: every non-empty subset (multi) or singletons
// only (single), ordered by clause, then subset size, then lexicographic
// group ids. A clause with more than max_groups_per_clause groups contributes
// its singletons and the full set only. When the total exceeds
// max_counterfactuals_per_doc, the kept specs are the first ones by
// (size, clause, lexicographic) priority.
std::vector<CounterfactualSpec> enumerate_specs(const std::vector<AgreementGroup>& groups,
                                                const GenConfig& config);

// Per-document randomness. The replacement words of a group are drawn from a
// generator keyed on (doc seed, group anchor token), and the religion
// coherence key is drawn once per document, so a group realizes identically
// in every subset that flips it.
class RealizationPlan {
 public:
  RealizationPlan(const ParsedDoc& doc, const std::vector<AgreementGroup>& groups,
                  const Lexicon& lexicon, std::uint64_t doc_seed);

  // Replacement (already case-shaped) for each member of group `group_id`.
  const std::vector<std::string>& replacements(std::size_t group_id) const;
  const std::optional<std::string>& coherence_key() const { return coherence_key_; }

 private:
  std::vector<std::vector<std::string>> replacements_;  // indexed by position in groups
  std::vector<std::size_t> position_of_id_;
  std::optional<std::string> coherence_key_;
};

std::uint64_t document_seed(std::uint64_t seed, std::string_view doc_id);

Counterfactual realize(const CounterfactualSpec& spec, const ParsedDoc& doc,
                       const std::vector<AgreementGroup>& groups, const RealizationPlan& plan,
                       std::string_view doc_id);

FilterResult filter_cf(std::vector<Counterfactual> candidates, const ScoreFilter& filter);

struct GenerationResult {
  std::vector<Counterfactual> counterfactuals;
  std::vector<std::string> advisories;
  std::size_t n_specs = 0;  // before dedup and filtering
  std::size_t n_hits = 0;
};

// enumerate -> realize -> dedup -> filter over prebuilt groups.
GenerationResult generate_from_groups(std::string_view doc_id, const ParsedDoc& doc,
                                      const std::vector<AgreementGroup>& groups,
                                      const Lexicon& lexicon, const GenConfig& config,
                                      const ScoreFilter& filter = {});

// identify -> group -> enumerate -> realize -> dedup -> filter. A CoNLL-U
// parse, when given, replaces heuristic clause segmentation.
GenerationResult generate(std::string_view doc_id, std::string_view text, const Lexicon& lexicon,
                          const GenConfig& config,
                          std::optional<std::string_view> conllu = std::nullopt,
                          const ScoreFilter& filter = {});

}  // namespace cfaudit

#endif  // CFAUDIT_CFGEN_H_
