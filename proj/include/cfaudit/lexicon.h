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

#ifndef CFAUDIT_LEXICON_H_
#define CFAUDIT_LEXICON_H_

#include <array>
#include <bitset>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cfaudit/common.h"

namespace cfaudit {

// Declaration order is the canonical attribute order used for lookups,
// reports and hit ordering.
enum class SensitiveAttribute { kAge, kDisability, kRace, kNationality, kGender, kReligion };

inline constexpr std::size_t kNumAttributes = 6;
inline constexpr std::array<SensitiveAttribute, kNumAttributes> kAllAttributes = {
    SensitiveAttribute::kAge,         SensitiveAttribute::kDisability,
    SensitiveAttribute::kRace,        SensitiveAttribute::kNationality,
    SensitiveAttribute::kGender,      SensitiveAttribute::kReligion};

std::string_view attribute_name(SensitiveAttribute a);
// Throws DataError for anything but the six canonical names.
SensitiveAttribute parse_attribute(std::string_view name);

// Set of attributes, e.g. a generation filter.
class AttributeSet {
 public:
  AttributeSet() = default;
  static AttributeSet all() {
    AttributeSet s;
    s.bits_.set();
    return s;
  }
  static AttributeSet only(SensitiveAttribute a) {
    AttributeSet s;
    s.insert(a);
    return s;
  }
  void insert(SensitiveAttribute a) { bits_.set(static_cast<std::size_t>(a)); }
  bool contains(SensitiveAttribute a) const { return bits_.test(static_cast<std::size_t>(a)); }
  bool empty() const { return bits_.none(); }
  bool is_all() const { return bits_.all(); }
  std::vector<SensitiveAttribute> members() const;
  // Comma-separated names, or "all".
  std::string to_string() const;
  // Parses "all" or a comma-separated list of attribute names.
  static AttributeSet parse(std::string_view spec);

  friend bool operator==(const AttributeSet&, const AttributeSet&) = default;

 private:
  std::bitset<kNumAttributes> bits_;
};

struct LexiconEntry {
  std::string surface;  // lowercase, no whitespace
  SensitiveAttribute attribute = SensitiveAttribute::kAge;
  std::vector<std::string> perturbations;
  // Coherence/agreement label: the religion a word belongs to, or the
  // grammatical number (sg/pl) of a gender word. Empty when inapplicable.
  std::string group_key;
};

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> advisories;
  bool ok() const { return errors.empty(); }
};

// Sensitive words indexed by lowercase surface. Immutable once loaded, so it
// can be shared across worker threads; entry addresses are stable.
class Lexicon {
 public:
  Lexicon() = default;
  Lexicon(const Lexicon&) = delete;
  Lexicon& operator=(const Lexicon&) = delete;
  Lexicon(Lexicon&&) = default;
  Lexicon& operator=(Lexicon&&) = default;

  // Adds an entry as-is; rejects only a duplicate (surface, attribute) pair.
  // Content checks belong to the loader and to validate_lexicon.
  const LexiconEntry& add(LexiconEntry entry);

  // Entries whose surface equals the lowercased token, in attribute order
  // and then insertion order.
  std::vector<const LexiconEntry*> lookup(std::string_view token_text) const;

  const std::deque<LexiconEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t count(SensitiveAttribute a) const;

  // Coherence map: (group_key, category) -> word. The first word added for a
  // pair is the one returned; every word maps back to its pair.
  void add_coherence(std::string group_key, std::string category, std::string word);
  std::optional<std::string_view> coherence_word(std::string_view group_key,
                                                 std::string_view category) const;
  // (group_key, category) of a word listed in the coherence map.
  std::optional<std::pair<std::string_view, std::string_view>> coherence_of(
      std::string_view word) const;
  // Distinct group keys of the coherence map, in first-seen order.
  const std::vector<std::string>& coherence_groups() const { return coherence_groups_; }
  bool has_coherence() const { return !coherence_groups_.empty(); }

  // Picks a replacement for `entry`. When coherence_ctx names a group and the
  // coherence map has a word for (ctx, category of the entry's surface) that
  // is also one of the entry's perturbations, that word is returned.
  // Otherwise a uniform pick from the entry's perturbations.
  std::string choose_perturbation(const LexiconEntry& entry, Rng& rng,
                                  std::optional<std::string_view> coherence_ctx = {}) const;

 private:
  std::deque<LexiconEntry> entries_;
  std::unordered_map<std::string, std::vector<const LexiconEntry*>> by_surface_;
  std::map<std::pair<std::string, std::string>, std::string> coherence_forward_;
  std::unordered_map<std::string, std::pair<std::string, std::string>> coherence_reverse_;
  std::vector<std::string> coherence_groups_;
};

// Parses lexicon TSV rows into `lexicon`. Throws DataError naming the source
// and line on malformed rows, duplicates, self-perturbation or empty lists.
void load_lexicon_into(Lexicon& lexicon, std::string_view tsv, std::string_view source = "<memory>");
void load_lexicon_file(Lexicon& lexicon, const std::filesystem::path& path);
Lexicon load_lexicon(const std::filesystem::path& path);
// Loads every *.tsv file in a directory, in filename order.
Lexicon load_lexicon_dir(const std::filesystem::path& dir);

void load_coherence_into(Lexicon& lexicon, std::string_view tsv, std::string_view source = "<memory>");
void load_coherence_file(Lexicon& lexicon, const std::filesystem::path& path);

// Lexicon TSV text for every entry, in insertion order.
std::string serialize_lexicon(const Lexicon& lexicon);

ValidationReport validate_lexicon(const Lexicon& lexicon);

// Shipped resource locations.
std::filesystem::path default_data_dir();
// Loads data/lexicon/*.tsv and data/religion_coherence.tsv.
Lexicon load_default_lexicon();

}  // namespace cfaudit

#endif  // CFAUDIT_LEXICON_H_
