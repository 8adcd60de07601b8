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

#include "cfaudit/lexicon.h"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace cfaudit {
namespace {

constexpr std::array<std::string_view, kNumAttributes> kAttributeNames = {
    "age", "disability", "race", "nationality", "gender", "religion"};

std::string location(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line) + ": ";
}

bool has_whitespace(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t'; });
}

// Calls fn(line_number, columns) for each non-comment, non-blank row.
template <typename Fn>
void for_each_row(std::string_view tsv, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= tsv.size()) {
    std::size_t end = tsv.find('\n', pos);
    if (end == std::string_view::npos) end = tsv.size();
    std::string_view line = tsv.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty() || line.front() == '#') {
      if (end == tsv.size()) break;
      continue;
    }
    fn(line_no, split(line, '\t'));
    if (end == tsv.size()) break;
  }
}

}  // namespace

std::string_view attribute_name(SensitiveAttribute a) {
  return kAttributeNames[static_cast<std::size_t>(a)];
}

SensitiveAttribute parse_attribute(std::string_view name) {
  for (std::size_t i = 0; i < kNumAttributes; ++i) {
    if (kAttributeNames[i] == name) return kAllAttributes[i];
  }
  throw DataError("unknown sensitive attribute '" + std::string(name) + "'");
}

std::vector<SensitiveAttribute> AttributeSet::members() const {
  std::vector<SensitiveAttribute> out;
  for (auto a : kAllAttributes) {
    if (contains(a)) out.push_back(a);
  }
  return out;
}

std::string AttributeSet::to_string() const {
  if (is_all()) return "all";
  std::string out;
  for (auto a : members()) {
    if (!out.empty()) out += ',';
    out += attribute_name(a);
  }
  return out;
}

AttributeSet AttributeSet::parse(std::string_view spec) {
  if (trim(spec) == "all") return all();
  AttributeSet s;
  for (const auto& part : split(spec, ',')) {
    s.insert(parse_attribute(trim(part)));
  }
  return s;
}

const LexiconEntry& Lexicon::add(LexiconEntry entry) {
  auto& bucket = by_surface_[entry.surface];
  for (const LexiconEntry* e : bucket) {
    if (e->attribute == entry.attribute) {
      throw DataError("duplicate entry (" + entry.surface + ", " +
                      std::string(attribute_name(entry.attribute)) + ")");
    }
  }
  entries_.push_back(std::move(entry));
  const LexiconEntry* added = &entries_.back();
  // Keep the bucket in attribute order; stable for equal attributes.
  auto it = std::upper_bound(bucket.begin(), bucket.end(), added,
                             [](const LexiconEntry* a, const LexiconEntry* b) {
                               return a->attribute < b->attribute;
                             });
  bucket.insert(it, added);
  return *added;
}

std::vector<const LexiconEntry*> Lexicon::lookup(std::string_view token_text) const {
  auto it = by_surface_.find(to_lower_ascii(token_text));
  if (it == by_surface_.end()) return {};
  return it->second;
}

std::size_t Lexicon::count(SensitiveAttribute a) const {
  return static_cast<std::size_t>(std::count_if(
      entries_.begin(), entries_.end(), [a](const LexiconEntry& e) { return e.attribute == a; }));
}

void Lexicon::add_coherence(std::string group_key, std::string category, std::string word) {
  if (std::find(coherence_groups_.begin(), coherence_groups_.end(), group_key) ==
      coherence_groups_.end()) {
    coherence_groups_.push_back(group_key);
  }
  auto [rit, inserted] = coherence_reverse_.emplace(word, std::make_pair(group_key, category));
  if (!inserted) throw DataError("coherence word '" + word + "' listed twice");
  coherence_forward_.emplace(std::make_pair(std::move(group_key), std::move(category)),
                             std::move(word));
}

std::optional<std::string_view> Lexicon::coherence_word(std::string_view group_key,
                                                        std::string_view category) const {
  auto it = coherence_forward_.find({std::string(group_key), std::string(category)});
  if (it == coherence_forward_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::pair<std::string_view, std::string_view>> Lexicon::coherence_of(
    std::string_view word) const {
  auto it = coherence_reverse_.find(std::string(word));
  if (it == coherence_reverse_.end()) return std::nullopt;
  return std::make_pair(std::string_view(it->second.first), std::string_view(it->second.second));
}

std::string Lexicon::choose_perturbation(const LexiconEntry& entry, Rng& rng,
                                         std::optional<std::string_view> coherence_ctx) const {
  if (coherence_ctx) {
    if (auto own = coherence_of(entry.surface)) {
      if (auto word = coherence_word(*coherence_ctx, own->second)) {
        const auto& p = entry.perturbations;
        if (std::find(p.begin(), p.end(), *word) != p.end()) return std::string(*word);
      }
    }
  }
  if (entry.perturbations.size() == 1) return entry.perturbations.front();
  return entry.perturbations[rng.uniform_index(entry.perturbations.size())];
}

void load_lexicon_into(Lexicon& lexicon, std::string_view tsv, std::string_view source) {
  for_each_row(tsv, [&](std::size_t line, const std::vector<std::string>& cols) {
    if (cols.size() < 3 || cols.size() > 4) {
      throw DataError(location(source, line) + "expected 3 or 4 tab-separated columns, got " +
                      std::to_string(cols.size()));
    }
    LexiconEntry entry;
    try {
      entry.attribute = parse_attribute(trim(cols[0]));
    } catch (const DataError& e) {
      throw DataError(location(source, line) + e.what());
    }
    entry.surface = to_lower_ascii(trim(cols[1]));
    if (entry.surface.empty() || has_whitespace(entry.surface)) {
      throw DataError(location(source, line) + "surface must be a single non-empty word");
    }
    const std::string_view perturbations = trim(cols[2]);
    if (perturbations.empty()) {
      throw DataError(location(source, line) + "empty perturbation list for '" + entry.surface + "'");
    }
    for (const auto& p : split(perturbations, ',')) {
      std::string word = to_lower_ascii(trim(p));
      if (word.empty()) {
        throw DataError(location(source, line) + "empty perturbation for '" + entry.surface + "'");
      }
      if (word == entry.surface) {
        throw DataError(location(source, line) + "self-perturbation '" + entry.surface + "'");
      }
      entry.perturbations.push_back(std::move(word));
    }
    if (cols.size() == 4) entry.group_key = std::string(trim(cols[3]));
    try {
      lexicon.add(std::move(entry));
    } catch (const DataError& e) {
      throw DataError(location(source, line) + e.what());
    }
  });
}

void load_lexicon_file(Lexicon& lexicon, const std::filesystem::path& path) {
  load_lexicon_into(lexicon, read_file(path), path.string());
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  Lexicon lexicon;
  load_lexicon_file(lexicon, path);
  return lexicon;
}

Lexicon load_lexicon_dir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".tsv") files.push_back(e.path());
  }
  if (files.empty()) throw DataError("no lexicon .tsv files in " + dir.string());
  std::sort(files.begin(), files.end());
  Lexicon lexicon;
  for (const auto& f : files) load_lexicon_file(lexicon, f);
  return lexicon;
}

void load_coherence_into(Lexicon& lexicon, std::string_view tsv, std::string_view source) {
  for_each_row(tsv, [&](std::size_t line, const std::vector<std::string>& cols) {
    if (cols.size() != 3) {
      throw DataError(location(source, line) + "expected group_key<TAB>category<TAB>word");
    }
    std::string group(trim(cols[0])), category(trim(cols[1]));
    std::string word = to_lower_ascii(trim(cols[2]));
    if (group.empty() || category.empty() || word.empty()) {
      throw DataError(location(source, line) + "empty coherence field");
    }
    try {
      lexicon.add_coherence(std::move(group), std::move(category), std::move(word));
    } catch (const DataError& e) {
      throw DataError(location(source, line) + e.what());
    }
  });
}

void load_coherence_file(Lexicon& lexicon, const std::filesystem::path& path) {
  load_coherence_into(lexicon, read_file(path), path.string());
}

std::string serialize_lexicon(const Lexicon& lexicon) {
  std::string out;
  for (const auto& e : lexicon.entries()) {
    out += attribute_name(e.attribute);
    out += '\t';
    out += e.surface;
    out += '\t';
    for (std::size_t i = 0; i < e.perturbations.size(); ++i) {
      if (i) out += ',';
      out += e.perturbations[i];
    }
    if (!e.group_key.empty()) {
      out += '\t';
      out += e.group_key;
    }
    out += '\n';
  }
  return out;
}

ValidationReport validate_lexicon(const Lexicon& lexicon) {
  ValidationReport report;
  for (const auto& e : lexicon.entries()) {
    const std::string tag =
        std::string(attribute_name(e.attribute)) + ":" + e.surface;
    if (e.perturbations.empty()) {
      report.errors.push_back(tag + ": empty perturbation list");
      continue;
    }
    for (const auto& p : e.perturbations) {
      if (p.empty()) {
        report.errors.push_back(tag + ": empty perturbation");
        continue;
      }
      if (to_lower_ascii(p) == e.surface) {
        report.errors.push_back(tag + ": perturbs to itself");
        continue;
      }
      const LexiconEntry* reverse = nullptr;
      for (const LexiconEntry* r : lexicon.lookup(p)) {
        if (r->attribute == e.attribute) reverse = r;
      }
      if (!reverse) {
        report.advisories.push_back(tag + ": perturbation '" + p + "' has no entry of its own");
      } else if (std::find(reverse->perturbations.begin(), reverse->perturbations.end(),
                           e.surface) == reverse->perturbations.end()) {
        report.advisories.push_back(tag + ": '" + p + "' does not perturb back to '" +
                                    e.surface + "'");
      }
    }
  }
  return report;
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("CFAUDIT_DATA_DIR")) return env;
  return CFAUDIT_DATA_DIR;
}

Lexicon load_default_lexicon() {
  const auto dir = default_data_dir();
  Lexicon lexicon = load_lexicon_dir(dir / "lexicon");
  load_coherence_file(lexicon, dir / "religion_coherence.tsv");
  return lexicon;
}

}  // namespace cfaudit
