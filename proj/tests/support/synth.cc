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

#include "synth.h"

#include <array>

#include "cfaudit/text.h"

namespace cfaudit::testing {
namespace {

constexpr std::array<std::string_view, 16> kFiller = {
    "the", "movie", "was", "quite", "long", "people", "said", "that", "today",
    "went", "to", "see", "it", "very", "new", "city"};
constexpr std::array<std::string_view, 6> kPronouns = {"he", "she", "they", "we", "i", "it"};
constexpr std::array<std::string_view, 3> kConjunctions = {"and", "but", "or"};
constexpr std::array<std::string_view, 6> kPunct = {",", ",", ".", ";", "!", "?"};

template <typename C>
std::string_view pick(Rng& rng, const C& c) {
  return c[rng.uniform_index(c.size())];
}

std::string cap(std::string_view w) {
  std::string s(w);
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

}  // namespace

std::string random_text(Rng& rng, const Lexicon& lexicon, std::size_t max_words) {
  const std::size_t n = 1 + rng.uniform_index(max_words);
  std::string out;
  bool sentence_start = true;
  for (std::size_t i = 0; i < n; ++i) {
    std::string word;
    const double r = rng.uniform01();
    if (r < 0.35) {
      word = lexicon.entries()[rng.uniform_index(lexicon.size())].surface;
    } else if (r < 0.5) {
      word = std::string(pick(rng, kPronouns));
    } else if (r < 0.58) {
      word = std::string(pick(rng, kConjunctions));
    } else {
      word = std::string(pick(rng, kFiller));
    }
    const double shape = rng.uniform01();
    if (sentence_start || shape < 0.1) word = cap(word);
    if (!out.empty()) out += ' ';
    out += word;
    sentence_start = false;
    if (i + 1 < n && rng.uniform01() < 0.18) {
      const std::string_view p = pick(rng, kPunct);
      out += p;
      sentence_start = p != ",";
    }
  }
  out += '.';
  return out;
}

std::vector<Document> random_corpus(Rng& rng, const Lexicon& lexicon, std::size_t n) {
  std::vector<Document> docs;
  for (std::size_t i = 0; i < n; ++i) {
    docs.push_back(Document{"d" + std::to_string(i), random_text(rng, lexicon), std::nullopt});
  }
  return docs;
}

std::vector<Document> biased_gender_corpus(const BiasedCorpusConfig& config) {
  // Word choice keeps the gender and sentiment signals in disjoint buckets of
  // the default 32-bucket hashed features, so the planted bias is separable.
  static constexpr std::array<std::string_view, 3> kMaleSubject = {"He", "The man", "The husband"};
  static constexpr std::array<std::string_view, 3> kFemaleSubject = {"She", "The woman",
                                                                     "The wife"};
  static constexpr std::array<std::string_view, 3> kPositive = {"excellent", "brilliant",
                                                                "delightful"};
  static constexpr std::array<std::string_view, 3> kNegative = {"terrible", "awful", "nasty"};
  static constexpr std::array<std::string_view, 4> kVerb = {"thinks", "claims", "feels",
                                                            "believes"};
  static constexpr std::array<std::string_view, 4> kObject = {"film", "meal", "show", "story"};
  static constexpr std::array<std::string_view, 4> kOther = {
      "at the church", "with american friends", "with old colleagues", "with asian students"};

  Rng rng(config.seed);
  std::vector<Document> docs;
  for (std::size_t i = 0; i < config.n_docs; ++i) {
    const int y = rng.bernoulli(0.5) ? 1 : 0;
    const bool male = rng.bernoulli(config.male_agreement) ? y == 1 : y == 0;
    const bool positive = rng.bernoulli(config.cue_agreement) ? y == 1 : y == 0;
    std::string text(pick(rng, male ? kMaleSubject : kFemaleSubject));
    text += " ";
    text += pick(rng, kVerb);
    text += " the ";
    text += pick(rng, kObject);
    text += " seemed ";
    text += pick(rng, positive ? kPositive : kNegative);
    if (rng.bernoulli(config.other_attribute_rate)) {
      text += " ";
      text += pick(rng, kOther);
    }
    text += ".";
    docs.push_back(Document{"doc" + std::to_string(i), std::move(text), y});
  }
  return docs;
}

double KeywordModel::predict_proba(std::string_view text) const {
  for (const auto& t : tokenize(text)) {
    if (t.is_word && to_lower(t.text) == keyword_) return hit_;
  }
  return miss_;
}

}  // namespace cfaudit::testing
