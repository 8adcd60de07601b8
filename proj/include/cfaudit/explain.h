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

#ifndef CFAUDIT_EXPLAIN_H_
#define CFAUDIT_EXPLAIN_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cfaudit/cfgen.h"
#include "cfaudit/models.h"
#include "cfaudit/text.h"

namespace cfaudit {

struct TokenWeight {
  std::size_t token_index = 0;  // index into tokenize(text)
  double weight = 0.0;
};

// Sorted by |weight| descending, ties by token index.
struct Explanation {
  std::vector<TokenWeight> weights;
  double intercept = 0.0;
};

struct LocalLinearConfig {
  std::size_t n_samples = 500;
  double kernel_width = 0.75;
  std::size_t top_k = 5;
  double ridge_alpha = 1.0;
  std::uint64_t seed = 0;
};

// Masks word tokens at random (each kept with probability 1/2; the first
// sample keeps everything), weights each sample by exp(-d^2 / width^2) where d
// is the cosine distance between the mask and the all-ones mask, and fits a
// weighted ridge regression of predict_proba on the masks.
// Throws UsageError for fewer than two word tokens.
Explanation explain_local_linear(const Classifier& model, std::string_view text,
                                 const LocalLinearConfig& config = {});

struct AnchorConfig {
  double precision_threshold = 0.95;
  std::size_t n_samples = 200;
  std::size_t beam = 4;
  std::uint64_t seed = 0;
};

struct Anchor {
  std::vector<std::size_t> token_indices;  // ascending
  double precision = 0.0;
  std::size_t samples_used = 0;
  bool below_threshold = false;
};

// Beam search over growing token sets. A set's precision is the fraction of
// samples, with every other word independently replaced (probability 1/2) by
// a vocabulary word, whose prediction matches the original. Returns the
// smallest set that reaches the threshold, else the best set seen with
// below_threshold set. An empty vocabulary drops replaced words instead.
// Throws UsageError for text without words.
Anchor explain_anchor(const Classifier& model, std::string_view text,
                      const std::vector<std::string>& vocabulary, const AnchorConfig& config = {});

// Sorted distinct lowercase words of a corpus.
std::vector<std::string> corpus_vocabulary(const std::vector<std::string>& texts);

// word -> antonyms. No word lists itself.
class AntonymLexicon {
 public:
  // Throws DataError for an empty list or a self-antonym.
  void add(std::string word, std::vector<std::string> antonyms);
  // nullptr when the lowercased word has no entry.
  const std::vector<std::string>* lookup(std::string_view word) const;
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, std::vector<std::string>>& entries() const { return entries_; }

 private:
  std::map<std::string, std::vector<std::string>> entries_;
};

// TSV rows `word<TAB>antonym1,antonym2,...`; `#` comments.
void load_antonyms_into(AntonymLexicon& lexicon, std::string_view tsv,
                        std::string_view source = "<memory>");
AntonymLexicon load_antonyms(const std::filesystem::path& path);
AntonymLexicon load_default_antonyms();

// Sensitive groups from `hits`, plus one singleton group per explainability
// token that has an antonym and is not a sensitive hit. Nothing is added when
// the document has no sensitive hit. The added group flips to the first
// antonym. Group ids are reassigned in clause order then token order.
std::vector<AgreementGroup> merge_tokens(const std::vector<SensitiveHit>& hits,
                                         const std::vector<std::size_t>& expl_tokens,
                                         const AntonymLexicon& antonyms, const ParsedDoc& doc);

}  // namespace cfaudit

#endif  // CFAUDIT_EXPLAIN_H_
