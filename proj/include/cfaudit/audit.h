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

#ifndef CFAUDIT_AUDIT_H_
#define CFAUDIT_AUDIT_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cfaudit/cfgen.h"
#include "cfaudit/corpus.h"
#include "cfaudit/explain.h"
#include "cfaudit/lexicon.h"
#include "cfaudit/models.h"

namespace cfaudit {

struct FlipRecord {
  std::string doc_id;
  std::string cf_text;
  int orig_pred = 0;
  int cf_pred = 0;
  std::vector<std::string> flipped_attributes;
};

// One record per counterfactual whose predicted label differs from the
// original's.
std::vector<FlipRecord> detect_flips(const Classifier& model, const Document& doc,
                                     const std::vector<Counterfactual>& cfs);

// Counterfactual generation for one document. The model is passed in because
// explainability-augmented generation queries it.
using CfGenerator = std::function<GenerationResult(const Document&, const Classifier&)>;

enum class ExplainerKind { kNone, kLocalLinear, kAnchor };
std::string_view explainer_name(ExplainerKind k);
ExplainerKind parse_explainer(std::string_view name);

struct PipelineConfig {
  GenConfig gen;
  ExplainerKind explainer = ExplainerKind::kNone;
  LocalLinearConfig local_linear;
  AnchorConfig anchor;
  const AntonymLexicon* antonyms = nullptr;  // required when explainer != none
  std::vector<std::string> vocabulary;       // anchor replacement words
  std::map<std::string, std::string> conllu;  // doc id -> CoNLL-U payload
  ScoreFilter filter;
};

// Explainability tokens of `text` under `explainer`: the top-k local-linear
// tokens or the anchor tokens. Explainer seeds derive from (gen seed, doc id).
std::vector<std::size_t> explainability_tokens(const Classifier& model, const Document& doc,
                                               const PipelineConfig& config);

// identify -> (explain + merge) -> enumerate -> realize -> dedup -> filter.
// `lexicon` must outlive the returned closure.
CfGenerator make_generator(const Lexicon& lexicon, PipelineConfig config);

struct FlipRateResult {
  double flip_rate_pct = 0.0;              // over all documents
  double conditional_flip_rate_pct = 0.0;  // over documents with counterfactuals
  std::size_t n_docs = 0;
  std::size_t n_docs_with_hits = 0;
  std::size_t n_docs_with_cf = 0;
  std::size_t n_docs_flipped = 0;
  std::size_t n_counterfactuals = 0;
  std::vector<FlipRecord> flips;  // document order
};

// 100 * |docs with >= 1 flipped counterfactual| / |docs|. Parallel over
// documents; the result does not depend on `workers`. Throws DataError for an
// empty corpus.
FlipRateResult flip_rate(const Classifier& model, const std::vector<Document>& docs,
                         const CfGenerator& gen, std::size_t workers = 1);

enum class AugmentPolicy { kFlipped, kAll };
enum class LabelPolicy { kGold, kPredicted };
std::string_view augment_policy_name(AugmentPolicy p);
AugmentPolicy parse_augment_policy(std::string_view name);
std::string_view label_policy_name(LabelPolicy p);
LabelPolicy parse_label_policy(std::string_view name);

// Counterfactual Data: counterfactuals of the training documents (flipped
// ones only, or all), labeled with the parent's gold (or predicted) label.
// Ids are "<parent id>#cf<k>".
std::vector<Document> build_cf_data(const std::vector<Document>& train_docs,
                                    const CfGenerator& gen, const Classifier& model,
                                    AugmentPolicy augment = AugmentPolicy::kFlipped,
                                    LabelPolicy label = LabelPolicy::kGold,
                                    std::size_t workers = 1);

struct CfiResult {
  double value = 0.0;
  bool undefined = false;  // pre-mitigation flip-rate was zero
};

// 100 * (pre - post) / pre; 0 with the flag set when pre = 0.
CfiResult cfi(double fr_pre_pct, double fr_post_pct);
// 100 * (acc_pre - acc_post), in percentage points.
double accuracy_drop(double acc_pre, double acc_post);

struct AttributeRate {
  SensitiveAttribute attribute = SensitiveAttribute::kAge;
  FlipRateResult result;             // denominator: all documents
  double filtered_rate_pct = 0.0;    // denominator: documents with this attribute
};

struct AuditReport {
  FlipRateResult overall;  // the all-attributes pass
  std::vector<AttributeRate> per_attribute;
};

// Overall pass with the configured attribute filter plus one pass per
// attribute in it.
AuditReport run_audit(const Classifier& model, const std::vector<Document>& docs,
                      const Lexicon& lexicon, const PipelineConfig& config,
                      std::size_t workers = 1);

struct MitigationConfig {
  ModelKind kind = ModelKind::kLogReg;
  FeatureConfig features;
  TrainParams params;
  std::uint64_t seed = 0;
  AugmentPolicy augment = AugmentPolicy::kFlipped;
  LabelPolicy label = LabelPolicy::kGold;
  PipelineConfig pipeline;
  std::size_t workers = 1;
};

struct MitigationReport {
  double fr_pre_pct = 0.0;
  double fr_post_pct = 0.0;
  CfiResult cfi;
  double acc_pre = 0.0;
  double acc_post = 0.0;
  double ad_points = 0.0;
  std::size_t n_augmented = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t n_test_audited = 0;  // test documents the flip-rates are over
  // Single-token flip-rate on the test split before and after retraining.
  double single_fr_pre_pct = 0.0;
  double single_fr_post_pct = 0.0;
};

struct MitigationOutcome {
  MitigationReport report;
  TrainedModel original;
  TrainedModel retrained;
};

// Train, measure, build Counterfactual Data from the training split, retrain
// on the union with a seed derived from (seed, "retrain"), measure again.
// When the attribute filter is not "all", flip-rates are computed over the
// test documents that mention a filtered attribute; accuracy always uses the
// whole test split.
MitigationOutcome mitigate(const std::vector<Document>& train_docs,
                           const std::vector<Document>& test_docs, const Lexicon& lexicon,
                           const MitigationConfig& config);

}  // namespace cfaudit

#endif  // CFAUDIT_AUDIT_H_
