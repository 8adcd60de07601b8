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

#include "cfaudit/audit.h"

#include <algorithm>
#include <cmath>

#include "cfaudit/common.h"

namespace cfaudit {

std::vector<FlipRecord> detect_flips(const Classifier& model, const Document& doc,
                                     const std::vector<Counterfactual>& cfs) {
  std::vector<FlipRecord> out;
  if (cfs.empty()) return out;
  const int orig = model.predict(doc.text);
  for (const auto& cf : cfs) {
    const int pred = model.predict(cf.text);
    if (pred != orig) out.push_back(FlipRecord{doc.id, cf.text, orig, pred, cf.flipped_attributes});
  }
  return out;
}

std::string_view explainer_name(ExplainerKind k) {
  switch (k) {
    case ExplainerKind::kNone: return "none";
    case ExplainerKind::kLocalLinear: return "local-linear";
    case ExplainerKind::kAnchor: return "anchor";
  }
  return "none";
}

ExplainerKind parse_explainer(std::string_view name) {
  if (name == "none") return ExplainerKind::kNone;
  if (name == "local-linear" || name == "lime") return ExplainerKind::kLocalLinear;
  if (name == "anchor") return ExplainerKind::kAnchor;
  throw UsageError("explainer must be none, local-linear or anchor, got '" + std::string(name) +
                   "'");
}

std::vector<std::size_t> explainability_tokens(const Classifier& model, const Document& doc,
                                               const PipelineConfig& config) {
  const std::uint64_t seed = document_seed(config.gen.seed, doc.id);
  std::vector<std::size_t> out;
  switch (config.explainer) {
    case ExplainerKind::kNone:
      break;
    case ExplainerKind::kLocalLinear: {
      std::size_t words = 0;
      for (const auto& t : tokenize(doc.text)) words += t.is_word ? 1 : 0;
      if (words < 2) break;
      LocalLinearConfig ll = config.local_linear;
      ll.seed = seed;
      for (const auto& tw : explain_local_linear(model, doc.text, ll).weights) {
        if (std::abs(tw.weight) > 1e-12) out.push_back(tw.token_index);
      }
      break;
    }
    case ExplainerKind::kAnchor: {
      AnchorConfig ac = config.anchor;
      ac.seed = seed;
      out = explain_anchor(model, doc.text, config.vocabulary, ac).token_indices;
      break;
    }
  }
  return out;
}

CfGenerator make_generator(const Lexicon& lexicon, PipelineConfig config) {
  validate(config.gen);
  if (config.explainer != ExplainerKind::kNone && !config.antonyms) {
    throw UsageError("an explainer needs an antonym lexicon");
  }
  return [&lexicon, config = std::move(config)](const Document& doc, const Classifier& model) {
    const auto parse = config.conllu.find(doc.id);
    const ParsedDoc parsed = parse == config.conllu.end() ? parse_document(doc.text)
                                                          : parse_document(doc.text, parse->second);
    const auto hits = identify(parsed, lexicon, config.gen.attribute_filter);
    std::vector<AgreementGroup> groups;
    if (config.explainer != ExplainerKind::kNone && !hits.empty()) {
      groups = merge_tokens(hits, explainability_tokens(model, doc, config), *config.antonyms,
                            parsed);
    } else {
      groups = group_hits(hits, parsed.clauses);
    }
    auto result = generate_from_groups(doc.id, parsed, groups, lexicon, config.gen, config.filter);
    result.n_hits = hits.size();
    return result;
  };
}

FlipRateResult flip_rate(const Classifier& model, const std::vector<Document>& docs,
                         const CfGenerator& gen, std::size_t workers) {
  if (docs.empty()) throw DataError("flip-rate needs a non-empty corpus");
  struct Slot {
    std::size_t n_hits = 0;
    std::size_t n_cf = 0;
    std::vector<FlipRecord> flips;
  };
  std::vector<Slot> slots(docs.size());
  parallel_for(docs.size(), workers, [&](std::size_t i) {
    const auto result = gen(docs[i], model);
    slots[i].n_hits = result.n_hits;
    slots[i].n_cf = result.counterfactuals.size();
    slots[i].flips = detect_flips(model, docs[i], result.counterfactuals);
  });

  FlipRateResult r;
  r.n_docs = docs.size();
  for (auto& s : slots) {
    r.n_docs_with_hits += s.n_hits > 0 ? 1 : 0;
    r.n_docs_with_cf += s.n_cf > 0 ? 1 : 0;
    r.n_docs_flipped += s.flips.empty() ? 0 : 1;
    r.n_counterfactuals += s.n_cf;
    for (auto& f : s.flips) r.flips.push_back(std::move(f));
  }
  r.flip_rate_pct = 100.0 * static_cast<double>(r.n_docs_flipped) / static_cast<double>(r.n_docs);
  r.conditional_flip_rate_pct =
      r.n_docs_with_cf == 0
          ? 0.0
          : 100.0 * static_cast<double>(r.n_docs_flipped) / static_cast<double>(r.n_docs_with_cf);
  return r;
}

std::string_view augment_policy_name(AugmentPolicy p) {
  return p == AugmentPolicy::kFlipped ? "flipped" : "all";
}

AugmentPolicy parse_augment_policy(std::string_view name) {
  if (name == "flipped") return AugmentPolicy::kFlipped;
  if (name == "all") return AugmentPolicy::kAll;
  throw UsageError("augment must be 'flipped' or 'all', got '" + std::string(name) + "'");
}

std::string_view label_policy_name(LabelPolicy p) {
  return p == LabelPolicy::kGold ? "gold" : "predicted";
}

LabelPolicy parse_label_policy(std::string_view name) {
  if (name == "gold") return LabelPolicy::kGold;
  if (name == "predicted") return LabelPolicy::kPredicted;
  throw UsageError("label policy must be 'gold' or 'predicted', got '" + std::string(name) + "'");
}

std::vector<Document> build_cf_data(const std::vector<Document>& train_docs,
                                    const CfGenerator& gen, const Classifier& model,
                                    AugmentPolicy augment, LabelPolicy label,
                                    std::size_t workers) {
  std::vector<std::vector<Document>> slots(train_docs.size());
  parallel_for(train_docs.size(), workers, [&](std::size_t i) {
    const Document& doc = train_docs[i];
    const auto cfs = gen(doc, model).counterfactuals;
    if (cfs.empty()) return;
    const int pred = model.predict(doc.text);
    int tag = pred;
    if (label == LabelPolicy::kGold) {
      if (!doc.label) throw DataError("document '" + doc.id + "' has no gold label");
      tag = *doc.label;
    }
    std::size_t k = 0;
    for (const auto& cf : cfs) {
      if (augment == AugmentPolicy::kFlipped && model.predict(cf.text) == pred) continue;
      slots[i].push_back(Document{doc.id + "#cf" + std::to_string(k++), cf.text, tag});
    }
  });
  std::vector<Document> out;
  for (auto& s : slots) {
    for (auto& d : s) out.push_back(std::move(d));
  }
  return out;
}

CfiResult cfi(double fr_pre_pct, double fr_post_pct) {
  if (fr_pre_pct <= 0.0) return CfiResult{0.0, true};
  return CfiResult{100.0 * (fr_pre_pct - fr_post_pct) / fr_pre_pct, false};
}

double accuracy_drop(double acc_pre, double acc_post) { return 100.0 * (acc_pre - acc_post); }

AuditReport run_audit(const Classifier& model, const std::vector<Document>& docs,
                      const Lexicon& lexicon, const PipelineConfig& config, std::size_t workers) {
  AuditReport report;
  report.overall = flip_rate(model, docs, make_generator(lexicon, config), workers);
  for (SensitiveAttribute a : config.gen.attribute_filter.members()) {
    PipelineConfig single_attr = config;
    single_attr.gen.attribute_filter = AttributeSet::only(a);
    AttributeRate rate;
    rate.attribute = a;
    rate.result = flip_rate(model, docs, make_generator(lexicon, std::move(single_attr)), workers);
    rate.filtered_rate_pct =
        rate.result.n_docs_with_hits == 0
            ? 0.0
            : 100.0 * static_cast<double>(rate.result.n_docs_flipped) /
                  static_cast<double>(rate.result.n_docs_with_hits);
    report.per_attribute.push_back(std::move(rate));
  }
  return report;
}

MitigationOutcome mitigate(const std::vector<Document>& train_docs,
                           const std::vector<Document>& test_docs, const Lexicon& lexicon,
                           const MitigationConfig& config) {
  if (train_docs.empty() || test_docs.empty()) {
    throw DataError("mitigation needs non-empty train and test splits");
  }
  const auto train_texts = texts_of(train_docs);
  const auto train_labels = labels_of(train_docs);
  const auto test_texts = texts_of(test_docs);
  const auto test_labels = labels_of(test_docs);

  TrainedModel original = train(train_texts, train_labels, config.kind, config.features,
                                config.params, config.seed, config.workers);

  // Flip-rates cover the test documents that mention a selected attribute
  // when the run is attribute-specific.
  std::vector<Document> audited;
  if (config.pipeline.gen.attribute_filter.is_all()) {
    audited = test_docs;
  } else {
    for (const auto& d : test_docs) {
      if (!identify(parse_document(d.text), lexicon, config.pipeline.gen.attribute_filter).empty()) {
        audited.push_back(d);
      }
    }
  }

  PipelineConfig single = config.pipeline;
  single.gen.mode = GenMode::kSingle;
  const CfGenerator gen = make_generator(lexicon, config.pipeline);
  const CfGenerator gen_single = make_generator(lexicon, std::move(single));

  MitigationReport rep;
  rep.n_train = train_docs.size();
  rep.n_test = test_docs.size();
  rep.n_test_audited = audited.size();
  if (!audited.empty()) {
    rep.fr_pre_pct = flip_rate(original, audited, gen, config.workers).flip_rate_pct;
    rep.single_fr_pre_pct = flip_rate(original, audited, gen_single, config.workers).flip_rate_pct;
  }
  rep.acc_pre = evaluate(original, test_texts, test_labels, config.workers);

  const auto cf_data =
      build_cf_data(train_docs, gen, original, config.augment, config.label, config.workers);
  rep.n_augmented = cf_data.size();
  auto union_texts = train_texts;
  auto union_labels = train_labels;
  for (const auto& d : cf_data) {
    union_texts.push_back(d.text);
    union_labels.push_back(*d.label);
  }
  TrainedModel retrained = train(union_texts, union_labels, config.kind, config.features,
                                 config.params, derive_seed(config.seed, "retrain"),
                                 config.workers);

  if (!audited.empty()) {
    rep.fr_post_pct = flip_rate(retrained, audited, gen, config.workers).flip_rate_pct;
    rep.single_fr_post_pct =
        flip_rate(retrained, audited, gen_single, config.workers).flip_rate_pct;
  }
  rep.acc_post = evaluate(retrained, test_texts, test_labels, config.workers);
  rep.cfi = cfi(rep.fr_pre_pct, rep.fr_post_pct);
  rep.ad_points = accuracy_drop(rep.acc_pre, rep.acc_post);
  return MitigationOutcome{rep, std::move(original), std::move(retrained)};
}

}  // namespace cfaudit
