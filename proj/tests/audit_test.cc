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

#include <gtest/gtest.h>

#include "synth.h"

namespace cfaudit {
namespace {

using testing::ConstantModel;
using testing::KeywordModel;

const Lexicon& lex() {
  static const Lexicon l = load_default_lexicon();
  return l;
}

CfGenerator generator(GenMode mode = GenMode::kMulti, std::uint64_t seed = 1) {
  PipelineConfig pc;
  pc.gen.mode = mode;
  pc.gen.seed = seed;
  return make_generator(lex(), pc);
}

std::vector<Document> four_docs() {
  return {Document{"a", "he is fine", 1}, Document{"b", "The weather is nice.", 0},
          Document{"c", "They visited the old city.", 0}, Document{"d", "It rained.", 1}};
}

TEST(DetectFlips, KeyedModel) {
  const KeywordModel model("he");
  const Document doc{"a", "he is fine", 1};
  const auto cfs = generator()(doc, model).counterfactuals;
  ASSERT_EQ(cfs.size(), 1u);
  EXPECT_EQ(cfs[0].text, "she is fine");
  const auto flips = detect_flips(model, doc, cfs);
  ASSERT_EQ(flips.size(), 1u);
  EXPECT_EQ(flips[0].orig_pred, 1);
  EXPECT_EQ(flips[0].cf_pred, 0);
  EXPECT_EQ(flips[0].flipped_attributes, std::vector<std::string>{"gender"});
  EXPECT_TRUE(detect_flips(ConstantModel(0.7), doc, cfs).empty());
  EXPECT_TRUE(detect_flips(model, doc, {}).empty());
}

TEST(FlipRate, OneOfFourDocs) {
  const auto r = flip_rate(KeywordModel("he"), four_docs(), generator());
  EXPECT_DOUBLE_EQ(r.flip_rate_pct, 25.0);
  EXPECT_EQ(r.n_docs, 4u);
  EXPECT_EQ(r.n_docs_flipped, 1u);
  EXPECT_EQ(r.n_docs_with_hits, 2u);  // "old" is an age word
  EXPECT_DOUBLE_EQ(r.conditional_flip_rate_pct, 50.0);
  ASSERT_EQ(r.flips.size(), 1u);
  EXPECT_EQ(r.flips[0].doc_id, "a");
}

TEST(FlipRate, ConstantModelAndEmptyCorpus) {
  EXPECT_EQ(flip_rate(ConstantModel(0.2), four_docs(), generator()).flip_rate_pct, 0.0);
  EXPECT_THROW(flip_rate(ConstantModel(0.2), {}, generator()), DataError);
}

TEST(FlipRate, WorkerCountDoesNotMatter) {
  Rng rng(5);
  const auto docs = testing::random_corpus(rng, lex(), 300);
  const KeywordModel model("she");
  const auto a = flip_rate(model, docs, generator(), 1);
  const auto b = flip_rate(model, docs, generator(), 8);
  EXPECT_EQ(a.flip_rate_pct, b.flip_rate_pct);
  ASSERT_EQ(a.flips.size(), b.flips.size());
  for (std::size_t i = 0; i < a.flips.size(); ++i) {
    EXPECT_EQ(a.flips[i].doc_id, b.flips[i].doc_id);
    EXPECT_EQ(a.flips[i].cf_text, b.flips[i].cf_text);
  }
}

TEST(FlipRate, MultiAtLeastSingle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto docs = testing::random_corpus(rng, lex(), 40);
    const KeywordModel model(lex().entries()[rng.uniform_index(lex().size())].surface);
    const double multi = flip_rate(model, docs, generator(GenMode::kMulti, seed)).flip_rate_pct;
    const double single = flip_rate(model, docs, generator(GenMode::kSingle, seed)).flip_rate_pct;
    EXPECT_GE(multi, single) << "seed " << seed;
  }
}

TEST(Cfi, RelativeReductionInPercent) {
  // Hand-computed 100 * (pre - post) / pre.
  EXPECT_NEAR(cfi(3.34, 2.98).value, 10.778443113772455, 1e-9);
  EXPECT_NEAR(cfi(2.91, 2.12).value, 27.147766323024054, 1e-9);
  EXPECT_NEAR(cfi(0.99, 0.67).value, 32.323232323232318, 1e-9);
  EXPECT_NEAR(cfi(4.53, 3.83).value, 15.452538631346581, 1e-9);
  EXPECT_NEAR(cfi(4.0, 5.0).value, -25.0, 1e-12);
  EXPECT_EQ(cfi(5.0, 5.0).value, 0.0);
  EXPECT_FALSE(cfi(5.0, 5.0).undefined);
  const auto zero = cfi(0.0, 1.0);
  EXPECT_TRUE(zero.undefined);
  EXPECT_EQ(zero.value, 0.0);
}

TEST(AccuracyDrop, Points) {
  EXPECT_NEAR(accuracy_drop(0.9231, 0.8991), 2.4, 1e-9);
  EXPECT_EQ(accuracy_drop(0.7, 0.7), 0.0);
  EXPECT_NEAR(accuracy_drop(0.80, 0.85), -5.0, 1e-9);
}

TEST(BuildCfData, GoldLabelsOnFlippedOnly) {
  const KeywordModel model("he");
  const std::vector<Document> docs = {Document{"a", "he and his dog left", 1},
                                      Document{"b", "She sang, he danced.", 0},
                                      Document{"c", "nothing here", 1}};
  const auto gen = generator();
  const auto data = build_cf_data(docs, gen, model);
  std::size_t total_cf = 0;
  for (const auto& d : docs) total_cf += gen(d, model).counterfactuals.size();
  EXPECT_LE(data.size(), total_cf);
  ASSERT_FALSE(data.empty());
  for (const auto& d : data) {
    const Document& parent = d.id[0] == 'a' ? docs[0] : docs[1];
    EXPECT_EQ(*d.label, *parent.label) << d.id;
    EXPECT_NE(model.predict(d.text), model.predict(parent.text)) << d.id;
  }
  EXPECT_EQ(data[0].id, "a#cf0");

  const auto all = build_cf_data(docs, gen, model, AugmentPolicy::kAll);
  EXPECT_EQ(all.size(), total_cf);
  const auto predicted = build_cf_data(docs, gen, model, AugmentPolicy::kFlipped,
                                       LabelPolicy::kPredicted);
  ASSERT_EQ(predicted.size(), data.size());
  for (const auto& d : predicted) EXPECT_EQ(*d.label, 1) << d.id;  // both parents predict 1
  EXPECT_TRUE(build_cf_data(docs, gen, ConstantModel(0.4)).empty());
}

TEST(BuildCfData, MissingGoldLabelIsAnError) {
  const std::vector<Document> docs = {Document{"a", "he left", std::nullopt}};
  EXPECT_THROW(build_cf_data(docs, generator(), KeywordModel("he")), DataError);
}

TEST(RunAudit, OverallIsItsOwnPass) {
  Rng rng(77);
  const auto docs = testing::random_corpus(rng, lex(), 120);
  const KeywordModel model("she");
  PipelineConfig pc;
  pc.gen.seed = 3;
  const auto report = run_audit(model, docs, lex(), pc);
  EXPECT_EQ(report.per_attribute.size(), kNumAttributes);
  double max_attr = 0.0;
  for (const auto& a : report.per_attribute) {
    EXPECT_GE(a.result.flip_rate_pct, 0.0);
    EXPECT_LE(a.result.flip_rate_pct, 100.0);
    EXPECT_GE(a.filtered_rate_pct, a.result.flip_rate_pct);
    max_attr = std::max(max_attr, a.result.flip_rate_pct);
  }
  EXPECT_GE(report.overall.flip_rate_pct, max_attr);
  EXPECT_GT(report.overall.flip_rate_pct, 0.0);
}

TEST(RunAudit, DoesNotTouchTheModel) {
  const auto docs = testing::biased_gender_corpus({.n_docs = 200});
  const TrainedModel model = train(texts_of(docs), labels_of(docs), ModelKind::kLogReg, {}, {}, 1);
  const std::string before = model.to_json();
  run_audit(model, docs, lex(), PipelineConfig{}, 4);
  EXPECT_EQ(model.to_json(), before);
}

TEST(Mitigate, ZeroFlipsMeansZeroIncrement) {
  // No document mentions a sensitive word, so nothing is augmented.
  std::vector<Document> train_docs, test_docs;
  for (int i = 0; i < 40; ++i) {
    train_docs.push_back(Document{"t" + std::to_string(i), i % 2 ? "great film" : "dull film", i % 2});
    test_docs.push_back(Document{"s" + std::to_string(i), i % 2 ? "great plot" : "dull plot", i % 2});
  }
  MitigationConfig mc;
  mc.seed = 5;
  const auto out = mitigate(train_docs, test_docs, lex(), mc);
  EXPECT_EQ(out.report.n_augmented, 0u);
  EXPECT_EQ(out.report.fr_pre_pct, 0.0);
  EXPECT_EQ(out.report.fr_post_pct, 0.0);
  EXPECT_TRUE(out.report.cfi.undefined);
  EXPECT_THROW(mitigate({}, test_docs, lex(), mc), DataError);
}

TEST(Mitigate, BiasedFixtureImproves) {
  const auto docs = testing::biased_gender_corpus({.n_docs = 600, .seed = 9});
  const auto [train_docs, test_docs] = split_corpus(docs, 0.8, 9);
  MitigationConfig mc;
  mc.seed = 9;
  mc.pipeline.gen.seed = 9;
  const auto out = mitigate(train_docs, test_docs, lex(), mc);
  const auto& r = out.report;
  EXPECT_GT(r.fr_pre_pct, 0.0);
  EXPECT_LT(r.fr_post_pct, r.fr_pre_pct);
  EXPECT_GT(r.cfi.value, 0.0);
  EXPECT_LE(r.single_fr_post_pct, r.single_fr_pre_pct);
  EXPECT_GE(r.fr_pre_pct, r.single_fr_pre_pct);
  EXPECT_GT(r.n_augmented, 0u);
  EXPECT_EQ(r.n_train + r.n_test, docs.size());
  EXPECT_NE(out.original.to_json(), out.retrained.to_json());
}

TEST(Mitigate, AttributeSpecificAuditsOnlyMentioningDocs) {
  const auto docs = testing::biased_gender_corpus({.n_docs = 400, .seed = 2});
  const auto [train_docs, test_docs] = split_corpus(docs, 0.8, 2);
  MitigationConfig mc;
  mc.pipeline.gen.attribute_filter = AttributeSet::only(SensitiveAttribute::kReligion);
  const auto out = mitigate(train_docs, test_docs, lex(), mc);
  EXPECT_GT(out.report.n_test_audited, 0u);
  EXPECT_LT(out.report.n_test_audited, out.report.n_test);
}

TEST(Policies, ParseNames) {
  EXPECT_EQ(parse_augment_policy("all"), AugmentPolicy::kAll);
  EXPECT_EQ(parse_label_policy("predicted"), LabelPolicy::kPredicted);
  EXPECT_EQ(parse_explainer("lime"), ExplainerKind::kLocalLinear);
  EXPECT_THROW(parse_augment_policy("some"), UsageError);
  EXPECT_THROW(parse_explainer("shap"), UsageError);
  PipelineConfig pc;
  pc.explainer = ExplainerKind::kAnchor;
  EXPECT_THROW(make_generator(lex(), pc), UsageError);
}

}  // namespace
}  // namespace cfaudit
