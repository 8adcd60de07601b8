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

#include "cfaudit/cli.h"

#include <charconv>
#include <cstdlib>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "cfaudit/common.h"
#include "cfaudit/corpus.h"
#include "cfaudit/explain.h"
#include "cfaudit/report.h"

namespace cfaudit {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::uint64_t parse_seed(std::string_view s, std::string_view what) {
  std::uint64_t v = 0;
  const auto t = trim(s);
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw UsageError(std::string(what) + " must be an unsigned 64-bit integer, got '" +
                     std::string(s) + "'");
  }
  return v;
}

// Raw option values; resolved into RunConfig after parsing.
struct Options {
  std::string seed;
  std::string mode = "multi";
  std::string attributes = "all";
  std::string explainer = "none";
  std::string model = "logreg";
  std::string features = "hashed-bow";
  std::string format;
  std::size_t dim = 32;
  std::size_t max_cf = 256;
  std::size_t max_groups = 8;
  std::string augment = "flipped";
  std::string label = "gold";
  double split = 0.8;
  std::size_t top_k = 5;
  std::size_t samples = 0;  // 0: explainer default
  std::size_t workers = 1;
  bool per_attribute = false;
  std::string save_models;
  RunConfig rc;
};

Lexicon load_lexicon_from(const RunConfig& rc) {
  Lexicon lex = fs::is_directory(rc.lexicon) ? load_lexicon_dir(rc.lexicon) : load_lexicon(rc.lexicon);
  if (!rc.coherence.empty() && rc.coherence != "none") load_coherence_file(lex, rc.coherence);
  return lex;
}

std::vector<Document> load_corpus(const Options& o, bool require_label) {
  if (o.rc.corpus.empty()) throw UsageError("--corpus is required");
  if (o.format.empty()) return ingest_corpus(o.rc.corpus, require_label);
  if (o.format == "jsonl") return ingest_corpus(o.rc.corpus, CorpusFormat::kJsonl, require_label);
  if (o.format == "csv") return ingest_corpus(o.rc.corpus, CorpusFormat::kCsv, require_label);
  throw UsageError("--format must be jsonl or csv");
}

void emit(const RunConfig& rc, const std::string& content, std::ostream& out) {
  if (rc.output.empty()) {
    out << content;
  } else {
    write_file_atomic(rc.output, content);
  }
}

PipelineConfig pipeline_for(const RunConfig& rc, const std::vector<Document>& docs,
                            const AntonymLexicon* antonyms, std::size_t samples,
                            std::ostream& err) {
  PipelineConfig p;
  p.gen.attribute_filter = rc.attributes;
  p.gen.mode = rc.mode;
  p.gen.max_counterfactuals_per_doc = rc.max_cf;
  p.gen.max_groups_per_clause = rc.max_groups;
  p.gen.seed = rc.seed;
  validate(p.gen);
  p.explainer = rc.explainer;
  p.antonyms = antonyms;
  p.local_linear.top_k = rc.top_k;
  if (samples > 0) {
    p.local_linear.n_samples = samples;
    p.anchor.n_samples = samples;
  }
  if (rc.explainer == ExplainerKind::kAnchor) p.vocabulary = corpus_vocabulary(texts_of(docs));
  if (!rc.conllu_dir.empty()) {
    if (!fs::is_directory(rc.conllu_dir)) {
      throw DataError("--conllu-dir " + rc.conllu_dir + " is not a directory");
    }
    for (const auto& d : docs) {
      const fs::path path = fs::path(rc.conllu_dir) / (d.id + ".conllu");
      if (fs::exists(path)) {
        p.conllu.emplace(d.id, read_file(path));
      } else {
        err << "advisory: no parse " << path.string() << "; using heuristic clauses for '" << d.id
            << "'\n";
      }
    }
  }
  return p;
}

TrainedModel obtain_model(const RunConfig& rc, const std::vector<Document>& train_docs,
                          std::size_t workers) {
  if (!rc.model_file.empty()) return load_model(rc.model_file);
  return train(texts_of(train_docs), labels_of(train_docs), rc.model, rc.features, TrainParams{},
               rc.seed, workers);
}

int cmd_lexicon_validate(const RunConfig& rc, std::ostream& out) {
  const Lexicon lex = load_lexicon_from(rc);
  const ValidationReport report = validate_lexicon(lex);
  for (SensitiveAttribute a : kAllAttributes) {
    out << attribute_name(a) << "\t" << lex.count(a) << "\n";
  }
  for (const auto& e : report.errors) out << "error: " << e << "\n";
  for (const auto& a : report.advisories) out << "advisory: " << a << "\n";
  out << report.errors.size() << " errors, " << report.advisories.size() << " advisories\n";
  return report.ok() ? 0 : 2;
}

int cmd_generate(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig& rc = o.rc;
  const auto docs = load_corpus(o, false);
  const Lexicon lex = load_lexicon_from(rc);
  std::optional<AntonymLexicon> antonyms;
  std::optional<TrainedModel> model;
  if (rc.explainer != ExplainerKind::kNone) {
    if (rc.model_file.empty()) throw UsageError("--explainer needs --model-file for generate");
    antonyms = load_antonyms(rc.antonyms);
    model = load_model(rc.model_file);
  }
  const auto gen =
      make_generator(lex, pipeline_for(rc, docs, antonyms ? &*antonyms : nullptr, o.samples, err));

  // Explainability-free generation never queries the model.
  const TrainedModel placeholder(ModelKind::kLogReg, FeatureConfig{},
                                 LogRegParams{Eigen::VectorXd::Zero(32), 0.0}, 0);
  const Classifier& clf = model ? static_cast<const Classifier&>(*model) : placeholder;

  std::vector<GenerationResult> results(docs.size());
  parallel_for(docs.size(), o.workers, [&](std::size_t i) { results[i] = gen(docs[i], clf); });

  std::string content = json{{"run_config", run_config_json(rc)}}.dump() + "\n";
  std::size_t n = 0;
  for (const auto& r : results) {
    for (const auto& a : r.advisories) err << "advisory: " << a << "\n";
    for (const auto& cf : r.counterfactuals) {
      content += counterfactual_json(cf).dump() + "\n";
      ++n;
    }
  }
  emit(rc, content, out);
  if (!rc.output.empty()) {
    out << n << " counterfactuals from " << docs.size() << " documents written to " << rc.output
        << "\n";
  }
  return 0;
}

int cmd_train(const Options& o, std::ostream& out) {
  const RunConfig& rc = o.rc;
  if (rc.output.empty()) throw UsageError("--out is required for train");
  const auto docs = load_corpus(o, true);
  const TrainedModel model = train(texts_of(docs), labels_of(docs), rc.model, rc.features,
                                   TrainParams{}, rc.seed, o.workers);
  save_model(model, rc.output);
  out << model_kind_name(rc.model) << " trained on " << docs.size()
      << " documents, training accuracy "
      << fixed2(100.0 * evaluate(model, texts_of(docs), labels_of(docs), o.workers)) << "%\n";
  return 0;
}

int cmd_audit(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig& rc = o.rc;
  const bool trained_here = rc.model_file.empty();
  const auto docs = load_corpus(o, trained_here);
  std::vector<Document> audited = docs;
  std::optional<TrainedModel> model;
  if (trained_here) {
    auto [train_docs, test_docs] = split_corpus(docs, rc.split, rc.seed);
    model = obtain_model(rc, train_docs, o.workers);
    audited = std::move(test_docs);
  } else {
    model = load_model(rc.model_file);
  }
  const Lexicon lex = load_lexicon_from(rc);
  std::optional<AntonymLexicon> antonyms;
  if (rc.explainer != ExplainerKind::kNone) antonyms = load_antonyms(rc.antonyms);
  const auto pipeline =
      pipeline_for(rc, audited, antonyms ? &*antonyms : nullptr, o.samples, err);
  const AuditReport report = run_audit(*model, audited, lex, pipeline, o.workers);

  json j = {{"run_config", run_config_json(rc)}, {"audit", audit_json(report)}};
  if (trained_here) j["test_accuracy"] = evaluate(*model, texts_of(audited), labels_of(audited));
  emit(rc, j.dump(2) + "\n", out);
  if (!rc.output.empty()) out << audit_table(report);
  return 0;
}

int cmd_mitigate(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig& rc = o.rc;
  const auto docs = load_corpus(o, true);
  auto [train_docs, test_docs] = split_corpus(docs, rc.split, rc.seed);
  const Lexicon lex = load_lexicon_from(rc);
  std::optional<AntonymLexicon> antonyms;
  if (rc.explainer != ExplainerKind::kNone) antonyms = load_antonyms(rc.antonyms);

  MitigationConfig mc;
  mc.kind = rc.model;
  mc.features = rc.features;
  mc.seed = rc.seed;
  mc.augment = rc.augment;
  mc.label = rc.label;
  mc.workers = o.workers;
  mc.pipeline = pipeline_for(rc, docs, antonyms ? &*antonyms : nullptr, o.samples, err);

  std::vector<MitigationRow> rows;
  json per = json::object();
  if (o.per_attribute) {
    for (SensitiveAttribute a : rc.attributes.members()) {
      MitigationConfig one = mc;
      one.pipeline.gen.attribute_filter = AttributeSet::only(a);
      const auto outcome = mitigate(train_docs, test_docs, lex, one);
      rows.push_back({std::string(attribute_name(a)), rc.mode, outcome.report});
      per[std::string(attribute_name(a))] = mitigation_json(outcome.report);
    }
  }
  const auto outcome = mitigate(train_docs, test_docs, lex, mc);
  rows.push_back({rc.attributes.to_string(), rc.mode, outcome.report});
  if (!o.save_models.empty()) {
    fs::create_directories(o.save_models);
    save_model(outcome.original, fs::path(o.save_models) / "original.json");
    save_model(outcome.retrained, fs::path(o.save_models) / "retrained.json");
  }

  json j = {{"run_config", run_config_json(rc)}, {"mitigation", mitigation_json(outcome.report)}};
  if (o.per_attribute) j["per_attribute"] = per;
  emit(rc, j.dump(2) + "\n", out);
  if (!rc.output.empty()) out << mitigation_table(rows);
  return 0;
}

int cmd_explain(const Options& o, std::ostream& out) {
  const RunConfig& rc = o.rc;
  if (rc.explainer == ExplainerKind::kNone) throw UsageError("explain needs --explainer");
  const bool trained_here = rc.model_file.empty();
  const auto docs = load_corpus(o, trained_here);
  const TrainedModel model = obtain_model(rc, docs, o.workers);
  const auto vocabulary =
      rc.explainer == ExplainerKind::kAnchor ? corpus_vocabulary(texts_of(docs))
                                             : std::vector<std::string>{};

  std::vector<json> lines(docs.size());
  parallel_for(docs.size(), o.workers, [&](std::size_t i) {
    const Document& d = docs[i];
    const auto tokens = tokenize(d.text);
    const std::uint64_t seed = document_seed(rc.seed, d.id);
    json j = {{"id", d.id}, {"explainer", std::string(explainer_name(rc.explainer))},
              {"prediction", model.predict(d.text)}};
    std::size_t words = 0;
    for (const auto& t : tokens) words += t.is_word ? 1 : 0;
    if (rc.explainer == ExplainerKind::kLocalLinear) {
      if (words < 2) {
        j["skipped"] = "fewer than two words";
      } else {
        LocalLinearConfig c;
        c.top_k = rc.top_k;
        c.seed = seed;
        if (o.samples > 0) c.n_samples = o.samples;
        const auto ex = explain_local_linear(model, d.text, c);
        json ws = json::array();
        for (const auto& tw : ex.weights) {
          ws.push_back({{"index", tw.token_index},
                        {"token", tokens[tw.token_index].text},
                        {"weight", tw.weight}});
        }
        j["weights"] = std::move(ws);
        j["intercept"] = ex.intercept;
      }
    } else {
      if (words == 0) {
        j["skipped"] = "no words";
      } else {
        AnchorConfig c;
        c.seed = seed;
        if (o.samples > 0) c.n_samples = o.samples;
        const auto a = explain_anchor(model, d.text, vocabulary, c);
        json toks = json::array();
        for (std::size_t idx : a.token_indices) {
          toks.push_back({{"index", idx}, {"token", tokens[idx].text}});
        }
        j["anchor"] = std::move(toks);
        j["precision"] = a.precision;
        j["samples_used"] = a.samples_used;
        j["below_threshold"] = a.below_threshold;
      }
    }
    lines[i] = std::move(j);
  });
  std::string content = json{{"run_config", run_config_json(rc)}}.dump() + "\n";
  for (const auto& l : lines) content += l.dump() + "\n";
  emit(rc, content, out);
  return 0;
}

}  // namespace

json run_config_json(const RunConfig& c) {
  return {{"command", c.command},
          {"seed", c.seed},
          {"mode", std::string(gen_mode_name(c.mode))},
          {"attributes", c.attributes.to_string()},
          {"explainer", std::string(explainer_name(c.explainer))},
          {"model", std::string(model_kind_name(c.model))},
          {"features",
           {{"method", std::string(feature_method_name(c.features.method))},
            {"dim", c.features.dim},
            {"hash_seed", c.features.hash_seed}}},
          {"max_cf", c.max_cf},
          {"max_groups", c.max_groups},
          {"augment", std::string(augment_policy_name(c.augment))},
          {"label", std::string(label_policy_name(c.label))},
          {"split", c.split},
          {"top_k", c.top_k},
          {"paths",
           {{"corpus", c.corpus},
            {"lexicon", c.lexicon},
            {"antonyms", c.antonyms},
            {"coherence", c.coherence},
            {"conllu_dir", c.conllu_dir},
            {"model_file", c.model_file},
            {"output", c.output}}}};
}

std::optional<std::uint64_t> seed_from_env() {
  const char* v = std::getenv("CFAUDIT_SEED");
  if (!v || !*v) return std::nullopt;
  return parse_seed(v, "CFAUDIT_SEED");
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Counterfactual fairness auditing for binary text classifiers", "cfaudit"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Random seed (falls back to CFAUDIT_SEED, then 0)");
    sub->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", o.rc.output, "Output file (default: standard output)");
  };
  auto add_corpus = [&](CLI::App* sub) {
    sub->add_option("--corpus", o.rc.corpus, "Corpus file (.jsonl or .csv)")->required();
    sub->add_option("--format", o.format, "Corpus format: jsonl or csv");
  };
  auto add_resources = [&](CLI::App* sub) {
    sub->add_option("--lexicon", o.rc.lexicon, "Lexicon TSV file or directory");
    sub->add_option("--coherence", o.rc.coherence, "Religion coherence TSV, or 'none'");
  };
  auto add_generation = [&](CLI::App* sub) {
    add_resources(sub);
    sub->add_option("--mode", o.mode, "single or multi");
    sub->add_option("--attributes", o.attributes, "Comma-separated attributes or 'all'");
    sub->add_option("--max-cf", o.max_cf, "Counterfactual cap per document");
    sub->add_option("--max-groups", o.max_groups, "Group cap per clause before degrading");
    sub->add_option("--conllu-dir", o.rc.conllu_dir, "Directory of <id>.conllu parses");
    sub->add_option("--explainer", o.explainer, "none, local-linear or anchor");
    sub->add_option("--antonyms", o.rc.antonyms, "Antonym TSV for explainability tokens");
    sub->add_option("--top-k", o.top_k, "Explainability tokens per document");
    sub->add_option("--samples", o.samples, "Explainer sample count");
  };
  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model", o.model, "logreg, gnb or mlp");
    sub->add_option("--features", o.features, "hashed-bow or hashed-embedding");
    sub->add_option("--dim", o.dim, "Feature dimension");
  };

  auto* lexicon = app.add_subcommand("lexicon", "Lexicon utilities");
  lexicon->require_subcommand(1);
  auto* validate_cmd = lexicon->add_subcommand("validate", "Validate the lexicon");
  add_resources(validate_cmd);

  auto* generate = app.add_subcommand("generate", "Write counterfactuals as JSONL");
  add_common(generate);
  add_corpus(generate);
  add_generation(generate);
  generate->add_option("--model-file", o.rc.model_file, "Saved model (explainer runs only)");

  auto* train_cmd = app.add_subcommand("train", "Train and save a model");
  add_common(train_cmd);
  add_corpus(train_cmd);
  add_model(train_cmd);

  auto* audit = app.add_subcommand("audit", "Flip-rate report");
  add_common(audit);
  add_corpus(audit);
  add_generation(audit);
  add_model(audit);
  audit->add_option("--model-file", o.rc.model_file, "Audit this saved model on the whole corpus");
  audit->add_option("--split", o.split, "Train fraction when training here");

  auto* mitigate_cmd = app.add_subcommand("mitigate", "Augmentation retraining report");
  add_common(mitigate_cmd);
  add_corpus(mitigate_cmd);
  add_generation(mitigate_cmd);
  add_model(mitigate_cmd);
  mitigate_cmd->add_option("--split", o.split, "Train fraction");
  mitigate_cmd->add_option("--augment", o.augment, "flipped or all");
  mitigate_cmd->add_option("--label", o.label, "gold or predicted");
  mitigate_cmd->add_flag("--per-attribute", o.per_attribute, "Add one row per attribute");
  mitigate_cmd->add_option("--save-models", o.save_models, "Directory for both models");

  auto* explain = app.add_subcommand("explain", "Per-document explanations as JSONL");
  add_common(explain);
  add_corpus(explain);
  add_model(explain);
  explain->add_option("--model-file", o.rc.model_file, "Saved model (default: train on corpus)");
  explain->add_option("--explainer", o.explainer, "local-linear or anchor");
  explain->add_option("--top-k", o.top_k, "Tokens per explanation");
  explain->add_option("--samples", o.samples, "Sample count");

  std::vector<std::string> argv_store{"cfaudit"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    RunConfig& rc = o.rc;
    for (const auto* sub : app.get_subcommands()) rc.command = sub->get_name();
    if (rc.command == "lexicon") rc.command = "lexicon validate";
    if (!o.seed.empty()) {
      rc.seed = parse_seed(o.seed, "--seed");
    } else if (auto env = seed_from_env()) {
      rc.seed = *env;
    }
    rc.mode = parse_gen_mode(o.mode);
    try {
      rc.attributes = AttributeSet::parse(o.attributes);
    } catch (const DataError& e) {
      throw UsageError(e.what());
    }
    if (rc.attributes.empty()) throw UsageError("--attributes selects nothing");
    rc.explainer = parse_explainer(o.explainer);
    rc.model = parse_model_kind(o.model);
    rc.features.method = parse_feature_method(o.features);
    rc.features.dim = o.dim;
    validate(rc.features);
    rc.max_cf = o.max_cf;
    rc.max_groups = o.max_groups;
    rc.augment = parse_augment_policy(o.augment);
    rc.label = parse_label_policy(o.label);
    if (!(o.split > 0.0 && o.split < 1.0)) throw UsageError("--split must be in (0, 1)");
    rc.split = o.split;
    rc.top_k = o.top_k;
    if (rc.top_k < 1) throw UsageError("--top-k must be at least 1");
    const fs::path data = default_data_dir();
    if (rc.lexicon.empty()) rc.lexicon = (data / "lexicon").string();
    if (rc.coherence.empty()) rc.coherence = (data / "religion_coherence.tsv").string();
    if (rc.antonyms.empty()) rc.antonyms = (data / "antonyms.tsv").string();

    if (rc.command == "lexicon validate") return cmd_lexicon_validate(rc, out);
    if (rc.command == "generate") return cmd_generate(o, out, err);
    if (rc.command == "train") return cmd_train(o, out);
    if (rc.command == "audit") return cmd_audit(o, out, err);
    if (rc.command == "mitigate") return cmd_mitigate(o, out, err);
    if (rc.command == "explain") return cmd_explain(o, out);
    throw UsageError("unknown command");
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace cfaudit
