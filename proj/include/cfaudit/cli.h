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

#ifndef CFAUDIT_CLI_H_
#define CFAUDIT_CLI_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cfaudit/audit.h"
#include "cfaudit/lexicon.h"
#include "cfaudit/models.h"
#include "json.hpp"

namespace cfaudit {

// Fully resolved settings of one run. Echoed into every output; the worker
// count is left out because it never changes results.
struct RunConfig {
  std::string command;
  std::uint64_t seed = 0;
  GenMode mode = GenMode::kMulti;
  AttributeSet attributes = AttributeSet::all();
  ExplainerKind explainer = ExplainerKind::kNone;
  ModelKind model = ModelKind::kLogReg;
  FeatureConfig features;
  std::size_t max_cf = 256;
  std::size_t max_groups = 8;
  AugmentPolicy augment = AugmentPolicy::kFlipped;
  LabelPolicy label = LabelPolicy::kGold;
  double split = 0.8;
  std::size_t top_k = 5;
  std::string corpus;
  std::string lexicon;    // directory of *.tsv files or a single file
  std::string antonyms;
  std::string coherence;
  std::string conllu_dir;
  std::string model_file;
  std::string output;
};

nlohmann::json run_config_json(const RunConfig& config);

// Seed from the CFAUDIT_SEED environment variable, if set. Throws UsageError
// when it is not an unsigned integer.
std::optional<std::uint64_t> seed_from_env();

// Entry point behind the `cfaudit` binary. Returns 0 on success, 1 on a usage
// error, 2 on a data error; messages go to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cfaudit

#endif  // CFAUDIT_CLI_H_
