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

#include <cmath>

#include "cfaudit/common.h"
#include "cfaudit/models.h"
#include "cfaudit/text.h"

namespace cfaudit {

std::string_view feature_method_name(FeatureMethod m) {
  return m == FeatureMethod::kHashedBow ? "hashed-bow" : "hashed-embedding";
}

FeatureMethod parse_feature_method(std::string_view name) {
  if (name == "hashed-bow" || name == "bow") return FeatureMethod::kHashedBow;
  if (name == "hashed-embedding" || name == "embedding") return FeatureMethod::kHashedEmbedding;
  throw UsageError("unknown feature method '" + std::string(name) + "'");
}

void validate(const FeatureConfig& cfg) {
  if (cfg.dim < 2) throw UsageError("feature dim must be at least 2");
}

Eigen::VectorXd featurize(std::string_view text, const FeatureConfig& cfg) {
  validate(cfg);
  const auto d = static_cast<Eigen::Index>(cfg.dim);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
  std::size_t n_words = 0;
  for (const Token& t : tokenize(text)) {
    if (!t.is_word) continue;
    ++n_words;
    const std::uint64_t h = mix64(fnv1a64(to_lower(t.text)) ^ mix64(cfg.hash_seed));
    if (cfg.method == FeatureMethod::kHashedBow) {
      const double sign = (h >> 63) ? -1.0 : 1.0;
      v[static_cast<Eigen::Index>(h % cfg.dim)] += sign;
    } else {
      Rng rng(h);
      Eigen::VectorXd e(d);
      for (Eigen::Index i = 0; i < d; ++i) e[i] = rng.normal();
      const double norm = e.norm();
      if (norm > 0) v += e / norm;
    }
  }
  if (n_words == 0) return v;
  if (cfg.method == FeatureMethod::kHashedBow) {
    const double norm = v.norm();
    if (norm > 0) v /= norm;
  } else {
    v /= static_cast<double>(n_words);
  }
  return v;
}

Eigen::MatrixXd featurize_all(const std::vector<std::string>& texts, const FeatureConfig& cfg,
                              std::size_t workers) {
  validate(cfg);
  Eigen::MatrixXd X(static_cast<Eigen::Index>(texts.size()), static_cast<Eigen::Index>(cfg.dim));
  parallel_for(texts.size(), workers, [&](std::size_t i) {
    X.row(static_cast<Eigen::Index>(i)) = featurize(texts[i], cfg).transpose();
  });
  return X;
}

}  // namespace cfaudit
