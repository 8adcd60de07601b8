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

#include "cfaudit/report.h"

#include <algorithm>
#include <cstdio>

namespace cfaudit {
namespace {

using nlohmann::json;

// Left-aligned first column, right-aligned numbers.
std::string render(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    width.resize(std::max(width.size(), r.size()), 0);
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  std::string out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c > 0) line += "  ";
      const std::string pad(width[c] - r[c].size(), ' ');
      line += c < 2 ? r[c] + pad : pad + r[c];
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  return out;
}

}  // namespace

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  std::string s(buf);
  return s == "-0.00" ? "0.00" : s;
}

json counterfactual_json(const Counterfactual& cf) {
  json subs = json::array();
  for (const auto& s : cf.substitutions) {
    subs.push_back({{"start", s.start}, {"end", s.end}, {"from", s.original}, {"to", s.replacement}});
  }
  return {{"parent_id", cf.parent_doc_id},
          {"text", cf.text},
          {"flipped_attributes", cf.flipped_attributes},
          {"substitutions", subs}};
}

json flip_rate_json(const FlipRateResult& r, bool include_flips) {
  json j = {{"flip_rate_pct", r.flip_rate_pct},
            {"conditional_flip_rate_pct", r.conditional_flip_rate_pct},
            {"n_docs", r.n_docs},
            {"n_docs_with_hits", r.n_docs_with_hits},
            {"n_docs_with_counterfactuals", r.n_docs_with_cf},
            {"n_docs_flipped", r.n_docs_flipped},
            {"n_counterfactuals", r.n_counterfactuals}};
  if (include_flips) {
    json flips = json::array();
    for (const auto& f : r.flips) {
      flips.push_back({{"doc_id", f.doc_id},
                       {"counterfactual", f.cf_text},
                       {"orig_pred", f.orig_pred},
                       {"cf_pred", f.cf_pred},
                       {"flipped_attributes", f.flipped_attributes}});
    }
    j["flips"] = std::move(flips);
  }
  return j;
}

json audit_json(const AuditReport& report) {
  json per = json::object();
  for (const auto& a : report.per_attribute) {
    json j = flip_rate_json(a.result, false);
    j["filtered_flip_rate_pct"] = a.filtered_rate_pct;
    per[std::string(attribute_name(a.attribute))] = std::move(j);
  }
  return {{"overall", flip_rate_json(report.overall, true)}, {"per_attribute", per}};
}

json mitigation_json(const MitigationReport& r) {
  return {{"fr_pre_pct", r.fr_pre_pct},
          {"fr_post_pct", r.fr_post_pct},
          {"cfi_pct", r.cfi.value},
          {"cfi_undefined", r.cfi.undefined},
          {"acc_pre", r.acc_pre},
          {"acc_post", r.acc_post},
          {"ad_points", r.ad_points},
          {"n_augmented", r.n_augmented},
          {"n_train", r.n_train},
          {"n_test", r.n_test},
          {"n_test_audited", r.n_test_audited},
          {"single_token_fr_pre_pct", r.single_fr_pre_pct},
          {"single_token_fr_post_pct", r.single_fr_post_pct}};
}

std::string audit_table(const AuditReport& report) {
  std::vector<std::vector<std::string>> rows = {
      {"attribute", "docs", "with hits", "flipped", "fr %", "fr % (attribute docs)"}};
  for (const auto& a : report.per_attribute) {
    rows.push_back({std::string(attribute_name(a.attribute)), std::to_string(a.result.n_docs),
                    std::to_string(a.result.n_docs_with_hits),
                    std::to_string(a.result.n_docs_flipped), fixed2(a.result.flip_rate_pct),
                    fixed2(a.filtered_rate_pct)});
  }
  const auto& o = report.overall;
  const double with_hits =
      o.n_docs_with_hits == 0
          ? 0.0
          : 100.0 * static_cast<double>(o.n_docs_flipped) / static_cast<double>(o.n_docs_with_hits);
  rows.push_back({"overall", std::to_string(o.n_docs), std::to_string(o.n_docs_with_hits),
                  std::to_string(o.n_docs_flipped), fixed2(o.flip_rate_pct), fixed2(with_hits)});
  return render(rows);
}

std::string mitigation_table(const std::vector<MitigationRow>& rows) {
  std::vector<std::vector<std::string>> cells = {{"attribute", "mode", "fr pre %", "fr post %",
                                                  "AD (pts)", "CFI %", "single fr pre %",
                                                  "single fr post %"}};
  for (const auto& row : rows) {
    const auto& r = row.report;
    cells.push_back({row.label, std::string(gen_mode_name(row.mode)), fixed2(r.fr_pre_pct),
                     fixed2(r.fr_post_pct), fixed2(r.ad_points),
                     r.cfi.undefined ? "n/a" : fixed2(r.cfi.value), fixed2(r.single_fr_pre_pct),
                     fixed2(r.single_fr_post_pct)});
  }
  return render(cells);
}

}  // namespace cfaudit
