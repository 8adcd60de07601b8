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

#ifndef CFAUDIT_REPORT_H_
#define CFAUDIT_REPORT_H_

#include <string>
#include <string_view>
#include <vector>

#include "cfaudit/audit.h"
#include "cfaudit/cfgen.h"
#include "json.hpp"

namespace cfaudit {

// {parent_id, text, flipped_attributes, substitutions: [{start, end, from, to}]}
nlohmann::json counterfactual_json(const Counterfactual& cf);

nlohmann::json flip_rate_json(const FlipRateResult& r, bool include_flips);
nlohmann::json audit_json(const AuditReport& report);
nlohmann::json mitigation_json(const MitigationReport& report);

// Aligned plain-text tables.
std::string audit_table(const AuditReport& report);

struct MitigationRow {
  std::string label;  // attribute name or "all"
  GenMode mode = GenMode::kMulti;
  MitigationReport report;
};
// Columns: attribute, mode, fr pre, fr post, AD, CFI, then the single-token
// flip-rates before and after retraining.
std::string mitigation_table(const std::vector<MitigationRow>& rows);

// Fixed two-decimal rendering used by the tables.
std::string fixed2(double v);

}  // namespace cfaudit

#endif  // CFAUDIT_REPORT_H_
