// Copyright 2026 The pvcg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pvcg/report.hpp"

#include <algorithm>

namespace pvcg {

void ProbeReport::merge(const ProbeReport& other) {
  trials += other.trials;
  if (other.observed) observe(other.max_gap);
  for (const auto& w : other.violations) violate(w.instance, w.gap);
}

nlohmann::json to_json(const ProbeReport& report) {
  nlohmann::json j;
  j["name"] = report.name;
  j["trials"] = report.trials;
  j["pass"] = report.pass;
  j["max_gap"] = report.observed ? nlohmann::json(report.max_gap) : nlohmann::json();
  j["violation_count"] = report.violations.size();
  j["violations"] = nlohmann::json::array();
  const std::size_t shown = std::min(report.violations.size(), kMaxWitnesses);
  for (std::size_t k = 0; k < shown; ++k)
    j["violations"].push_back(
        {{"gap", report.violations[k].gap}, {"instance", report.violations[k].instance}});
  if (!report.details.empty()) j["details"] = report.details;
  return j;
}

}  // namespace pvcg
