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

#ifndef PVCG_REPORT_HPP_
#define PVCG_REPORT_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"

namespace pvcg {

struct Witness {
  nlohmann::json instance;
  double gap = 0.0;
};

/// Outcome of a sampled check. pass is true exactly when no violation was
/// recorded at the check's tolerance.
struct ProbeReport {
  std::string name;
  std::size_t trials = 0;
  std::vector<Witness> violations;
  double max_gap = 0.0;  // largest gap observed, violating or not
  bool observed = false;
  bool pass = true;
  nlohmann::json details = nlohmann::json::object();

  void observe(double gap) {
    if (!observed || gap > max_gap) max_gap = gap;
    observed = true;
  }
  void violate(nlohmann::json instance, double gap) {
    violations.push_back({std::move(instance), gap});
    pass = false;
  }
  /// Appends another report's trials and witnesses (parallel merge).
  void merge(const ProbeReport& other);
};

/// Serializes at most kMaxWitnesses witnesses; violation_count is complete.
constexpr std::size_t kMaxWitnesses = 20;

nlohmann::json to_json(const ProbeReport& report);

}  // namespace pvcg

#endif  // PVCG_REPORT_HPP_
