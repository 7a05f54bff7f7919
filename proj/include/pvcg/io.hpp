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

#ifndef PVCG_IO_HPP_
#define PVCG_IO_HPP_

#include <filesystem>
#include <string>

#include "json.hpp"
#include "pvcg/model.hpp"

namespace pvcg {

// Economy documents:
//   {
//     "n": 2, "m": 1,
//     "capacities": [1.0, 1.0],            // or [[1.0, 0.5], ...] when dim > 1
//     "cost_types": [0.1, 10.0],
//     "valuation_types": [1.0],
//     "valuation_family": {"tag": "sqrt_sum", "scale": 2},   // scale defaults to n
//     "cost_family": {"tag": "linear", "weights": [1.0]}     // weights optional
//   }
// Bid profiles use "reported_capacities", "reported_cost_types" and
// "reported_valuation_types" (the last defaults to the truth).

nlohmann::json quantities_to_json(const Quantities& q);
Quantities quantities_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TypeProfile& types);
nlohmann::json to_json(const ValuationFamily& family);
nlohmann::json to_json(const CostFamily& family);

/// Custom families cannot be read from a document; they are supplied in code.
ValuationFamily valuation_family_from_json(const nlohmann::json& j,
                                           std::size_t producers);
CostFamily cost_family_from_json(const nlohmann::json& j);

nlohmann::json economy_to_json(const Economy& economy);
Economy economy_from_json(const nlohmann::json& j);

nlohmann::json bids_to_json(const BidProfile& bids);
BidProfile bids_from_json(const nlohmann::json& j, const Economy& economy);

nlohmann::json read_json_file(const std::filesystem::path& path);
/// Two-space indented JSON with a trailing newline.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace pvcg

#endif  // PVCG_IO_HPP_
