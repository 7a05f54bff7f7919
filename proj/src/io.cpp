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

#include "pvcg/io.hpp"

#include <fstream>
#include <stdexcept>

namespace pvcg {

nlohmann::json quantities_to_json(const Quantities& q) {
  if (q.dim() == 1) return std::vector<double>(q.flat().begin(), q.flat().end());
  return q.rows();
}

Quantities quantities_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("capacities must be an array");
  if (j.empty()) return {};
  if (j.front().is_number()) return Quantities::scalars(j.get<std::vector<double>>());
  return Quantities::from_rows(j.get<std::vector<ResourceVector>>());
}

nlohmann::json to_json(const TypeProfile& types) {
  return {{"capacities", quantities_to_json(types.capacities)},
          {"cost_types", types.cost_types},
          {"valuation_types", types.valuation_types}};
}

nlohmann::json to_json(const ValuationFamily& family) {
  switch (family.tag) {
    case ValuationTag::sqrt_sum:
      return {{"tag", "sqrt_sum"}, {"scale", family.scale}};
    case ValuationTag::sqrt_sum_squares:
      return {{"tag", "sqrt_sum_squares"}, {"scale", family.scale}};
    case ValuationTag::custom:
      return {{"tag", "custom"}, {"name", family.name}};
  }
  return {};
}

nlohmann::json to_json(const CostFamily& family) {
  if (family.tag == CostTag::custom) return {{"tag", "custom"}, {"name", family.name}};
  nlohmann::json j = {{"tag", "linear"}};
  if (!family.weights.empty()) j["weights"] = family.weights;
  return j;
}

ValuationFamily valuation_family_from_json(const nlohmann::json& j,
                                           std::size_t producers) {
  const std::string tag = j.is_string() ? j.get<std::string>()
                                        : j.value("tag", std::string("sqrt_sum"));
  const double scale = j.is_object() ? j.value("scale", static_cast<double>(producers))
                                     : static_cast<double>(producers);
  if (tag == "sqrt_sum") return ValuationFamily::sqrt_sum(scale);
  if (tag == "sqrt_sum_squares") return ValuationFamily::sqrt_sum_squares(scale);
  if (tag == "custom")
    throw std::invalid_argument("custom valuation families must be supplied in code");
  throw std::invalid_argument("unknown valuation family: " + tag);
}

CostFamily cost_family_from_json(const nlohmann::json& j) {
  const std::string tag = j.is_string() ? j.get<std::string>()
                                        : j.value("tag", std::string("linear"));
  if (tag == "linear") {
    std::vector<double> weights;
    if (j.is_object() && j.contains("weights"))
      weights = j.at("weights").get<std::vector<double>>();
    return CostFamily::linear(std::move(weights));
  }
  if (tag == "custom")
    throw std::invalid_argument("custom cost families must be supplied in code");
  throw std::invalid_argument("unknown cost family: " + tag);
}

nlohmann::json economy_to_json(const Economy& economy) {
  nlohmann::json j = to_json(economy.types);
  j["n"] = economy.producers();
  j["m"] = economy.consumers();
  j["valuation_family"] = to_json(economy.families.valuation);
  j["cost_family"] = to_json(economy.families.cost);
  return j;
}

Economy economy_from_json(const nlohmann::json& j) {
  Economy e;
  e.types.capacities = quantities_from_json(j.at("capacities"));
  e.types.cost_types = j.at("cost_types").get<std::vector<double>>();
  e.types.valuation_types = j.at("valuation_types").get<std::vector<double>>();
  const std::size_t n = j.value("n", e.types.producers());
  const std::size_t m = j.value("m", e.types.consumers());
  if (n != e.types.producers() || n != e.types.cost_types.size())
    throw std::invalid_argument("economy: n does not match capacities/cost_types");
  if (m != e.types.consumers())
    throw std::invalid_argument("economy: m does not match valuation_types");
  e.families.valuation = valuation_family_from_json(
      j.value("valuation_family", nlohmann::json::object()), n);
  e.families.cost = cost_family_from_json(j.value("cost_family", nlohmann::json::object()));
  e.validate();
  return e;
}

nlohmann::json bids_to_json(const BidProfile& bids) {
  return {{"reported_capacities", quantities_to_json(bids.reported.capacities)},
          {"reported_cost_types", bids.reported.cost_types},
          {"reported_valuation_types", bids.reported.valuation_types}};
}

BidProfile bids_from_json(const nlohmann::json& j, const Economy& economy) {
  BidProfile b = BidProfile::truthful(economy);
  if (j.contains("reported_capacities"))
    b.reported.capacities = quantities_from_json(j.at("reported_capacities"));
  if (j.contains("reported_cost_types"))
    b.reported.cost_types = j.at("reported_cost_types").get<std::vector<double>>();
  if (j.contains("reported_valuation_types"))
    b.reported.valuation_types =
        j.at("reported_valuation_types").get<std::vector<double>>();
  apply_bids(economy, b);  // validates shape and signs
  return b;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return nlohmann::json::parse(in);
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace pvcg
