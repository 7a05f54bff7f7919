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

#include "pvcg/prior.hpp"

#include <cmath>
#include <stdexcept>

namespace pvcg {

Distribution parse_distribution(const std::string& tag) {
  if (tag == "uniform") return Distribution::uniform;
  throw std::invalid_argument("unsupported distribution: " + tag);
}

PriorSupport PriorSupport::uniform(std::size_t producers, std::size_t consumers,
                                   ParameterPrior capacity, ParameterPrior cost_type,
                                   ParameterPrior valuation_type, std::size_t dim) {
  PriorSupport s;
  s.dim = dim;
  s.capacity.assign(producers, capacity);
  s.cost_type.assign(producers, cost_type);
  s.valuation_type.assign(consumers, valuation_type);
  s.validate();
  return s;
}

namespace {

void check(const ParameterPrior& p, const char* what) {
  if (!std::isfinite(p.lo) || !std::isfinite(p.hi))
    throw std::invalid_argument(std::string(what) + " prior must have finite bounds");
  if (p.lo > p.hi) throw std::invalid_argument(std::string(what) + " prior has lo > hi");
  if (p.lo < 0.0) throw std::invalid_argument(std::string(what) + " prior must be >= 0");
}

nlohmann::json prior_json(const ParameterPrior& p) {
  return {{"distribution", "uniform"}, {"lo", p.lo}, {"hi", p.hi}};
}

ParameterPrior parse_one(const nlohmann::json& j) {
  ParameterPrior p;
  p.distribution = parse_distribution(j.value("distribution", std::string("uniform")));
  p.lo = j.at("lo").get<double>();
  p.hi = j.at("hi").get<double>();
  return p;
}

std::vector<ParameterPrior> parse_list(const nlohmann::json& j, std::size_t count,
                                       const char* what) {
  if (j.is_array()) {
    if (j.size() != count)
      throw std::invalid_argument(std::string(what) + " prior list has the wrong length");
    std::vector<ParameterPrior> out;
    for (const auto& e : j) out.push_back(parse_one(e));
    return out;
  }
  return std::vector<ParameterPrior>(count, parse_one(j));
}

}  // namespace

void PriorSupport::validate() const {
  if (cost_type.size() != capacity.size())
    throw std::invalid_argument("prior: capacity and cost-type lists differ in length");
  if (dim < 1) throw std::invalid_argument("prior: dim must be >= 1");
  for (const auto& p : capacity) check(p, "capacity");
  for (const auto& p : cost_type) check(p, "cost type");
  for (const auto& p : valuation_type) check(p, "valuation type");
}

TypeProfile sample_types(const PriorSupport& support, Rng& rng) {
  TypeProfile t;
  t.capacities = Quantities(support.producers(), support.dim);
  t.cost_types.resize(support.producers());
  t.valuation_types.resize(support.consumers());
  for (std::size_t i = 0; i < support.producers(); ++i) {
    for (double& v : t.capacities[i]) v = support.capacity[i].draw(rng);
    t.cost_types[i] = support.cost_type[i].draw(rng);
  }
  for (std::size_t j = 0; j < support.consumers(); ++j)
    t.valuation_types[j] = support.valuation_type[j].draw(rng);
  return t;
}

std::vector<TypeProfile> sample_prior(const PriorSupport& support, std::size_t count,
                                      std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("sample count must be >= 1");
  support.validate();
  std::vector<TypeProfile> out;
  out.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    Rng rng(derive_seed(seed, t));
    out.push_back(sample_types(support, rng));
  }
  return out;
}

nlohmann::json to_json(const PriorSupport& support) {
  nlohmann::json j;
  j["dim"] = support.dim;
  for (const auto& p : support.capacity) j["capacity"].push_back(prior_json(p));
  for (const auto& p : support.cost_type) j["cost_type"].push_back(prior_json(p));
  for (const auto& p : support.valuation_type) j["valuation_type"].push_back(prior_json(p));
  return j;
}

PriorSupport prior_from_json(const nlohmann::json& j, std::size_t producers,
                             std::size_t consumers, std::size_t dim) {
  PriorSupport s;
  s.dim = j.value("dim", dim);
  s.capacity = parse_list(j.at("capacity"), producers, "capacity");
  s.cost_type = parse_list(j.at("cost_type"), producers, "cost type");
  s.valuation_type = parse_list(j.at("valuation_type"), consumers, "valuation type");
  s.validate();
  return s;
}

}  // namespace pvcg
