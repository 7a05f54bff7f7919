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

#ifndef PVCG_PRIOR_HPP_
#define PVCG_PRIOR_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "pvcg/model.hpp"
#include "pvcg/rng.hpp"

namespace pvcg {

enum class Distribution { uniform };

Distribution parse_distribution(const std::string& tag);

/// Prior of one scalar parameter. For a uniform prior the support extremes
/// are the interval endpoints; lo == hi is a point mass.
struct ParameterPrior {
  Distribution distribution = Distribution::uniform;
  double lo = 0.0;
  double hi = 0.0;

  double draw(Rng& rng) const { return rng.uniform(lo, hi); }
};

/// Independent priors of the true capacities, cost types and valuation
/// types. Each resource coordinate of producer i is drawn independently from
/// capacity[i].
struct PriorSupport {
  std::size_t dim = 1;
  std::vector<ParameterPrior> capacity;
  std::vector<ParameterPrior> cost_type;
  std::vector<ParameterPrior> valuation_type;

  std::size_t producers() const { return capacity.size(); }
  std::size_t consumers() const { return valuation_type.size(); }

  /// Same prior for every producer / consumer.
  static PriorSupport uniform(std::size_t producers, std::size_t consumers,
                              ParameterPrior capacity, ParameterPrior cost_type,
                              ParameterPrior valuation_type, std::size_t dim = 1);

  /// Finite bounds, lo <= hi, non-negative, matching sizes.
  void validate() const;

  ResourceVector min_capacity(std::size_t i) const {
    return ResourceVector(dim, capacity.at(i).lo);
  }
  double max_cost_type(std::size_t i) const { return cost_type.at(i).hi; }
};

TypeProfile sample_types(const PriorSupport& support, Rng& rng);

/// count i.i.d. draws; draw t uses the stream derive_seed(seed, t).
std::vector<TypeProfile> sample_prior(const PriorSupport& support, std::size_t count,
                                      std::uint64_t seed);

nlohmann::json to_json(const PriorSupport& support);

/// Reads {"capacity": P, "cost_type": P, "valuation_type": P} where each P is
/// {"distribution": "uniform", "lo": a, "hi": b} or a per-participant array
/// of such objects.
PriorSupport prior_from_json(const nlohmann::json& j, std::size_t producers,
                             std::size_t consumers, std::size_t dim = 1);

}  // namespace pvcg

#endif  // PVCG_PRIOR_HPP_
