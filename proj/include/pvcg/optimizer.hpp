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

#ifndef PVCG_OPTIMIZER_HPP_
#define PVCG_OPTIMIZER_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pvcg/model.hpp"
#include "pvcg/parallel.hpp"

namespace pvcg {

enum class SolverMethod { analytic, projected_gradient };

SolverMethod parse_solver_method(const std::string& name);
std::string to_string(SolverMethod method);

struct GradientOptions {
  double fd_step = 1e-6;
  double armijo = 1e-4;
  double tolerance = 1e-8;  // projected-gradient norm
  int max_iterations = 10000;
  int random_restarts = 8;  // in addition to the all-ones and all-zeros starts
  std::uint64_t seed = 0x70766367ULL;
};

struct Solver {
  SolverMethod method = SolverMethod::analytic;
  GradientOptions gradient;
};

struct SolverDiagnostics {
  int iterations = 0;
  int restarts = 0;
  double gradient_norm = 0.0;
};

/// Optimal acceptance ratios for one (possibly counterfactual) economy.
/// accepted == reported capacities (.) ratios, and surplus equals
/// social_surplus(economy, accepted).
struct AllocationResult {
  Quantities ratios;
  Quantities accepted;
  double surplus = 0.0;
  SolverDiagnostics diagnostics;
};

/// True when the closed-form water-fill applies: sqrt_sum valuation,
/// unweighted linear cost, scalar resources.
bool supports_analytic(const Economy& economy);

/// Maximizes S(x_hat (.) eta) over eta in [0,1]^(n x dim).
AllocationResult optimize_acceptance(const Economy& view, const Solver& solver = {});

/// Closed form for sqrt_sum + linear cost: fills the cheapest producers first
/// (stable order by cost type, then index) until the marginal value
/// Theta * sqrt(c) / (2 sqrt(U)) drops to the next producer's cost type.
AllocationResult analytic_waterfill(const Economy& view);

/// Multistart projected gradient ascent with backtracking.
AllocationResult projected_gradient(const Economy& view,
                                    const GradientOptions& options = {});

/// Same problem with producer `removed` deleted. With a single producer the
/// result is the empty coalition (surplus 0).
AllocationResult counterfactual_surplus(const Economy& view, std::size_t removed,
                                        const Solver& solver = {});

/// The full problem and all n producer-removed problems.
struct SurplusTable {
  AllocationResult full;
  std::vector<AllocationResult> without;

  double surplus() const { return full.surplus; }
  double surplus_without(std::size_t i) const { return without[i].surplus; }
  /// S* - S*_-i for every producer.
  std::vector<double> marginal_contributions() const;
};

/// Solves the n + 1 problems; with Exec::parallel the counterfactuals run
/// concurrently.
SurplusTable solve_with_counterfactuals(const Economy& view, const Solver& solver,
                                        Exec exec = Exec::serial);

nlohmann::json to_json(const AllocationResult& allocation);

}  // namespace pvcg

#endif  // PVCG_OPTIMIZER_HPP_
