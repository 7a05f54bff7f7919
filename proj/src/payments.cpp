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

#include "pvcg/payments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pvcg {

AdjustmentFn zero_adjustment() {
  return [](std::size_t, const TypeProfile&) { return 0.0; };
}

TypeProfile others_report(const TypeProfile& reported, std::size_t i) {
  if (i >= reported.producers()) throw std::out_of_range("producer index out of range");
  return reported.without_producer(i);
}

double coalition_income(const Economy& view, const AllocationResult& allocation) {
  double income = 0.0;
  for (double theta : view.types.valuation_types)
    income += eval_valuation(view.families.valuation, allocation.accepted, theta);
  return income;
}

std::vector<double> vcg_tau(const Economy& view, const AllocationResult& allocation,
                            std::span<const AllocationResult> counterfactuals) {
  const std::size_t n = view.producers();
  if (counterfactuals.size() != n)
    throw std::invalid_argument("need one counterfactual allocation per producer");
  const auto& cf = view.families.cost;
  const auto& gamma = view.types.cost_types;
  const double income = coalition_income(view, allocation);

  std::vector<double> own_cost(n);
  for (std::size_t k = 0; k < n; ++k)
    own_cost[k] = eval_cost(cf, allocation.accepted[k], gamma[k]);

  std::vector<double> tau(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& without = counterfactuals[i];
    if (without.accepted.producers() != n - 1)
      throw std::invalid_argument("counterfactual " + std::to_string(i) +
                                  " does not have n - 1 producers");
    const double by_surplus = allocation.surplus - without.surplus + own_cost[i];

    double value_diff = income;
    for (double theta : view.types.valuation_types)
      value_diff -= eval_valuation(view.families.valuation, without.accepted, theta);
    double others_cost_diff = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      const std::size_t reduced = k < i ? k : k - 1;
      others_cost_diff +=
          own_cost[k] - eval_cost(cf, without.accepted[reduced], gamma[k]);
    }
    const double by_value = value_diff - others_cost_diff;

    if (std::abs(by_surplus - by_value) >
        1e-8 * std::max({1.0, std::abs(by_surplus), std::abs(by_value)}))
      throw std::logic_error("VCG payment forms disagree for producer " +
                             std::to_string(i));
    tau[i] = by_surplus;
  }
  return tau;
}

PaymentBreakdown total_payment(const Economy& economy, const BidProfile& bids,
                               const AdjustmentFn& adjustment,
                               const PaymentOptions& options) {
  if (!(options.punishment > 0.0) || !std::isfinite(options.punishment))
    throw std::invalid_argument("punishment must be positive and finite");
  const Economy view = apply_bids(economy, bids);
  const std::size_t n = view.producers();

  PaymentBreakdown out;
  out.surpluses = solve_with_counterfactuals(view, options.solver, options.exec);
  const auto& allocation = out.surpluses.full;
  out.tau = vcg_tau(view, allocation, out.surpluses.without);
  out.coalition_income = coalition_income(view, allocation);

  out.adjustment.resize(n);
  out.total.resize(n);
  out.costs.resize(n);
  out.utilities.resize(n);
  out.punished.resize(n);
  double paid = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = adjustment(i, others_report(bids.reported, i));
    if (!std::isfinite(h))
      throw std::runtime_error("adjustment for producer " + std::to_string(i) +
                               " is not finite");
    out.adjustment[i] = h;

    bool over = false;
    const auto accepted = allocation.accepted[i];
    const auto capacity = economy.types.capacities[i];
    for (std::size_t d = 0; d < accepted.size(); ++d) over = over || accepted[d] > capacity[d];
    out.punished[i] = over;
    if (over) {
      out.total[i] = -options.punishment;
      out.costs[i] = 0.0;
      out.utilities[i] = -options.punishment;
    } else {
      out.total[i] = out.tau[i] + h;
      out.costs[i] = eval_cost(economy.families.cost, accepted,
                               economy.types.cost_types[i]);
      out.utilities[i] = out.total[i] - out.costs[i];
    }
    paid += out.total[i];
  }
  out.budget_slack = out.coalition_income - paid;
  return out;
}

nlohmann::json to_json(const PaymentBreakdown& p) {
  nlohmann::json j;
  j["allocation"] = to_json(p.surpluses.full);
  std::vector<double> without(p.surpluses.without.size());
  for (std::size_t i = 0; i < without.size(); ++i) without[i] = p.surpluses.without[i].surplus;
  j["surplus_without"] = without;
  j["tau"] = p.tau;
  j["adjustment"] = p.adjustment;
  j["total"] = p.total;
  j["costs"] = p.costs;
  j["utilities"] = p.utilities;
  j["punished"] = p.punished;
  j["coalition_income"] = p.coalition_income;
  j["budget_slack"] = p.budget_slack;
  return j;
}

}  // namespace pvcg
