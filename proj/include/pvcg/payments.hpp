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

#ifndef PVCG_PAYMENTS_HPP_
#define PVCG_PAYMENTS_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "pvcg/model.hpp"
#include "pvcg/optimizer.hpp"
#include "pvcg/parallel.hpp"

namespace pvcg {

/// Adjustment payment h_i. It receives the reports of everyone except
/// producer i (capacities and cost types of the other n - 1 producers, all
/// valuation types), so it cannot depend on producer i's own report.
using AdjustmentFn =
    std::function<double(std::size_t producer, const TypeProfile& others)>;

AdjustmentFn zero_adjustment();

/// Everything producer i's adjustment is allowed to see.
TypeProfile others_report(const TypeProfile& reported, std::size_t i);

constexpr double kDefaultPunishment = 1e6;

struct PaymentOptions {
  double punishment = kDefaultPunishment;
  Solver solver;
  Exec exec = Exec::serial;
};

struct PaymentBreakdown {
  SurplusTable surpluses;  // solved on the reports
  std::vector<double> tau;
  std::vector<double> adjustment;
  std::vector<double> total;
  std::vector<double> costs;  // true cost of what was delivered
  std::vector<double> utilities;
  std::vector<bool> punished;
  double coalition_income = 0.0;
  double budget_slack = 0.0;  // income - sum of totals

  std::size_t producers() const { return total.size(); }
};

/// VCG payment tau_i = S* - S*_-i + c(x_hat_i eta*_i, gamma_hat_i).
///
/// Evaluated in both algebraic forms (surplus difference plus own cost, and
/// value difference minus the change in the others' costs); throws
/// std::logic_error if they disagree by more than 1e-8.
std::vector<double> vcg_tau(const Economy& view, const AllocationResult& allocation,
                            std::span<const AllocationResult> counterfactuals);

/// Demand-side full surplus: sum_j v(x_hat (.) eta*, theta_j).
double coalition_income(const Economy& view, const AllocationResult& allocation);

/// Runs the auction on the bids and pays p_i = tau_i + h_i.
///
/// A producer whose accepted quantity exceeds its true capacity in any
/// coordinate is punished: it delivers nothing, p_i = -P and u_i = -P.
/// Everyone else delivers exactly the accepted amount and pays its true cost.
PaymentBreakdown total_payment(const Economy& economy, const BidProfile& bids,
                               const AdjustmentFn& adjustment,
                               const PaymentOptions& options = {});

nlohmann::json to_json(const PaymentBreakdown& payments);

}  // namespace pvcg

#endif  // PVCG_PAYMENTS_HPP_
