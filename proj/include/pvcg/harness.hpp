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

#ifndef PVCG_HARNESS_HPP_
#define PVCG_HARNESS_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pvcg/model.hpp"
#include "pvcg/optimizer.hpp"
#include "pvcg/parallel.hpp"
#include "pvcg/payments.hpp"
#include "pvcg/prior.hpp"
#include "pvcg/report.hpp"
#include "pvcg/rng.hpp"

namespace pvcg {

/// Draws a true economy.
using EconomySampler = std::function<Economy(Rng&)>;

EconomySampler prior_economy_sampler(PriorSupport support, Families families);

/// A unilateral misreport of one producer; everyone else stays truthful.
struct Deviation {
  std::size_t producer = 0;
  ResourceVector capacity;
  double cost_type = 0.0;
  std::string kind;
};

/// Draws the deviations to try against one true economy.
using DeviationSampler = std::function<std::vector<Deviation>(const Economy&, Rng&)>;

/// count deviations per economy: the targeted set {0.5, 0.9, 1.1} x truth
/// (capacity and cost type separately) plus one capacity-exceeding report
/// at zero cost, then uniform draws over [0, capacity_hi] x [0, cost_type_hi].
/// Reports equal to the truth are redrawn.
DeviationSampler default_deviation_sampler(std::size_t count, double capacity_hi,
                                           double cost_type_hi);

struct DsicOptions {
  std::size_t trials = 1000;
  double tolerance = 1e-6;
  PaymentOptions payment;  // payment.exec is ignored; trials run under exec
  std::uint64_t seed = 1;
};

/// Compares each producer's utility under truth against sampled unilateral
/// deviations; a deviation gaining more than the tolerance is a violation.
/// Throws std::invalid_argument if the punishment is not above ten times the
/// largest |tau| met during the run (the probe would be vacuous).
ProbeReport probe_dsic(const EconomySampler& economies, const DeviationSampler& deviations,
                       const AdjustmentFn& adjustment, const DsicOptions& options,
                       Exec exec = Exec::serial);

enum class EfficiencyOracle { grid, multistart };

struct EfficiencyOptions {
  EfficiencyOracle oracle = EfficiencyOracle::grid;
  double grid_step = 1e-2;
  double tolerance = 2e-3;
  int restarts = 32;
};

/// Achieved surplus against an independent maximum over 0 <= x <= x_bar.
/// The grid oracle is limited to three producers (std::invalid_argument).
ProbeReport check_efficiency(const Economy& economy, const AllocationResult& allocation,
                             const EfficiencyOptions& options = {});

constexpr double kPropertyTolerance = 1e-8;

/// u_i >= -1e-8 for every producer; one witness lists all failing producers.
/// Payments must come from truthful bids;
/// throws std::logic_error if u_i and S* - S*_-i + h_i disagree.
ProbeReport check_ir(const Economy& economy, const PaymentBreakdown& payments);

/// sum_i p_i <= income + 1e-8. Throws std::logic_error if the slack differs
/// from S* - sum_i (S* - S*_-i) - sum_i h_i.
ProbeReport check_wbb(const Economy& economy, const PaymentBreakdown& payments);

/// Per-instance training-loss terms next to the IR and WBB verdicts.
struct LossEquivalence {
  double loss1 = 0.0;
  double loss2 = 0.0;
  bool ir = true;
  bool wbb = true;
  /// (every Loss1 term <= tol) == ir and (Loss2 <= tol) == wbb.
  bool consistent = true;
};

LossEquivalence loss_equivalence(const PaymentBreakdown& payments,
                                 double tolerance = kPropertyTolerance);

/// IR, WBB and the loss equivalence over sampled truthful economies.
struct PropertySuite {
  ProbeReport ir;
  ProbeReport wbb;
  ProbeReport equivalence;  // a violation is an inconsistent instance
};

PropertySuite check_properties(const EconomySampler& economies,
                               const AdjustmentFn& adjustment, std::size_t trials,
                               std::uint64_t seed, const PaymentOptions& payment = {},
                               Exec exec = Exec::serial);

/// Random single-coordinate capacity increases and cost-type increases;
/// S* must move weakly up and down respectively (tolerance 1e-8).
ProbeReport check_surplus_monotonicity(const EconomySampler& economies, std::size_t trials,
                         std::uint64_t seed, const Solver& solver = {},
                         Exec exec = Exec::serial);

}  // namespace pvcg

#endif  // PVCG_HARNESS_HPP_
