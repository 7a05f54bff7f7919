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

#include "pvcg/harness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pvcg/grid_search.hpp"
#include "pvcg/io.hpp"

namespace pvcg {

EconomySampler prior_economy_sampler(PriorSupport support, Families families) {
  support.validate();
  return [support = std::move(support), families = std::move(families)](Rng& rng) {
    return Economy{sample_types(support, rng), families};
  };
}

DeviationSampler default_deviation_sampler(std::size_t count, double capacity_hi,
                                           double cost_type_hi) {
  if (!(capacity_hi >= 0.0) || !(cost_type_hi >= 0.0))
    throw std::invalid_argument("report box bounds must be non-negative");
  return [count, capacity_hi, cost_type_hi](const Economy& e, Rng& rng) {
    const std::size_t n = e.producers();
    const std::size_t dim = e.dim();
    std::vector<Deviation> out;
    out.reserve(count);

    auto uniform = [&](std::size_t i) {
      Deviation d{i, ResourceVector(dim), rng.uniform(0.0, cost_type_hi), "uniform"};
      for (double& c : d.capacity) c = rng.uniform(0.0, capacity_hi);
      return d;
    };
    auto is_truth = [&](const Deviation& d) {
      const auto cap = e.types.capacities[d.producer];
      return d.cost_type == e.types.cost_types[d.producer] &&
             std::equal(cap.begin(), cap.end(), d.capacity.begin());
    };
    auto push = [&](Deviation d) {
      for (int tries = 0; is_truth(d) && tries < 64; ++tries) d = uniform(d.producer);
      if (!is_truth(d)) out.push_back(std::move(d));
    };

    for (double factor : {0.5, 0.9, 1.1}) {
      if (out.size() + 2 > count) break;
      const std::size_t i = rng.index(n);
      const auto cap = e.types.capacities.row(i);
      const double gamma = e.types.cost_types[i];
      Deviation by_capacity{i, cap, gamma, "capacity_x" + std::to_string(factor)};
      for (double& c : by_capacity.capacity) c *= factor;
      push(std::move(by_capacity));
      push(Deviation{i, cap, gamma * factor, "cost_type_x" + std::to_string(factor)});
    }
    if (out.size() < count) {
      const std::size_t i = rng.index(n);
      Deviation over{i, e.types.capacities.row(i), 0.0, "capacity_exceeding"};
      for (double& c : over.capacity) c = 2.0 * c + 1.0;
      push(std::move(over));
    }
    while (out.size() < count) push(uniform(rng.index(n)));
    return out;
  };
}

namespace {

nlohmann::json deviation_json(const Deviation& d) {
  return {{"producer", d.producer},
          {"kind", d.kind},
          {"reported_capacity", d.capacity},
          {"reported_cost_type", d.cost_type}};
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

ProbeReport probe_dsic(const EconomySampler& economies, const DeviationSampler& deviations,
                       const AdjustmentFn& adjustment, const DsicOptions& options,
                       Exec exec) {
  if (options.trials < 1) throw std::invalid_argument("trials must be >= 1");
  PaymentOptions payment = options.payment;
  payment.exec = Exec::serial;

  std::vector<ProbeReport> parts(options.trials);
  std::vector<double> tau_max(options.trials, 0.0);
  for_each_index(options.trials, exec, [&](std::size_t t) {
    Rng rng(derive_seed(options.seed, t));
    const Economy economy = economies(rng);
    const auto devs = deviations(economy, rng);
    const BidProfile truth = BidProfile::truthful(economy);
    const PaymentBreakdown honest = total_payment(economy, truth, adjustment, payment);
    double tmax = max_abs(honest.tau);

    ProbeReport& part = parts[t];
    part.trials = 1;
    for (const Deviation& d : devs) {
      BidProfile bids = truth;
      auto row = bids.reported.capacities[d.producer];
      std::copy(d.capacity.begin(), d.capacity.end(), row.begin());
      bids.reported.cost_types[d.producer] = d.cost_type;
      const PaymentBreakdown lied = total_payment(economy, bids, adjustment, payment);
      tmax = std::max(tmax, max_abs(lied.tau));
      const double gap = lied.utilities[d.producer] - honest.utilities[d.producer];
      part.observe(gap);
      if (gap > options.tolerance)
        part.violate({{"economy", economy_to_json(economy)},
                      {"deviation", deviation_json(d)},
                      {"truthful_utility", honest.utilities[d.producer]},
                      {"deviation_utility", lied.utilities[d.producer]}},
                     gap);
    }
    tau_max[t] = tmax;
  });

  ProbeReport report;
  report.name = "dsic";
  for (const auto& p : parts) report.merge(p);
  const double tmax = *std::max_element(tau_max.begin(), tau_max.end());
  if (!(payment.punishment > 10.0 * tmax))
    throw std::invalid_argument("punishment " + std::to_string(payment.punishment) +
                                " is not above 10 x max|tau| = " +
                                std::to_string(10.0 * tmax));
  report.details["max_abs_tau"] = tmax;
  report.details["punishment"] = payment.punishment;
  report.details["tolerance"] = options.tolerance;
  return report;
}

ProbeReport check_efficiency(const Economy& economy, const AllocationResult& allocation,
                             const EfficiencyOptions& options) {
  economy.validate();
  double best = 0.0;
  if (options.oracle == EfficiencyOracle::grid) {
    if (economy.producers() * economy.dim() > 3)
      throw std::invalid_argument("grid oracle is limited to three producers");
    best = grid_search(economy, options.grid_step, Exec::serial).surplus;
  } else {
    GradientOptions g;
    g.random_restarts = options.restarts;
    best = projected_gradient(economy, g).surplus;
  }
  const double achieved = social_surplus(economy, allocation.accepted);
  const double gap = best - achieved;
  ProbeReport report;
  report.name = "efficiency";
  report.trials = 1;
  report.observe(gap);
  if (gap > options.tolerance)
    report.violate({{"economy", economy_to_json(economy)},
                    {"achieved", achieved},
                    {"oracle_maximum", best}},
                   gap);
  report.details["achieved"] = achieved;
  report.details["oracle_maximum"] = best;
  return report;
}

ProbeReport check_ir(const Economy& economy, const PaymentBreakdown& payments) {
  const std::size_t n = payments.producers();
  const auto marginal = payments.surpluses.marginal_contributions();
  ProbeReport report;
  report.name = "ir";
  report.trials = 1;
  nlohmann::json failing = nlohmann::json::array();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = payments.utilities[i];
    const double restated = marginal[i] + payments.adjustment[i];
    if (!payments.punished[i] &&
        std::abs(u - restated) > kPropertyTolerance * std::max(1.0, std::abs(restated)))
      throw std::logic_error("utility of producer " + std::to_string(i) +
                             " differs from S* - S*_-i + h_i");
    report.observe(-u);
    if (u < -kPropertyTolerance) {
      failing.push_back({{"producer", i},
                         {"utility", u},
                         {"adjustment", payments.adjustment[i]},
                         {"marginal_contribution", marginal[i]}});
      worst = std::max(worst, -u);
    }
  }
  if (!failing.empty())
    report.violate({{"economy", economy_to_json(economy)}, {"producers", failing}}, worst);
  return report;
}

ProbeReport check_wbb(const Economy& economy, const PaymentBreakdown& payments) {
  const auto marginal = payments.surpluses.marginal_contributions();
  double restated = payments.surpluses.surplus();
  for (std::size_t i = 0; i < marginal.size(); ++i)
    restated -= marginal[i] + payments.adjustment[i];
  const double slack = payments.budget_slack;
  const bool punished =
      std::any_of(payments.punished.begin(), payments.punished.end(), [](bool b) { return b; });
  if (!punished && std::abs(slack - restated) >
                       kPropertyTolerance * std::max(1.0, payments.coalition_income))
    throw std::logic_error("budget slack differs from S* - sum(S* - S*_-i) - sum(h)");
  ProbeReport report;
  report.name = "wbb";
  report.trials = 1;
  report.observe(-slack);
  if (slack < -kPropertyTolerance)
    report.violate({{"economy", economy_to_json(economy)},
                    {"income", payments.coalition_income},
                    {"total_payments", payments.coalition_income - slack}},
                   -slack);
  return report;
}

LossEquivalence loss_equivalence(const PaymentBreakdown& payments, double tolerance) {
  const auto marginal = payments.surpluses.marginal_contributions();
  LossEquivalence out;
  bool loss1_zero = true;
  double total = 0.0;
  for (std::size_t i = 0; i < marginal.size(); ++i) {
    const double term = std::max(0.0, -marginal[i] - payments.adjustment[i]);
    out.loss1 += term;
    loss1_zero = loss1_zero && term <= tolerance;
    out.ir = out.ir && payments.utilities[i] >= -tolerance;
    total += marginal[i] + payments.adjustment[i];
  }
  out.loss2 = std::max(0.0, total - payments.surpluses.surplus());
  out.wbb = payments.budget_slack >= -tolerance;
  out.consistent = (loss1_zero == out.ir) && ((out.loss2 <= tolerance) == out.wbb);
  return out;
}

PropertySuite check_properties(const EconomySampler& economies,
                               const AdjustmentFn& adjustment, std::size_t trials,
                               std::uint64_t seed, const PaymentOptions& payment,
                               Exec exec) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  PaymentOptions serial = payment;
  serial.exec = Exec::serial;
  std::vector<PropertySuite> parts(trials);
  for_each_index(trials, exec, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    const Economy economy = economies(rng);
    const auto p = total_payment(economy, BidProfile::truthful(economy), adjustment, serial);
    PropertySuite& s = parts[t];
    s.ir = check_ir(economy, p);
    s.wbb = check_wbb(economy, p);
    const LossEquivalence eq = loss_equivalence(p);
    s.equivalence.trials = 1;
    s.equivalence.observe(eq.consistent ? 0.0 : 1.0);
    if (!eq.consistent)
      s.equivalence.violate({{"economy", economy_to_json(economy)},
                             {"loss1", eq.loss1},
                             {"loss2", eq.loss2},
                             {"ir", eq.ir},
                             {"wbb", eq.wbb}},
                            1.0);
  });
  PropertySuite out;
  out.ir.name = "ir";
  out.wbb.name = "wbb";
  out.equivalence.name = "loss_equivalence";
  for (const auto& s : parts) {
    out.ir.merge(s.ir);
    out.wbb.merge(s.wbb);
    out.equivalence.merge(s.equivalence);
  }
  return out;
}

ProbeReport check_surplus_monotonicity(const EconomySampler& economies, std::size_t trials,
                         std::uint64_t seed, const Solver& solver, Exec exec) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  std::vector<ProbeReport> parts(trials);
  for_each_index(trials, exec, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    const Economy e = economies(rng);
    const double base = optimize_acceptance(e, solver).surplus;
    ProbeReport& part = parts[t];
    part.trials = 1;

    const std::size_t i = rng.index(e.producers());
    const std::size_t d = rng.index(e.dim());
    TypeProfile more = e.types;
    const double old_cap = more.capacities[i][d];
    more.capacities[i][d] = old_cap + rng.uniform(0.0, std::max(1.0, old_cap));
    const double raised = optimize_acceptance(e.with_types(more), solver).surplus;
    const double cap_gap = base - raised;
    part.observe(cap_gap);
    if (cap_gap > kPropertyTolerance)
      part.violate({{"types", to_json(e.types)},
                    {"change", "capacity"},
                    {"producer", i},
                    {"coordinate", d},
                    {"new_value", more.capacities[i][d]},
                    {"before", base},
                    {"after", raised}},
                   cap_gap);

    const std::size_t k = rng.index(e.producers());
    TypeProfile dearer = e.types;
    const double old_gamma = dearer.cost_types[k];
    dearer.cost_types[k] = old_gamma + rng.uniform(0.0, std::max(1.0, old_gamma));
    const double costlier = optimize_acceptance(e.with_types(dearer), solver).surplus;
    const double cost_gap = costlier - base;
    part.observe(cost_gap);
    if (cost_gap > kPropertyTolerance)
      part.violate({{"types", to_json(e.types)},
                    {"change", "cost_type"},
                    {"producer", k},
                    {"new_value", dearer.cost_types[k]},
                    {"before", base},
                    {"after", costlier}},
                   cost_gap);
  });
  ProbeReport report;
  report.name = "surplus_monotonicity";
  for (const auto& p : parts) report.merge(p);
  return report;
}

}  // namespace pvcg
