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

#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "pvcg/harness.hpp"
#include "pvcg/io.hpp"

using namespace pvcg;

namespace {

PriorSupport prior(std::size_t n, std::size_t m) {
  return PriorSupport::uniform(n, m, {Distribution::uniform, 0.0, 5.0},
                               {Distribution::uniform, 0.0, 1.0},
                               {Distribution::uniform, 0.0, 1.0});
}

EconomySampler sampler(std::size_t n, std::size_t m) {
  return prior_economy_sampler(
      prior(n, m), {ValuationFamily::sqrt_sum(static_cast<double>(n)), CostFamily::linear()});
}

AdjustmentFn constant(double h) {
  return [h](std::size_t, const TypeProfile&) { return h; };
}

}  // namespace

TEST_CASE("deviation sampler covers targeted reports and never the truth") {
  const auto e = oracle::sqrt_economy({1.0, 2.0, 3.0}, {0.2, 0.4, 0.6}, {0.5});
  const auto sample = default_deviation_sampler(20, 5.0, 1.0);
  Rng rng(1);
  const auto devs = sample(e, rng);
  CHECK(devs.size() == 20);
  std::set<std::string> kinds;
  for (const auto& d : devs) {
    kinds.insert(d.kind);
    CHECK(d.producer < 3);
    const bool same = d.capacity[0] == e.types.capacities[d.producer][0] &&
                      d.cost_type == e.types.cost_types[d.producer];
    CHECK_FALSE(same);
  }
  CHECK(kinds.count("capacity_exceeding") == 1);
  CHECK(kinds.count("uniform") == 1);
  CHECK(kinds.size() == 8);
  CHECK_THROWS(default_deviation_sampler(5, -1.0, 1.0));
}

TEST_CASE("VCG with zero adjustment is truthful") {
  DsicOptions o;
  o.trials = 60;
  const auto r = probe_dsic(sampler(3, 2), default_deviation_sampler(20, 5.0, 1.0),
                            zero_adjustment(), o);
  CHECK(r.pass);
  CHECK(r.trials == 60);
  CHECK(r.max_gap <= 1e-6);
  CHECK(r.details["max_abs_tau"].get<double>() > 0.0);
}

TEST_CASE("an inefficient allocation rule is caught") {
  DsicOptions o;
  o.trials = 60;
  // No ascent at all: the allocation is the better of all-ones and all-zeros.
  o.payment.solver.method = SolverMethod::projected_gradient;
  o.payment.solver.gradient.max_iterations = 0;
  o.payment.solver.gradient.random_restarts = 0;
  const auto r = probe_dsic(sampler(3, 2), default_deviation_sampler(20, 5.0, 1.0),
                            zero_adjustment(), o);
  CHECK_FALSE(r.pass);
  CHECK(r.max_gap > 1e-6);
}

TEST_CASE("a small punishment makes the probe vacuous") {
  DsicOptions o;
  o.trials = 5;
  o.payment.punishment = 1.0;
  CHECK_THROWS_AS(probe_dsic(sampler(3, 2), default_deviation_sampler(5, 5.0, 1.0),
                             zero_adjustment(), o),
                  std::invalid_argument);
}

TEST_CASE("DSIC probe is identical serial and parallel") {
  DsicOptions o;
  o.trials = 30;
  o.payment.solver.method = SolverMethod::projected_gradient;
  o.payment.solver.gradient.max_iterations = 0;
  o.payment.solver.gradient.random_restarts = 0;
  const auto dev = default_deviation_sampler(10, 5.0, 1.0);
  const auto a = probe_dsic(sampler(3, 1), dev, zero_adjustment(), o, Exec::serial);
  const auto b = probe_dsic(sampler(3, 1), dev, zero_adjustment(), o, Exec::parallel);
  CHECK(to_json(a) == to_json(b));
}

TEST_CASE("IR and WBB under the zero adjustment") {
  const auto s = check_properties(sampler(4, 2), zero_adjustment(), 500, 3);
  CHECK(s.ir.pass);
  CHECK(s.wbb.pass);
  CHECK(s.equivalence.pass);
  CHECK(s.ir.trials == 500);
}

TEST_CASE("negative adjustment breaks IR, positive breaks WBB") {
  const auto low = check_properties(sampler(3, 1), constant(-100.0), 50, 4);
  CHECK_FALSE(low.ir.pass);
  CHECK(low.ir.violations.size() == 50);
  CHECK(low.wbb.pass);
  CHECK(low.equivalence.pass);

  const auto high = check_properties(sampler(3, 1), constant(100.0), 50, 4);
  CHECK(high.ir.pass);
  CHECK_FALSE(high.wbb.pass);
  CHECK(high.equivalence.pass);
}

TEST_CASE("loss terms match the property verdicts") {
  const auto e = oracle::sqrt_economy({1.0, 2.0}, {0.1, 0.3}, {0.8});
  const auto bids = BidProfile::truthful(e);
  auto eq = loss_equivalence(total_payment(e, bids, constant(-5.0)));
  CHECK(eq.loss1 > 0.0);
  CHECK_FALSE(eq.ir);
  CHECK(eq.consistent);
  eq = loss_equivalence(total_payment(e, bids, constant(5.0)));
  CHECK(eq.loss2 > 0.0);
  CHECK_FALSE(eq.wbb);
  CHECK(eq.consistent);
  eq = loss_equivalence(total_payment(e, bids, zero_adjustment()));
  CHECK(eq.loss1 == 0.0);
  CHECK(eq.ir);
  CHECK(eq.wbb);
}

TEST_CASE("IR check rejects payments from misreports") {
  const auto e = oracle::sqrt_economy({1.0, 2.0}, {0.1, 0.3}, {0.8});
  BidProfile lie = BidProfile::truthful(e);
  lie.reported.cost_types[0] = 0.05;
  const auto p = total_payment(e, lie, zero_adjustment());
  CHECK_THROWS_AS(check_ir(e, p), std::logic_error);
}

TEST_CASE("efficiency check against the grid oracle") {
  const auto e = oracle::sqrt_economy({2.0, 3.0}, {0.2, 0.5}, {0.6, 0.4});
  const auto best = optimize_acceptance(e);
  CHECK(check_efficiency(e, best).pass);

  AllocationResult none;
  none.ratios = Quantities(2, 1);
  none.accepted = Quantities(2, 1);
  none.surplus = 0.0;
  const auto r = check_efficiency(e, none);
  CHECK_FALSE(r.pass);
  CHECK(r.details["oracle_maximum"].get<double>() > 0.0);

  EfficiencyOptions multi;
  multi.oracle = EfficiencyOracle::multistart;
  CHECK(check_efficiency(e, best, multi).pass);

  const auto big = oracle::sqrt_economy({1, 1, 1, 1}, {0.1, 0.2, 0.3, 0.4}, {0.5});
  CHECK_THROWS_AS(check_efficiency(big, optimize_acceptance(big)), std::invalid_argument);
}

TEST_CASE("surplus is monotone in capacity and cost type") {
  const auto r = check_surplus_monotonicity(sampler(5, 2), 2000, 8);
  CHECK(r.pass);
  CHECK(r.trials == 2000);
  const auto g = check_surplus_monotonicity(sampler(3, 2), 200, 8,
                              Solver{SolverMethod::projected_gradient, {}});
  CHECK(g.pass);
}
