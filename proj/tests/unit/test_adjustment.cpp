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

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "pvcg/adjustment.hpp"
#include "pvcg/payments.hpp"
#include "pvcg/rng.hpp"

using namespace pvcg;

namespace {

const Families kSqrt10{ValuationFamily::sqrt_sum(10.0), CostFamily::linear()};

PriorSupport reference_prior() {
  return PriorSupport::uniform(10, 2, {Distribution::uniform, 0.0, 5.0},
                               {Distribution::uniform, 0.0, 1.0},
                               {Distribution::uniform, 0.0, 1.0});
}

ValuationFamily square_sum() {
  return ValuationFamily::make_custom("square_sum", [](const Quantities& x, double th) {
    double s = 0.0;
    for (double v : x.flat()) s += v;
    return th * s * s;
  });
}

ValuationFamily sum_sqrt() {
  return ValuationFamily::make_custom("sum_sqrt", [](const Quantities& x, double th) {
    double s = 0.0;
    for (double v : x.flat()) s += std::sqrt(v);
    return th * s;
  });
}

}  // namespace

TEST_CASE("zero-inclusive capacity support gives zero adjustment") {
  const auto prior = reference_prior();
  const auto samples = sample_prior(prior, 200, 5);
  for (const auto& t : samples)
    for (std::size_t i = 0; i < 10; ++i)
      CHECK(std::abs(analytic_adjustment(prior, kSqrt10, i, t.without_producer(i))) <= 1e-9);
}

TEST_CASE("adjustment from the support extremes") {
  // Producer 0 at (min capacity 1, max cost type g) next to (1, 0.2), theta 1.
  const Families fam{ValuationFamily::sqrt_sum(2.0), CostFamily::linear()};
  for (double g : {10.0, 0.1}) {
    PriorSupport s = PriorSupport::uniform(2, 1, {Distribution::uniform, 1.0, 3.0},
                                           {Distribution::uniform, 0.0, g},
                                           {Distribution::uniform, 0.0, 1.0});
    TypeProfile others;
    others.capacities = Quantities::scalars({1.0});
    others.cost_types = {0.2};
    others.valuation_types = {1.0};
    const double expect = -(oracle::waterfill_surplus({1.0, 1.0}, {g, 0.2}, {1.0}, 2.0) -
                            oracle::waterfill_surplus({1.0}, {0.2}, {1.0}, 2.0));
    CHECK(analytic_adjustment(s, fam, 0, others) == doctest::Approx(expect).epsilon(1e-12));
    const double grid =
        -(oracle::sqrt_grid_max({1.0, 1.0}, {g, 0.2}, {1.0}, 2.0, 1e-3) -
          oracle::sqrt_grid_max({1.0}, {0.2}, {1.0}, 2.0, 1e-3));
    CHECK(std::abs(analytic_adjustment(s, fam, 0, others) - grid) <= 2e-3);
  }
}

TEST_CASE("point-mass support extracts the whole marginal contribution") {
  const auto e = oracle::sqrt_economy({2.0, 1.5, 3.0}, {0.3, 0.1, 0.6}, {0.9});
  PriorSupport s;
  for (std::size_t i = 0; i < 3; ++i) {
    const double x = e.types.capacities[i][0];
    s.capacity.push_back({Distribution::uniform, x, x});
    s.cost_type.push_back({Distribution::uniform, e.types.cost_types[i], e.types.cost_types[i]});
  }
  s.valuation_type.push_back({Distribution::uniform, 0.9, 0.9});
  const auto p = total_payment(e, BidProfile::truthful(e),
                               analytic_adjustment_fn(s, e.families));
  const auto d = p.surpluses.marginal_contributions();
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(p.adjustment[i] == doctest::Approx(-d[i]).epsilon(1e-12));
    CHECK(std::abs(p.utilities[i]) <= 1e-9);
  }
}

TEST_CASE("adjustment ignores the producer's own report") {
  PriorSupport s = PriorSupport::uniform(3, 1, {Distribution::uniform, 0.5, 3.0},
                                         {Distribution::uniform, 0.0, 1.0},
                                         {Distribution::uniform, 0.0, 1.0});
  const auto fn = analytic_adjustment_fn(s, {ValuationFamily::sqrt_sum(3.0), CostFamily::linear()});
  const auto e = oracle::sqrt_economy({1.0, 2.0, 0.7}, {0.2, 0.5, 0.9}, {0.8});
  auto a = total_payment(e, BidProfile::truthful(e), fn);
  BidProfile lie = BidProfile::truthful(e);
  lie.reported.capacities[1][0] = 0.3;
  lie.reported.cost_types[1] = 0.05;
  auto b = total_payment(e, lie, fn);
  CHECK(a.adjustment[1] == b.adjustment[1]);
}

TEST_CASE("analytic adjustment validates its inputs") {
  const auto prior = reference_prior();
  TypeProfile wrong;
  wrong.capacities = Quantities::scalars({1.0});
  wrong.cost_types = {0.1};
  wrong.valuation_types = {0.5, 0.5};
  CHECK_THROWS_AS(analytic_adjustment(prior, kSqrt10, 0, wrong), std::invalid_argument);
  CHECK_THROWS_AS(analytic_adjustment(prior, kSqrt10, 10, wrong), std::out_of_range);
  PriorSupport unbounded = prior;
  unbounded.capacity[0].hi = INFINITY;
  CHECK_THROWS(analytic_adjustment_fn(unbounded, kSqrt10));
}

TEST_CASE("existence and zero-capacity conditions hold for sqrt_sum") {
  const auto prior = reference_prior();
  const auto ex = existence_check(prior, kSqrt10, {}, 10000, 7, Exec::parallel);
  CHECK(ex.pass);
  CHECK(ex.trials == 10000);
  const auto zc = zero_capacity_check(prior, kSqrt10, {}, 10000, 8, Exec::parallel);
  CHECK(zc.pass);
  // Zero-inclusive support: both checks evaluate the same inequality.
  CHECK(existence_check(prior, kSqrt10, {}, 300, 9).details["min_slack"] ==
        zero_capacity_check(prior, kSqrt10, {}, 300, 9).details["min_slack"]);
}

TEST_CASE("single producer is tight") {
  const auto prior = PriorSupport::uniform(1, 1, {Distribution::uniform, 0.0, 5.0},
                                           {Distribution::uniform, 0.0, 1.0},
                                           {Distribution::uniform, 0.0, 1.0});
  const Families fam{ValuationFamily::sqrt_sum(1.0), CostFamily::linear()};
  const auto r = zero_capacity_check(prior, fam, {}, 500, 3);
  CHECK(r.pass);
  CHECK(std::abs(r.details["min_slack"].get<double>()) <= 1e-12);
}

TEST_CASE("complementary valuations violate the existence condition") {
  // With (x1 + x2)^2 the left side exceeds S* by 2 theta x1 x2.
  const auto prior = PriorSupport::uniform(2, 1, {Distribution::uniform, 0.0, 1.0},
                                           {Distribution::uniform, 0.0, 0.01},
                                           {Distribution::uniform, 0.5, 1.0});
  const Families fam{square_sum(), CostFamily::linear()};
  Solver solver{SolverMethod::projected_gradient, {}};
  const auto ex = existence_check(prior, fam, solver, 50, 1);
  CHECK_FALSE(ex.pass);
  CHECK(ex.violations.size() == 50);
  REQUIRE_FALSE(ex.violations.empty());
  CHECK(ex.violations.front().instance.contains("types"));
  CHECK_FALSE(zero_capacity_check(prior, fam, solver, 50, 1).pass);
}

TEST_CASE("additively separable valuations meet the zero-capacity condition with equality") {
  const auto prior = PriorSupport::uniform(3, 1, {Distribution::uniform, 0.0, 2.0},
                                           {Distribution::uniform, 0.0, 1.0},
                                           {Distribution::uniform, 0.0, 1.0});
  const Families fam{sum_sqrt(), CostFamily::linear()};
  const auto r = zero_capacity_check(prior, fam, {SolverMethod::projected_gradient, {}}, 40, 2);
  CHECK(r.pass);
  CHECK(std::abs(r.details["min_slack"].get<double>()) <= 1e-7);
  CHECK(std::abs(r.max_gap) <= 1e-7);
}
