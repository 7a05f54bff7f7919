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

#include <atomic>
#include <stdexcept>

#include "doctest.h"
#include "pvcg/adjustment.hpp"
#include "pvcg/harness.hpp"
#include "pvcg/learner.hpp"
#include "pvcg/parallel.hpp"

using namespace pvcg;

namespace {

PriorSupport prior(std::size_t n) {
  return PriorSupport::uniform(n, 2, {Distribution::uniform, 0.0, 5.0},
                               {Distribution::uniform, 0.0, 1.0},
                               {Distribution::uniform, 0.0, 1.0});
}

Families fam(std::size_t n) {
  return {ValuationFamily::sqrt_sum(static_cast<double>(n)), CostFamily::linear()};
}

}  // namespace

TEST_CASE("for_each_index visits every index once") {
  std::vector<int> hits(1000, 0);
  for_each_index(hits.size(), Exec::parallel, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK(hardware_threads() >= 1);
}

TEST_CASE("for_each_index rethrows the lowest failing index") {
  auto body = [](std::size_t i) {
    if (i == 7 || i == 30) throw std::runtime_error(std::to_string(i));
  };
  for (Exec e : {Exec::serial, Exec::parallel}) {
    try {
      for_each_index(50, e, body);
      FAIL("expected a throw");
    } catch (const std::runtime_error& err) {
      CHECK(std::string(err.what()) == "7");
    }
  }
}

TEST_CASE("counterfactual table is identical serial and parallel") {
  Rng rng(3);
  for (int k = 0; k < 20; ++k) {
    const Economy e{sample_types(prior(6), rng), fam(6)};
    for (auto method : {SolverMethod::analytic, SolverMethod::projected_gradient}) {
      const Solver s{method, {}};
      const auto a = solve_with_counterfactuals(e, s, Exec::serial);
      const auto b = solve_with_counterfactuals(e, s, Exec::parallel);
      CHECK(a.full.surplus == b.full.surplus);
      CHECK(a.marginal_contributions() == b.marginal_contributions());
    }
  }
}

TEST_CASE("sampled checks are identical serial and parallel") {
  const auto s = prior(5);
  const auto f = fam(5);
  CHECK(to_json(existence_check(s, f, {}, 300, 4, Exec::serial)) ==
        to_json(existence_check(s, f, {}, 300, 4, Exec::parallel)));
  const auto econ = prior_economy_sampler(s, f);
  const auto adj = analytic_adjustment_fn(s, f);
  const auto a = check_properties(econ, adj, 200, 5, {}, Exec::serial);
  const auto b = check_properties(econ, adj, 200, 5, {}, Exec::parallel);
  CHECK(to_json(a.ir) == to_json(b.ir));
  CHECK(to_json(a.wbb) == to_json(b.wbb));
  CHECK(to_json(check_surplus_monotonicity(econ, 300, 6, {}, Exec::serial)) ==
        to_json(check_surplus_monotonicity(econ, 300, 6, {}, Exec::parallel)));
}

TEST_CASE("loss gradient is identical serial and parallel") {
  const auto s = prior(4);
  const AdjustmentNetworks nets(s, {8, 8}, 2);
  const auto batch = precompute_samples(nets, sample_prior(s, 64, 9), fam(4), {}, Exec::parallel);
  const auto serial_batch = precompute_samples(nets, sample_prior(s, 64, 9), fam(4), {});
  CHECK(composite_loss(nets, batch).loss == composite_loss(nets, serial_batch).loss);
  std::vector<std::vector<double>> ga, gb;
  const auto la = composite_loss_gradient(nets, batch, ga, Exec::serial);
  const auto lb = composite_loss_gradient(nets, batch, gb, Exec::parallel);
  CHECK(la.loss == lb.loss);
  CHECK(ga == gb);
}
