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
#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "pvcg/model.hpp"
#include "pvcg/rng.hpp"

using namespace pvcg;

TEST_CASE("sqrt_sum valuation") {
  const auto f = ValuationFamily::sqrt_sum(2.0);
  CHECK(eval_valuation(f, Quantities::scalars({1.0, 1.0}), 1.0) == doctest::Approx(2.0));
  CHECK(eval_valuation(f, Quantities::scalars({3.0, 0.5}), 0.0) == 0.0);

  const auto f10 = ValuationFamily::sqrt_sum(10.0);
  const Quantities x(10, 1, 2.5);
  CHECK(eval_valuation(f10, x, 0.5) == doctest::Approx(0.5 * std::sqrt(10.0 * 25.0)));
}

TEST_CASE("valuation rejects bad input") {
  const auto f = ValuationFamily::sqrt_sum(2.0);
  CHECK_THROWS(eval_valuation(f, Quantities::scalars({-1.0, 1.0}), 1.0));
  CHECK_THROWS(eval_valuation(f, Quantities::scalars({std::nan(""), 1.0}), 1.0));
  CHECK_THROWS(eval_valuation(f, Quantities::scalars({1.0, 1.0}), -0.5));
}

TEST_CASE("linear cost") {
  const auto c = CostFamily::linear();
  const std::vector<double> zero{0.0};
  const std::vector<double> x{2.5};
  const std::vector<double> v{1.0, 2.0};
  CHECK(eval_cost(c, zero, 0.7) == 0.0);
  CHECK(eval_cost(c, x, 0.5) == doctest::Approx(1.25));
  CHECK(eval_cost(c, v, 0.1) == doctest::Approx(0.3));
  const std::vector<double> neg{-1.0};
  CHECK_THROWS(eval_cost(c, neg, 0.5));
  CHECK_THROWS(eval_cost(c, x, -0.5));
  CHECK_THROWS(eval_cost(CostFamily::linear({1.0, 1.0}), x, 0.5));
}

TEST_CASE("social surplus matches independent summation") {
  const auto e = oracle::sqrt_economy({1.0, 1.0}, {0.1, 0.2}, {1.0});
  CHECK(social_surplus(e, Quantities::scalars({1.0, 1.0})) == doctest::Approx(1.7));
  CHECK(social_surplus(e, Quantities::scalars({0.0, 0.0})) == 0.0);

  const auto single = oracle::sqrt_economy({3.0}, {0.4}, {0.0});
  CHECK(social_surplus(single, Quantities::scalars({2.0})) == doctest::Approx(-0.8));

  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng.index(10);
    const std::size_t m = 1 + rng.index(3);
    std::vector<double> cap(n), gamma(n), theta(m), x(n);
    for (std::size_t i = 0; i < n; ++i) {
      cap[i] = rng.uniform(0.0, 5.0);
      gamma[i] = rng.uniform(0.0, 1.0);
      x[i] = cap[i] * rng.uniform();
    }
    for (double& th : theta) th = rng.uniform();
    const auto econ = oracle::sqrt_economy(cap, gamma, theta);
    // Reverse-order summation in the oracle.
    std::vector<double> rx(x.rbegin(), x.rend()), rg(gamma.rbegin(), gamma.rend());
    std::vector<double> rt(theta.rbegin(), theta.rend());
    const double expect = oracle::sqrt_surplus(rx, rg, rt, static_cast<double>(n));
    const double got = social_surplus(econ, Quantities::scalars(x));
    CHECK(std::abs(got - expect) <= 1e-12 * std::max(1.0, std::abs(expect)));
  }
}

TEST_CASE("surplus gradient matches central differences") {
  Rng rng(5);
  for (auto fam : {ValuationFamily::sqrt_sum(3.0), ValuationFamily::sqrt_sum_squares(3.0)}) {
    for (int t = 0; t < 20; ++t) {
      Economy e = oracle::sqrt_economy({1.0, 2.0, 3.0},
                                       {rng.uniform(), rng.uniform(), rng.uniform()},
                                       {rng.uniform(), rng.uniform()});
      e.families.valuation = fam;
      Quantities x = Quantities::scalars(
          {rng.uniform(0.1, 1.0), rng.uniform(0.1, 2.0), rng.uniform(0.1, 3.0)});
      std::vector<double> g(3);
      social_surplus_gradient(e, x, g);
      for (std::size_t k = 0; k < 3; ++k) {
        const double h = 1e-6;
        Quantities up = x, down = x;
        up.flat()[k] += h;
        down.flat()[k] -= h;
        const double fd = (social_surplus(e, up) - social_surplus(e, down)) / (2 * h);
        CHECK(g[k] == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("removing a zero-input producer leaves the valuation unchanged") {
  const auto f = ValuationFamily::sqrt_sum(3.0);
  const Quantities x = Quantities::scalars({1.5, 0.0, 2.0});
  CHECK(std::abs(eval_valuation(f, x, 0.7) - eval_valuation(f, x.without(1), 0.7)) <= 1e-12);
}

TEST_CASE("Economy validation") {
  auto e = oracle::sqrt_economy({1.0}, {0.1}, {1.0});
  CHECK_NOTHROW(e.validate());
  e.types.valuation_types.clear();
  CHECK_THROWS(e.validate());
  auto neg = oracle::sqrt_economy({1.0}, {-0.1}, {1.0});
  CHECK_THROWS(neg.validate());
}

TEST_CASE("assumption checks on sqrt_sum") {
  const Families fam{ValuationFamily::sqrt_sum(2.0), CostFamily::linear()};
  const auto report = check_assumptions(fam, 10000, 3);
  CHECK(report.samples == 10000);
  CHECK(report.count("monotonicity") == 0);
  CHECK(report.count("zero_input") == 0);
  CHECK(report.count("cross_marginal") == 0);
  // sqrt is sub-additive: sqrt(2 * 2) = 2 < 2 * sqrt(2 * 1).
  CHECK(report.count("super_additivity") > 0);
  const auto f = fam.valuation;
  CHECK(eval_valuation(f, Quantities::scalars({1.0, 1.0}), 1.0) <
        2.0 * eval_valuation(f, Quantities::scalars({1.0, 0.0}), 1.0));
}

TEST_CASE("assumption checks on hand-built families") {
  auto separable = ValuationFamily::make_custom("sum_sqrt", [](const Quantities& x, double th) {
    double s = 0.0;
    for (double v : x.flat()) s += std::sqrt(v);
    return th * s;
  });
  const auto r1 = check_assumptions({separable, CostFamily::linear()}, 10000, 4);
  CHECK(r1.ok());

  auto square = ValuationFamily::make_custom("square_sum", [](const Quantities& x, double th) {
    double s = 0.0;
    for (double v : x.flat()) s += v;
    return th * s * s;
  });
  const auto r2 = check_assumptions({square, CostFamily::linear()}, 10000, 4);
  CHECK(r2.count("cross_marginal") > 0);
  CHECK(r2.count("super_additivity") == 0);
  // Witness x = (1,1), x' = (0,0): v(1,1) - v(0,1) = 3 > v(1,0) - v(0,0) = 1.
  auto v = [&](double a, double b) { return square.custom(Quantities::scalars({a, b}), 1.0); };
  CHECK(v(1, 1) - v(0, 1) > v(1, 0) - v(0, 0));
}
