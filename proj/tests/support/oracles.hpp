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

// Reference computations for the tests. Nothing here calls into the
// library's evaluation or solver code.
#ifndef PVCG_TESTS_ORACLES_HPP_
#define PVCG_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "pvcg/model.hpp"

namespace oracle {

/// sum_j theta_j sqrt(c sum x) - sum_i gamma_i x_i, scalar resources.
inline double sqrt_surplus(const std::vector<double>& x, const std::vector<double>& gamma,
                           const std::vector<double>& theta, double scale) {
  double total = 0.0, cost = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    total += x[i];
    cost += gamma[i] * x[i];
  }
  double value = 0.0;
  for (double t : theta) value += t * std::sqrt(scale * total);
  return value - cost;
}

/// Exact maximum over integer k in [0, count] of a function concave in k.
inline double concave_integer_max(const std::function<double(long)>& f, long count) {
  long lo = 0, hi = count;
  while (hi - lo > 2) {
    const long m1 = lo + (hi - lo) / 3;
    const long m2 = hi - (hi - lo) / 3;
    if (f(m1) < f(m2)) {
      lo = m1 + 1;
    } else {
      hi = m2;
    }
  }
  double best = -std::numeric_limits<double>::infinity();
  for (long k = lo; k <= hi; ++k) best = std::max(best, f(k));
  return best;
}

/// Maximum of sqrt_surplus over acceptance ratios on the grid
/// {0, step, ..., 1}^n. Leading axes are enumerated; the last axis, along
/// which the objective is concave, is maximized exactly over its grid.
inline double sqrt_grid_max(const std::vector<double>& cap, const std::vector<double>& gamma,
                            const std::vector<double>& theta, double scale, double step) {
  const long count = std::lround(1.0 / step);
  const std::size_t n = cap.size();
  if (n == 0) return 0.0;
  std::vector<double> x(n, 0.0);
  double best = -std::numeric_limits<double>::infinity();
  std::function<void(std::size_t)> rec = [&](std::size_t axis) {
    if (axis + 1 == n) {
      const double v = concave_integer_max(
          [&](long k) {
            x[axis] = cap[axis] * (static_cast<double>(k) / static_cast<double>(count));
            return sqrt_surplus(x, gamma, theta, scale);
          },
          count);
      best = std::max(best, v);
      return;
    }
    for (long k = 0; k <= count; ++k) {
      x[axis] = cap[axis] * (static_cast<double>(k) / static_cast<double>(count));
      rec(axis + 1);
    }
  };
  rec(0);
  return best;
}

/// Plain exhaustive grid for small problems.
inline double brute_grid_max(const std::function<double(const std::vector<double>&)>& f,
                             std::size_t dims, double step) {
  const long count = std::lround(1.0 / step);
  std::vector<double> eta(dims, 0.0);
  double best = -std::numeric_limits<double>::infinity();
  std::function<void(std::size_t)> rec = [&](std::size_t axis) {
    if (axis == dims) {
      best = std::max(best, f(eta));
      return;
    }
    for (long k = 0; k <= count; ++k) {
      eta[axis] = static_cast<double>(k) / static_cast<double>(count);
      rec(axis + 1);
    }
  };
  rec(0);
  return best;
}

/// Water-fill optimum for sqrt_sum + linear cost on scalar capacities,
/// written out independently: maximize over the fill level U the concave
/// function Theta sqrt(c U) - (cheapest cost of supplying U).
inline double waterfill_surplus(std::vector<double> cap, std::vector<double> gamma,
                                const std::vector<double>& theta, double scale) {
  double big_theta = 0.0;
  for (double t : theta) big_theta += t;
  std::vector<std::size_t> order(cap.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return gamma[a] < gamma[b]; });
  // Candidate optimum on each linear piece of the supply cost.
  double best = 0.0, filled = 0.0, paid = 0.0;
  for (std::size_t k : order) {
    const double g = gamma[k];
    double u_star = g > 0.0 ? scale * big_theta * big_theta / (4.0 * g * g)
                            : std::numeric_limits<double>::infinity();
    const double u = std::clamp(u_star, filled, filled + cap[k]);
    best = std::max(best, big_theta * std::sqrt(scale * u) - paid - g * (u - filled));
    filled += cap[k];
    paid += g * cap[k];
  }
  return best;
}

inline pvcg::Economy sqrt_economy(std::vector<double> cap, std::vector<double> gamma,
                                  std::vector<double> theta, double scale = -1.0) {
  const double c = scale > 0.0 ? scale : static_cast<double>(cap.size());
  pvcg::TypeProfile t;
  t.capacities = pvcg::Quantities::scalars(std::move(cap));
  t.cost_types = std::move(gamma);
  t.valuation_types = std::move(theta);
  return {t, {pvcg::ValuationFamily::sqrt_sum(c), pvcg::CostFamily::linear()}};
}

}  // namespace oracle

#endif  // PVCG_TESTS_ORACLES_HPP_
