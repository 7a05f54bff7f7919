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

#include "pvcg/grid_search.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pvcg {

namespace {

struct Grid {
  std::size_t axes = 0;
  std::size_t points = 0;
  double step = 0.0;

  double at(std::size_t k) const {
    return k + 1 == points ? 1.0 : static_cast<double>(k) * step;
  }
};

Grid make_grid(const Economy& economy, double step) {
  economy.types.validate();
  if (!(step > 0.0 && step <= 1.0)) throw std::invalid_argument("grid step must be in (0, 1]");
  Grid g;
  g.axes = economy.producers() * economy.dim();
  if (g.axes > 3)
    throw std::invalid_argument("grid search is limited to producers * dim <= 3");
  const double intervals = std::round(1.0 / step);
  if (std::abs(intervals * step - 1.0) > 1e-9)
    throw std::invalid_argument("grid step must divide 1");
  g.points = static_cast<std::size_t>(intervals) + 1;
  g.step = step;
  return g;
}

struct Best {
  double surplus = -std::numeric_limits<double>::infinity();
  std::vector<double> eta;

  void offer(double s, const std::vector<double>& e) {
    if (s > surplus) {
      surplus = s;
      eta = e;
    }
  }
};

class Scanner {
 public:
  Scanner(const Economy& economy, const Grid& grid, bool sliced)
      : economy_(economy),
        grid_(grid),
        sliced_(sliced),
        accepted_(economy.types.capacities),
        eta_(grid.axes, 0.0) {}

  // Scans every point whose leading `fixed` coordinates are already set.
  void scan(std::size_t axis, Best& best) {
    if (axis == grid_.axes) {
      best.offer(evaluate(), eta_);
      return;
    }
    if (sliced_ && axis + 1 == grid_.axes) {
      bisect(axis, best);
      return;
    }
    for (std::size_t k = 0; k < grid_.points; ++k) {
      eta_[axis] = grid_.at(k);
      scan(axis + 1, best);
    }
  }

  void fix(std::size_t axis, std::size_t k) { eta_[axis] = grid_.at(k); }

 private:
  double evaluate() {
    auto a = accepted_.flat();
    auto c = economy_.types.capacities.flat();
    for (std::size_t k = 0; k < grid_.axes; ++k) a[k] = c[k] * eta_[k];
    return social_surplus(economy_, accepted_);
  }

  double at(std::size_t axis, std::size_t k) {
    eta_[axis] = grid_.at(k);
    return evaluate();
  }

  // First k with f(k + 1) <= f(k); the maximum of a concave sequence.
  void bisect(std::size_t axis, Best& best) {
    std::size_t lo = 0, hi = grid_.points - 1;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (at(axis, mid + 1) > at(axis, mid))
        lo = mid + 1;
      else
        hi = mid;
    }
    best.offer(at(axis, lo), eta_);
  }

  const Economy& economy_;
  const Grid& grid_;
  bool sliced_;
  Quantities accepted_;
  std::vector<double> eta_;
};

GridMaximum to_result(Best best) {
  return {best.surplus, std::move(best.eta)};
}

GridMaximum run(const Economy& economy, double step, Exec exec, bool sliced) {
  const Grid grid = make_grid(economy, step);
  if (grid.axes == 0) {
    Scanner s(economy, grid, sliced);
    Best best;
    s.scan(0, best);
    return to_result(std::move(best));
  }
  if (exec == Exec::serial || (sliced && grid.axes == 1)) {
    Scanner s(economy, grid, sliced);
    Best best;
    s.scan(0, best);
    return to_result(std::move(best));
  }
  // One slab per value of the leading coordinate, reduced in slab order.
  std::vector<Best> slabs(grid.points);
  for_each_index(grid.points, Exec::parallel, [&](std::size_t k) {
    Scanner s(economy, grid, sliced);
    s.fix(0, k);
    s.scan(1, slabs[k]);
  });
  Best best;
  for (auto& slab : slabs) best.offer(slab.surplus, slab.eta);
  return to_result(std::move(best));
}

}  // namespace

GridMaximum grid_search_serial(const Economy& economy, double step) {
  return run(economy, step, Exec::serial, false);
}

GridMaximum grid_search_parallel(const Economy& economy, double step) {
  return run(economy, step, Exec::parallel, false);
}

GridMaximum grid_search(const Economy& economy, double step, Exec exec) {
  return run(economy, step, exec, false);
}

GridMaximum grid_search_sliced(const Economy& economy, double step, Exec exec) {
  if (economy.families.valuation.tag != ValuationTag::sqrt_sum ||
      economy.families.cost.tag != CostTag::linear)
    throw std::invalid_argument(
        "sliced grid search needs an objective concave along each axis");
  return run(economy, step, exec, true);
}

}  // namespace pvcg
