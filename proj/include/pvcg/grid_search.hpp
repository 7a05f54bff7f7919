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

#ifndef PVCG_GRID_SEARCH_HPP_
#define PVCG_GRID_SEARCH_HPP_

#include <vector>

#include "pvcg/model.hpp"
#include "pvcg/parallel.hpp"

namespace pvcg {

/// Best grid point of S(x_hat (.) eta) with every eta coordinate on
/// {0, step, 2 step, ..., 1}. Independent of the solvers in optimizer.hpp;
/// used as the oracle for them. Limited to producers * dim <= 3.
struct GridMaximum {
  double surplus = 0.0;
  std::vector<double> ratios;  // flat, producers x dim
};

/// Exhaustive enumeration, single thread. Reference implementation.
GridMaximum grid_search_serial(const Economy& economy, double step);

/// Exhaustive enumeration with the outermost axis split across OpenMP
/// threads. Returns exactly what grid_search_serial returns.
GridMaximum grid_search_parallel(const Economy& economy, double step);

GridMaximum grid_search(const Economy& economy, double step, Exec exec);

/// Exhaustive over all axes but the last; on the last axis the grid maximum
/// is located by bisection on the sign of the forward difference, which is
/// exact for objectives concave along that axis (sqrt_sum with linear cost).
/// Makes step 1e-3 on three producers affordable.
GridMaximum grid_search_sliced(const Economy& economy, double step, Exec exec);

}  // namespace pvcg

#endif  // PVCG_GRID_SEARCH_HPP_
