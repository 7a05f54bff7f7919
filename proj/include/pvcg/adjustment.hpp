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

#ifndef PVCG_ADJUSTMENT_HPP_
#define PVCG_ADJUSTMENT_HPP_

#include <cstddef>
#include <cstdint>

#include "pvcg/model.hpp"
#include "pvcg/optimizer.hpp"
#include "pvcg/parallel.hpp"
#include "pvcg/payments.hpp"
#include "pvcg/prior.hpp"
#include "pvcg/report.hpp"

namespace pvcg {

/// Closed-form adjustment
///   h_i = -[ S*((min x_i, x_-i), (max gamma_i, gamma_-i), theta) - S*_-i(x_-i, gamma_-i, theta) ]
/// where the extremes come from producer i's prior support. Reads only the
/// others' profile.
double analytic_adjustment(const PriorSupport& support, const Families& families,
                           std::size_t i, const TypeProfile& others,
                           const Solver& solver = {});

AdjustmentFn analytic_adjustment_fn(PriorSupport support, Families families,
                                    Solver solver = {});

/// Samples the support and checks
///   sum_i [S*(x, gamma, theta) - S*((min x_i, x_-i), (max gamma_i, gamma_-i), theta)] <= S*(x, gamma, theta),
/// the condition under which an adjustment giving IR and WBB exists.
/// details.min_slack holds the smallest right-minus-left margin seen.
ProbeReport existence_check(const PriorSupport& support, const Families& families,
                            const Solver& solver, std::size_t sample_count,
                            std::uint64_t seed, Exec exec = Exec::serial);

/// The zero-capacity special case: sum_i [S* - S*((0, x_-i), gamma, theta)] <= S*.
/// Holds for super-additive valuations with decreasing cross marginal returns.
ProbeReport zero_capacity_check(const PriorSupport& support, const Families& families,
                             const Solver& solver, std::size_t sample_count,
                             std::uint64_t seed, Exec exec = Exec::serial);

}  // namespace pvcg

#endif  // PVCG_ADJUSTMENT_HPP_
