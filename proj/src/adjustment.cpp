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

#include "pvcg/adjustment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pvcg/io.hpp"

namespace pvcg {

double analytic_adjustment(const PriorSupport& support, const Families& families,
                           std::size_t i, const TypeProfile& others,
                           const Solver& solver) {
  support.validate();
  if (i >= support.producers()) throw std::out_of_range("producer index out of range");
  if (others.producers() + 1 != support.producers() ||
      others.consumers() != support.consumers())
    throw std::invalid_argument("others' profile does not match the prior support");
  const auto floor_types =
      others.with_producer(i, support.min_capacity(i), support.max_cost_type(i));
  const double with_floor = optimize_acceptance(Economy{floor_types, families}, solver).surplus;
  const double without = optimize_acceptance(Economy{others, families}, solver).surplus;
  return -(with_floor - without);
}

AdjustmentFn analytic_adjustment_fn(PriorSupport support, Families families,
                                    Solver solver) {
  support.validate();
  return [support = std::move(support), families = std::move(families), solver](
             std::size_t i, const TypeProfile& others) {
    return analytic_adjustment(support, families, i, others, solver);
  };
}

namespace {

// Shared body of the two sampled checks; `replace` builds the profile with
// producer i moved to its reference point.
template <class Replace>
ProbeReport sum_check(const char* name, const PriorSupport& support,
                      const Families& families, const Solver& solver,
                      std::size_t sample_count, std::uint64_t seed, Exec exec,
                      Replace replace) {
  if (sample_count < 1) throw std::invalid_argument("sample_count must be >= 1");
  const auto samples = sample_prior(support, sample_count, seed);
  const std::size_t n = support.producers();

  struct Row {
    double surplus = 0.0;
    double lhs = 0.0;
  };
  std::vector<Row> rows(sample_count);
  for_each_index(sample_count, exec, [&](std::size_t t) {
    const Economy e{samples[t], families};
    Row r;
    r.surplus = optimize_acceptance(e, solver).surplus;
    for (std::size_t i = 0; i < n; ++i) {
      const double reference =
          optimize_acceptance(e.with_types(replace(samples[t], i)), solver).surplus;
      r.lhs += r.surplus - reference;
    }
    rows[t] = r;
  });

  ProbeReport report;
  report.name = name;
  report.trials = sample_count;
  double min_slack = 0.0;
  for (std::size_t t = 0; t < sample_count; ++t) {
    const double gap = rows[t].lhs - rows[t].surplus;
    const double tol = 1e-8 * std::max(1.0, std::abs(rows[t].surplus));
    report.observe(gap);
    min_slack = t == 0 ? -gap : std::min(min_slack, -gap);
    if (gap > tol)
      report.violate({{"types", to_json(samples[t])},
                      {"surplus", rows[t].surplus},
                      {"sum_of_differences", rows[t].lhs}},
                     gap);
  }
  report.details["min_slack"] = min_slack;
  return report;
}

}  // namespace

ProbeReport existence_check(const PriorSupport& support, const Families& families,
                            const Solver& solver, std::size_t sample_count,
                            std::uint64_t seed, Exec exec) {
  support.validate();
  return sum_check("existence", support, families, solver, sample_count, seed, exec,
                   [&](const TypeProfile& t, std::size_t i) {
                     return t.without_producer(i).with_producer(
                         i, support.min_capacity(i), support.max_cost_type(i));
                   });
}

ProbeReport zero_capacity_check(const PriorSupport& support, const Families& families,
                             const Solver& solver, std::size_t sample_count,
                             std::uint64_t seed, Exec exec) {
  support.validate();
  return sum_check("zero_capacity_condition", support, families, solver, sample_count,
                   seed, exec, [&](const TypeProfile& t, std::size_t i) {
                     TypeProfile zeroed = t;
                     for (double& v : zeroed.capacities[i]) v = 0.0;
                     return zeroed;
                   });
}

}  // namespace pvcg
