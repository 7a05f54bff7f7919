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

// Serial reference kernels against their OpenMP counterparts. Arg(0) is the
// serial path, Arg(1) the parallel one.
#include <benchmark/benchmark.h>

#include "pvcg/adjustment.hpp"
#include "pvcg/experiment.hpp"
#include "pvcg/grid_search.hpp"
#include "pvcg/harness.hpp"
#include "pvcg/learner.hpp"

namespace {

using namespace pvcg;

Exec exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Exec::serial : Exec::parallel;
}

Economy three_producers() {
  TypeProfile t;
  t.capacities = Quantities::scalars({2.0, 3.5, 1.0});
  t.cost_types = {0.2, 0.6, 0.4};
  t.valuation_types = {0.7, 0.3};
  return {t, {ValuationFamily::sqrt_sum(3.0), CostFamily::linear()}};
}

void BM_GridSearch(benchmark::State& state) {
  const Economy e = three_producers();
  for (auto _ : state) benchmark::DoNotOptimize(grid_search(e, 1e-2, exec_of(state)));
}
BENCHMARK(BM_GridSearch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_GridSearchSliced(benchmark::State& state) {
  const Economy e = three_producers();
  for (auto _ : state) benchmark::DoNotOptimize(grid_search_sliced(e, 1e-3, exec_of(state)));
}
BENCHMARK(BM_GridSearchSliced)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_PrecomputeSamples(benchmark::State& state) {
  const ExperimentConfig c = reference_config();
  const AdjustmentNetworks nets(c.prior, c.training.hidden, 1);
  const auto draws = sample_prior(c.prior, 1024, 2);
  for (auto _ : state)
    benchmark::DoNotOptimize(precompute_samples(nets, draws, c.families, c.solver, exec_of(state)));
}
BENCHMARK(BM_PrecomputeSamples)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_LossGradient(benchmark::State& state) {
  const ExperimentConfig c = reference_config();
  const AdjustmentNetworks nets(c.prior, c.training.hidden, 1);
  const auto batch = precompute_samples(nets, sample_prior(c.prior, 256, 3), c.families, c.solver);
  std::vector<std::vector<double>> grads;
  for (auto _ : state)
    benchmark::DoNotOptimize(composite_loss_gradient(nets, batch, grads, exec_of(state)));
}
BENCHMARK(BM_LossGradient)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_DsicProbe(benchmark::State& state) {
  const ExperimentConfig c = reference_config();
  const auto economies = prior_economy_sampler(c.prior, c.families);
  const auto deviations = default_deviation_sampler(50, 5.0, 1.0);
  DsicOptions o;
  o.trials = 100;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        probe_dsic(economies, deviations, zero_adjustment(), o, exec_of(state)));
}
BENCHMARK(BM_DsicProbe)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Properties(benchmark::State& state) {
  const ExperimentConfig c = reference_config();
  const auto economies = prior_economy_sampler(c.prior, c.families);
  const auto adjustment = analytic_adjustment_fn(c.prior, c.families);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        check_properties(economies, adjustment, 1000, 4, {}, exec_of(state)));
}
BENCHMARK(BM_Properties)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ExistenceCheck(benchmark::State& state) {
  const ExperimentConfig c = reference_config();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        existence_check(c.prior, c.families, c.solver, 2000, 5, exec_of(state)));
}
BENCHMARK(BM_ExistenceCheck)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
