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

#ifndef PVCG_EXPERIMENT_HPP_
#define PVCG_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "pvcg/harness.hpp"
#include "pvcg/learner.hpp"
#include "pvcg/model.hpp"
#include "pvcg/optimizer.hpp"
#include "pvcg/payments.hpp"
#include "pvcg/prior.hpp"
#include "pvcg/report.hpp"

namespace pvcg {

/// Payment surface of one producer over its (capacity, cost type) report,
/// everyone else fixed.
struct SurfaceSpec {
  std::size_t producer = 0;
  std::size_t capacity_points = 50;
  std::size_t cost_points = 50;
  double capacity_lo = 0.0;
  double capacity_hi = 5.0;
  double cost_lo = 0.0;
  double cost_hi = 1.0;
  double others_capacity = 2.5;
  double others_cost_type = 0.5;
  double valuation_type = 0.5;
};

/// Sample counts of the probes run by verify and run_experiment.
struct ProbeSpec {
  std::size_t dsic_trials = 1000;
  std::size_t dsic_deviations = 50;
  std::size_t property_trials = 10000;
  std::size_t monotonicity_trials = 10000;
  std::size_t existence_samples = 10000;
  std::size_t assumption_samples = 10000;
  std::size_t efficiency_trials = 20;
  /// Minimum IR and WBB pass rate for a learned adjustment.
  double learned_pass_rate = 0.99;
};

struct ExperimentConfig {
  std::size_t producers = 10;
  std::size_t consumers = 2;
  std::size_t dim = 1;
  Families families;
  PriorSupport prior;
  TrainingConfig training;
  Solver solver;
  double punishment = kDefaultPunishment;
  SurfaceSpec surface;
  ProbeSpec probes;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 1;

  void validate() const;
};

/// n = 10, m = 2, v = theta sqrt(n sum x), c = gamma x, capacities
/// U[0,5], cost and valuation types U[0,1].
ExperimentConfig reference_config();

/// Missing keys take the reference_config() values. Keys: n, m, dim,
/// valuation_family, cost_family, prior, training, solver, punishment,
/// surface, probes, out, seed.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& config);

/// "zero", "analytic" or "learned:PATH".
AdjustmentFn make_adjustment(const std::string& spec, const ExperimentConfig& config);

struct SurfaceRecord {
  SurfaceSpec spec;
  std::vector<double> capacities;  // axis values
  std::vector<double> cost_types;
  /// Row-major [cost index][capacity index].
  std::vector<double> tau;
  std::vector<double> adjustment;
  std::vector<double> payment;

  double at(std::size_t cost, std::size_t capacity) const {
    return payment[cost * capacities.size() + capacity];
  }
};

/// Evaluates p = tau + h of spec.producer on the report grid with truthful
/// reports. Throws std::invalid_argument on a zero resolution.
SurfaceRecord payment_surface(const ExperimentConfig& config, const AdjustmentFn& adjustment,
                              Exec exec = Exec::serial);

/// Nondecreasing along capacity and nonincreasing along cost type (1e-6
/// per step), and at the largest cost type the payment is within 1e-3 of
/// the adjustment alone.
ProbeReport check_surface_shape(const SurfaceRecord& surface);

/// Probes for one adjustment rule.
struct AdjustmentVerdict {
  std::string name;
  ProbeReport dsic;
  PropertySuite properties;
  bool statistical = false;  // IR and WBB judged by pass rate, not zero violations
  double ir_pass_rate = 1.0;
  double wbb_pass_rate = 1.0;
  bool pass = false;
};

AdjustmentVerdict verify_adjustment(const ExperimentConfig& config, const std::string& name,
                                    const AdjustmentFn& adjustment, bool statistical,
                                    Exec exec = Exec::serial);

/// Checks that depend only on the families and the prior. pass covers the
/// existence condition, the zero-capacity condition, surplus monotonicity and
/// efficiency.
/// The assumption report is informational: the sqrt_sum family is
/// sub-additive across producers, yet the conditions the payment guarantees
/// rest on still hold.
struct ModelChecks {
  AssumptionReport assumptions;
  ProbeReport existence;
  ProbeReport zero_capacity;
  ProbeReport surplus_monotonicity;
  ProbeReport efficiency;
  bool pass = false;
};

ModelChecks verify_model(const ExperimentConfig& config, Exec exec = Exec::serial);

nlohmann::json to_json(const AdjustmentVerdict& verdict);
nlohmann::json to_json(const ModelChecks& checks);

/// CSV with one header row and %.9g numbers.
void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& rows);
void write_surface_csv(const std::filesystem::path& path, const SurfaceRecord& surface);

struct ExperimentResult {
  TrainingTrace trace;
  std::shared_ptr<const AdjustmentNetworks> nets;
  ModelChecks model;
  std::vector<AdjustmentVerdict> verdicts;  // zero, analytic, learned
  SurfaceRecord surface;
  ProbeReport surface_shape;
  bool pass = false;
};

/// Trains the networks, runs every probe with the zero, analytic and learned
/// adjustments, computes the learned payment surface and writes
/// loss_trace.csv, loss_steps.csv, surface.csv, checkpoint.json and
/// report.json under config.out_dir. Outputs depend only on the config.
ExperimentResult run_experiment(const ExperimentConfig& config, Exec exec = Exec::serial);

}  // namespace pvcg

#endif  // PVCG_EXPERIMENT_HPP_
