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

#ifndef PVCG_LEARNER_HPP_
#define PVCG_LEARNER_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pvcg/mlp.hpp"
#include "pvcg/model.hpp"
#include "pvcg/optimizer.hpp"
#include "pvcg/parallel.hpp"
#include "pvcg/payments.hpp"
#include "pvcg/prior.hpp"

namespace pvcg {

enum class Init { he_uniform, zeros };

/// One network per producer. Network i reads the others' capacities, the
/// others' cost types and all valuation types, each scaled to [0, 1] by its
/// prior bounds (a point-mass prior maps to 0).
class AdjustmentNetworks {
 public:
  AdjustmentNetworks() = default;
  AdjustmentNetworks(const PriorSupport& support, std::vector<std::size_t> hidden,
                     std::uint64_t seed, Init init = Init::he_uniform);

  std::size_t producers() const { return nets_.size(); }
  std::size_t consumers() const { return consumers_; }
  std::size_t dim() const { return dim_; }
  /// (n - 1) * dim + (n - 1) + m.
  std::size_t input_width() const;
  std::uint64_t seed() const { return seed_; }

  Mlp& net(std::size_t i) { return nets_.at(i); }
  const Mlp& net(std::size_t i) const { return nets_.at(i); }

  /// Normalized input of network i. Throws on a profile of the wrong shape.
  std::vector<double> features(std::size_t i, const TypeProfile& others) const;

  /// h_i for the others' profile.
  double evaluate(std::size_t i, const TypeProfile& others) const;

  nlohmann::json to_json() const;
  static AdjustmentNetworks from_json(const nlohmann::json& j);

  bool operator==(const AdjustmentNetworks&) const = default;

 private:
  std::size_t input_width_for(std::size_t producers) const;

  std::size_t consumers_ = 0;
  std::size_t dim_ = 1;
  std::uint64_t seed_ = 0;
  std::vector<Mlp> nets_;
  std::vector<std::vector<double>> lo_;  // per network, per input
  std::vector<std::vector<double>> hi_;
};

/// Throws std::out_of_range for a bad producer index.
double learned_adjustment(const AdjustmentNetworks& nets, std::size_t i,
                          const TypeProfile& others);

AdjustmentFn learned_adjustment_fn(std::shared_ptr<const AdjustmentNetworks> nets);

void save_checkpoint(const AdjustmentNetworks& nets, const std::string& path);
AdjustmentNetworks load_checkpoint(const std::string& path);

/// A prior draw with its cached surpluses and per-network inputs.
struct TrainingSample {
  TypeProfile types;
  double surplus = 0.0;
  std::vector<double> marginal;  // S* - S*_-i
  std::vector<std::vector<double>> features;
};

/// Solves the n + 1 surplus problems of every draw, in parallel across draws.
std::vector<TrainingSample> precompute_samples(const AdjustmentNetworks& nets,
                                               std::vector<TypeProfile> draws,
                                               const Families& families,
                                               const Solver& solver,
                                               Exec exec = Exec::serial);

struct LossValue {
  double loss = 0.0;
  double loss1 = 0.0;  // IR term
  double loss2 = 0.0;  // WBB term
};

/// Per-sample terms for outputs h:
///   Loss1 = sum_i relu(-(S* - S*_-i) - h_i),
///   Loss2 = relu(sum_i ((S* - S*_-i) + h_i) - S*).
LossValue sample_loss(const TrainingSample& sample, std::span<const double> outputs);

/// Batch mean of Loss1 + Loss2.
LossValue composite_loss(const AdjustmentNetworks& nets,
                         std::span<const TrainingSample> batch);

/// Loss and its gradient; grads[i] has net(i).parameter_count() entries.
LossValue composite_loss_gradient(const AdjustmentNetworks& nets,
                                  std::span<const TrainingSample> batch,
                                  std::vector<std::vector<double>>& grads,
                                  Exec exec = Exec::serial);

struct TrainingConfig {
  std::size_t samples_per_epoch = 256;  // T
  std::size_t epochs = 500;
  std::size_t minibatch = 16;  // 0 means the whole epoch batch
  double learning_rate = 1e-2;
  double momentum = 0.9;  // 0 gives plain gradient descent
  double lr_decay = 1.0;  // learning rate of epoch e is learning_rate * lr_decay^e
  std::vector<std::size_t> hidden{10, 10, 10};
  Init init = Init::he_uniform;
  std::uint64_t seed = 1;
  double loss_tolerance = 1e-5;

  void validate() const;
};

nlohmann::json to_json(const TrainingConfig& config);
/// Keys missing from j keep their value in base.
TrainingConfig training_config_from_json(const nlohmann::json& j,
                                         const TrainingConfig& base = {});

struct TraceRow {
  std::size_t epoch = 0;
  std::size_t step = 0;
  LossValue value;
};

/// epochs[e] is the loss of epoch e's fresh batch before that epoch's
/// updates; steps[k] is the minibatch loss before update k. The last epoch
/// row is an evaluation only.
struct TrainingTrace {
  std::vector<TraceRow> epochs;
  std::vector<TraceRow> steps;
  double final_loss = 0.0;
  bool converged = false;
  double wall_seconds = 0.0;
};

/// Gradient descent on all networks jointly. Each epoch draws a fresh batch
/// of T prior samples. Stops once an epoch batch has loss <= tolerance or the
/// epoch budget is spent. Throws std::runtime_error if the loss diverges.
TrainingTrace train(AdjustmentNetworks& nets, const TrainingConfig& config,
                    const PriorSupport& support, const Families& families,
                    const Solver& solver, Exec exec = Exec::serial);

}  // namespace pvcg

#endif  // PVCG_LEARNER_HPP_
