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

#include "pvcg/learner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pvcg/io.hpp"
#include "pvcg/rng.hpp"

namespace pvcg {

namespace {

constexpr std::uint64_t kBatchStream = 0x6261746368ULL;

double relu(double v) { return v < 0.0 ? 0.0 : v; }  // NaN passes through

double scale(double v, double lo, double hi) {
  return hi > lo ? (v - lo) / (hi - lo) : 0.0;
}

}  // namespace

AdjustmentNetworks::AdjustmentNetworks(const PriorSupport& support,
                                       std::vector<std::size_t> hidden,
                                       std::uint64_t seed, Init init)
    : consumers_(support.consumers()), dim_(support.dim), seed_(seed) {
  support.validate();
  const std::size_t n = support.producers();
  if (n == 0) throw std::invalid_argument("need at least one producer");
  std::vector<std::size_t> layers;
  layers.push_back(input_width_for(n));
  layers.insert(layers.end(), hidden.begin(), hidden.end());
  layers.push_back(1);
  nets_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, i));
    nets_.push_back(init == Init::zeros ? Mlp(layers) : Mlp::he_uniform(layers, rng));
    std::vector<double> lo, hi;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      for (std::size_t d = 0; d < dim_; ++d) {
        lo.push_back(support.capacity[k].lo);
        hi.push_back(support.capacity[k].hi);
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      lo.push_back(support.cost_type[k].lo);
      hi.push_back(support.cost_type[k].hi);
    }
    for (const auto& p : support.valuation_type) {
      lo.push_back(p.lo);
      hi.push_back(p.hi);
    }
    lo_.push_back(std::move(lo));
    hi_.push_back(std::move(hi));
  }
}

std::size_t AdjustmentNetworks::input_width_for(std::size_t n) const {
  return (n - 1) * dim_ + (n - 1) + consumers_;
}

std::size_t AdjustmentNetworks::input_width() const {
  return nets_.empty() ? 0 : input_width_for(nets_.size());
}

std::vector<double> AdjustmentNetworks::features(std::size_t i,
                                                 const TypeProfile& others) const {
  if (i >= nets_.size()) throw std::out_of_range("producer index out of range");
  const std::size_t n = nets_.size();
  if (others.producers() != n - 1 || others.cost_types.size() != n - 1 ||
      others.consumers() != consumers_ ||
      (n > 1 && others.dim() != dim_))
    throw std::invalid_argument("adjustment input does not match the network shape");
  const auto& lo = lo_[i];
  const auto& hi = hi_[i];
  std::vector<double> x;
  x.reserve(lo.size());
  for (double v : others.capacities.flat()) x.push_back(v);
  for (double v : others.cost_types) x.push_back(v);
  for (double v : others.valuation_types) x.push_back(v);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = scale(x[k], lo[k], hi[k]);
  return x;
}

double AdjustmentNetworks::evaluate(std::size_t i, const TypeProfile& others) const {
  return nets_.at(i).forward(features(i, others));
}

nlohmann::json AdjustmentNetworks::to_json() const {
  nlohmann::json j;
  j["format"] = "pvcg-adjustment-networks";
  j["version"] = 1;
  j["producers"] = producers();
  j["consumers"] = consumers_;
  j["dim"] = dim_;
  j["rng_seed"] = seed_;
  j["nets"] = nlohmann::json::array();
  for (std::size_t i = 0; i < nets_.size(); ++i) {
    auto net = nets_[i].to_json();
    net["input_lo"] = lo_[i];
    net["input_hi"] = hi_[i];
    j["nets"].push_back(std::move(net));
  }
  return j;
}

AdjustmentNetworks AdjustmentNetworks::from_json(const nlohmann::json& j) {
  if (j.value("format", std::string()) != "pvcg-adjustment-networks")
    throw std::invalid_argument("not an adjustment network checkpoint");
  AdjustmentNetworks out;
  out.consumers_ = j.at("consumers").get<std::size_t>();
  out.dim_ = j.at("dim").get<std::size_t>();
  out.seed_ = j.at("rng_seed").get<std::uint64_t>();
  const std::size_t n = j.at("producers").get<std::size_t>();
  const auto& nets = j.at("nets");
  if (n == 0 || nets.size() != n)
    throw std::invalid_argument("checkpoint network count mismatch");
  for (const auto& net : nets) {
    out.nets_.push_back(Mlp::from_json(net));
    out.lo_.push_back(net.at("input_lo").get<std::vector<double>>());
    out.hi_.push_back(net.at("input_hi").get<std::vector<double>>());
    const std::size_t width = out.input_width_for(n);
    if (out.nets_.back().input_width() != width || out.lo_.back().size() != width ||
        out.hi_.back().size() != width)
      throw std::invalid_argument("checkpoint input width mismatch");
  }
  return out;
}

double learned_adjustment(const AdjustmentNetworks& nets, std::size_t i,
                          const TypeProfile& others) {
  if (i >= nets.producers()) throw std::out_of_range("producer index out of range");
  return nets.evaluate(i, others);
}

AdjustmentFn learned_adjustment_fn(std::shared_ptr<const AdjustmentNetworks> nets) {
  if (!nets) throw std::invalid_argument("null adjustment networks");
  return [nets](std::size_t i, const TypeProfile& others) {
    return learned_adjustment(*nets, i, others);
  };
}

void save_checkpoint(const AdjustmentNetworks& nets, const std::string& path) {
  write_json_file(path, nets.to_json());
}

AdjustmentNetworks load_checkpoint(const std::string& path) {
  return AdjustmentNetworks::from_json(read_json_file(path));
}

std::vector<TrainingSample> precompute_samples(const AdjustmentNetworks& nets,
                                               std::vector<TypeProfile> draws,
                                               const Families& families,
                                               const Solver& solver, Exec exec) {
  const std::size_t n = nets.producers();
  std::vector<TrainingSample> out(draws.size());
  for_each_index(draws.size(), exec, [&](std::size_t t) {
    TrainingSample& s = out[t];
    s.types = std::move(draws[t]);
    if (s.types.producers() != n)
      throw std::invalid_argument("sample has the wrong producer count");
    const Economy view{s.types, families};
    const SurplusTable table = solve_with_counterfactuals(view, solver);
    s.surplus = table.surplus();
    s.marginal = table.marginal_contributions();
    s.features.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      s.features[i] = nets.features(i, s.types.without_producer(i));
  });
  return out;
}

LossValue sample_loss(const TrainingSample& sample, std::span<const double> outputs) {
  const std::size_t n = sample.marginal.size();
  if (outputs.size() != n) throw std::invalid_argument("one output per producer expected");
  LossValue v;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    v.loss1 += relu(-sample.marginal[i] - outputs[i]);
    total += sample.marginal[i] + outputs[i];
  }
  v.loss2 = relu(total - sample.surplus);
  v.loss = v.loss1 + v.loss2;
  return v;
}

namespace {

void check_batch(const AdjustmentNetworks& nets, std::span<const TrainingSample> batch) {
  if (batch.empty()) throw std::invalid_argument("empty training batch");
  for (const auto& s : batch)
    if (s.marginal.size() != nets.producers() || s.features.size() != nets.producers())
      throw std::invalid_argument("training sample is missing precomputed surpluses");
}

LossValue mean(LossValue sum, std::size_t count) {
  const double t = static_cast<double>(count);
  return {sum.loss / t, sum.loss1 / t, sum.loss2 / t};
}

}  // namespace

LossValue composite_loss(const AdjustmentNetworks& nets,
                         std::span<const TrainingSample> batch) {
  check_batch(nets, batch);
  const std::size_t n = nets.producers();
  LossValue sum;
  std::vector<double> h(n);
  for (const auto& s : batch) {
    for (std::size_t i = 0; i < n; ++i) h[i] = nets.net(i).forward(s.features[i]);
    const LossValue v = sample_loss(s, h);
    sum.loss1 += v.loss1;
    sum.loss2 += v.loss2;
    sum.loss += v.loss;
  }
  return mean(sum, batch.size());
}

LossValue composite_loss_gradient(const AdjustmentNetworks& nets,
                                  std::span<const TrainingSample> batch,
                                  std::vector<std::vector<double>>& grads, Exec exec) {
  check_batch(nets, batch);
  const std::size_t n = nets.producers();
  const std::size_t count = batch.size();
  std::vector<std::vector<Mlp::Tape>> tapes(n, std::vector<Mlp::Tape>(count));
  std::vector<double> outputs(count * n);
  for_each_index(n, exec, [&](std::size_t i) {
    for (std::size_t t = 0; t < count; ++t)
      outputs[t * n + i] = nets.net(i).forward(batch[t].features[i], tapes[i][t]);
  });

  // d loss / d h_i per sample, with relu'(0) = 0.
  std::vector<double> upstream(count * n);
  LossValue sum;
  const double inv = 1.0 / static_cast<double>(count);
  for (std::size_t t = 0; t < count; ++t) {
    const auto& s = batch[t];
    std::span<const double> h(outputs.data() + t * n, n);
    const LossValue v = sample_loss(s, h);
    sum.loss1 += v.loss1;
    sum.loss2 += v.loss2;
    sum.loss += v.loss;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += s.marginal[i] + h[i];
    const double wbb = total - s.surplus > 0.0 ? 1.0 : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ir = -s.marginal[i] - h[i] > 0.0 ? -1.0 : 0.0;
      upstream[t * n + i] = (ir + wbb) * inv;
    }
  }

  grads.resize(n);
  for_each_index(n, exec, [&](std::size_t i) {
    const Mlp& net = nets.net(i);
    grads[i].assign(net.parameter_count(), 0.0);
    for (std::size_t t = 0; t < count; ++t) {
      const double u = upstream[t * n + i];
      if (u != 0.0) net.backward(tapes[i][t], u, grads[i]);
    }
  });
  return mean(sum, count);
}

void TrainingConfig::validate() const {
  if (samples_per_epoch < 1) throw std::invalid_argument("T must be at least 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw std::invalid_argument("learning rate must be positive");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0))
    throw std::invalid_argument("lr_decay must lie in (0, 1]");
  if (!(momentum >= 0.0 && momentum < 1.0))
    throw std::invalid_argument("momentum must lie in [0, 1)");
  if (!(loss_tolerance >= 0.0)) throw std::invalid_argument("loss tolerance must be >= 0");
  for (std::size_t w : hidden)
    if (w == 0) throw std::invalid_argument("hidden widths must be positive");
}

nlohmann::json to_json(const TrainingConfig& c) {
  return {{"samples_per_epoch", c.samples_per_epoch},
          {"epochs", c.epochs},
          {"minibatch", c.minibatch},
          {"learning_rate", c.learning_rate},
          {"momentum", c.momentum},
          {"lr_decay", c.lr_decay},
          {"hidden", c.hidden},
          {"init", c.init == Init::zeros ? "zeros" : "he_uniform"},
          {"seed", c.seed},
          {"loss_tolerance", c.loss_tolerance}};
}

TrainingConfig training_config_from_json(const nlohmann::json& j,
                                         const TrainingConfig& base) {
  TrainingConfig c = base;
  c.samples_per_epoch = j.value("samples_per_epoch", c.samples_per_epoch);
  c.epochs = j.value("epochs", c.epochs);
  c.minibatch = j.value("minibatch", c.minibatch);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.momentum = j.value("momentum", c.momentum);
  c.lr_decay = j.value("lr_decay", c.lr_decay);
  c.hidden = j.value("hidden", c.hidden);
  const std::string init =
      j.value("init", std::string(c.init == Init::zeros ? "zeros" : "he_uniform"));
  if (init == "zeros") {
    c.init = Init::zeros;
  } else if (init == "he_uniform") {
    c.init = Init::he_uniform;
  } else {
    throw std::invalid_argument("unknown init: " + init);
  }
  c.seed = j.value("seed", c.seed);
  c.loss_tolerance = j.value("loss_tolerance", c.loss_tolerance);
  c.validate();
  return c;
}

TrainingTrace train(AdjustmentNetworks& nets, const TrainingConfig& config,
                    const PriorSupport& support, const Families& families,
                    const Solver& solver, Exec exec) {
  config.validate();
  if (support.producers() != nets.producers() || support.consumers() != nets.consumers())
    throw std::invalid_argument("prior does not match the networks");
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = nets.producers();
  const std::uint64_t batch_seed = derive_seed(config.seed, kBatchStream);
  const std::size_t chunk =
      config.minibatch == 0 ? config.samples_per_epoch
                            : std::min(config.minibatch, config.samples_per_epoch);

  std::vector<std::vector<double>> velocity(n), grads;
  for (std::size_t i = 0; i < n; ++i) velocity[i].assign(nets.net(i).parameter_count(), 0.0);

  auto diverged = [](const LossValue& v) { return !std::isfinite(v.loss); };

  TrainingTrace trace;
  std::size_t step = 0;
  for (std::size_t epoch = 0;; ++epoch) {
    auto draws = sample_prior(support, config.samples_per_epoch,
                              derive_seed(batch_seed, epoch));
    const auto batch = precompute_samples(nets, std::move(draws), families, solver, exec);
    const LossValue epoch_loss = composite_loss(nets, batch);
    if (diverged(epoch_loss))
      throw std::runtime_error("training diverged at epoch " + std::to_string(epoch) +
                               " (loss " + std::to_string(epoch_loss.loss) + ")");
    trace.epochs.push_back({epoch, step, epoch_loss});
    trace.final_loss = epoch_loss.loss;
    if (epoch_loss.loss <= config.loss_tolerance) {
      trace.converged = true;
      break;
    }
    if (epoch == config.epochs) break;

    const double lr = config.learning_rate * std::pow(config.lr_decay, static_cast<double>(epoch));

    for (std::size_t begin = 0; begin < batch.size(); begin += chunk) {
      std::span<const TrainingSample> mini(batch.data() + begin,
                                           std::min(chunk, batch.size() - begin));
      const LossValue v = composite_loss_gradient(nets, mini, grads, exec);
      if (diverged(v))
        throw std::runtime_error("training diverged at step " + std::to_string(step));
      trace.steps.push_back({epoch, step, v});
      for (std::size_t i = 0; i < n; ++i) {
        auto p = nets.net(i).parameters();
        for (std::size_t k = 0; k < p.size(); ++k) {
          velocity[i][k] = config.momentum * velocity[i][k] -
                           lr * grads[i][k];
          p[k] += velocity[i][k];
        }
      }
      ++step;
    }
  }
  trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return trace;
}

}  // namespace pvcg
