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

#include "pvcg/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "pvcg/adjustment.hpp"
#include "pvcg/io.hpp"

namespace pvcg {

namespace {

// Sub-streams of the master seed.
enum Stream : std::uint64_t {
  kTraining = 1,
  kDsic,
  kProperties,
  kMonotonicity,
  kExistence,
  kZeroCapacity,
  kAssumptions,
  kEfficiency,
};

std::vector<double> axis(double lo, double hi, std::size_t points) {
  std::vector<double> out(points);
  for (std::size_t k = 0; k < points; ++k)
    out[k] = points == 1 ? lo
                         : lo + (hi - lo) * static_cast<double>(k) /
                                    static_cast<double>(points - 1);
  return out;
}

std::string format_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  return f;
}

// IR and WBB record at most one witness per economy.
double rate(const ProbeReport& r) {
  if (r.trials == 0) return 1.0;
  return 1.0 - static_cast<double>(r.violations.size()) / static_cast<double>(r.trials);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (producers < 1 || consumers < 1 || dim < 1)
    throw std::invalid_argument("experiment needs n >= 1, m >= 1, dim >= 1");
  prior.validate();
  if (prior.producers() != producers || prior.consumers() != consumers || prior.dim != dim)
    throw std::invalid_argument("prior does not match n, m and dim");
  training.validate();
  if (!(punishment > 0.0) || !std::isfinite(punishment))
    throw std::invalid_argument("punishment must be positive and finite");
  if (surface.capacity_points == 0 || surface.cost_points == 0)
    throw std::invalid_argument("surface resolution must be positive");
  if (surface.producer >= producers) throw std::invalid_argument("surface producer out of range");
  if (probes.dsic_trials < 1 || probes.property_trials < 1 || probes.monotonicity_trials < 1 ||
      probes.existence_samples < 1 || probes.assumption_samples < 1)
    throw std::invalid_argument("probe sample counts must be >= 1");
}

ExperimentConfig reference_config() {
  ExperimentConfig c;
  c.families = {ValuationFamily::sqrt_sum(static_cast<double>(c.producers)),
                CostFamily::linear()};
  c.prior = PriorSupport::uniform(c.producers, c.consumers, {Distribution::uniform, 0.0, 5.0},
                                  {Distribution::uniform, 0.0, 1.0},
                                  {Distribution::uniform, 0.0, 1.0});
  // Larger epochs cover the corners of the prior that decide the IR rate.
  c.training.samples_per_epoch = 1024;
  return c;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig c = reference_config();
  c.producers = j.value("n", c.producers);
  c.consumers = j.value("m", c.consumers);
  c.dim = j.value("dim", c.dim);
  c.families.valuation = valuation_family_from_json(
      j.value("valuation_family", nlohmann::json{{"tag", "sqrt_sum"}}), c.producers);
  c.families.cost =
      cost_family_from_json(j.value("cost_family", nlohmann::json{{"tag", "linear"}}));
  if (j.contains("prior")) {
    c.prior = prior_from_json(j.at("prior"), c.producers, c.consumers, c.dim);
  } else {
    c.prior = PriorSupport::uniform(c.producers, c.consumers, c.prior.capacity.front(),
                                    c.prior.cost_type.front(),
                                    c.prior.valuation_type.front(), c.dim);
  }
  if (j.contains("training"))
    c.training = training_config_from_json(j.at("training"), c.training);
  if (j.contains("solver"))
    c.solver.method = parse_solver_method(j.at("solver").get<std::string>());
  c.punishment = j.value("punishment", c.punishment);
  if (j.contains("surface")) {
    const auto& s = j.at("surface");
    auto& d = c.surface;
    d.producer = s.value("producer", d.producer);
    d.capacity_points = s.value("capacity_points", d.capacity_points);
    d.cost_points = s.value("cost_points", d.cost_points);
    d.capacity_lo = s.value("capacity_lo", d.capacity_lo);
    d.capacity_hi = s.value("capacity_hi", d.capacity_hi);
    d.cost_lo = s.value("cost_lo", d.cost_lo);
    d.cost_hi = s.value("cost_hi", d.cost_hi);
    d.others_capacity = s.value("others_capacity", d.others_capacity);
    d.others_cost_type = s.value("others_cost_type", d.others_cost_type);
    d.valuation_type = s.value("valuation_type", d.valuation_type);
  }
  if (j.contains("probes")) {
    const auto& p = j.at("probes");
    auto& d = c.probes;
    d.dsic_trials = p.value("dsic_trials", d.dsic_trials);
    d.dsic_deviations = p.value("dsic_deviations", d.dsic_deviations);
    d.property_trials = p.value("property_trials", d.property_trials);
    d.monotonicity_trials = p.value("monotonicity_trials", d.monotonicity_trials);
    d.existence_samples = p.value("existence_samples", d.existence_samples);
    d.assumption_samples = p.value("assumption_samples", d.assumption_samples);
    d.efficiency_trials = p.value("efficiency_trials", d.efficiency_trials);
    d.learned_pass_rate = p.value("learned_pass_rate", d.learned_pass_rate);
  }
  c.out_dir = j.value("out", c.out_dir.string());
  c.seed = j.value("seed", c.seed);
  c.validate();
  return c;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json training = to_json(c.training);
  training.erase("seed");  // derived from the master seed
  const auto& s = c.surface;
  const auto& p = c.probes;
  return {{"n", c.producers},
          {"m", c.consumers},
          {"dim", c.dim},
          {"valuation_family", to_json(c.families.valuation)},
          {"cost_family", to_json(c.families.cost)},
          {"prior", to_json(c.prior)},
          {"training", training},
          {"solver", to_string(c.solver.method)},
          {"punishment", c.punishment},
          {"surface",
           {{"producer", s.producer},
            {"capacity_points", s.capacity_points},
            {"cost_points", s.cost_points},
            {"capacity_lo", s.capacity_lo},
            {"capacity_hi", s.capacity_hi},
            {"cost_lo", s.cost_lo},
            {"cost_hi", s.cost_hi},
            {"others_capacity", s.others_capacity},
            {"others_cost_type", s.others_cost_type},
            {"valuation_type", s.valuation_type}}},
          {"probes",
           {{"dsic_trials", p.dsic_trials},
            {"dsic_deviations", p.dsic_deviations},
            {"property_trials", p.property_trials},
            {"monotonicity_trials", p.monotonicity_trials},
            {"existence_samples", p.existence_samples},
            {"assumption_samples", p.assumption_samples},
            {"efficiency_trials", p.efficiency_trials},
            {"learned_pass_rate", p.learned_pass_rate}}},
          {"out", c.out_dir.string()},
          {"seed", c.seed}};
}

AdjustmentFn make_adjustment(const std::string& spec, const ExperimentConfig& config) {
  if (spec == "zero") return zero_adjustment();
  if (spec == "analytic")
    return analytic_adjustment_fn(config.prior, config.families, config.solver);
  const std::string prefix = "learned:";
  if (spec.rfind(prefix, 0) == 0) {
    auto nets = std::make_shared<const AdjustmentNetworks>(
        load_checkpoint(spec.substr(prefix.size())));
    if (nets->producers() != config.producers || nets->consumers() != config.consumers ||
        nets->dim() != config.dim)
      throw std::invalid_argument("checkpoint does not match the configured economy");
    return learned_adjustment_fn(std::move(nets));
  }
  throw std::invalid_argument("unknown adjustment: " + spec +
                              " (expected zero, analytic or learned:PATH)");
}

SurfaceRecord payment_surface(const ExperimentConfig& config, const AdjustmentFn& adjustment,
                              Exec exec) {
  const SurfaceSpec& spec = config.surface;
  if (spec.capacity_points == 0 || spec.cost_points == 0)
    throw std::invalid_argument("surface resolution must be positive");
  if (spec.producer >= config.producers)
    throw std::invalid_argument("surface producer out of range");
  SurfaceRecord out;
  out.spec = spec;
  out.capacities = axis(spec.capacity_lo, spec.capacity_hi, spec.capacity_points);
  out.cost_types = axis(spec.cost_lo, spec.cost_hi, spec.cost_points);
  const std::size_t cells = spec.capacity_points * spec.cost_points;
  out.tau.resize(cells);
  out.adjustment.resize(cells);
  out.payment.resize(cells);

  TypeProfile base;
  base.capacities = Quantities(config.producers, config.dim, spec.others_capacity);
  base.cost_types.assign(config.producers, spec.others_cost_type);
  base.valuation_types.assign(config.consumers, spec.valuation_type);
  PaymentOptions options;
  options.punishment = config.punishment;
  options.solver = config.solver;

  for_each_index(cells, exec, [&](std::size_t cell) {
    const std::size_t row = cell / spec.capacity_points;
    const std::size_t col = cell % spec.capacity_points;
    TypeProfile types = base;
    for (double& x : types.capacities[spec.producer]) x = out.capacities[col];
    types.cost_types[spec.producer] = out.cost_types[row];
    const Economy economy{types, config.families};
    const auto p = total_payment(economy, BidProfile::truthful(economy), adjustment, options);
    out.tau[cell] = p.tau[spec.producer];
    out.adjustment[cell] = p.adjustment[spec.producer];
    out.payment[cell] = p.total[spec.producer];
    if (!std::isfinite(out.payment[cell]))
      throw std::runtime_error("non-finite payment on the surface grid");
  });
  return out;
}

ProbeReport check_surface_shape(const SurfaceRecord& s) {
  constexpr double kStep = 1e-6;
  constexpr double kPlateau = 1e-3;
  const std::size_t cols = s.capacities.size();
  const std::size_t rows = s.cost_types.size();
  ProbeReport report;
  report.name = "surface_shape";
  auto cell = [&](std::size_t r, std::size_t c) {
    return nlohmann::json{{"reported_capacity", s.capacities[c]},
                          {"reported_cost_type", s.cost_types[r]}};
  };
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c + 1 < cols; ++c) {
      const double drop = s.at(r, c) - s.at(r, c + 1);
      ++report.trials;
      report.observe(drop);
      if (drop > kStep)
        report.violate({{"rule", "nondecreasing_in_capacity"}, {"at", cell(r, c)}}, drop);
    }
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 0; r + 1 < rows; ++r) {
      const double rise = s.at(r + 1, c) - s.at(r, c);
      ++report.trials;
      report.observe(rise);
      if (rise > kStep)
        report.violate({{"rule", "nonincreasing_in_cost_type"}, {"at", cell(r, c)}}, rise);
    }
    const std::size_t last = (rows - 1) * cols + c;
    const double off = std::abs(s.payment[last] - s.adjustment[last]);
    ++report.trials;
    if (off > kPlateau)
      report.violate({{"rule", "excluded_plateau"}, {"at", cell(rows - 1, c)}}, off);
  }
  return report;
}

AdjustmentVerdict verify_adjustment(const ExperimentConfig& config, const std::string& name,
                                    const AdjustmentFn& adjustment, bool statistical,
                                    Exec exec) {
  const auto economies = prior_economy_sampler(config.prior, config.families);
  PaymentOptions payment;
  payment.punishment = config.punishment;
  payment.solver = config.solver;

  AdjustmentVerdict v;
  v.name = name;
  v.statistical = statistical;
  DsicOptions dsic;
  dsic.trials = config.probes.dsic_trials;
  dsic.payment = payment;
  dsic.seed = derive_seed(config.seed, kDsic);
  double cap_hi = 0.0, cost_hi = 0.0;
  for (const auto& p : config.prior.capacity) cap_hi = std::max(cap_hi, p.hi);
  for (const auto& p : config.prior.cost_type) cost_hi = std::max(cost_hi, p.hi);
  v.dsic = probe_dsic(economies,
                      default_deviation_sampler(config.probes.dsic_deviations, cap_hi, cost_hi),
                      adjustment, dsic, exec);
  v.properties = check_properties(economies, adjustment, config.probes.property_trials,
                                  derive_seed(config.seed, kProperties), payment, exec);
  v.ir_pass_rate = rate(v.properties.ir);
  v.wbb_pass_rate = rate(v.properties.wbb);
  const bool properties_ok =
      statistical ? v.ir_pass_rate >= config.probes.learned_pass_rate &&
                        v.wbb_pass_rate >= config.probes.learned_pass_rate
                  : v.properties.ir.pass && v.properties.wbb.pass;
  v.pass = v.dsic.pass && properties_ok && v.properties.equivalence.pass;
  return v;
}

ModelChecks verify_model(const ExperimentConfig& config, Exec exec) {
  ModelChecks m;
  AssumptionSampling sampling;
  sampling.producers = config.producers;
  sampling.dim = config.dim;
  sampling.capacity_hi = 0.0;
  sampling.cost_type_hi = 0.0;
  sampling.valuation_type_hi = 0.0;
  for (const auto& p : config.prior.capacity) sampling.capacity_hi = std::max(sampling.capacity_hi, p.hi);
  for (const auto& p : config.prior.cost_type) sampling.cost_type_hi = std::max(sampling.cost_type_hi, p.hi);
  for (const auto& p : config.prior.valuation_type)
    sampling.valuation_type_hi = std::max(sampling.valuation_type_hi, p.hi);
  m.assumptions = check_assumptions(config.families, config.probes.assumption_samples,
                                    derive_seed(config.seed, kAssumptions), sampling);
  m.existence = existence_check(config.prior, config.families, config.solver,
                                config.probes.existence_samples,
                                derive_seed(config.seed, kExistence), exec);
  m.zero_capacity = zero_capacity_check(config.prior, config.families, config.solver,
                                     config.probes.existence_samples,
                                     derive_seed(config.seed, kZeroCapacity), exec);
  const auto economies = prior_economy_sampler(config.prior, config.families);
  m.surplus_monotonicity = check_surplus_monotonicity(economies, config.probes.monotonicity_trials,
                          derive_seed(config.seed, kMonotonicity), config.solver, exec);

  m.efficiency.name = "efficiency";
  const std::size_t trials = config.probes.efficiency_trials;
  std::vector<ProbeReport> parts(trials);
  EfficiencyOptions eff;
  if (config.producers * config.dim > 3) eff.oracle = EfficiencyOracle::multistart;
  for_each_index(trials, exec, [&](std::size_t t) {
    Rng rng(derive_seed(derive_seed(config.seed, kEfficiency), t));
    const Economy e = economies(rng);
    parts[t] = check_efficiency(e, optimize_acceptance(e, config.solver), eff);
  });
  for (const auto& p : parts) m.efficiency.merge(p);

  m.pass = m.existence.pass && m.zero_capacity.pass && m.surplus_monotonicity.pass &&
           m.efficiency.pass;
  return m;
}

nlohmann::json to_json(const AdjustmentVerdict& v) {
  return {{"adjustment", v.name},
          {"pass", v.pass},
          {"statistical", v.statistical},
          {"ir_pass_rate", v.ir_pass_rate},
          {"wbb_pass_rate", v.wbb_pass_rate},
          {"dsic", to_json(v.dsic)},
          {"ir", to_json(v.properties.ir)},
          {"wbb", to_json(v.properties.wbb)},
          {"loss_equivalence", to_json(v.properties.equivalence)}};
}

nlohmann::json to_json(const ModelChecks& m) {
  return {{"pass", m.pass},
          {"assumptions", to_json(m.assumptions)},
          {"existence", to_json(m.existence)},
          {"zero_capacity_condition", to_json(m.zero_capacity)},
          {"surplus_monotonicity", to_json(m.surplus_monotonicity)},
          {"efficiency", to_json(m.efficiency)}};
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& rows) {
  auto f = open_out(path);
  f << "epoch,step,loss,loss1,loss2\n";
  for (const auto& r : rows)
    f << r.epoch << ',' << r.step << ',' << format_g(r.value.loss) << ','
      << format_g(r.value.loss1) << ',' << format_g(r.value.loss2) << '\n';
}

void write_surface_csv(const std::filesystem::path& path, const SurfaceRecord& s) {
  auto f = open_out(path);
  f << "reported_capacity,reported_cost_type,tau,adjustment,payment\n";
  const std::size_t cols = s.capacities.size();
  for (std::size_t r = 0; r < s.cost_types.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t k = r * cols + c;
      f << format_g(s.capacities[c]) << ',' << format_g(s.cost_types[r]) << ','
        << format_g(s.tau[k]) << ',' << format_g(s.adjustment[k]) << ','
        << format_g(s.payment[k]) << '\n';
    }
}

ExperimentResult run_experiment(const ExperimentConfig& config, Exec exec) {
  config.validate();
  ExperimentResult out;

  TrainingConfig training = config.training;
  training.seed = derive_seed(config.seed, kTraining);
  auto nets = std::make_shared<AdjustmentNetworks>(config.prior, training.hidden,
                                                   training.seed, training.init);
  out.trace = train(*nets, training, config.prior, config.families, config.solver, exec);
  out.nets = nets;

  out.model = verify_model(config, exec);
  const AdjustmentFn learned = learned_adjustment_fn(out.nets);
  out.verdicts.push_back(
      verify_adjustment(config, "zero", make_adjustment("zero", config), false, exec));
  out.verdicts.push_back(
      verify_adjustment(config, "analytic", make_adjustment("analytic", config), false, exec));
  out.verdicts.push_back(verify_adjustment(config, "learned", learned, true, exec));

  out.surface = payment_surface(config, learned, exec);
  out.surface_shape = check_surface_shape(out.surface);

  // The existence condition is a property of the model; when it fails the
  // run is flagged even if the payment probes happen to pass.
  out.pass = out.model.pass && out.surface_shape.pass;
  for (const auto& v : out.verdicts) out.pass = out.pass && v.pass;

  const auto& dir = config.out_dir;
  write_trace_csv(dir / "loss_trace.csv", out.trace.epochs);
  write_trace_csv(dir / "loss_steps.csv", out.trace.steps);
  write_surface_csv(dir / "surface.csv", out.surface);
  save_checkpoint(*out.nets, (dir / "checkpoint.json").string());

  nlohmann::json report;
  report["config"] = to_json(config);
  report["pass"] = out.pass;
  report["training"] = {{"epochs_run", out.trace.epochs.size()},
                        {"steps", out.trace.steps.size()},
                        {"final_loss", out.trace.final_loss},
                        {"converged", out.trace.converged}};
  report["model"] = to_json(out.model);
  report["adjustments"] = nlohmann::json::array();
  for (const auto& v : out.verdicts) report["adjustments"].push_back(to_json(v));
  report["surface_shape"] = to_json(out.surface_shape);
  write_json_file(dir / "report.json", report);
  return out;
}

}  // namespace pvcg
