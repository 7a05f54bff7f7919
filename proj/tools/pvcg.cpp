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

// Command-line front end: simulate, train, verify, surface,
// check-assumptions and experiment.
//
// Exit codes: 0 every check passed, 1 a check failed, 2 bad input.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pvcg/adjustment.hpp"
#include "pvcg/experiment.hpp"
#include "pvcg/io.hpp"
#include "pvcg/learner.hpp"
#include "pvcg/payments.hpp"

namespace {

using pvcg::ExperimentConfig;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> punishment;
  std::optional<std::string> method;
  std::string adjustment = "zero";
  bool serial = false;

  pvcg::Exec exec() const { return serial ? pvcg::Exec::serial : pvcg::Exec::parallel; }
};

void add_common(CLI::App* cmd, Common& c, bool config_required) {
  auto* opt = cmd->add_option("--config", c.config, "JSON input file");
  if (config_required) opt->required();
  cmd->add_option("--seed", c.seed, "master RNG seed (overrides the config)");
  cmd->add_option("--out", c.out, "output directory (overrides the config)");
  cmd->add_option("--punishment", c.punishment, "over-capacity punishment P > 0");
  cmd->add_option("--method", c.method, "allocation solver")
      ->check(CLI::IsMember({"analytic", "gradient"}));
  cmd->add_option("--adjustment", c.adjustment, "zero | analytic | learned:PATH");
  cmd->add_flag("--serial", c.serial, "run the single-threaded reference path");
}

ExperimentConfig load_config(const Common& c) {
  ExperimentConfig cfg = c.config.empty()
                             ? pvcg::reference_config()
                             : pvcg::experiment_config_from_json(pvcg::read_json_file(c.config));
  if (c.seed) cfg.seed = *c.seed;
  if (c.out) cfg.out_dir = *c.out;
  if (c.punishment) cfg.punishment = *c.punishment;
  if (c.method) cfg.solver.method = pvcg::parse_solver_method(*c.method);
  cfg.solver.gradient.seed = pvcg::derive_seed(cfg.seed, 0);
  cfg.validate();
  return cfg;
}

void status(const std::string& name, bool pass) {
  std::cout << (pass ? "PASS " : "FAIL ") << name << '\n';
}

// Assumption violations do not fail verify or experiment; see ModelChecks.
void info(const pvcg::AssumptionReport& report) {
  std::cout << "INFO assumptions:";
  for (const char* a : {"monotonicity", "zero_input", "super_additivity", "cross_marginal"})
    std::cout << ' ' << a << '=' << report.count(a);
  std::cout << " violations in " << report.samples << " samples\n";
}

int simulate(const Common& c) {
  const auto doc = pvcg::read_json_file(c.config);
  const pvcg::Economy economy = pvcg::economy_from_json(doc);
  const pvcg::BidProfile bids = doc.contains("bids")
                                    ? pvcg::bids_from_json(doc.at("bids"), economy)
                                    : pvcg::BidProfile::truthful(economy);
  pvcg::PaymentOptions options;
  if (c.punishment) options.punishment = *c.punishment;
  if (c.method) options.solver.method = pvcg::parse_solver_method(*c.method);
  if (c.seed) options.solver.gradient.seed = *c.seed;
  options.exec = c.exec();

  pvcg::AdjustmentFn adjustment = pvcg::zero_adjustment();
  if (c.adjustment == "analytic") {
    if (!doc.contains("prior"))
      throw std::invalid_argument("analytic adjustment needs a \"prior\" block");
    const auto prior = pvcg::prior_from_json(doc.at("prior"), economy.producers(),
                                             economy.consumers(), economy.dim());
    adjustment = pvcg::analytic_adjustment_fn(prior, economy.families, options.solver);
  } else if (c.adjustment != "zero") {
    ExperimentConfig cfg = pvcg::reference_config();
    cfg.producers = economy.producers();
    cfg.consumers = economy.consumers();
    cfg.dim = economy.dim();
    adjustment = pvcg::make_adjustment(c.adjustment, cfg);
  }

  const auto payments = pvcg::total_payment(economy, bids, adjustment, options);
  nlohmann::json result{{"economy", pvcg::economy_to_json(economy)},
                        {"bids", pvcg::bids_to_json(bids)},
                        {"punishment", options.punishment},
                        {"method", pvcg::to_string(options.solver.method)},
                        {"adjustment", c.adjustment},
                        {"payments", pvcg::to_json(payments)}};
  if (c.out) {
    pvcg::write_json_file(std::filesystem::path(*c.out) / "simulation.json", result);
  } else {
    std::cout << result.dump(2) << '\n';
  }
  return 0;
}

int train(const Common& c) {
  ExperimentConfig cfg = load_config(c);
  pvcg::TrainingConfig training = cfg.training;
  training.seed = pvcg::derive_seed(cfg.seed, 1);
  pvcg::AdjustmentNetworks nets(cfg.prior, training.hidden, training.seed, training.init);
  const auto trace =
      pvcg::train(nets, training, cfg.prior, cfg.families, cfg.solver, c.exec());
  pvcg::write_trace_csv(cfg.out_dir / "loss_trace.csv", trace.epochs);
  pvcg::write_trace_csv(cfg.out_dir / "loss_steps.csv", trace.steps);
  pvcg::save_checkpoint(nets, (cfg.out_dir / "checkpoint.json").string());
  std::cout << "epochs " << trace.epochs.size() - 1 << ", final loss " << trace.final_loss
            << ", " << trace.wall_seconds << " s\n";
  status("training converged", trace.converged);
  return trace.converged ? 0 : 1;
}

int verify(const Common& c) {
  const ExperimentConfig cfg = load_config(c);
  const bool learned = c.adjustment.rfind("learned:", 0) == 0;
  const auto model = pvcg::verify_model(cfg, c.exec());
  const auto verdict = pvcg::verify_adjustment(
      cfg, c.adjustment, pvcg::make_adjustment(c.adjustment, cfg), learned, c.exec());
  pvcg::write_json_file(cfg.out_dir / "verify.json",
                        {{"model", pvcg::to_json(model)}, {"adjustment", pvcg::to_json(verdict)}});
  info(model.assumptions);
  status("existence", model.existence.pass);
  status("zero_capacity_condition", model.zero_capacity.pass);
  status("surplus_monotonicity", model.surplus_monotonicity.pass);
  status("efficiency", model.efficiency.pass);
  status("dsic", verdict.dsic.pass);
  status("ir", learned ? verdict.ir_pass_rate >= cfg.probes.learned_pass_rate
                       : verdict.properties.ir.pass);
  status("wbb", learned ? verdict.wbb_pass_rate >= cfg.probes.learned_pass_rate
                        : verdict.properties.wbb.pass);
  status("loss_equivalence", verdict.properties.equivalence.pass);
  return model.pass && verdict.pass ? 0 : 1;
}

int surface(const Common& c) {
  const ExperimentConfig cfg = load_config(c);
  const auto record =
      pvcg::payment_surface(cfg, pvcg::make_adjustment(c.adjustment, cfg), c.exec());
  const auto shape = pvcg::check_surface_shape(record);
  pvcg::write_surface_csv(cfg.out_dir / "surface.csv", record);
  pvcg::write_json_file(cfg.out_dir / "surface.json", pvcg::to_json(shape));
  status("surface_shape", shape.pass);
  return shape.pass ? 0 : 1;
}

int check_assumptions(const Common& c) {
  ExperimentConfig cfg = load_config(c);
  const auto model = pvcg::verify_model(cfg, c.exec());
  pvcg::write_json_file(cfg.out_dir / "assumptions.json",
                        {{"assumptions", pvcg::to_json(model.assumptions)},
                         {"existence", pvcg::to_json(model.existence)},
                         {"zero_capacity_condition", pvcg::to_json(model.zero_capacity)}});
  status("assumptions", model.assumptions.ok());
  status("existence", model.existence.pass);
  status("zero_capacity_condition", model.zero_capacity.pass);
  return model.assumptions.ok() && model.existence.pass && model.zero_capacity.pass ? 0 : 1;
}

int experiment(const Common& c) {
  const ExperimentConfig cfg = load_config(c);
  const auto result = pvcg::run_experiment(cfg, c.exec());
  std::cout << "final loss " << result.trace.final_loss << " after "
            << result.trace.epochs.size() - 1 << " epochs\n";
  info(result.model.assumptions);
  status("model", result.model.pass);
  for (const auto& v : result.verdicts) status("adjustment " + v.name, v.pass);
  status("surface_shape", result.surface_shape.pass);
  std::cout << "outputs in " << cfg.out_dir.string() << '\n';
  return result.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PVCG procurement auction simulator"};
  app.require_subcommand(1);

  Common common;
  int (*run)(const Common&) = nullptr;
  auto add = [&](const char* name, const char* help, int (*fn)(const Common&),
                 bool config_required) {
    auto* cmd = app.add_subcommand(name, help);
    add_common(cmd, common, config_required);
    cmd->callback([&run, fn] { run = fn; });
  };
  add("simulate", "run one auction from an economy file", simulate, true);
  add("train", "train the adjustment networks", train, false);
  add("verify", "run every property probe for one adjustment", verify, false);
  add("surface", "compute the payment surface of one producer", surface, false);
  add("check-assumptions", "sample the valuation and cost assumptions", check_assumptions,
      false);
  add("experiment", "train, verify and write every output", experiment, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    return run(common);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
