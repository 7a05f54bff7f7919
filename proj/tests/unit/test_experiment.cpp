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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "pvcg/experiment.hpp"
#include "pvcg/io.hpp"

using namespace pvcg;

namespace {

ExperimentConfig small_config(const std::filesystem::path& out) {
  auto c = experiment_config_from_json({{"n", 3},
                                        {"m", 2},
                                        {"training", {{"epochs", 20}, {"samples_per_epoch", 64}}},
                                        {"surface", {{"capacity_points", 6}, {"cost_points", 5}}},
                                        {"probes",
                                         {{"dsic_trials", 20},
                                          {"dsic_deviations", 10},
                                          {"property_trials", 200},
                                          {"monotonicity_trials", 200},
                                          {"existence_samples", 200},
                                          {"assumption_samples", 50},
                                          {"efficiency_trials", 3},
                                          {"learned_pass_rate", 0.0}}},
                                        {"out", out.string()},
                                        {"seed", 11}});
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("reference configuration") {
  const auto c = reference_config();
  CHECK(c.producers == 10);
  CHECK(c.consumers == 2);
  CHECK(c.families.valuation.tag == ValuationTag::sqrt_sum);
  CHECK(c.families.valuation.scale == 10.0);
  CHECK(c.prior.capacity[3].hi == 5.0);
  CHECK(c.prior.cost_type[3].hi == 1.0);
  CHECK(c.training.hidden == std::vector<std::size_t>{10, 10, 10});
  CHECK(c.training.epochs == 500);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("config JSON round trip and errors") {
  const auto c = small_config("x");
  const auto back = experiment_config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK_THROWS(experiment_config_from_json({{"n", 0}}));
  CHECK_THROWS(experiment_config_from_json({{"punishment", -1.0}}));
  CHECK_THROWS(experiment_config_from_json({{"solver", "newton"}}));
  CHECK_THROWS(experiment_config_from_json({{"surface", {{"producer", 10}}}}));
  CHECK_THROWS(make_adjustment("bogus", c));
  CHECK_THROWS(make_adjustment("learned:/nonexistent/checkpoint.json", c));
}

TEST_CASE("zero-adjustment surface equals tau and has the expected shape") {
  auto c = small_config("x");
  const auto s = payment_surface(c, zero_adjustment());
  CHECK(s.capacities.size() == 6);
  CHECK(s.cost_types.size() == 5);
  CHECK(s.payment.size() == 30);
  CHECK(s.capacities.front() == 0.0);
  CHECK(s.capacities.back() == 5.0);
  for (std::size_t k = 0; k < s.payment.size(); ++k) CHECK(s.payment[k] == s.tau[k]);
  // A zero-capacity report earns nothing.
  for (std::size_t g = 0; g < 5; ++g) CHECK(s.at(g, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(check_surface_shape(s).pass);
}

TEST_CASE("surface shape detects a broken surface") {
  auto s = payment_surface(small_config("x"), zero_adjustment());
  s.payment[1] = s.payment[2] + 1.0;  // decreasing along capacity
  CHECK_FALSE(check_surface_shape(s).pass);
}

TEST_CASE("model checks on a small economy") {
  const auto m = verify_model(small_config("x"));
  CHECK(m.existence.pass);
  CHECK(m.zero_capacity.pass);
  CHECK(m.surplus_monotonicity.pass);
  CHECK(m.efficiency.pass);
  CHECK(m.pass);
  CHECK(m.assumptions.count("super_additivity") > 0);
}

TEST_CASE("zero and analytic adjustments pass every probe") {
  const auto c = small_config("x");
  for (const std::string name : {"zero", "analytic"}) {
    const auto v = verify_adjustment(c, name, make_adjustment(name, c), false);
    CHECK(v.dsic.pass);
    CHECK(v.properties.ir.pass);
    CHECK(v.properties.wbb.pass);
    CHECK(v.ir_pass_rate == 1.0);
    CHECK(v.pass);
  }
}

TEST_CASE("experiment writes reproducible outputs") {
  const auto root = std::filesystem::temp_directory_path() / "pvcg_test_experiment";
  std::filesystem::remove_all(root);
  const auto a = run_experiment(small_config(root / "a"), Exec::serial);
  const auto b = run_experiment(small_config(root / "b"), Exec::parallel);
  for (const char* f : {"loss_trace.csv", "loss_steps.csv", "surface.csv", "checkpoint.json"}) {
    INFO(f);
    CHECK(std::filesystem::exists(root / "a" / f));
    CHECK(slurp(root / "a" / f) == slurp(root / "b" / f));
  }
  const auto report = read_json_file(root / "a" / "report.json");
  CHECK(report.contains("adjustments"));
  CHECK(report["adjustments"].size() == 3);
  CHECK(a.pass == b.pass);
  CHECK(*a.nets == *b.nets);
  const auto trace = slurp(root / "a" / "loss_trace.csv");
  CHECK(trace.rfind("epoch,step,loss,loss1,loss2\n", 0) == 0);

  // The written checkpoint drives the learned adjustment.
  const auto c = small_config(root / "a");
  const auto fn = make_adjustment("learned:" + (root / "a" / "checkpoint.json").string(), c);
  Rng rng(1);
  const auto t = sample_types(c.prior, rng);
  CHECK(fn(1, t.without_producer(1)) == learned_adjustment(*a.nets, 1, t.without_producer(1)));
  std::filesystem::remove_all(root);
}
