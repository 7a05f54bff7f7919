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

#include "pvcg/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "pvcg/rng.hpp"

namespace pvcg {

SolverMethod parse_solver_method(const std::string& name) {
  if (name == "analytic") return SolverMethod::analytic;
  if (name == "gradient" || name == "projected_gradient")
    return SolverMethod::projected_gradient;
  throw std::invalid_argument("unknown solver method: " + name);
}

std::string to_string(SolverMethod method) {
  return method == SolverMethod::analytic ? "analytic" : "gradient";
}

bool supports_analytic(const Economy& economy) {
  const auto& vf = economy.families.valuation;
  const auto& cf = economy.families.cost;
  if (vf.tag != ValuationTag::sqrt_sum || cf.tag != CostTag::linear) return false;
  if (!std::all_of(cf.weights.begin(), cf.weights.end(),
                   [](double w) { return w == 1.0; }))
    return false;
  return economy.producers() == 0 || economy.dim() == 1;
}

namespace {

AllocationResult finish(const Economy& view, Quantities ratios,
                        SolverDiagnostics diag) {
  AllocationResult r;
  r.accepted = view.types.capacities.hadamard(ratios);
  r.ratios = std::move(ratios);
  r.surplus = social_surplus(view, r.accepted);
  if (!std::isfinite(r.surplus))
    throw std::runtime_error("surplus is not finite");
  r.diagnostics = diag;
  return r;
}

Quantities empty_like(const Economy& view) {
  return Quantities(view.producers(), std::max<std::size_t>(view.dim(), 1));
}

}  // namespace

AllocationResult analytic_waterfill(const Economy& view) {
  if (!supports_analytic(view))
    throw std::invalid_argument(
        "analytic solver requires sqrt_sum valuation, linear cost and scalar "
        "resources");
  const std::size_t n = view.producers();
  Quantities ratios = empty_like(view);
  const auto& thetas = view.types.valuation_types;
  const double theta_sum = std::accumulate(thetas.begin(), thetas.end(), 0.0);
  if (n == 0 || theta_sum == 0.0) return finish(view, std::move(ratios), {});

  const auto& cap = view.types.capacities;
  const auto& gamma = view.types.cost_types;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return gamma[a] < gamma[b]; });

  // Marginal value at aggregate U is theta_sum*sqrt(c)/(2*sqrt(U)); it equals
  // gamma at U = c*theta_sum^2/(4*gamma^2).
  const double c = view.families.valuation.scale;
  double filled = 0.0;
  for (std::size_t k : order) {
    const double offered = cap[k][0];
    if (offered == 0.0) continue;
    if (gamma[k] == 0.0) {
      ratios[k][0] = 1.0;
      filled += offered;
      continue;
    }
    const double target = c * theta_sum * theta_sum / (4.0 * gamma[k] * gamma[k]);
    if (target <= filled) break;
    if (target >= filled + offered) {
      ratios[k][0] = 1.0;
      filled += offered;
    } else {
      ratios[k][0] = (target - filled) / offered;
      break;
    }
  }
  return finish(view, std::move(ratios), {});
}

namespace {

struct Ascent {
  std::vector<double> eta;
  double surplus = 0.0;
  int iterations = 0;
  double gradient_norm = 0.0;
};

class BoxObjective {
 public:
  BoxObjective(const Economy& view, const GradientOptions& options)
      : view_(view),
        options_(options),
        cap_(view.types.capacities),
        accepted_(cap_),
        grad_x_(cap_.flat().size()) {}

  std::size_t size() const { return cap_.flat().size(); }
  bool fixed(std::size_t k) const { return cap_.flat()[k] == 0.0; }

  double value(const std::vector<double>& eta) {
    load(eta);
    return social_surplus(view_, accepted_);
  }

  void gradient(const std::vector<double>& eta, std::vector<double>& g) {
    load(eta);
    social_surplus_gradient(view_, accepted_, grad_x_, options_.fd_step);
    for (std::size_t k = 0; k < g.size(); ++k)
      g[k] = fixed(k) ? 0.0 : cap_.flat()[k] * grad_x_[k];
  }

 private:
  void load(const std::vector<double>& eta) {
    auto a = accepted_.flat();
    auto c = cap_.flat();
    for (std::size_t k = 0; k < eta.size(); ++k) a[k] = c[k] * eta[k];
  }

  const Economy& view_;
  const GradientOptions& options_;
  const Quantities& cap_;
  Quantities accepted_;
  std::vector<double> grad_x_;
};

double projected_norm(const std::vector<double>& eta, const std::vector<double>& g) {
  double s = 0.0;
  for (std::size_t k = 0; k < eta.size(); ++k) {
    const double d = std::clamp(eta[k] + g[k], 0.0, 1.0) - eta[k];
    s += d * d;
  }
  return std::sqrt(s);
}

// Backtracking accepts a step t when
//   S(P(eta + t g)) >= S(eta) + (armijo / t) * ||P(eta + t g) - eta||^2,
// the sufficient-increase form of the Armijo rule along the projection arc.
Ascent ascend(BoxObjective& objective, std::vector<double> eta,
              const GradientOptions& options) {
  const std::size_t size = eta.size();
  for (std::size_t k = 0; k < size; ++k)
    if (objective.fixed(k)) eta[k] = 0.0;
  std::vector<double> g(size), candidate(size);
  Ascent out;
  double f = objective.value(eta);
  double step = 1.0;
  int it = 0;
  double norm = 0.0;
  for (; it < options.max_iterations; ++it) {
    objective.gradient(eta, g);
    norm = projected_norm(eta, g);
    if (norm < options.tolerance) break;
    step = std::min(step * 2.0, 1e12);
    bool moved = false;
    while (step > 0.0) {
      double dist2 = 0.0;
      for (std::size_t k = 0; k < size; ++k) {
        candidate[k] = std::clamp(eta[k] + step * g[k], 0.0, 1.0);
        const double d = candidate[k] - eta[k];
        dist2 += d * d;
      }
      if (dist2 == 0.0) break;
      const double f_new = objective.value(candidate);
      if (f_new >= f + options.armijo / step * dist2) {
        eta.swap(candidate);
        f = f_new;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;  // no representable ascent left
  }
  out.eta = std::move(eta);
  out.surplus = f;
  out.iterations = it;
  out.gradient_norm = norm;
  return out;
}

bool lexicographically_less(const std::vector<double>& a,
                            const std::vector<double>& b,
                            const Quantities& cap) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double xa = cap.flat()[k] * a[k];
    const double xb = cap.flat()[k] * b[k];
    if (xa != xb) return xa < xb;
  }
  return false;
}

}  // namespace

AllocationResult projected_gradient(const Economy& view,
                                    const GradientOptions& options) {
  const std::size_t n = view.producers();
  if (n == 0) return finish(view, empty_like(view), {});
  BoxObjective objective(view, options);
  const std::size_t size = objective.size();

  std::vector<std::vector<double>> starts;
  starts.emplace_back(size, 1.0);
  starts.emplace_back(size, 0.0);
  Rng rng(options.seed);
  for (int r = 0; r < options.random_restarts; ++r) {
    std::vector<double> s(size);
    for (double& v : s) v = rng.uniform();
    starts.push_back(std::move(s));
  }

  Ascent best;
  bool have = false;
  int iterations = 0;
  for (const auto& start : starts) {
    Ascent a = ascend(objective, start, options);
    iterations += a.iterations;
    if (!std::isfinite(a.surplus)) throw std::runtime_error("surplus is not finite");
    if (!have) {
      best = std::move(a);
      have = true;
      continue;
    }
    const double tie = 1e-12 * std::max(1.0, std::abs(best.surplus));
    if (a.surplus > best.surplus + tie ||
        (a.surplus >= best.surplus - tie &&
         lexicographically_less(a.eta, best.eta, view.types.capacities))) {
      best = std::move(a);
    }
  }

  // Prefer zero acceptance wherever dropping a coordinate costs nothing.
  for (std::size_t k = 0; k < size; ++k) {
    if (best.eta[k] == 0.0) continue;
    std::vector<double> trial = best.eta;
    trial[k] = 0.0;
    const double f = objective.value(trial);
    if (f >= best.surplus) {
      best.eta = std::move(trial);
      best.surplus = f;
    }
  }

  Quantities ratios = empty_like(view);
  std::copy(best.eta.begin(), best.eta.end(), ratios.flat().begin());
  SolverDiagnostics diag;
  diag.iterations = iterations;
  diag.restarts = static_cast<int>(starts.size());
  diag.gradient_norm = best.gradient_norm;
  return finish(view, std::move(ratios), diag);
}

AllocationResult optimize_acceptance(const Economy& view, const Solver& solver) {
  view.types.validate();
  if (solver.method == SolverMethod::analytic) return analytic_waterfill(view);
  return projected_gradient(view, solver.gradient);
}

AllocationResult counterfactual_surplus(const Economy& view, std::size_t removed,
                                        const Solver& solver) {
  if (removed >= view.producers())
    throw std::out_of_range("removed producer index out of range");
  return optimize_acceptance(view.without_producer(removed), solver);
}

std::vector<double> SurplusTable::marginal_contributions() const {
  std::vector<double> out(without.size());
  for (std::size_t i = 0; i < without.size(); ++i)
    out[i] = full.surplus - without[i].surplus;
  return out;
}

SurplusTable solve_with_counterfactuals(const Economy& view, const Solver& solver,
                                        Exec exec) {
  const std::size_t n = view.producers();
  std::vector<AllocationResult> results(n + 1);
  for_each_index(n + 1, exec, [&](std::size_t k) {
    results[k] = k == 0 ? optimize_acceptance(view, solver)
                        : counterfactual_surplus(view, k - 1, solver);
  });
  SurplusTable table;
  table.full = std::move(results[0]);
  table.without.assign(std::make_move_iterator(results.begin() + 1),
                       std::make_move_iterator(results.end()));
  return table;
}

nlohmann::json to_json(const AllocationResult& allocation) {
  return {{"ratios", allocation.ratios.rows()},
          {"accepted", allocation.accepted.rows()},
          {"surplus", allocation.surplus},
          {"diagnostics",
           {{"iterations", allocation.diagnostics.iterations},
            {"restarts", allocation.diagnostics.restarts},
            {"gradient_norm", allocation.diagnostics.gradient_norm}}}};
}

}  // namespace pvcg
