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

#include "pvcg/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "pvcg/rng.hpp"

namespace pvcg {

namespace {

// Floor for the aggregate input inside sqrt_sum's derivative. The true
// derivative is +inf at zero input; capping it keeps the ascent direction
// while leaving line-search step sizes in a representable range.
constexpr double kMinAggregate = 1e-12;

constexpr std::size_t kWitnessesPerKind = 5;

void require_non_negative(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0)
      throw std::invalid_argument(std::string(what) +
                                  " must be finite and non-negative");
  }
}

void require_non_negative(double v, const char* what) {
  require_non_negative(std::span<const double>(&v, 1), what);
}

double component_sum(std::span<const double> row) {
  return std::accumulate(row.begin(), row.end(), 0.0);
}

}  // namespace

// ---------------------------------------------------------------------------
// Quantities

Quantities::Quantities(std::size_t producers, std::size_t dim, double fill)
    : producers_(producers), dim_(dim), values_(producers * dim, fill) {
  if (dim == 0) throw std::invalid_argument("resource dimension must be >= 1");
}

Quantities Quantities::scalars(std::vector<double> values) {
  Quantities q;
  q.producers_ = values.size();
  q.dim_ = 1;
  q.values_ = std::move(values);
  return q;
}

Quantities Quantities::from_rows(const std::vector<ResourceVector>& rows) {
  if (rows.empty()) return {};
  Quantities q(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != q.dim_)
      throw std::invalid_argument("resource vectors must share one dimension");
    std::copy(rows[i].begin(), rows[i].end(), q[i].begin());
  }
  return q;
}

ResourceVector Quantities::row(std::size_t i) const {
  auto r = (*this)[i];
  return {r.begin(), r.end()};
}

std::vector<ResourceVector> Quantities::rows() const {
  std::vector<ResourceVector> out;
  out.reserve(producers_);
  for (std::size_t i = 0; i < producers_; ++i) out.push_back(row(i));
  return out;
}

Quantities Quantities::without(std::size_t i) const {
  if (i >= producers_) throw std::out_of_range("producer index out of range");
  Quantities q;
  q.producers_ = producers_ - 1;
  q.dim_ = dim_;
  q.values_.reserve(q.producers_ * dim_);
  for (std::size_t k = 0; k < producers_; ++k) {
    if (k == i) continue;
    auto r = (*this)[k];
    q.values_.insert(q.values_.end(), r.begin(), r.end());
  }
  return q;
}

Quantities Quantities::with_inserted(std::size_t i,
                                     std::span<const double> row) const {
  if (i > producers_) throw std::out_of_range("insert position out of range");
  if (row.size() != dim_)
    throw std::invalid_argument("inserted row has the wrong dimension");
  Quantities q = *this;
  q.values_.insert(q.values_.begin() + static_cast<std::ptrdiff_t>(i * dim_),
                   row.begin(), row.end());
  ++q.producers_;
  return q;
}

Quantities Quantities::hadamard(const Quantities& other) const {
  if (other.producers_ != producers_ || other.dim_ != dim_)
    throw std::invalid_argument("quantity shapes differ");
  Quantities q = *this;
  for (std::size_t k = 0; k < values_.size(); ++k)
    q.values_[k] *= other.values_[k];
  return q;
}

// ---------------------------------------------------------------------------
// Families

ValuationFamily ValuationFamily::sqrt_sum(double scale) {
  ValuationFamily f;
  f.tag = ValuationTag::sqrt_sum;
  f.scale = scale;
  f.name = "sqrt_sum";
  return f;
}

ValuationFamily ValuationFamily::sqrt_sum_squares(double scale) {
  ValuationFamily f;
  f.tag = ValuationTag::sqrt_sum_squares;
  f.scale = scale;
  f.name = "sqrt_sum_squares";
  return f;
}

ValuationFamily ValuationFamily::make_custom(std::string name, Function fn,
                                             Gradient gradient) {
  if (!fn) throw std::invalid_argument("custom valuation needs a callable");
  ValuationFamily f;
  f.tag = ValuationTag::custom;
  f.name = std::move(name);
  f.custom = std::move(fn);
  f.custom_gradient = std::move(gradient);
  return f;
}

CostFamily CostFamily::linear(std::vector<double> weights) {
  require_non_negative(weights, "cost weights");
  CostFamily f;
  f.tag = CostTag::linear;
  f.weights = std::move(weights);
  f.name = "linear";
  return f;
}

CostFamily CostFamily::make_custom(std::string name, Function fn,
                                   Gradient gradient) {
  if (!fn) throw std::invalid_argument("custom cost needs a callable");
  CostFamily f;
  f.tag = CostTag::custom;
  f.name = std::move(name);
  f.custom = std::move(fn);
  f.custom_gradient = std::move(gradient);
  return f;
}

// ---------------------------------------------------------------------------
// Profiles

TypeProfile TypeProfile::without_producer(std::size_t i) const {
  TypeProfile t;
  t.capacities = capacities.without(i);
  t.cost_types = cost_types;
  t.cost_types.erase(t.cost_types.begin() + static_cast<std::ptrdiff_t>(i));
  t.valuation_types = valuation_types;
  return t;
}

TypeProfile TypeProfile::with_producer(std::size_t i,
                                       std::span<const double> capacity,
                                       double cost_type) const {
  TypeProfile t;
  t.capacities = capacities.with_inserted(i, capacity);
  t.cost_types = cost_types;
  t.cost_types.insert(t.cost_types.begin() + static_cast<std::ptrdiff_t>(i),
                      cost_type);
  t.valuation_types = valuation_types;
  return t;
}

void TypeProfile::validate() const {
  if (cost_types.size() != capacities.producers())
    throw std::invalid_argument("cost_types length must equal producer count");
  require_non_negative(capacities.flat(), "capacities");
  require_non_negative(cost_types, "cost types");
  require_non_negative(valuation_types, "valuation types");
}

void Economy::validate() const {
  if (producers() < 1) throw std::invalid_argument("economy needs n >= 1");
  if (consumers() < 1) throw std::invalid_argument("economy needs m >= 1");
  types.validate();
  const auto& v = families.valuation;
  if (v.tag != ValuationTag::custom && !(v.scale > 0.0 && std::isfinite(v.scale)))
    throw std::invalid_argument("valuation scale must be positive");
  if (v.tag == ValuationTag::custom && !v.custom)
    throw std::invalid_argument("custom valuation has no callable");
  const auto& c = families.cost;
  if (c.tag == CostTag::linear && !c.weights.empty() &&
      c.weights.size() != dim())
    throw std::invalid_argument("cost weights must match resource dimension");
  if (c.tag == CostTag::custom && !c.custom)
    throw std::invalid_argument("custom cost has no callable");
}

Economy apply_bids(const Economy& economy, const BidProfile& bids) {
  const auto& r = bids.reported;
  if (r.producers() != economy.producers() ||
      r.consumers() != economy.consumers() || r.dim() != economy.dim())
    throw std::invalid_argument("bid profile does not match the economy");
  r.validate();
  return economy.with_types(r);
}

// ---------------------------------------------------------------------------
// Evaluation

double eval_valuation(const ValuationFamily& family, const Quantities& x,
                      double theta) {
  require_non_negative(theta, "valuation type");
  require_non_negative(x.flat(), "resource quantities");
  switch (family.tag) {
    case ValuationTag::sqrt_sum: {
      if (theta == 0.0) return 0.0;
      const double total = component_sum(x.flat());
      return theta * std::sqrt(family.scale * total);
    }
    case ValuationTag::sqrt_sum_squares: {
      if (theta == 0.0) return 0.0;
      double squares = 0.0;
      for (std::size_t k = 0; k < x.producers(); ++k) {
        const double s = component_sum(x[k]);
        squares += s * s;
      }
      return theta * std::sqrt(family.scale * squares);
    }
    case ValuationTag::custom:
      return family.custom(x, theta);
  }
  return 0.0;
}

double eval_cost(const CostFamily& family, std::span<const double> x,
                 double gamma) {
  require_non_negative(gamma, "cost type");
  require_non_negative(x, "resource quantities");
  switch (family.tag) {
    case CostTag::linear: {
      if (!family.weights.empty() && family.weights.size() != x.size())
        throw std::invalid_argument("cost weights must match resource dimension");
      double dot = 0.0;
      for (std::size_t d = 0; d < x.size(); ++d)
        dot += (family.weights.empty() ? 1.0 : family.weights[d]) * x[d];
      return gamma * dot;
    }
    case CostTag::custom:
      return family.custom(x, gamma);
  }
  return 0.0;
}

double social_surplus(const Economy& economy, const Quantities& accepted) {
  if (accepted.producers() != economy.producers() ||
      (accepted.producers() > 0 && accepted.dim() != economy.dim()))
    throw std::invalid_argument("accepted quantities do not match the economy");
  double value = 0.0;
  for (double theta : economy.types.valuation_types)
    value += eval_valuation(economy.families.valuation, accepted, theta);
  double cost = 0.0;
  for (std::size_t i = 0; i < accepted.producers(); ++i)
    cost += eval_cost(economy.families.cost, accepted[i],
                      economy.types.cost_types[i]);
  return value - cost;
}

void social_surplus_gradient(const Economy& economy, const Quantities& accepted,
                             std::span<double> grad, double fd_step) {
  const std::size_t n = accepted.producers();
  const std::size_t dim = accepted.dim();
  if (grad.size() != n * dim)
    throw std::invalid_argument("gradient buffer has the wrong size");
  std::fill(grad.begin(), grad.end(), 0.0);
  if (n == 0) return;

  const auto& thetas = economy.types.valuation_types;
  const double theta_sum = std::accumulate(thetas.begin(), thetas.end(), 0.0);
  const auto& vf = economy.families.valuation;

  switch (vf.tag) {
    case ValuationTag::sqrt_sum: {
      const double total = std::max(component_sum(accepted.flat()), kMinAggregate);
      const double marginal = theta_sum * std::sqrt(vf.scale) / (2.0 * std::sqrt(total));
      std::fill(grad.begin(), grad.end(), marginal);
      break;
    }
    case ValuationTag::sqrt_sum_squares: {
      double squares = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double s = component_sum(accepted[k]);
        squares += s * s;
      }
      const double root_scale = std::sqrt(vf.scale);
      for (std::size_t k = 0; k < n; ++k) {
        // Axis derivative at the origin is theta * sqrt(scale).
        const double g = squares > 0.0
                             ? theta_sum * root_scale * component_sum(accepted[k]) /
                                   std::sqrt(squares)
                             : theta_sum * root_scale;
        for (std::size_t d = 0; d < dim; ++d) grad[k * dim + d] = g;
      }
      break;
    }
    case ValuationTag::custom: {
      if (vf.custom_gradient) {
        std::vector<double> g(n * dim);
        for (double theta : thetas) {
          vf.custom_gradient(accepted, theta, g);
          for (std::size_t k = 0; k < g.size(); ++k) grad[k] += g[k];
        }
        break;
      }
      Quantities probe = accepted;
      auto value = [&](const Quantities& q) {
        double s = 0.0;
        for (double theta : thetas) s += eval_valuation(vf, q, theta);
        return s;
      };
      for (std::size_t k = 0; k < n * dim; ++k) {
        const double x0 = accepted.flat()[k];
        const double lo = std::max(0.0, x0 - fd_step);
        const double hi = x0 + fd_step;
        probe.flat()[k] = hi;
        const double f_hi = value(probe);
        probe.flat()[k] = lo;
        const double f_lo = value(probe);
        probe.flat()[k] = x0;
        grad[k] = (f_hi - f_lo) / (hi - lo);
      }
      break;
    }
  }

  const auto& cf = economy.families.cost;
  for (std::size_t k = 0; k < n; ++k) {
    const double gamma = economy.types.cost_types[k];
    if (cf.tag == CostTag::linear) {
      for (std::size_t d = 0; d < dim; ++d)
        grad[k * dim + d] -= gamma * (cf.weights.empty() ? 1.0 : cf.weights[d]);
    } else if (cf.custom_gradient) {
      std::vector<double> g(dim);
      cf.custom_gradient(accepted[k], gamma, g);
      for (std::size_t d = 0; d < dim; ++d) grad[k * dim + d] -= g[d];
    } else {
      std::vector<double> row(accepted[k].begin(), accepted[k].end());
      for (std::size_t d = 0; d < dim; ++d) {
        const double x0 = row[d];
        const double lo = std::max(0.0, x0 - fd_step);
        const double hi = x0 + fd_step;
        row[d] = hi;
        const double f_hi = eval_cost(cf, row, gamma);
        row[d] = lo;
        const double f_lo = eval_cost(cf, row, gamma);
        row[d] = x0;
        grad[k * dim + d] -= (f_hi - f_lo) / (hi - lo);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Assumption checks

std::size_t AssumptionReport::count(const std::string& assumption) const {
  return static_cast<std::size_t>(
      std::count_if(violations.begin(), violations.end(),
                    [&](const auto& v) { return v.assumption == assumption; }));
}

namespace {

nlohmann::json rows_json(const Quantities& q) { return q.rows(); }

double tol_for(double tol, double a, double b) {
  return tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

AssumptionReport check_assumptions(const Families& families,
                                   std::size_t sample_count, std::uint64_t seed,
                                   const AssumptionSampling& sampling) {
  if (sample_count < 1) throw std::invalid_argument("sample_count must be >= 1");
  if (sampling.producers < 1) throw std::invalid_argument("need >= 1 producer");
  const auto& vf = families.valuation;
  const auto& cf = families.cost;
  const std::size_t n = sampling.producers;
  const std::size_t dim = sampling.dim;
  const double tol = sampling.tolerance;

  AssumptionReport report;
  report.samples = sample_count;
  auto flag = [&](const char* what, nlohmann::json witness, double gap) {
    report.violations.push_back({what, std::move(witness), gap});
  };

  for (std::size_t s = 0; s < sample_count; ++s) {
    Rng rng(derive_seed(seed, s));
    Quantities x(n, dim);
    for (double& v : x.flat())
      v = rng.uniform() < 0.15 ? 0.0 : rng.uniform(0.0, sampling.capacity_hi);
    const double theta = rng.uniform(0.0, sampling.valuation_type_hi);
    const double gamma = rng.uniform(0.0, sampling.cost_type_hi);
    const std::size_t i = rng.index(n);
    const std::size_t d = rng.index(dim);
    const double v_x = eval_valuation(vf, x, theta);

    // Monotonicity in x, theta, and of the cost in x_i, gamma.
    {
      Quantities up = x;
      up[i][d] += rng.uniform(0.0, sampling.capacity_hi);
      const double v_up = eval_valuation(vf, up, theta);
      if (v_up < v_x - tol_for(tol, v_x, v_up))
        flag("monotonicity",
             {{"check", "valuation_in_x"}, {"x", rows_json(x)},
              {"x_increased", rows_json(up)}, {"theta", theta}},
             v_x - v_up);
      const double theta_up = theta + rng.uniform(0.0, sampling.valuation_type_hi);
      const double v_theta = eval_valuation(vf, x, theta_up);
      if (v_theta < v_x - tol_for(tol, v_x, v_theta))
        flag("monotonicity",
             {{"check", "valuation_in_theta"}, {"x", rows_json(x)},
              {"theta", theta}, {"theta_increased", theta_up}},
             v_x - v_theta);
      const double c_x = eval_cost(cf, x[i], gamma);
      const double c_up = eval_cost(cf, up[i], gamma);
      if (c_up < c_x - tol_for(tol, c_x, c_up))
        flag("monotonicity",
             {{"check", "cost_in_x"}, {"x_i", x.row(i)}, {"x_i_increased", up.row(i)},
              {"gamma", gamma}},
             c_x - c_up);
      const double gamma_up = gamma + rng.uniform(0.0, sampling.cost_type_hi);
      const double c_gamma = eval_cost(cf, x[i], gamma_up);
      if (c_gamma < c_x - tol_for(tol, c_x, c_gamma))
        flag("monotonicity",
             {{"check", "cost_in_gamma"}, {"x_i", x.row(i)}, {"gamma", gamma},
              {"gamma_increased", gamma_up}},
             c_x - c_gamma);
    }

    // Zero input makes no difference; theta = 0 gives zero valuation.
    {
      Quantities zeroed = x;
      for (double& v : zeroed[i]) v = 0.0;
      const double v_zeroed = eval_valuation(vf, zeroed, theta);
      const double v_removed = eval_valuation(vf, x.without(i), theta);
      const double gap = std::abs(v_zeroed - v_removed);
      if (gap > 1e-12 * std::max(1.0, std::abs(v_zeroed)))
        flag("zero_input",
             {{"check", "valuation_removal"}, {"x", rows_json(zeroed)},
              {"producer", i}, {"theta", theta}},
             gap);
      const ResourceVector zero(dim, 0.0);
      const double c_zero = eval_cost(cf, zero, gamma);
      if (std::abs(c_zero) > 1e-12)
        flag("zero_input", {{"check", "cost_at_zero"}, {"gamma", gamma}},
             std::abs(c_zero));
      const double v_theta0 = eval_valuation(vf, x, 0.0);
      if (std::abs(v_theta0) > 1e-12)
        flag("zero_input", {{"check", "zero_theta"}, {"x", rows_json(x)}},
             std::abs(v_theta0));
    }

    // Super-additivity: v(x) >= sum_i v(x_i alone).
    {
      double alone_sum = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        Quantities alone(n, dim);
        std::copy(x[k].begin(), x[k].end(), alone[k].begin());
        alone_sum += eval_valuation(vf, alone, theta);
      }
      if (alone_sum > v_x + tol_for(tol, v_x, alone_sum))
        flag("super_additivity",
             {{"x", rows_json(x)}, {"theta", theta},
              {"value", v_x}, {"sum_of_parts", alone_sum}},
             alone_sum - v_x);
    }

    // Decreasing cross marginal returns with x_i >= x_i', x_-i >= x_-i'.
    {
      Quantities lower = x;
      for (std::size_t k = 0; k < n; ++k)
        for (double& v : lower[k]) v *= rng.uniform();
      auto mix = [&](const Quantities& own, const Quantities& rest) {
        Quantities q = rest;
        std::copy(own[i].begin(), own[i].end(), q[i].begin());
        return q;
      };
      const double lhs = eval_valuation(vf, x, theta) -
                         eval_valuation(vf, mix(lower, x), theta);
      const double rhs = eval_valuation(vf, mix(x, lower), theta) -
                         eval_valuation(vf, lower, theta);
      if (lhs > rhs + tol_for(tol, lhs, rhs))
        flag("cross_marginal",
             {{"x", rows_json(x)}, {"x_prime", rows_json(lower)},
              {"producer", i}, {"theta", theta},
              {"marginal_high_others", lhs}, {"marginal_low_others", rhs}},
             lhs - rhs);
    }
  }
  return report;
}

nlohmann::json to_json(const AssumptionReport& report) {
  nlohmann::json j;
  j["samples"] = report.samples;
  j["pass"] = report.ok();
  for (const char* a :
       {"monotonicity", "zero_input", "super_additivity", "cross_marginal"})
    j["violation_counts"][a] = report.count(a);
  // The first witnesses of each kind; the counts above are complete.
  j["violations"] = nlohmann::json::array();
  std::map<std::string, std::size_t> shown;
  for (const auto& v : report.violations)
    if (shown[v.assumption]++ < kWitnessesPerKind)
      j["violations"].push_back(
          {{"assumption", v.assumption}, {"gap", v.gap}, {"witness", v.witness}});
  return j;
}

}  // namespace pvcg
