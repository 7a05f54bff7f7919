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

#ifndef PVCG_MODEL_HPP_
#define PVCG_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace pvcg {

/// Resources of one producer, one entry per resource dimension.
using ResourceVector = std::vector<double>;

/// Resource quantities for a list of producers (capacities, accepted amounts,
/// or acceptance ratios), stored row-major as producers x dim.
class Quantities {
 public:
  Quantities() = default;
  Quantities(std::size_t producers, std::size_t dim, double fill = 0.0);

  /// One scalar resource per producer.
  static Quantities scalars(std::vector<double> values);
  static Quantities from_rows(const std::vector<ResourceVector>& rows);

  std::size_t producers() const { return producers_; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return producers_ == 0; }

  std::span<double> operator[](std::size_t i) {
    return {values_.data() + i * dim_, dim_};
  }
  std::span<const double> operator[](std::size_t i) const {
    return {values_.data() + i * dim_, dim_};
  }
  std::span<double> flat() { return values_; }
  std::span<const double> flat() const { return values_; }

  ResourceVector row(std::size_t i) const;
  std::vector<ResourceVector> rows() const;

  Quantities without(std::size_t i) const;
  Quantities with_inserted(std::size_t i, std::span<const double> row) const;

  /// Elementwise product (reported capacities times acceptance ratios).
  Quantities hadamard(const Quantities& other) const;

  bool operator==(const Quantities&) const = default;

 private:
  std::size_t producers_ = 0;
  std::size_t dim_ = 1;
  std::vector<double> values_;
};

enum class ValuationTag { sqrt_sum, sqrt_sum_squares, custom };
enum class CostTag { linear, custom };

/// Individual valuation function v(x, theta).
///
/// Built-in families, with s_k the component sum of producer k's resources
/// and c the `scale` parameter (the producer count of the full economy):
///   sqrt_sum:          v = theta * sqrt(c * sum_k s_k)
///   sqrt_sum_squares:  v = theta * sqrt(c * sum_k s_k^2)
/// The scale stays fixed when producers are removed, which is what keeps a
/// zero-input producer from changing the valuation.
struct ValuationFamily {
  using Function = std::function<double(const Quantities&, double theta)>;
  using Gradient =
      std::function<void(const Quantities&, double theta, std::span<double>)>;

  ValuationTag tag = ValuationTag::sqrt_sum;
  double scale = 1.0;
  std::string name;
  Function custom;
  Gradient custom_gradient;  // optional; finite differences otherwise

  static ValuationFamily sqrt_sum(double scale);
  static ValuationFamily sqrt_sum_squares(double scale);
  static ValuationFamily make_custom(std::string name, Function f,
                                     Gradient gradient = {});

  bool has_gradient() const {
    return tag != ValuationTag::custom || static_cast<bool>(custom_gradient);
  }
};

/// Individual cost function c(x_i, gamma_i). The linear family is
/// gamma * <w, x> with w defaulting to all ones.
struct CostFamily {
  using Function = std::function<double(std::span<const double>, double gamma)>;
  using Gradient =
      std::function<void(std::span<const double>, double, std::span<double>)>;

  CostTag tag = CostTag::linear;
  std::vector<double> weights;
  std::string name;
  Function custom;
  Gradient custom_gradient;

  static CostFamily linear(std::vector<double> weights = {});
  static CostFamily make_custom(std::string name, Function f,
                                Gradient gradient = {});

  bool has_gradient() const {
    return tag != CostTag::custom || static_cast<bool>(custom_gradient);
  }
};

struct Families {
  ValuationFamily valuation;
  CostFamily cost;
};

/// Capacities and types of all participants: the truth of an economy, a bid
/// profile, a prior sample, or the others' view seen by one producer.
struct TypeProfile {
  Quantities capacities;
  std::vector<double> cost_types;
  std::vector<double> valuation_types;

  std::size_t producers() const { return capacities.producers(); }
  std::size_t consumers() const { return valuation_types.size(); }
  std::size_t dim() const { return capacities.dim(); }

  TypeProfile without_producer(std::size_t i) const;
  TypeProfile with_producer(std::size_t i, std::span<const double> capacity,
                            double cost_type) const;

  /// Checks sizes, finiteness and non-negativity. Empty producer lists are
  /// allowed (counterfactual views); use Economy::validate for full checks.
  void validate() const;

  bool operator==(const TypeProfile&) const = default;
};

struct Economy {
  TypeProfile types;
  Families families;

  std::size_t producers() const { return types.producers(); }
  std::size_t consumers() const { return types.consumers(); }
  std::size_t dim() const { return types.dim(); }

  Economy with_types(TypeProfile t) const { return {std::move(t), families}; }
  Economy without_producer(std::size_t i) const {
    return with_types(types.without_producer(i));
  }

  /// n >= 1, m >= 1, consistent sizes, all entries finite and >= 0.
  void validate() const;
};

struct BidProfile {
  TypeProfile reported;

  static BidProfile truthful(const Economy& economy) { return {economy.types}; }
};

/// The economy as the coordinator sees it after Step 1 (reports in place of
/// the truth). Families are shared.
Economy apply_bids(const Economy& economy, const BidProfile& bids);

double eval_valuation(const ValuationFamily& family, const Quantities& x,
                      double theta);
double eval_cost(const CostFamily& family, std::span<const double> x,
                 double gamma);

/// Sum over consumers of v minus sum over producers of c.
double social_surplus(const Economy& economy, const Quantities& accepted);

/// Gradient of social_surplus with respect to the accepted quantities,
/// written into grad (size producers * dim). Uses analytic gradients where
/// the families supply them, central differences with step fd_step otherwise.
void social_surplus_gradient(const Economy& economy, const Quantities& accepted,
                             std::span<double> grad, double fd_step = 1e-6);

struct AssumptionViolation {
  std::string assumption;  // monotonicity, zero_input, super_additivity,
                           // cross_marginal
  nlohmann::json witness;
  double gap = 0.0;
};

struct AssumptionReport {
  std::size_t samples = 0;
  std::vector<AssumptionViolation> violations;
  std::size_t count(const std::string& assumption) const;
  bool ok() const { return violations.empty(); }
};

struct AssumptionSampling {
  std::size_t producers = 2;
  std::size_t dim = 1;
  double capacity_hi = 5.0;
  double cost_type_hi = 1.0;
  double valuation_type_hi = 1.0;
  double tolerance = 1e-9;
};

/// Draws random points and checks monotonicity, zero-input neutrality,
/// super-additivity and decreasing cross marginal returns. Violations are
/// returned with their witnesses; nothing throws for a violating family.
AssumptionReport check_assumptions(const Families& families,
                                   std::size_t sample_count,
                                   std::uint64_t seed,
                                   const AssumptionSampling& sampling = {});

nlohmann::json to_json(const AssumptionReport& report);

}  // namespace pvcg

#endif  // PVCG_MODEL_HPP_
