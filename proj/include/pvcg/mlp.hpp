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

#ifndef PVCG_MLP_HPP_
#define PVCG_MLP_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"
#include "pvcg/rng.hpp"

namespace pvcg {

/// Fully connected network with ReLU hidden layers and one linear output.
///
/// Parameters live in one flat buffer, layer by layer: the weight matrix
/// (out x in, row-major) followed by the bias vector. The ReLU subgradient
/// at zero is taken as zero.
class Mlp {
 public:
  /// Activations recorded by a forward pass, consumed by backward().
  struct Tape {
    std::vector<std::vector<double>> inputs;  // input of each layer
    std::vector<std::vector<double>> pre;     // pre-activation of each layer
  };

  Mlp() = default;
  /// All-zero parameters. layers = {input, hidden..., 1}.
  explicit Mlp(std::vector<std::size_t> layers);

  /// Uniform He initialization of weights, zero biases.
  static Mlp he_uniform(std::vector<std::size_t> layers, Rng& rng);

  const std::vector<std::size_t>& layers() const { return layers_; }
  std::size_t input_width() const { return layers_.front(); }
  std::size_t layer_count() const { return layers_.size() - 1; }
  std::size_t parameter_count() const { return params_.size(); }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  std::span<const double> weights(std::size_t layer) const;
  std::span<const double> biases(std::size_t layer) const;
  std::span<double> weights(std::size_t layer);
  std::span<double> biases(std::size_t layer);

  /// Throws std::invalid_argument on an input width mismatch.
  double forward(std::span<const double> input) const;
  double forward(std::span<const double> input, Tape& tape) const;

  /// Adds upstream * d(output)/d(parameters) to grad and, when input_grad is
  /// non-empty, upstream * d(output)/d(input) to input_grad.
  void backward(const Tape& tape, double upstream, std::span<double> grad,
                std::span<double> input_grad = {}) const;

  bool operator==(const Mlp&) const = default;

  nlohmann::json to_json() const;
  static Mlp from_json(const nlohmann::json& j);

 private:
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + layers_[layer + 1] * layers_[layer];
  }

  std::vector<std::size_t> layers_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

}  // namespace pvcg

#endif  // PVCG_MLP_HPP_
