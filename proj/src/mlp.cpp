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

#include "pvcg/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pvcg {

Mlp::Mlp(std::vector<std::size_t> layers) : layers_(std::move(layers)) {
  if (layers_.size() < 2) throw std::invalid_argument("an MLP needs at least two layers");
  if (layers_.back() != 1) throw std::invalid_argument("MLP output width must be 1");
  for (std::size_t w : layers_)
    if (w == 0) throw std::invalid_argument("MLP layer widths must be positive");
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    offsets_.push_back(offset);
    offset += layers_[l + 1] * layers_[l] + layers_[l + 1];
  }
  params_.assign(offset, 0.0);
}

Mlp Mlp::he_uniform(std::vector<std::size_t> layers, Rng& rng) {
  Mlp net(std::move(layers));
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(net.layers_[l]));
    for (double& w : net.weights(l)) w = rng.uniform(-limit, limit);
  }
  return net;
}

std::span<const double> Mlp::weights(std::size_t layer) const {
  return {params_.data() + weight_offset(layer), layers_[layer + 1] * layers_[layer]};
}
std::span<const double> Mlp::biases(std::size_t layer) const {
  return {params_.data() + bias_offset(layer), layers_[layer + 1]};
}
std::span<double> Mlp::weights(std::size_t layer) {
  return {params_.data() + weight_offset(layer), layers_[layer + 1] * layers_[layer]};
}
std::span<double> Mlp::biases(std::size_t layer) {
  return {params_.data() + bias_offset(layer), layers_[layer + 1]};
}

double Mlp::forward(std::span<const double> input) const {
  Tape tape;
  return forward(input, tape);
}

double Mlp::forward(std::span<const double> input, Tape& tape) const {
  if (layers_.empty()) throw std::logic_error("MLP has no layers");
  if (input.size() != input_width())
    throw std::invalid_argument("MLP input width mismatch");
  const std::size_t depth = layer_count();
  tape.inputs.resize(depth);
  tape.pre.resize(depth);
  tape.inputs[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < depth; ++l) {
    const std::size_t in = layers_[l], out = layers_[l + 1];
    const auto w = weights(l);
    const auto b = biases(l);
    auto& z = tape.pre[l];
    z.assign(b.begin(), b.end());
    const auto& a = tape.inputs[l];
    for (std::size_t r = 0; r < out; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < in; ++c) s += w[r * in + c] * a[c];
      z[r] += s;
    }
    if (l + 1 < depth) {
      auto& next = tape.inputs[l + 1];
      next.resize(out);
      for (std::size_t r = 0; r < out; ++r) next[r] = z[r] < 0.0 ? 0.0 : z[r];  // NaN passes through
    }
  }
  return tape.pre.back()[0];
}

void Mlp::backward(const Tape& tape, double upstream, std::span<double> grad,
                   std::span<double> input_grad) const {
  if (grad.size() != params_.size())
    throw std::invalid_argument("gradient buffer has the wrong size");
  const std::size_t depth = layer_count();
  std::vector<double> delta{upstream};  // d loss / d pre-activation of layer l
  std::vector<double> below;
  for (std::size_t l = depth; l-- > 0;) {
    const std::size_t in = layers_[l], out = layers_[l + 1];
    const auto w = weights(l);
    const auto& a = tape.inputs[l];
    double* gw = grad.data() + weight_offset(l);
    double* gb = grad.data() + bias_offset(l);
    for (std::size_t r = 0; r < out; ++r) {
      gb[r] += delta[r];
      for (std::size_t c = 0; c < in; ++c) gw[r * in + c] += delta[r] * a[c];
    }
    if (l == 0 && input_grad.empty()) break;
    below.assign(in, 0.0);
    for (std::size_t r = 0; r < out; ++r)
      for (std::size_t c = 0; c < in; ++c) below[c] += w[r * in + c] * delta[r];
    if (l == 0) {
      for (std::size_t c = 0; c < in; ++c) input_grad[c] += below[c];
      break;
    }
    const auto& z = tape.pre[l - 1];
    for (std::size_t c = 0; c < in; ++c) below[c] = z[c] > 0.0 ? below[c] : 0.0;
    delta.swap(below);
  }
}

nlohmann::json Mlp::to_json() const {
  nlohmann::json j;
  j["layers"] = layers_;
  j["activation"] = "relu";
  for (std::size_t l = 0; l < layer_count(); ++l) {
    const auto w = weights(l);
    const auto b = biases(l);
    j["weights"].push_back(std::vector<double>(w.begin(), w.end()));
    j["biases"].push_back(std::vector<double>(b.begin(), b.end()));
  }
  return j;
}

Mlp Mlp::from_json(const nlohmann::json& j) {
  if (j.value("activation", std::string("relu")) != "relu")
    throw std::invalid_argument("only relu networks are supported");
  Mlp net(j.at("layers").get<std::vector<std::size_t>>());
  const auto& ws = j.at("weights");
  const auto& bs = j.at("biases");
  if (ws.size() != net.layer_count() || bs.size() != net.layer_count())
    throw std::invalid_argument("checkpoint layer count mismatch");
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    const auto w = ws[l].get<std::vector<double>>();
    const auto b = bs[l].get<std::vector<double>>();
    auto dw = net.weights(l);
    auto db = net.biases(l);
    if (w.size() != dw.size() || b.size() != db.size())
      throw std::invalid_argument("checkpoint layer shape mismatch");
    std::copy(w.begin(), w.end(), dw.begin());
    std::copy(b.begin(), b.end(), db.begin());
  }
  for (double p : net.params_)
    if (!std::isfinite(p)) throw std::invalid_argument("checkpoint has non-finite weights");
  return net;
}

}  // namespace pvcg
