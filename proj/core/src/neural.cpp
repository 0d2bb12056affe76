// Copyright 2026 The bosehub Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bosehub/neural.hpp"

#include <cmath>
#include <iostream>
#include <random>

#include <json.hpp>

#include "bosehub/errors.hpp"

namespace bosehub {

namespace {

constexpr int kMlpFormatVersion = 1;

void check_sizes(const std::vector<std::size_t>& sizes) {
  if (sizes.size() < 2) throw DimensionError("network needs at least input and output sizes");
  for (auto s : sizes)
    if (s == 0) throw DimensionError("network layer of size zero");
}

}  // namespace

std::size_t mlp_param_count(std::span<const std::size_t> sizes) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    n += sizes[l] * sizes[l + 1];
    if (l + 2 < sizes.size()) n += sizes[l + 1];
  }
  return n;
}

std::size_t MlpParams::num_params() const noexcept { return mlp_param_count(sizes); }

std::vector<double> MlpParams::flatten() const {
  std::vector<double> out;
  out.reserve(num_params());
  for (std::size_t l = 0; l < weights.size(); ++l) {
    out.insert(out.end(), weights[l].begin(), weights[l].end());
    if (l < biases.size()) out.insert(out.end(), biases[l].begin(), biases[l].end());
  }
  return out;
}

void MlpParams::assign(std::span<const double> flat) {
  if (flat.size() != num_params()) {
    throw DimensionError("expected " + std::to_string(num_params()) + " network parameters, got " +
                         std::to_string(flat.size()));
  }
  std::size_t pos = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    for (auto& w : weights[l]) w = flat[pos++];
    if (l < biases.size())
      for (auto& b : biases[l]) b = flat[pos++];
  }
}

MlpParams MlpParams::zeros(std::vector<std::size_t> sizes) {
  check_sizes(sizes);
  MlpParams p;
  p.sizes = std::move(sizes);
  for (std::size_t l = 0; l + 1 < p.sizes.size(); ++l) {
    p.weights.emplace_back(p.sizes[l] * p.sizes[l + 1], 0.0);
    if (l + 2 < p.sizes.size()) p.biases.emplace_back(p.sizes[l + 1], 0.0);
  }
  return p;
}

MlpParams MlpParams::random(std::vector<std::size_t> sizes, std::uint64_t seed) {
  MlpParams p = zeros(std::move(sizes));
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(p.sizes[l]));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& w : p.weights[l]) w = dist(rng);
    if (l < p.biases.size())
      for (auto& b : p.biases[l]) b = dist(rng);
  }
  return p;
}

MlpTrace mlp_forward_trace(const MlpParams& params, std::span<const double> features) {
  if (features.size() != params.inputs()) {
    throw DimensionError("network expects " + std::to_string(params.inputs()) + " features, got " +
                         std::to_string(features.size()));
  }
  MlpTrace trace;
  trace.activations.emplace_back(features.begin(), features.end());
  const std::size_t layers = params.weights.size();
  for (std::size_t l = 0; l < layers; ++l) {
    const auto& in = trace.activations.back();
    const std::size_t fan_in = params.sizes[l];
    const std::size_t fan_out = params.sizes[l + 1];
    const bool hidden = l + 1 < layers;
    std::vector<double> out(fan_out);
    for (std::size_t r = 0; r < fan_out; ++r) {
      double acc = hidden ? params.biases[l][r] : 0.0;
      const double* row = params.weights[l].data() + r * fan_in;
      for (std::size_t c = 0; c < fan_in; ++c) acc += row[c] * in[c];
      out[r] = hidden ? std::tanh(acc) : acc;
    }
    if (hidden) {
      trace.activations.push_back(std::move(out));
    } else {
      trace.output = std::move(out);
    }
  }
  return trace;
}

std::vector<double> mlp_forward(const MlpParams& params, std::span<const double> features) {
  return mlp_forward_trace(params, features).output;
}

std::complex<double> coefficient(std::span<const double> outputs) {
  if (outputs.empty() || outputs.size() > 2) throw DimensionError("coefficient needs 1 or 2 outputs");
  double x0 = outputs[0];
  if (std::abs(x0) > kMaxExponent) {
    std::clog << "bosehub: warning: network output " << x0 << " clamped to +-" << kMaxExponent
              << '\n';
    x0 = std::copysign(kMaxExponent, x0);
  }
  const double magnitude = std::exp(x0);
  if (outputs.size() == 1) return {magnitude, 0.0};
  return std::polar(magnitude, outputs[1]);
}

std::vector<double> mlp_gradient(const MlpParams& params, std::span<const double> features,
                                 std::span<const double> upstream) {
  if (upstream.size() != params.outputs()) throw DimensionError("upstream size != network outputs");
  const MlpTrace trace = mlp_forward_trace(params, features);
  const std::size_t layers = params.weights.size();

  // Per-layer gradient blocks, assembled into flat order at the end.
  std::vector<std::vector<double>> dw(layers), db(params.biases.size());
  std::vector<double> delta(upstream.begin(), upstream.end());  // dL/d pre-activation
  for (std::size_t l = layers; l-- > 0;) {
    const auto& in = trace.activations[l];
    const std::size_t fan_in = params.sizes[l];
    const std::size_t fan_out = params.sizes[l + 1];
    dw[l].assign(fan_in * fan_out, 0.0);
    for (std::size_t r = 0; r < fan_out; ++r)
      for (std::size_t c = 0; c < fan_in; ++c) dw[l][r * fan_in + c] = delta[r] * in[c];
    if (l < params.biases.size()) db[l] = delta;
    if (l == 0) break;
    // Back through W_l and the tanh that produced `in`.
    std::vector<double> prev(fan_in, 0.0);
    for (std::size_t r = 0; r < fan_out; ++r) {
      const double* row = params.weights[l].data() + r * fan_in;
      for (std::size_t c = 0; c < fan_in; ++c) prev[c] += row[c] * delta[r];
    }
    for (std::size_t c = 0; c < fan_in; ++c) prev[c] *= 1.0 - in[c] * in[c];
    delta = std::move(prev);
  }

  std::vector<double> out;
  out.reserve(params.num_params());
  for (std::size_t l = 0; l < layers; ++l) {
    out.insert(out.end(), dw[l].begin(), dw[l].end());
    if (l < db.size()) out.insert(out.end(), db[l].begin(), db[l].end());
  }
  return out;
}

std::string mlp_params_to_json(const MlpParams& params) {
  nlohmann::json j;
  j["format"] = "bosehub.mlp";
  j["version"] = kMlpFormatVersion;
  j["sizes"] = params.sizes;
  j["output_bias"] = false;
  j["params"] = params.flatten();
  return j.dump(2) + "\n";
}

MlpParams mlp_params_from_json(std::string_view text) {
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (!j.is_object()) throw DomainError("checkpoint is not a JSON object");
    if (j.value("format", "") != "bosehub.mlp") throw DomainError("not a network checkpoint");
    if (j.value("version", 0) != kMlpFormatVersion) {
      throw DomainError("unsupported network checkpoint version");
    }
    MlpParams p = MlpParams::zeros(j.at("sizes").get<std::vector<std::size_t>>());
    p.assign(j.at("params").get<std::vector<double>>());
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed network checkpoint: ") + e.what());
  }
}

}  // namespace bosehub
