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

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bosehub {

/// Fully connected network: tanh on every hidden layer, linear output layer
/// without bias. Weight matrices are row-major (fan_out x fan_in).
///
/// Flat parameter order: W1, b1, W2, b2, ..., W_out.
struct MlpParams {
  std::vector<std::size_t> sizes;  // {input, hidden..., output}
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;  // hidden layers only

  std::size_t inputs() const noexcept { return sizes.front(); }
  std::size_t outputs() const noexcept { return sizes.back(); }
  std::size_t num_params() const noexcept;

  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);

  static MlpParams zeros(std::vector<std::size_t> sizes);
  /// Weights and biases uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  static MlpParams random(std::vector<std::size_t> sizes, std::uint64_t seed);

  friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

/// Parameter count of the layer sizes; 2560 for {6, 64, 32, 1}.
std::size_t mlp_param_count(std::span<const std::size_t> sizes);

/// Activations of one forward pass, kept for backpropagation.
struct MlpTrace {
  std::vector<std::vector<double>> activations;  // input, hidden outputs
  std::vector<double> output;
};

MlpTrace mlp_forward_trace(const MlpParams& params, std::span<const double> features);
std::vector<double> mlp_forward(const MlpParams& params, std::span<const double> features);

/// Exponent magnitudes beyond this are clamped in `coefficient`.
inline constexpr double kMaxExponent = 30.0;

/// e^{x} for one output, e^{x0} e^{i x1} for two.
std::complex<double> coefficient(std::span<const double> outputs);

/// Sum_k upstream[k] * d output_k / d theta, flat parameter order.
std::vector<double> mlp_gradient(const MlpParams& params, std::span<const double> features,
                                 std::span<const double> upstream);

std::string mlp_params_to_json(const MlpParams& params);
MlpParams mlp_params_from_json(std::string_view text);

}  // namespace bosehub
