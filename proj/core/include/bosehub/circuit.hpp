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

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bosehub {

/// Single-qubit state a0|0> + a1|1>.
struct Qstate {
  std::complex<double> amp0{1.0, 0.0};
  std::complex<double> amp1{0.0, 0.0};

  static Qstate zero() { return {}; }

  double prob0() const noexcept { return std::norm(amp0); }
  double norm_squared() const noexcept { return std::norm(amp0) + std::norm(amp1); }
  double expect_z() const noexcept { return std::norm(amp0) - std::norm(amp1); }
  double expect_x() const noexcept { return 2.0 * (std::conj(amp0) * amp1).real(); }
  double expect_y() const noexcept { return 2.0 * (std::conj(amp0) * amp1).imag(); }
};

// Rz(theta) = diag(e^{-i theta/2}, e^{+i theta/2}),
// Ry(theta) = [[cos(theta/2), -sin(theta/2)], [sin(theta/2), cos(theta/2)]].
Qstate apply_rz(const Qstate& s, double theta);
Qstate apply_ry(const Qstate& s, double theta);

/// General unitary Rz(gamma) Ry(beta) Rz(alpha); alpha acts first.
Qstate rot(const Qstate& s, double alpha, double beta, double gamma);

enum class CircuitKind { Compressed, Quat };

std::string_view to_string(CircuitKind kind);
CircuitKind parse_circuit_kind(std::string_view name);

/// How the qubit's computational-basis readout becomes a weight.
enum class Readout {
  /// P(0) = (1 + <Z>) / 2, in [0, 1].
  Probability,
  /// <Z>, in [-1, 1].
  SignedZ,
};

struct LayerParams {
  std::vector<double> weights;
  double bias = 0.0;
  /// Activation rotation; used by Quat layers only.
  double phi = 0.0;
};

/// Variational parameters of a single-qubit data re-uploading circuit.
///
/// Flat ordering, per layer: weights[0..M), bias, then phi for Quat.
struct CircuitParams {
  CircuitKind kind = CircuitKind::Compressed;
  std::vector<LayerParams> layers;

  std::size_t sites() const noexcept { return layers.empty() ? 0 : layers.front().weights.size(); }
  static std::size_t params_per_layer(CircuitKind kind, std::size_t sites) {
    return sites + (kind == CircuitKind::Quat ? 2 : 1);
  }
  std::size_t num_params() const noexcept;

  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);

  /// Layers of `sites` weights, all zero.
  static CircuitParams zeros(CircuitKind kind, std::size_t layers, std::size_t sites);
  /// Every parameter uniform in [-scale, scale].
  static CircuitParams random(CircuitKind kind, std::size_t layers, std::size_t sites,
                              std::uint64_t seed, double scale = 0.1);

  friend bool operator==(const CircuitParams& a, const CircuitParams& b) {
    return a.kind == b.kind && a.flatten() == b.flatten() && a.sites() == b.sites();
  }
};

/// Angle triples [b + w_k x_k] for k = 3j, 3j+1, 3j+2. Throws
/// ConfigurationError unless the feature count is a positive multiple of 3.
std::vector<std::array<double, 3>> compressed_layer_args(std::span<const double> features,
                                                         std::span<const double> weights,
                                                         double bias);

Qstate compressed_layer(const Qstate& s, std::span<const double> features,
                        std::span<const double> weights, double bias);

/// Ry(2 phi) Rz(2 (w.x + b)), Rz first.
Qstate quat_layer(const Qstate& s, std::span<const double> features,
                  std::span<const double> weights, double bias, double phi);

/// Final state after all layers, starting from |0>.
Qstate run_circuit(const CircuitParams& params, std::span<const double> features);

double weight_of(const CircuitParams& params, std::span<const double> features,
                 Readout readout = Readout::Probability);

/// (1 + <Z>)/2 * exp(i pi <X>), both on the final state.
std::complex<double> complex_weight_of(const CircuitParams& params,
                                       std::span<const double> features);

struct ObservableGradients {
  double z = 0.0;
  double x = 0.0;
  std::vector<double> dz;  // d<Z>/d theta, flat parameter order
  std::vector<double> dx;  // d<X>/d theta
};

/// <Z>, <X> and their exact parameter derivatives by reverse accumulation
/// through the gate sequence.
ObservableGradients observable_gradients(const CircuitParams& params,
                                         std::span<const double> features);

/// d weight_of / d theta in flat parameter order.
std::vector<double> gradient(const CircuitParams& params, std::span<const double> features,
                             Readout readout = Readout::Probability);

struct ShotResult {
  std::int64_t shots = 0;
  std::int64_t count0 = 0;
  std::int64_t count1 = 0;

  double freq0() const noexcept { return static_cast<double>(count0) / static_cast<double>(shots); }
};

/// Binomial(shots, p) draw of zero outcomes. Throws DomainError for shots < 1
/// or p outside [0, 1].
ShotResult sample_probability(double p0, std::int64_t shots, std::uint64_t seed);

ShotResult sample(const CircuitParams& params, std::span<const double> features,
                  std::int64_t shots, std::uint64_t seed);

/// Versioned JSON text. Doubles are written as shortest round-trip decimals
/// so read(write(p)) == p bit for bit.
std::string circuit_params_to_json(const CircuitParams& params);
CircuitParams circuit_params_from_json(std::string_view text);

}  // namespace bosehub
