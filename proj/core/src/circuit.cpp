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

#include "bosehub/circuit.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <json.hpp>

#include "bosehub/errors.hpp"

namespace bosehub {

using cplx = std::complex<double>;

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr int kCircuitFormatVersion = 1;

enum class Axis { Y, Z };

struct ParamTerm {
  std::size_t index;
  double coeff;
};

// One rotation gate with angle = sum coeff * theta[index]; the angle value is
// cached for the forward pass.
struct Gate {
  Axis axis;
  double angle;
  std::vector<ParamTerm> terms;
};

Qstate apply_gate(const Qstate& s, Axis axis, double angle) {
  return axis == Axis::Z ? apply_rz(s, angle) : apply_ry(s, angle);
}

// Generator of the rotation: P in exp(-i theta P / 2).
Qstate apply_pauli(const Qstate& s, Axis axis) {
  if (axis == Axis::Z) return {s.amp0, -s.amp1};
  return {-kI * s.amp1, kI * s.amp0};
}

void check_arity(const CircuitParams& params, std::span<const double> features) {
  for (const auto& layer : params.layers) {
    if (layer.weights.size() != features.size()) {
      throw DimensionError("circuit layer has " + std::to_string(layer.weights.size()) +
                           " weights for " + std::to_string(features.size()) + " features");
    }
  }
}

std::vector<Gate> gate_sequence(const CircuitParams& params, std::span<const double> x) {
  check_arity(params, x);
  const std::size_t m = x.size();
  const std::size_t stride = CircuitParams::params_per_layer(params.kind, m);
  std::vector<Gate> gates;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& layer = params.layers[l];
    const std::size_t base = l * stride;
    if (params.kind == CircuitKind::Compressed) {
      const auto triples = compressed_layer_args(x, layer.weights, layer.bias);
      for (std::size_t j = 0; j < triples.size(); ++j) {
        for (std::size_t slot = 0; slot < 3; ++slot) {
          const std::size_t k = 3 * j + slot;
          gates.push_back(Gate{slot == 1 ? Axis::Y : Axis::Z, triples[j][slot],
                               {{base + k, x[k]}, {base + m, 1.0}}});
        }
      }
    } else {
      double y = layer.bias;
      for (std::size_t i = 0; i < m; ++i) y += layer.weights[i] * x[i];
      Gate rz{Axis::Z, 2.0 * y, {}};
      for (std::size_t i = 0; i < m; ++i) rz.terms.push_back({base + i, 2.0 * x[i]});
      rz.terms.push_back({base + m, 2.0});
      gates.push_back(std::move(rz));
      gates.push_back(Gate{Axis::Y, 2.0 * layer.phi, {{base + m + 1, 2.0}}});
    }
  }
  return gates;
}

}  // namespace

Qstate apply_rz(const Qstate& s, double theta) {
  const cplx lo = std::polar(1.0, -0.5 * theta);
  return {lo * s.amp0, std::conj(lo) * s.amp1};
}

Qstate apply_ry(const Qstate& s, double theta) {
  const double c = std::cos(0.5 * theta);
  const double sn = std::sin(0.5 * theta);
  return {c * s.amp0 - sn * s.amp1, sn * s.amp0 + c * s.amp1};
}

Qstate rot(const Qstate& s, double alpha, double beta, double gamma) {
  return apply_rz(apply_ry(apply_rz(s, alpha), beta), gamma);
}

std::string_view to_string(CircuitKind kind) {
  return kind == CircuitKind::Compressed ? "compressed" : "quat";
}

CircuitKind parse_circuit_kind(std::string_view name) {
  if (name == "compressed") return CircuitKind::Compressed;
  if (name == "quat") return CircuitKind::Quat;
  throw DomainError("unknown circuit kind: " + std::string(name));
}

std::size_t CircuitParams::num_params() const noexcept {
  return layers.size() * params_per_layer(kind, sites());
}

std::vector<double> CircuitParams::flatten() const {
  std::vector<double> out;
  out.reserve(num_params());
  for (const auto& layer : layers) {
    out.insert(out.end(), layer.weights.begin(), layer.weights.end());
    out.push_back(layer.bias);
    if (kind == CircuitKind::Quat) out.push_back(layer.phi);
  }
  return out;
}

void CircuitParams::assign(std::span<const double> flat) {
  if (flat.size() != num_params()) {
    throw DimensionError("expected " + std::to_string(num_params()) + " circuit parameters, got " +
                         std::to_string(flat.size()));
  }
  std::size_t pos = 0;
  for (auto& layer : layers) {
    for (auto& w : layer.weights) w = flat[pos++];
    layer.bias = flat[pos++];
    if (kind == CircuitKind::Quat) layer.phi = flat[pos++];
  }
}

CircuitParams CircuitParams::zeros(CircuitKind kind, std::size_t layers, std::size_t sites) {
  CircuitParams p;
  p.kind = kind;
  p.layers.assign(layers, LayerParams{std::vector<double>(sites, 0.0), 0.0, 0.0});
  return p;
}

CircuitParams CircuitParams::random(CircuitKind kind, std::size_t layers, std::size_t sites,
                                    std::uint64_t seed, double scale) {
  CircuitParams p = zeros(kind, layers, sites);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  std::vector<double> flat(p.num_params());
  for (auto& v : flat) v = dist(rng);
  p.assign(flat);
  return p;
}

std::vector<std::array<double, 3>> compressed_layer_args(std::span<const double> features,
                                                         std::span<const double> weights,
                                                         double bias) {
  if (features.empty() || features.size() % 3 != 0) {
    throw ConfigurationError("compressed scheme needs a positive multiple of 3 features, got " +
                             std::to_string(features.size()));
  }
  if (weights.size() != features.size()) throw DimensionError("weights and features differ in size");
  std::vector<std::array<double, 3>> out(features.size() / 3);
  for (std::size_t j = 0; j < out.size(); ++j)
    for (std::size_t slot = 0; slot < 3; ++slot) {
      const std::size_t k = 3 * j + slot;
      out[j][slot] = bias + weights[k] * features[k];
    }
  return out;
}

Qstate compressed_layer(const Qstate& s, std::span<const double> features,
                        std::span<const double> weights, double bias) {
  Qstate out = s;
  for (const auto& [a, b, g] : compressed_layer_args(features, weights, bias)) out = rot(out, a, b, g);
  return out;
}

Qstate quat_layer(const Qstate& s, std::span<const double> features,
                  std::span<const double> weights, double bias, double phi) {
  if (weights.size() != features.size()) throw DimensionError("weights and features differ in size");
  double y = bias;
  for (std::size_t i = 0; i < features.size(); ++i) y += weights[i] * features[i];
  return apply_ry(apply_rz(s, 2.0 * y), 2.0 * phi);
}

Qstate run_circuit(const CircuitParams& params, std::span<const double> features) {
  check_arity(params, features);
  Qstate s = Qstate::zero();
  for (const auto& layer : params.layers) {
    s = params.kind == CircuitKind::Compressed
            ? compressed_layer(s, features, layer.weights, layer.bias)
            : quat_layer(s, features, layer.weights, layer.bias, layer.phi);
  }
  return s;
}

double weight_of(const CircuitParams& params, std::span<const double> features, Readout readout) {
  const Qstate s = run_circuit(params, features);
  return readout == Readout::Probability ? s.prob0() : s.expect_z();
}

cplx complex_weight_of(const CircuitParams& params, std::span<const double> features) {
  const Qstate s = run_circuit(params, features);
  const double magnitude = 0.5 * (1.0 + s.expect_z());
  return std::polar(magnitude, std::numbers::pi * s.expect_x());
}

ObservableGradients observable_gradients(const CircuitParams& params,
                                         std::span<const double> features) {
  const std::vector<Gate> gates = gate_sequence(params, features);
  std::vector<Qstate> states;
  states.reserve(gates.size() + 1);
  states.push_back(Qstate::zero());
  for (const auto& g : gates) states.push_back(apply_gate(states.back(), g.axis, g.angle));

  const Qstate& final = states.back();
  ObservableGradients out;
  out.z = final.expect_z();
  out.x = final.expect_x();
  out.dz.assign(params.num_params(), 0.0);
  out.dx.assign(params.num_params(), 0.0);

  // Adjoint states lambda = U_{>k}^dagger O psi_final for O = Z and X.
  Qstate lz{final.amp0, -final.amp1};
  Qstate lx{final.amp1, final.amp0};
  for (std::size_t k = gates.size(); k-- > 0;) {
    const Gate& g = gates[k];
    // dG psi_{k-1} = (-i/2) P G psi_{k-1} = (-i/2) P psi_k
    const Qstate p = apply_pauli(states[k + 1], g.axis);
    const cplx d0 = -0.5 * kI * p.amp0;
    const cplx d1 = -0.5 * kI * p.amp1;
    const double dz_dangle = 2.0 * (std::conj(lz.amp0) * d0 + std::conj(lz.amp1) * d1).real();
    const double dx_dangle = 2.0 * (std::conj(lx.amp0) * d0 + std::conj(lx.amp1) * d1).real();
    for (const auto& term : g.terms) {
      out.dz[term.index] += term.coeff * dz_dangle;
      out.dx[term.index] += term.coeff * dx_dangle;
    }
    lz = apply_gate(lz, g.axis, -g.angle);
    lx = apply_gate(lx, g.axis, -g.angle);
  }
  return out;
}

std::vector<double> gradient(const CircuitParams& params, std::span<const double> features,
                             Readout readout) {
  ObservableGradients og = observable_gradients(params, features);
  if (readout == Readout::Probability)
    for (auto& v : og.dz) v *= 0.5;
  return og.dz;
}

ShotResult sample_probability(double p0, std::int64_t shots, std::uint64_t seed) {
  if (shots < 1) throw DomainError("shots must be at least 1");
  if (!(p0 >= -1e-12 && p0 <= 1.0 + 1e-12)) throw DomainError("probability outside [0, 1]");
  p0 = std::clamp(p0, 0.0, 1.0);
  std::mt19937_64 rng(seed);
  std::binomial_distribution<std::int64_t> dist(shots, p0);
  ShotResult r;
  r.shots = shots;
  r.count0 = dist(rng);
  r.count1 = shots - r.count0;
  return r;
}

ShotResult sample(const CircuitParams& params, std::span<const double> features,
                  std::int64_t shots, std::uint64_t seed) {
  return sample_probability(weight_of(params, features), shots, seed);
}

std::string circuit_params_to_json(const CircuitParams& params) {
  nlohmann::json j;
  j["format"] = "bosehub.circuit";
  j["version"] = kCircuitFormatVersion;
  j["kind"] = std::string(to_string(params.kind));
  j["layers"] = params.layers.size();
  j["sites"] = params.sites();
  j["params"] = params.flatten();
  return j.dump(2) + "\n";
}

CircuitParams circuit_params_from_json(std::string_view text) {
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (!j.is_object()) throw DomainError("checkpoint is not a JSON object");
    if (j.value("format", "") != "bosehub.circuit") throw DomainError("not a circuit checkpoint");
    if (j.value("version", 0) != kCircuitFormatVersion) {
      throw DomainError("unsupported circuit checkpoint version");
    }
    const auto kind = parse_circuit_kind(j.at("kind").get<std::string>());
    CircuitParams p = CircuitParams::zeros(kind, j.at("layers").get<std::size_t>(),
                                           j.at("sites").get<std::size_t>());
    p.assign(j.at("params").get<std::vector<double>>());
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("malformed circuit checkpoint: ") + e.what());
  }
}

}  // namespace bosehub
