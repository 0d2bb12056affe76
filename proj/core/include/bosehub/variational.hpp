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

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bosehub/basis.hpp"
#include "bosehub/circuit.hpp"
#include "bosehub/hamiltonian.hpp"
#include "bosehub/linalg.hpp"
#include "bosehub/neural.hpp"

namespace bosehub {

/// One feature vector per basis class, in class order.
using FeatureTable = std::vector<std::vector<double>>;

/// Features of each class representative; `centred` selects occ - N/M over
/// the raw occupations.
FeatureTable feature_table(const BasisDescriptor& basis, bool centred = true);

enum class AnsatzKind { Mlp, CircuitCompressed, CircuitQuat };

std::string_view to_string(AnsatzKind kind);
AnsatzKind parse_ansatz_kind(std::string_view name);  // "nn", "compressed", "quat"

/// Maps basis-class features to wave-function coefficients and pulls energy
/// gradients back onto its parameters.
class Ansatz {
 public:
  virtual ~Ansatz() = default;

  virtual AnsatzKind kind() const = 0;
  virtual bool complex_mode() const = 0;
  virtual std::size_t num_params() const = 0;
  virtual std::vector<double> parameters() const = 0;
  virtual void set_parameters(std::span<const double> flat) = 0;

  virtual cplx coefficient(std::span<const double> features) const = 0;
  /// Sum over classes of Re(conj(g_C) * d c_C / d theta).
  virtual std::vector<double> pullback(const FeatureTable& features,
                                       std::span<const cplx> g) const = 0;

  /// Versioned JSON checkpoint; read back with ansatz_from_json.
  virtual std::string to_json() const = 0;
  virtual std::unique_ptr<Ansatz> clone() const = 0;

  CVector coefficients(const FeatureTable& features) const;
};

class MlpAnsatz final : public Ansatz {
 public:
  explicit MlpAnsatz(MlpParams params);

  AnsatzKind kind() const override { return AnsatzKind::Mlp; }
  bool complex_mode() const override { return params_.outputs() == 2; }
  std::size_t num_params() const override { return params_.num_params(); }
  std::vector<double> parameters() const override { return params_.flatten(); }
  void set_parameters(std::span<const double> flat) override { params_.assign(flat); }
  cplx coefficient(std::span<const double> features) const override;
  std::vector<double> pullback(const FeatureTable& features,
                               std::span<const cplx> g) const override;
  std::string to_json() const override;
  std::unique_ptr<Ansatz> clone() const override { return std::make_unique<MlpAnsatz>(*this); }

  const MlpParams& params() const noexcept { return params_; }

 private:
  MlpParams params_;
};

class CircuitAnsatz final : public Ansatz {
 public:
  CircuitAnsatz(CircuitParams params, bool complex_mode, Readout readout = Readout::Probability);

  AnsatzKind kind() const override;
  bool complex_mode() const override { return complex_; }
  std::size_t num_params() const override { return params_.num_params(); }
  std::vector<double> parameters() const override { return params_.flatten(); }
  void set_parameters(std::span<const double> flat) override { params_.assign(flat); }
  cplx coefficient(std::span<const double> features) const override;
  std::vector<double> pullback(const FeatureTable& features,
                               std::span<const cplx> g) const override;
  std::string to_json() const override;
  std::unique_ptr<Ansatz> clone() const override { return std::make_unique<CircuitAnsatz>(*this); }

  const CircuitParams& params() const noexcept { return params_; }
  Readout readout() const noexcept { return readout_; }

 private:
  CircuitParams params_;
  bool complex_;
  Readout readout_;
};

struct AnsatzSpec {
  AnsatzKind kind = AnsatzKind::Mlp;
  std::size_t sites = 6;
  std::size_t layers = 6;                       // circuits
  std::vector<std::size_t> hidden = {64, 32};   // network
  bool complex_mode = false;
  Readout readout = Readout::Probability;
  /// Circuit parameters start uniform in [-circuit_init_scale, +circuit_init_scale].
  double circuit_init_scale = 0.1;
};

std::unique_ptr<Ansatz> make_ansatz(const AnsatzSpec& spec, std::uint64_t seed);
std::unique_ptr<Ansatz> ansatz_from_json(std::string_view text);

/// (c^dagger H c) / (c^dagger c). Throws DomainError for a zero vector and
/// DimensionError for a size mismatch.
double rayleigh_energy(std::span<const cplx> coeffs, const HamiltonianMatrix& h);

struct EnergyGradient {
  double energy = 0.0;
  /// dE/dRe(c) + i dE/dIm(c) = 2 (Hc - E c) / (c^dagger c).
  CVector g;
};

EnergyGradient rayleigh_gradient(std::span<const cplx> coeffs, const HamiltonianMatrix& h);

struct TrainConfig {
  int steps = 1500;
  double learning_rate = 0.02;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 1234;
  /// Best-of-R independent initializations (seeds seed, seed+1, ...).
  int restarts = 1;
  bool centred_features = true;

  void validate() const;
};

/// Adam with bias correction, in place on a flat parameter vector.
class Adam {
 public:
  Adam(std::size_t n, const TrainConfig& cfg);
  void step(std::span<double> params, std::span<const double> grad);
  int iterations() const noexcept { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::vector<double> m_, v_;
  int t_ = 0;
};

struct TrainResult {
  std::vector<double> params;
  /// Energy before each update, one entry per step.
  std::vector<double> trace;
  /// Energy at the returned parameters.
  double final_energy = 0.0;
  double exact_energy = 0.0;
  std::uint64_t seed = 0;
};

/// Full-basis Adam minimization of the Rayleigh energy. The ansatz is left at
/// the final parameters. Throws DivergenceError on a non-finite energy and
/// Error if an energy ever falls below the exact ground energy - 1e-9.
TrainResult train(Ansatz& ansatz, const HamiltonianMatrix& h, const TrainConfig& cfg,
                  std::optional<double> exact_energy = std::nullopt);

using AnsatzFactory = std::function<std::unique_ptr<Ansatz>(std::uint64_t seed)>;

struct RestartResult {
  TrainResult best;
  std::unique_ptr<Ansatz> ansatz;  // at best.params
  std::vector<double> finals;      // final energy of every restart
};

/// cfg.restarts independent runs; keeps the lowest final energy. Runs are
/// spread over `threads` workers; the result does not depend on `threads`.
RestartResult train_best_of(const AnsatzFactory& factory, const HamiltonianMatrix& h,
                            const TrainConfig& cfg, unsigned threads = 1);

struct LayerStudyRow {
  std::size_t layers = 0;
  double energy = 0.0;
  double exact = 0.0;
};

std::vector<LayerStudyRow> layer_study(AnsatzKind kind, std::span<const std::size_t> layer_counts,
                                       const HamiltonianMatrix& h, const TrainConfig& cfg,
                                       unsigned threads = 1);

/// CSV: step,energy,loss with loss = exact - energy.
void write_trace_csv(std::ostream& os, const TrainResult& result);

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace bosehub
