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
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "bosehub/circuit.hpp"
#include "bosehub/hamiltonian.hpp"

namespace bosehub {

/// Column-stochastic readout matrix; p(i, j) is the probability that a qubit
/// prepared in |j> is recorded as i.
struct ConfusionMatrix {
  double p00 = 1.0, p01 = 0.0;
  double p10 = 0.0, p11 = 1.0;

  static ConfusionMatrix identity() { return {}; }
  /// flip0 = P(record 1 | prepared 0), flip1 = P(record 0 | prepared 1).
  static ConfusionMatrix from_flip_rates(double flip0, double flip1);

  /// Throws DomainError unless columns sum to 1 (1e-12), entries lie in
  /// [0, 1] and p00 + p11 > 1.
  void validate() const;
  bool valid() const noexcept;

  /// Recorded (P(0), P(1)) for a true distribution (q0, q1).
  std::array<double, 2> apply(double q0, double q1) const noexcept;
};

struct InverseConfusion {
  std::array<double, 4> m{1.0, 0.0, 0.0, 1.0};  // row-major P^{-1}
  double figure_of_merit = 1.0;                 // tr(P^{-1}) / 2

  double operator()(int r, int c) const noexcept { return m[2 * r + c]; }
};

InverseConfusion invert(const ConfusionMatrix& p);

/// Readout-only noise model: qubits are prepared and rotated perfectly, the
/// measurement record passes through each qubit's confusion matrix.
struct SimulatedDevice {
  std::vector<ConfusionMatrix> qubits;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return qubits.size(); }

  /// Independent flip rates uniform in [min_rate, max_rate] per qubit and
  /// per prepared state.
  static SimulatedDevice synthetic(std::size_t qubits, double min_rate, double max_rate,
                                   std::uint64_t seed);
  static SimulatedDevice noiseless(std::size_t qubits);

  /// Shots recorded by `qubit` when the ideal outcome probability of 0 is p0.
  ShotResult measure(std::size_t qubit, double p0, std::int64_t shots, std::uint64_t seed) const;
};

/// Empirical confusion matrix from one |0> and one |1> calibration run of
/// `shots` each.
ConfusionMatrix calibrate(const SimulatedDevice& device, std::size_t qubit, std::int64_t shots,
                          std::uint64_t seed);

struct CorrectedProbabilities {
  double p0 = 0.0, p1 = 0.0;          // after clamping to [0, 1] and renormalizing
  double raw0 = 0.0, raw1 = 0.0;      // P^{-1} applied to the observed frequencies
  bool clamped = false;
};

CorrectedProbabilities correct(const ShotResult& observed, const InverseConfusion& inv);
CorrectedProbabilities correct(double observed0, const InverseConfusion& inv);

/// Qubit with the smallest figure of merit; ties go to the lowest index.
/// Throws DomainError on an empty group.
std::size_t postselect(std::span<const std::pair<std::size_t, InverseConfusion>> group);

/// Assignment of the non-anchor coefficients of a wave function to qubits:
/// replica r of coefficient k runs on qubit r * coefficients + k.
struct QubitLayout {
  std::size_t classes = 26;
  std::size_t anchor = 25;  // class whose coefficient is not measured
  std::size_t replicas = 5;

  std::size_t coefficients() const noexcept { return classes - 1; }
  std::size_t qubits() const noexcept { return coefficients() * replicas; }
  std::size_t qubit(std::size_t replica, std::size_t coefficient) const noexcept {
    return replica * coefficients() + coefficient;
  }
  /// Class index of the k-th measured coefficient.
  std::size_t class_of(std::size_t coefficient) const noexcept {
    return coefficient < anchor ? coefficient : coefficient + 1;
  }

  void validate(std::size_t basis_size, std::size_t device_qubits) const;
};

enum class NoiseMode { Uncorrected, Corrected, Postselected, PostselectedCorrected };

std::string_view to_string(NoiseMode mode);
NoiseMode parse_noise_mode(std::string_view name);

struct NoisyRunConfig {
  std::int64_t shots = 20000;
  std::int64_t calibration_shots = 20000;
  std::uint64_t seed = 0;
};

/// One data-taking run: every qubit is measured once, the layout's replicas
/// give `replicas` wave functions.
struct NoisyRun {
  std::vector<double> ideal_weights;           // per class
  std::vector<ConfusionMatrix> calibration;    // per qubit
  std::vector<InverseConfusion> inverses;      // per qubit
  std::vector<double> observed;                // recorded P(0) per qubit
  std::vector<std::size_t> selected;           // best qubit per coefficient
  double ideal_energy = 0.0;
};

/// Runs the circuit on every qubit of the device and calibrates it.
/// `ideal_weights` are the noiseless per-class circuit weights.
NoisyRun noisy_run(std::span<const double> ideal_weights, const HamiltonianMatrix& h,
                   const SimulatedDevice& device, const QubitLayout& layout,
                   const NoisyRunConfig& cfg);

/// Energies of a run under `mode`: one per replica for Uncorrected/Corrected,
/// a single value for the postselected modes.
std::vector<double> noisy_energies(const NoisyRun& run, const HamiltonianMatrix& h,
                                   const QubitLayout& layout, NoiseMode mode);

/// Mean of noisy_energies.
double noisy_energy_run(std::span<const double> ideal_weights, const HamiltonianMatrix& h,
                        const SimulatedDevice& device, const QubitLayout& layout,
                        const NoisyRunConfig& cfg, NoiseMode mode);

struct ShotStudyRow {
  std::int64_t shots = 0;
  double median_frac_dev = 0.0;  // median |E_shots - E_ideal| / |E_ideal|
  double std = 0.0;              // std of the signed (E_shots - E_ideal) / |E_ideal|
};

/// Noiseless finite-shot energies; every class weight is sampled per trial.
std::vector<ShotStudyRow> shot_study(std::span<const double> ideal_weights,
                                     const HamiltonianMatrix& h,
                                     std::span<const std::int64_t> shot_grid, int trials,
                                     std::uint64_t seed, unsigned threads = 1);

/// CSV: qubit,p00,p01,p10,p11,fom,selected
void write_calibration_csv(std::ostream& os, const NoisyRun& run);

/// Per-trial seed derivation shared by the studies.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

}  // namespace bosehub
