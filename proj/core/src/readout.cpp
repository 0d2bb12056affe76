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

#include "bosehub/readout.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <random>

#include "bosehub/errors.hpp"
#include "bosehub/variational.hpp"

namespace bosehub {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  // splitmix64 over the combined key
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (a + 1) + 0xbf58476d1ce4e5b9ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

ConfusionMatrix ConfusionMatrix::from_flip_rates(double flip0, double flip1) {
  ConfusionMatrix p{1.0 - flip0, flip1, flip0, 1.0 - flip1};
  p.validate();
  return p;
}

bool ConfusionMatrix::valid() const noexcept {
  const auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  return in_unit(p00) && in_unit(p01) && in_unit(p10) && in_unit(p11) &&
         std::abs(p00 + p10 - 1.0) <= 1e-12 && std::abs(p01 + p11 - 1.0) <= 1e-12 &&
         p00 + p11 > 1.0;
}

void ConfusionMatrix::validate() const {
  if (!valid()) {
    throw DomainError("invalid confusion matrix [[" + std::to_string(p00) + ", " +
                      std::to_string(p01) + "], [" + std::to_string(p10) + ", " +
                      std::to_string(p11) + "]]");
  }
}

std::array<double, 2> ConfusionMatrix::apply(double q0, double q1) const noexcept {
  return {p00 * q0 + p01 * q1, p10 * q0 + p11 * q1};
}

InverseConfusion invert(const ConfusionMatrix& p) {
  p.validate();
  const double det = p.p00 * p.p11 - p.p01 * p.p10;
  InverseConfusion inv;
  inv.m = {p.p11 / det, -p.p01 / det, -p.p10 / det, p.p00 / det};
  inv.figure_of_merit = 0.5 * (inv.m[0] + inv.m[3]);
  return inv;
}

SimulatedDevice SimulatedDevice::synthetic(std::size_t qubits, double min_rate, double max_rate,
                                           std::uint64_t seed) {
  if (!(min_rate >= 0.0 && max_rate >= min_rate && max_rate < 0.5)) {
    throw DomainError("flip rates must satisfy 0 <= min <= max < 0.5");
  }
  SimulatedDevice d;
  d.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(min_rate, max_rate);
  d.qubits.reserve(qubits);
  for (std::size_t q = 0; q < qubits; ++q) {
    const double f0 = dist(rng);
    const double f1 = dist(rng);
    d.qubits.push_back(ConfusionMatrix::from_flip_rates(f0, f1));
  }
  return d;
}

SimulatedDevice SimulatedDevice::noiseless(std::size_t qubits) {
  SimulatedDevice d;
  d.qubits.assign(qubits, ConfusionMatrix::identity());
  return d;
}

ShotResult SimulatedDevice::measure(std::size_t qubit, double p0, std::int64_t shots,
                                    std::uint64_t seed) const {
  const ConfusionMatrix& p = qubits.at(qubit);
  const ShotResult truth = sample_probability(p0, shots, seed);
  std::mt19937_64 rng(derive_seed(seed, 0x7265636f7264ull));
  std::binomial_distribution<std::int64_t> keep0(truth.count0, p.p00);
  std::binomial_distribution<std::int64_t> flip1(truth.count1, p.p01);
  ShotResult recorded;
  recorded.shots = shots;
  recorded.count0 = keep0(rng) + flip1(rng);
  recorded.count1 = shots - recorded.count0;
  return recorded;
}

ConfusionMatrix calibrate(const SimulatedDevice& device, std::size_t qubit, std::int64_t shots,
                          std::uint64_t seed) {
  if (shots < 1) throw DomainError("calibration needs at least one shot");
  const ShotResult prep0 = device.measure(qubit, 1.0, shots, derive_seed(seed, qubit, 0));
  const ShotResult prep1 = device.measure(qubit, 0.0, shots, derive_seed(seed, qubit, 1));
  ConfusionMatrix est;
  est.p00 = prep0.freq0();
  est.p10 = 1.0 - est.p00;
  est.p01 = prep1.freq0();
  est.p11 = 1.0 - est.p01;
  return est;
}

CorrectedProbabilities correct(double observed0, const InverseConfusion& inv) {
  const double o1 = 1.0 - observed0;
  CorrectedProbabilities out;
  out.raw0 = inv(0, 0) * observed0 + inv(0, 1) * o1;
  out.raw1 = inv(1, 0) * observed0 + inv(1, 1) * o1;
  const double c0 = std::clamp(out.raw0, 0.0, 1.0);
  const double c1 = std::clamp(out.raw1, 0.0, 1.0);
  out.clamped = c0 != out.raw0 || c1 != out.raw1;
  out.p0 = c0 / (c0 + c1);
  out.p1 = c1 / (c0 + c1);
  return out;
}

CorrectedProbabilities correct(const ShotResult& observed, const InverseConfusion& inv) {
  if (observed.shots < 1) throw DomainError("observation has no shots");
  return correct(observed.freq0(), inv);
}

std::size_t postselect(std::span<const std::pair<std::size_t, InverseConfusion>> group) {
  if (group.empty()) throw DomainError("cannot postselect from an empty group");
  const auto* best = &group.front();
  for (const auto& entry : group) {
    const double f = entry.second.figure_of_merit;
    if (f < best->second.figure_of_merit ||
        (f == best->second.figure_of_merit && entry.first < best->first)) {
      best = &entry;
    }
  }
  return best->first;
}

void QubitLayout::validate(std::size_t basis_size, std::size_t device_qubits) const {
  if (classes != basis_size) {
    throw DimensionError("layout covers " + std::to_string(classes) + " classes, basis has " +
                         std::to_string(basis_size));
  }
  if (classes < 2 || anchor >= classes) throw DimensionError("layout anchor outside the basis");
  if (replicas < 1) throw DimensionError("layout needs at least one replica");
  if (qubits() > device_qubits) {
    throw DimensionError("layout needs " + std::to_string(qubits()) + " qubits, device has " +
                         std::to_string(device_qubits));
  }
}

std::string_view to_string(NoiseMode mode) {
  switch (mode) {
    case NoiseMode::Uncorrected:
      return "uncorrected";
    case NoiseMode::Corrected:
      return "corrected";
    case NoiseMode::Postselected:
      return "postselected";
    case NoiseMode::PostselectedCorrected:
      return "postselected_corrected";
  }
  return "unknown";
}

NoiseMode parse_noise_mode(std::string_view name) {
  if (name == "uncorrected") return NoiseMode::Uncorrected;
  if (name == "corrected") return NoiseMode::Corrected;
  if (name == "postselected") return NoiseMode::Postselected;
  if (name == "postselected_corrected") return NoiseMode::PostselectedCorrected;
  throw DomainError("unknown noise mode: " + std::string(name));
}

namespace {

CVector weights_to_coeffs(std::span<const double> w) { return CVector(w.begin(), w.end()); }

}  // namespace

NoisyRun noisy_run(std::span<const double> ideal_weights, const HamiltonianMatrix& h,
                   const SimulatedDevice& device, const QubitLayout& layout,
                   const NoisyRunConfig& cfg) {
  layout.validate(h.dim(), device.size());
  if (ideal_weights.size() != h.dim()) throw DimensionError("one weight per basis class expected");
  NoisyRun run;
  run.ideal_weights.assign(ideal_weights.begin(), ideal_weights.end());
  run.ideal_energy = rayleigh_energy(weights_to_coeffs(ideal_weights), h);

  const std::size_t nq = layout.qubits();
  run.calibration.resize(nq);
  run.inverses.resize(nq);
  run.observed.resize(nq);
  for (std::size_t q = 0; q < nq; ++q) {
    run.calibration[q] = calibrate(device, q, cfg.calibration_shots, derive_seed(cfg.seed, 1));
    run.inverses[q] = invert(run.calibration[q]);
  }
  for (std::size_t r = 0; r < layout.replicas; ++r) {
    for (std::size_t k = 0; k < layout.coefficients(); ++k) {
      const std::size_t q = layout.qubit(r, k);
      const double p0 = ideal_weights[layout.class_of(k)];
      run.observed[q] = device.measure(q, p0, cfg.shots, derive_seed(cfg.seed, 2, q)).freq0();
    }
  }
  run.selected.resize(layout.coefficients());
  std::vector<std::pair<std::size_t, InverseConfusion>> group(layout.replicas);
  for (std::size_t k = 0; k < layout.coefficients(); ++k) {
    for (std::size_t r = 0; r < layout.replicas; ++r) {
      const std::size_t q = layout.qubit(r, k);
      group[r] = {q, run.inverses[q]};
    }
    run.selected[k] = postselect(group);
  }
  return run;
}

std::vector<double> noisy_energies(const NoisyRun& run, const HamiltonianMatrix& h,
                                   const QubitLayout& layout, NoiseMode mode) {
  const bool corrected = mode == NoiseMode::Corrected || mode == NoiseMode::PostselectedCorrected;
  auto value = [&](std::size_t q) {
    if (!corrected) return run.observed[q];
    const CorrectedProbabilities c = correct(run.observed[q], run.inverses[q]);
    return c.p0;
  };
  auto energy_from = [&](const std::function<std::size_t(std::size_t)>& qubit_for) {
    std::vector<double> w = run.ideal_weights;
    for (std::size_t k = 0; k < layout.coefficients(); ++k) w[layout.class_of(k)] = value(qubit_for(k));
    return rayleigh_energy(weights_to_coeffs(w), h);
  };

  std::vector<double> out;
  if (mode == NoiseMode::Postselected || mode == NoiseMode::PostselectedCorrected) {
    out.push_back(energy_from([&](std::size_t k) { return run.selected[k]; }));
  } else {
    for (std::size_t r = 0; r < layout.replicas; ++r)
      out.push_back(energy_from([&](std::size_t k) { return layout.qubit(r, k); }));
  }
  return out;
}

double noisy_energy_run(std::span<const double> ideal_weights, const HamiltonianMatrix& h,
                        const SimulatedDevice& device, const QubitLayout& layout,
                        const NoisyRunConfig& cfg, NoiseMode mode) {
  const NoisyRun run = noisy_run(ideal_weights, h, device, layout, cfg);
  const auto energies = noisy_energies(run, h, layout, mode);
  return std::accumulate(energies.begin(), energies.end(), 0.0) /
         static_cast<double>(energies.size());
}

std::vector<ShotStudyRow> shot_study(std::span<const double> ideal_weights,
                                     const HamiltonianMatrix& h,
                                     std::span<const std::int64_t> shot_grid, int trials,
                                     std::uint64_t seed, unsigned threads) {
  if (trials < 1) throw DomainError("shot study needs at least one trial");
  if (ideal_weights.size() != h.dim()) throw DimensionError("one weight per basis class expected");
  const double ideal = rayleigh_energy(weights_to_coeffs(ideal_weights), h);
  std::vector<ShotStudyRow> rows(shot_grid.size());
  parallel_for(shot_grid.size(), threads, [&](std::size_t g) {
    const std::int64_t shots = shot_grid[g];
    std::vector<double> signed_dev(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t) {
      CVector c(h.dim());
      for (std::size_t k = 0; k < h.dim(); ++k) {
        const auto trial_seed = derive_seed(seed, static_cast<std::uint64_t>(shots),
                                            static_cast<std::uint64_t>(t) * h.dim() + k);
        c[k] = sample_probability(ideal_weights[k], shots, trial_seed).freq0();
      }
      // All-zero samples have no energy; count them as total failure.
      const double e = norm2(c) > 0.0 ? rayleigh_energy(c, h) : 0.0;
      signed_dev[static_cast<std::size_t>(t)] = (e - ideal) / std::abs(ideal);
    }
    std::vector<double> abs_dev(signed_dev.size());
    std::transform(signed_dev.begin(), signed_dev.end(), abs_dev.begin(),
                   [](double v) { return std::abs(v); });
    std::sort(abs_dev.begin(), abs_dev.end());
    const std::size_t n = abs_dev.size();
    const double median =
        n % 2 == 1 ? abs_dev[n / 2] : 0.5 * (abs_dev[n / 2 - 1] + abs_dev[n / 2]);
    const double mean = std::accumulate(signed_dev.begin(), signed_dev.end(), 0.0) / n;
    double var = 0.0;
    for (double v : signed_dev) var += (v - mean) * (v - mean);
    rows[g] = ShotStudyRow{shots, median, n > 1 ? std::sqrt(var / (n - 1)) : 0.0};
  });
  return rows;
}

void write_calibration_csv(std::ostream& os, const NoisyRun& run) {
  const auto old = os.precision(10);
  os << "qubit,p00,p01,p10,p11,fom,selected\n";
  for (std::size_t q = 0; q < run.calibration.size(); ++q) {
    const auto& p = run.calibration[q];
    const bool selected = std::find(run.selected.begin(), run.selected.end(), q) != run.selected.end();
    os << q << ',' << p.p00 << ',' << p.p01 << ',' << p.p10 << ',' << p.p11 << ','
       << run.inverses[q].figure_of_merit << ',' << (selected ? 1 : 0) << '\n';
  }
  os.precision(old);
}

}  // namespace bosehub
