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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "bosehub/errors.hpp"
#include "bosehub/variational.hpp"

using namespace bosehub;

namespace {

HamiltonianMatrix reduced_h(double u) {
  ModelParams p;
  p.U = u;
  return build_reduced(p, make_basis(6, 5, BasisKind::FullyReduced));
}

// Ground-state-like weights in [0, 1] without training: normalized so the
// largest amplitude maps to 0.9.
std::vector<double> ideal_weights(const HamiltonianMatrix& h) {
  const auto gs = ground_state(h);
  double top = 0.0;
  for (const auto& a : gs.amplitudes) top = std::max(top, a.real());
  std::vector<double> w;
  for (const auto& a : gs.amplitudes) w.push_back(0.9 * a.real() / top);
  return w;
}

}  // namespace

TEST(Confusion, SymmetricTenPercentInverse) {
  const auto p = ConfusionMatrix::from_flip_rates(0.1, 0.1);
  const auto inv = invert(p);
  EXPECT_NEAR(inv(0, 0), 0.9 / 0.8, 1e-15);
  EXPECT_NEAR(inv(0, 1), -0.1 / 0.8, 1e-15);
  EXPECT_NEAR(inv(1, 0), -0.1 / 0.8, 1e-15);
  EXPECT_NEAR(inv(1, 1), 0.9 / 0.8, 1e-15);
  EXPECT_NEAR(inv.figure_of_merit, 1.125, 1e-15);
}

TEST(Confusion, InverseTimesMatrixIsIdentityAndFomAtLeastOne) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 0.3);
  for (int i = 0; i < 1000; ++i) {
    const auto p = ConfusionMatrix::from_flip_rates(u(rng), u(rng));
    const auto inv = invert(p);
    const double m[4] = {p.p00, p.p01, p.p10, p.p11};
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        const double v = inv(r, 0) * m[c] + inv(r, 1) * m[2 + c];
        EXPECT_NEAR(v, r == c ? 1.0 : 0.0, 1e-12);
      }
    EXPECT_GE(inv.figure_of_merit, 1.0);
    // Closed form s / (2 (s - 1)), s = p00 + p11.
    const double s = p.p00 + p.p11;
    EXPECT_NEAR(inv.figure_of_merit, s / (2.0 * (s - 1.0)), 1e-12);
  }
}

TEST(Confusion, FomIncreasesWithFlipRate) {
  double last = invert(ConfusionMatrix::identity()).figure_of_merit;
  EXPECT_DOUBLE_EQ(last, 1.0);
  for (double f = 0.01; f < 0.45; f += 0.01) {
    const double fom = invert(ConfusionMatrix::from_flip_rates(f, f)).figure_of_merit;
    EXPECT_GT(fom, last);
    last = fom;
  }
}

TEST(Confusion, RejectsInvalidMatrices) {
  EXPECT_THROW(ConfusionMatrix::from_flip_rates(0.5, 0.5), DomainError);
  EXPECT_THROW(ConfusionMatrix::from_flip_rates(-0.1, 0.0), DomainError);
  ConfusionMatrix bad{0.9, 0.1, 0.2, 0.9};
  EXPECT_FALSE(bad.valid());
  EXPECT_THROW(invert(bad), DomainError);
}

TEST(Calibrate, NoiselessIsExactIdentity) {
  const auto d = SimulatedDevice::noiseless(3);
  const auto c = calibrate(d, 2, 1000, 1);
  EXPECT_EQ(c.p00, 1.0);
  EXPECT_EQ(c.p11, 1.0);
  EXPECT_EQ(c.p01, 0.0);
  EXPECT_EQ(c.p10, 0.0);
}

TEST(Calibrate, WithinThreeSigmaAtTwentyThousandShots) {
  SimulatedDevice d;
  d.qubits.assign(1, ConfusionMatrix::from_flip_rates(0.1, 0.1));
  int inside = 0;
  constexpr int kTrials = 200;
  for (int s = 0; s < kTrials; ++s) {
    const auto c = calibrate(d, 0, 20000, s);
    const bool ok = std::abs(c.p01 - 0.1) <= 0.01 && std::abs(c.p10 - 0.1) <= 0.01;
    inside += ok;
    EXPECT_NEAR(c.p00 + c.p10, 1.0, 1e-15);
  }
  // 0.01 is ~4.7 sigma of a 20000-shot binomial at p = 0.1.
  EXPECT_EQ(inside, kTrials);
}

TEST(Correct, Examples) {
  const auto id = invert(ConfusionMatrix::identity());
  const auto r = correct(ShotResult{1000, 300, 700}, id);
  EXPECT_DOUBLE_EQ(r.p0, 0.3);
  EXPECT_DOUBLE_EQ(r.p1, 0.7);
  EXPECT_FALSE(r.clamped);

  const auto p = ConfusionMatrix::from_flip_rates(0.03, 0.07);
  const auto inv = invert(p);
  for (double q0 : {0.0, 0.2, 0.5, 0.93, 1.0}) {
    const auto rec = p.apply(q0, 1.0 - q0);
    const auto c = correct(rec[0], inv);
    EXPECT_NEAR(c.p0, q0, 1e-12);
    EXPECT_NEAR(c.p1, 1.0 - q0, 1e-12);
  }
  // Outside the image of P: clamped and renormalized.
  const auto c = correct(0.99, inv);
  EXPECT_TRUE(c.clamped);
  EXPECT_GT(c.raw0, 1.0);
  EXPECT_DOUBLE_EQ(c.p0, 1.0);
  EXPECT_DOUBLE_EQ(c.p1, 0.0);
  EXPECT_THROW(correct(ShotResult{}, inv), DomainError);
}

TEST(Postselect, MinimumFigureOfMeritAndTies) {
  auto with_fom = [](double f) {
    InverseConfusion i;
    i.figure_of_merit = f;
    return i;
  };
  std::vector<std::pair<std::size_t, InverseConfusion>> g{
      {7, with_fom(1.2)}, {3, with_fom(1.05)}, {9, with_fom(1.3)}};
  EXPECT_EQ(postselect(g), 3u);
  std::vector<std::pair<std::size_t, InverseConfusion>> tie{
      {8, with_fom(1.1)}, {2, with_fom(1.1)}, {5, with_fom(1.1)}};
  EXPECT_EQ(postselect(tie), 2u);
  EXPECT_THROW(postselect({}), DomainError);
}

TEST(Layout, IndexingAndValidation) {
  QubitLayout l;
  EXPECT_EQ(l.qubits(), 125u);
  EXPECT_EQ(l.qubit(0, 0), 0u);
  EXPECT_EQ(l.qubit(4, 24), 124u);
  EXPECT_EQ(l.class_of(24), 24u);
  l.anchor = 0;
  EXPECT_EQ(l.class_of(0), 1u);
  EXPECT_NO_THROW(l.validate(26, 125));
  EXPECT_THROW(l.validate(26, 124), DimensionError);
  EXPECT_THROW(l.validate(42, 200), DimensionError);
}

TEST(Device, SyntheticRatesInRangeAndDeterministic) {
  const auto d = SimulatedDevice::synthetic(125, 0.01, 0.05, 42);
  ASSERT_EQ(d.size(), 125u);
  for (const auto& q : d.qubits) {
    EXPECT_GE(q.p10, 0.01);
    EXPECT_LE(q.p10, 0.05);
    EXPECT_GE(q.p01, 0.01);
    EXPECT_LE(q.p01, 0.05);
  }
  const auto e = SimulatedDevice::synthetic(125, 0.01, 0.05, 42);
  EXPECT_EQ(d.qubits[77].p01, e.qubits[77].p01);
  EXPECT_THROW(SimulatedDevice::synthetic(3, 0.1, 0.6, 1), DomainError);
  const auto a = d.measure(5, 0.4, 5000, 9);
  const auto b = d.measure(5, 0.4, 5000, 9);
  EXPECT_EQ(a.count0, b.count0);
}

TEST(Device, RecordedFrequencyFollowsConfusion) {
  SimulatedDevice d;
  d.qubits.assign(1, ConfusionMatrix::from_flip_rates(0.04, 0.02));
  const double expect = d.qubits[0].apply(0.3, 0.7)[0];
  double mean = 0.0;
  constexpr int kSeeds = 300;
  for (int s = 0; s < kSeeds; ++s) mean += d.measure(0, 0.3, 2000, s).freq0();
  mean /= kSeeds;
  EXPECT_NEAR(mean, expect, 5 * std::sqrt(expect * (1 - expect) / (2000.0 * kSeeds)));
}

TEST(NoisyRun, NoiselessManyShotsRecoversIdealEnergy) {
  const auto h = reduced_h(5.0);
  const auto w = ideal_weights(h);
  const QubitLayout layout;
  NoisyRunConfig cfg;
  cfg.shots = 1'000'000;
  cfg.seed = 3;
  const auto run = noisy_run(w, h, SimulatedDevice::noiseless(125), layout, cfg);
  const double ideal = rayleigh_energy(CVector(w.begin(), w.end()), h);
  EXPECT_DOUBLE_EQ(run.ideal_energy, ideal);
  for (auto mode : {NoiseMode::Uncorrected, NoiseMode::Corrected, NoiseMode::Postselected}) {
    for (double e : noisy_energies(run, h, layout, mode))
      EXPECT_LE(std::abs(e - ideal) / std::abs(ideal), 1e-3) << to_string(mode);
  }
  EXPECT_EQ(noisy_energies(run, h, layout, NoiseMode::Corrected).size(), 5u);
  EXPECT_EQ(noisy_energies(run, h, layout, NoiseMode::Postselected).size(), 1u);
}

TEST(NoisyRun, CorrectionHelpsStatistically) {
  const auto h = reduced_h(5.0);
  const auto w = ideal_weights(h);
  const QubitLayout layout;
  int better = 0;
  constexpr int kTrials = 40;
  for (int t = 0; t < kTrials; ++t) {
    const auto device = SimulatedDevice::synthetic(125, 0.01, 0.05, 1000 + t);
    NoisyRunConfig cfg;
    cfg.seed = t;
    const auto run = noisy_run(w, h, device, layout, cfg);
    auto mean = [&](NoiseMode m) {
      const auto e = noisy_energies(run, h, layout, m);
      return std::accumulate(e.begin(), e.end(), 0.0) / e.size();
    };
    better += std::abs(mean(NoiseMode::Corrected) - run.ideal_energy) <
              std::abs(mean(NoiseMode::Uncorrected) - run.ideal_energy);
  }
  EXPECT_GE(better, kTrials * 9 / 10);
}

TEST(NoisyRun, SelectedQubitsHaveGroupMinimumFom) {
  const auto h = reduced_h(2.0);
  const QubitLayout layout;
  const auto run = noisy_run(ideal_weights(h), h, SimulatedDevice::synthetic(125, 0.005, 0.05, 8),
                             layout, NoisyRunConfig{});
  for (std::size_t k = 0; k < layout.coefficients(); ++k) {
    const std::size_t sel = run.selected[k];
    for (std::size_t r = 0; r < layout.replicas; ++r)
      EXPECT_LE(run.inverses[sel].figure_of_merit,
                run.inverses[layout.qubit(r, k)].figure_of_merit);
  }
  std::ostringstream os;
  write_calibration_csv(os, run);
  EXPECT_EQ(os.str().rfind("qubit,p00,p01,p10,p11,fom,selected\n", 0), 0u);
  const std::string text = os.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 126);
}

TEST(NoisyRun, ErrorsOnLayoutMismatch) {
  const auto h = reduced_h(2.0);
  const auto w = ideal_weights(h);
  EXPECT_THROW(noisy_run(w, h, SimulatedDevice::noiseless(100), QubitLayout{}, NoisyRunConfig{}),
               DimensionError);
  EXPECT_THROW(noisy_run(std::vector<double>(3, 0.5), h, SimulatedDevice::noiseless(125),
                         QubitLayout{}, NoisyRunConfig{}),
               DimensionError);
}

TEST(NoiseModeNames, RoundTrip) {
  for (auto m : {NoiseMode::Uncorrected, NoiseMode::Corrected, NoiseMode::Postselected,
                 NoiseMode::PostselectedCorrected})
    EXPECT_EQ(parse_noise_mode(to_string(m)), m);
  EXPECT_THROW(parse_noise_mode("raw"), DomainError);
}

TEST(ShotStudy, ShrinksWithShotsAndIsDeterministic) {
  const auto h = reduced_h(5.0);
  const auto w = ideal_weights(h);
  const std::vector<std::int64_t> grid{1, 100, 10000, 1000000};
  const auto rows = shot_study(w, h, grid, 60, 11, 2);
  ASSERT_EQ(rows.size(), grid.size());
  for (std::size_t i = 1; i < rows.size(); ++i)
    EXPECT_LT(rows[i].median_frac_dev, rows[i - 1].median_frac_dev);
  EXPECT_GT(rows[0].median_frac_dev, 0.05);
  // At an eigenvector the energy is stationary and the deviation falls as
  // 1/shots; away from it the linear term gives 1/sqrt(shots).
  const double stationary = rows[2].median_frac_dev / rows[3].median_frac_dev;
  EXPECT_GT(stationary, 30.0);
  auto off = w;
  for (std::size_t k = 0; k < off.size(); ++k) off[k] *= 1.0 + 0.1 * std::sin(static_cast<double>(k));
  const auto linear = shot_study(off, h, grid, 60, 11, 2);
  const double ratio = linear[2].median_frac_dev / linear[3].median_frac_dev;
  EXPECT_GT(ratio, 3.0);
  EXPECT_LT(ratio, 30.0);
  const auto again = shot_study(w, h, grid, 60, 11, 1);
  for (std::size_t i = 0; i < rows.size(); ++i)
    EXPECT_EQ(rows[i].median_frac_dev, again[i].median_frac_dev);
  EXPECT_THROW(shot_study(w, h, grid, 0, 1), DomainError);
}

TEST(DeriveSeed, DistinctKeys) {
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 3, 2));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(5, 6, 7), derive_seed(5, 6, 7));
}
