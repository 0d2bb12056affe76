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

#include "bosehub/basis.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "bosehub/errors.hpp"
#include "oracles.hpp"

using namespace bosehub;

namespace {

FockState fs(std::vector<int> occ) { return FockState{std::move(occ)}; }

}  // namespace

TEST(EnumerateFock, SixSitesFiveBosonsHas252States) {
  const auto basis = enumerate_fock(6, 5);
  EXPECT_EQ(basis.size(), 252u);
  EXPECT_EQ(fock_dimension(6, 5), 252u);
  for (const auto& s : basis) EXPECT_EQ(s.bosons(), 5);
  EXPECT_TRUE(std::is_sorted(basis.begin(), basis.end()));
  EXPECT_EQ(std::adjacent_find(basis.begin(), basis.end()), basis.end());
}

TEST(EnumerateFock, SmallCases) {
  const auto two = enumerate_fock(2, 1);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0], fs({0, 1}));
  EXPECT_EQ(two[1], fs({1, 0}));
  EXPECT_EQ(enumerate_fock(3, 2).size(), 6u);
  EXPECT_EQ(enumerate_fock(4, 0).size(), 1u);
  EXPECT_EQ(enumerate_fock(1, 7).size(), 1u);
}

TEST(EnumerateFock, ZeroSitesWithBosonsIsDomainError) {
  EXPECT_THROW(enumerate_fock(0, 3), DomainError);
  EXPECT_THROW(enumerate_fock(3, -1), DomainError);
  EXPECT_EQ(enumerate_fock(0, 0).size(), 1u);
}

TEST(EnumerateFock, MatchesBruteForceFilter) {
  for (int m = 1; m <= 6; ++m) {
    for (int n = 0; n <= 5; ++n) {
      const auto ours = enumerate_fock(static_cast<std::size_t>(m), n);
      const auto ref = oracle::brute_force_fock(m, n);
      ASSERT_EQ(ours.size(), ref.size()) << "M=" << m << " N=" << n;
      for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_EQ(ours[i].occ, ref[i]);
    }
  }
}

TEST(TranslationOrbits, SixSitesFiveBosonsGives42Orbits) {
  const auto orbits = translation_orbits(enumerate_fock(6, 5));
  EXPECT_EQ(orbits.size(), 42u);
  // A state fixed by a nontrivial shift repeats with period d < 6, d | 6, so
  // N = (6/d) * (bosons per period); 5 is divisible by none of 2, 3, 6.
  for (const auto& c : orbits) EXPECT_EQ(c.multiplicity(), 6u);
}

TEST(TranslationOrbits, TwoSitesTwoBosons) {
  const auto orbits = translation_orbits(enumerate_fock(2, 2));
  ASSERT_EQ(orbits.size(), 2u);
  EXPECT_EQ(orbits[0].representative, fs({0, 2}));
  EXPECT_EQ(orbits[0].multiplicity(), 2u);
  EXPECT_EQ(orbits[1].representative, fs({1, 1}));
  EXPECT_EQ(orbits[1].multiplicity(), 1u);
}

TEST(TranslationOrbits, SingleSite) {
  const auto orbits = translation_orbits(enumerate_fock(1, 3));
  ASSERT_EQ(orbits.size(), 1u);
  EXPECT_EQ(orbits[0].multiplicity(), 1u);
}

TEST(TranslationOrbits, IncompleteBasisIsPartitionError) {
  auto basis = enumerate_fock(4, 2);
  basis.pop_back();
  EXPECT_THROW(translation_orbits(basis), PartitionError);
  auto dup = enumerate_fock(4, 2);
  dup.back() = dup.front();
  EXPECT_THROW(translation_orbits(dup), PartitionError);
  EXPECT_THROW(translation_orbits({}), PartitionError);
}

TEST(ParityReduce, SixSitesFiveBosonsGives26Classes) {
  const auto classes = parity_reduce(translation_orbits(enumerate_fock(6, 5)));
  EXPECT_EQ(classes.size(), 26u);
  std::size_t total = 0;
  for (const auto& c : classes) total += c.multiplicity();
  EXPECT_EQ(total, 252u);
}

TEST(ParityReduce, MirrorPairSharesAClass) {
  const auto classes = parity_reduce(translation_orbits(enumerate_fock(6, 5)));
  const auto a = FockState::parse("012011");
  const auto b = FockState::parse("110210");
  int hits = 0;
  for (const auto& c : classes) {
    const bool has_a = std::binary_search(c.members.begin(), c.members.end(), a);
    const bool has_b = std::binary_search(c.members.begin(), c.members.end(), b);
    EXPECT_EQ(has_a, has_b);
    hits += has_a;
  }
  EXPECT_EQ(hits, 1);
}

TEST(ParityReduce, SelfConjugateOrbitIsUnchanged) {
  // (0,1,1,1,1,1) reversed is a shift of itself.
  const auto orbits = translation_orbits(enumerate_fock(6, 5));
  const auto classes = parity_reduce(orbits);
  const auto rep = FockState::parse("011111");
  const auto find = [&](const std::vector<SymmetryClass>& cs) {
    return *std::find_if(cs.begin(), cs.end(),
                         [&](const SymmetryClass& c) { return c.representative == rep; });
  };
  EXPECT_EQ(find(orbits).members, find(classes).members);
  EXPECT_EQ(find(classes).multiplicity(), 6u);
}

TEST(Features, MeanSubtracted) {
  const auto f = features(fs({1, 1, 1, 1, 1, 0}));
  for (int i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(f[i], 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(f[5], -5.0 / 6.0);
  const auto g = features(fs({5, 0, 0, 0, 0, 0}));
  EXPECT_DOUBLE_EQ(g[0], 25.0 / 6.0);
  for (int i = 1; i < 6; ++i) EXPECT_DOUBLE_EQ(g[i], -5.0 / 6.0);
}

TEST(Features, SumToZeroOnEveryState) {
  for (const auto& s : enumerate_fock(6, 5)) {
    const auto f = features(s);
    EXPECT_NEAR(std::accumulate(f.begin(), f.end(), 0.0), 0.0, 1e-12);
  }
}

// Partition, orbit closure and count identities over a grid of (M, N),
// compared with a canonical-form brute-force class counter.
TEST(BasisProperties, PartitionClosureAndCounts) {
  for (std::size_t m = 1; m <= 8; ++m) {
    for (int n = 0; n <= 6; ++n) {
      if (fock_dimension(m, n) > 2000) continue;
      const auto full = enumerate_fock(m, n);
      for (auto kind : {BasisKind::TranslationReduced, BasisKind::FullyReduced}) {
        const auto basis = make_basis(m, n, kind);
        const bool parity = kind == BasisKind::FullyReduced;
        EXPECT_EQ(basis.size(),
                  oracle::brute_force_class_count(static_cast<int>(m), n, parity))
            << "M=" << m << " N=" << n;
        EXPECT_NO_THROW(validate_partition(basis.classes, m, n));
        EXPECT_EQ(basis.fock_dimension(), full.size());

        std::unordered_map<FockState, std::size_t, FockStateHash> owner;
        for (std::size_t c = 0; c < basis.size(); ++c) {
          const auto& cls = basis.classes[c];
          EXPECT_EQ(cls.representative, cls.members.front());
          // Orbit sizes divide the group order: M, or 2M with reversal.
          EXPECT_EQ((parity ? 2 * m : m) % cls.multiplicity(), 0u);
          for (const auto& s : cls.members) owner[s] = c;
        }
        for (const auto& [s, c] : owner) {
          EXPECT_EQ(owner.at(s.shifted(1)), c);
          if (parity) EXPECT_EQ(owner.at(s.reversed()), c);
        }
        for (std::size_t c = 1; c < basis.size(); ++c)
          EXPECT_LT(basis.classes[c - 1].representative, basis.classes[c].representative);
      }
    }
  }
}

TEST(BasisProperties, Deterministic) {
  const auto a = make_basis(6, 5, BasisKind::FullyReduced);
  const auto b = make_basis(6, 5, BasisKind::FullyReduced);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.classes[i].representative, b.classes[i].representative);
    EXPECT_EQ(a.classes[i].members, b.classes[i].members);
  }
}

TEST(ValidatePartition, RejectsOverlapAndGaps) {
  auto basis = make_basis(4, 2, BasisKind::TranslationReduced);
  auto overlap = basis.classes;
  overlap[1].members.push_back(overlap[0].members.front());
  EXPECT_THROW(validate_partition(overlap, 4, 2), PartitionError);
  auto gap = basis.classes;
  gap.pop_back();
  EXPECT_THROW(validate_partition(gap, 4, 2), PartitionError);
}

TEST(FockLabel, RoundTripsAndWidensForLargeOccupations) {
  EXPECT_EQ(FockState::parse("012011"), fs({0, 1, 2, 0, 1, 1}));
  EXPECT_EQ(fs({0, 1, 2}).label(), "012");
  EXPECT_EQ(fs({12, 0}).label(), "12.0");
  EXPECT_EQ(FockState::parse("12.0"), fs({12, 0}));
  EXPECT_THROW(FockState::parse("0x1"), DomainError);
}

TEST(BasisCsv, HeaderAndRows) {
  std::ostringstream os;
  write_basis_csv(os, make_basis(6, 5, BasisKind::FullyReduced));
  const std::string text = os.str();
  EXPECT_EQ(text.rfind("class_index,representative,multiplicity,kind\n", 0), 0u);
  EXPECT_NE(text.find("\n0,000005,6,reduced\n"), std::string::npos);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 27);
}
