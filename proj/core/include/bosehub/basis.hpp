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

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace bosehub {

/// Occupation-number state of N bosons on a ring of M sites.
///
/// Ordering is lexicographic on the occupation vector, so (0,1) < (1,0).
struct FockState {
  std::vector<int> occ;

  std::size_t sites() const noexcept { return occ.size(); }
  int bosons() const noexcept;

  /// Cyclic shift by `k` sites: result[i] = occ[(i + k) mod M].
  FockState shifted(std::size_t k) const;
  /// Site reversal: result[i] = occ[M - 1 - i].
  FockState reversed() const;

  /// "n0n1...n{M-1}" with one decimal digit per site when all n_i < 10,
  /// otherwise the occupations are separated by '.'.
  std::string label() const;
  static FockState parse(std::string_view label);

  friend auto operator<=>(const FockState&, const FockState&) = default;
  friend bool operator==(const FockState&, const FockState&) = default;
};

std::ostream& operator<<(std::ostream& os, const FockState& s);

struct FockStateHash {
  std::size_t operator()(const FockState& s) const noexcept;
};

/// Equivalence class of Fock states under a lattice symmetry group.
/// `representative` is the lexicographically smallest member and
/// `members` is sorted ascending.
struct SymmetryClass {
  FockState representative;
  std::vector<FockState> members;

  std::size_t multiplicity() const noexcept { return members.size(); }
};

enum class BasisKind { Full, TranslationReduced, FullyReduced };

std::string_view to_string(BasisKind kind);
BasisKind parse_basis_kind(std::string_view name);

struct BasisDescriptor {
  BasisKind kind = BasisKind::Full;
  std::size_t sites = 0;
  int bosons = 0;
  /// Sorted ascending by representative.
  std::vector<SymmetryClass> classes;

  std::size_t size() const noexcept { return classes.size(); }
  /// Total number of Fock states covered by all classes.
  std::size_t fock_dimension() const noexcept;
};

/// Binomial coefficient C(N + M - 1, N) computed without overflow for the
/// sizes used here.
std::size_t fock_dimension(std::size_t sites, int bosons);

/// All Fock states of `bosons` particles on `sites` sites, ascending.
/// Throws DomainError for sites == 0 with bosons > 0 or bosons < 0.
std::vector<FockState> enumerate_fock(std::size_t sites, int bosons);

/// Partition a complete basis into orbits of cyclic translation.
/// Throws PartitionError if `basis` is not a complete Fock basis.
std::vector<SymmetryClass> translation_orbits(const std::vector<FockState>& basis);

/// Merge translation orbits related by site reversal.
std::vector<SymmetryClass> parity_reduce(const std::vector<SymmetryClass>& orbits);

/// Mean-subtracted occupations occ_i - N/M.
std::vector<double> features(const FockState& state);
/// Raw occupations as reals, for the un-centred input variant.
std::vector<double> raw_features(const FockState& state);

BasisDescriptor make_basis(std::size_t sites, int bosons, BasisKind kind);

/// Checks that `classes` are pairwise disjoint and cover enumerate_fock(M, N)
/// exactly; throws PartitionError otherwise.
void validate_partition(const std::vector<SymmetryClass>& classes, std::size_t sites,
                        int bosons);

/// CSV: class_index,representative,multiplicity,kind
void write_basis_csv(std::ostream& os, const BasisDescriptor& basis);

}  // namespace bosehub
