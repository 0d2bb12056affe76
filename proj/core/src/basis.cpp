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

#include <algorithm>
#include <numeric>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "bosehub/errors.hpp"

namespace bosehub {

int FockState::bosons() const noexcept {
  return std::accumulate(occ.begin(), occ.end(), 0);
}

FockState FockState::shifted(std::size_t k) const {
  const std::size_t m = occ.size();
  FockState out;
  out.occ.resize(m);
  for (std::size_t i = 0; i < m; ++i) out.occ[i] = occ[(i + k) % m];
  return out;
}

FockState FockState::reversed() const {
  return FockState{std::vector<int>(occ.rbegin(), occ.rend())};
}

std::string FockState::label() const {
  const bool compact =
      std::all_of(occ.begin(), occ.end(), [](int n) { return n >= 0 && n < 10; });
  std::string out;
  for (std::size_t i = 0; i < occ.size(); ++i) {
    if (!compact && i > 0) out.push_back('.');
    out += std::to_string(occ[i]);
  }
  return out;
}

FockState FockState::parse(std::string_view label) {
  FockState s;
  if (label.find('.') == std::string_view::npos) {
    for (char c : label) {
      if (c < '0' || c > '9') throw DomainError("invalid Fock label: " + std::string(label));
      s.occ.push_back(c - '0');
    }
    return s;
  }
  std::size_t start = 0;
  while (start <= label.size()) {
    const std::size_t dot = std::min(label.find('.', start), label.size());
    const auto field = label.substr(start, dot - start);
    if (field.empty()) throw DomainError("invalid Fock label: " + std::string(label));
    int n = 0;
    for (char c : field) {
      if (c < '0' || c > '9') throw DomainError("invalid Fock label: " + std::string(label));
      n = 10 * n + (c - '0');
    }
    s.occ.push_back(n);
    start = dot + 1;
  }
  return s;
}

std::ostream& operator<<(std::ostream& os, const FockState& s) {
  return os << '|' << s.label() << '>';
}

std::size_t FockStateHash::operator()(const FockState& s) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (int n : s.occ) {
    h ^= static_cast<std::size_t>(n) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

std::string_view to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::Full:
      return "full";
    case BasisKind::TranslationReduced:
      return "translation";
    case BasisKind::FullyReduced:
      return "reduced";
  }
  return "unknown";
}

BasisKind parse_basis_kind(std::string_view name) {
  if (name == "full") return BasisKind::Full;
  if (name == "translation") return BasisKind::TranslationReduced;
  if (name == "reduced") return BasisKind::FullyReduced;
  throw DomainError("unknown basis kind: " + std::string(name));
}

std::size_t BasisDescriptor::fock_dimension() const noexcept {
  std::size_t n = 0;
  for (const auto& c : classes) n += c.multiplicity();
  return n;
}

std::size_t fock_dimension(std::size_t sites, int bosons) {
  if (bosons < 0) throw DomainError("negative boson count");
  if (sites == 0) return bosons == 0 ? 1 : 0;
  // C(N + M - 1, N), multiplicative form keeps every partial product integral.
  std::size_t result = 1;
  for (int k = 1; k <= bosons; ++k) {
    result = result * (sites - 1 + static_cast<std::size_t>(k)) / static_cast<std::size_t>(k);
  }
  return result;
}

namespace {

void enumerate_into(std::vector<int>& prefix, std::size_t sites, int remaining,
                    std::vector<FockState>& out) {
  if (prefix.size() + 1 == sites) {
    prefix.push_back(remaining);
    out.push_back(FockState{prefix});
    prefix.pop_back();
    return;
  }
  for (int n = 0; n <= remaining; ++n) {
    prefix.push_back(n);
    enumerate_into(prefix, sites, remaining - n, out);
    prefix.pop_back();
  }
}

// Every state reachable from `seed` by the group generated by translations and,
// optionally, reversal.
std::vector<FockState> group_orbit(const FockState& seed, bool with_parity) {
  std::vector<FockState> orbit;
  const std::size_t m = seed.sites();
  for (std::size_t k = 0; k < std::max<std::size_t>(m, 1); ++k) {
    orbit.push_back(seed.shifted(k));
    if (with_parity) orbit.push_back(seed.reversed().shifted(k));
  }
  std::sort(orbit.begin(), orbit.end());
  orbit.erase(std::unique(orbit.begin(), orbit.end()), orbit.end());
  return orbit;
}

void check_complete(const std::vector<FockState>& basis) {
  if (basis.empty()) throw PartitionError("empty basis");
  const std::size_t m = basis.front().sites();
  const int n = basis.front().bosons();
  std::unordered_set<FockState, FockStateHash> seen;
  for (const auto& s : basis) {
    if (s.sites() != m || s.bosons() != n) {
      throw PartitionError("basis mixes site or boson counts at " + s.label());
    }
    if (!seen.insert(s).second) throw PartitionError("duplicate basis state " + s.label());
  }
  if (basis.size() != fock_dimension(m, n)) {
    throw PartitionError("incomplete basis: " + std::to_string(basis.size()) + " of " +
                         std::to_string(fock_dimension(m, n)) + " states");
  }
}

std::vector<SymmetryClass> classes_from(const std::vector<FockState>& basis, bool with_parity) {
  std::unordered_set<FockState, FockStateHash> assigned;
  std::vector<SymmetryClass> classes;
  for (const auto& s : basis) {
    if (assigned.count(s)) continue;
    SymmetryClass c;
    c.members = group_orbit(s, with_parity);
    c.representative = c.members.front();
    for (const auto& member : c.members) assigned.insert(member);
    classes.push_back(std::move(c));
  }
  std::sort(classes.begin(), classes.end(),
            [](const SymmetryClass& a, const SymmetryClass& b) {
              return a.representative < b.representative;
            });
  return classes;
}

}  // namespace

std::vector<FockState> enumerate_fock(std::size_t sites, int bosons) {
  if (bosons < 0) throw DomainError("negative boson count");
  if (sites == 0) {
    if (bosons > 0) throw DomainError("cannot place bosons on zero sites");
    return {FockState{}};
  }
  std::vector<FockState> out;
  out.reserve(fock_dimension(sites, bosons));
  std::vector<int> prefix;
  prefix.reserve(sites);
  enumerate_into(prefix, sites, bosons, out);
  return out;
}

std::vector<SymmetryClass> translation_orbits(const std::vector<FockState>& basis) {
  check_complete(basis);
  return classes_from(basis, false);
}

std::vector<SymmetryClass> parity_reduce(const std::vector<SymmetryClass>& orbits) {
  std::unordered_map<FockState, std::size_t, FockStateHash> owner;
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    for (const auto& s : orbits[i].members) owner.emplace(s, i);
  }
  std::vector<bool> used(orbits.size(), false);
  std::vector<SymmetryClass> merged;
  for (std::size_t i = 0; i < orbits.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    SymmetryClass c = orbits[i];
    // Translation orbits are closed under shifts, so reversing one member
    // identifies the whole partner orbit.
    const auto partner = owner.find(orbits[i].representative.reversed());
    if (partner == owner.end()) {
      throw PartitionError("reversed state missing from orbits: " +
                           orbits[i].representative.reversed().label());
    }
    if (partner->second != i && !used[partner->second]) {
      used[partner->second] = true;
      const auto& extra = orbits[partner->second].members;
      c.members.insert(c.members.end(), extra.begin(), extra.end());
      std::sort(c.members.begin(), c.members.end());
      c.representative = c.members.front();
    }
    merged.push_back(std::move(c));
  }
  std::sort(merged.begin(), merged.end(), [](const SymmetryClass& a, const SymmetryClass& b) {
    return a.representative < b.representative;
  });
  return merged;
}

std::vector<double> features(const FockState& state) {
  std::vector<double> out(state.sites());
  if (state.sites() == 0) return out;
  const double mean = static_cast<double>(state.bosons()) / static_cast<double>(state.sites());
  for (std::size_t i = 0; i < state.sites(); ++i) out[i] = state.occ[i] - mean;
  return out;
}

std::vector<double> raw_features(const FockState& state) {
  return std::vector<double>(state.occ.begin(), state.occ.end());
}

BasisDescriptor make_basis(std::size_t sites, int bosons, BasisKind kind) {
  BasisDescriptor d;
  d.kind = kind;
  d.sites = sites;
  d.bosons = bosons;
  const auto full = enumerate_fock(sites, bosons);
  switch (kind) {
    case BasisKind::Full:
      d.classes.reserve(full.size());
      for (const auto& s : full) d.classes.push_back(SymmetryClass{s, {s}});
      break;
    case BasisKind::TranslationReduced:
      d.classes = translation_orbits(full);
      break;
    case BasisKind::FullyReduced:
      d.classes = parity_reduce(translation_orbits(full));
      break;
  }
  return d;
}

void validate_partition(const std::vector<SymmetryClass>& classes, std::size_t sites,
                        int bosons) {
  std::unordered_set<FockState, FockStateHash> seen;
  for (const auto& c : classes) {
    if (c.members.empty()) throw PartitionError("empty symmetry class");
    if (std::find(c.members.begin(), c.members.end(), c.representative) == c.members.end()) {
      throw PartitionError("representative " + c.representative.label() + " not in its class");
    }
    for (const auto& s : c.members) {
      if (s.sites() != sites || s.bosons() != bosons) {
        throw PartitionError("state " + s.label() + " does not belong to the (M, N) basis");
      }
      if (!seen.insert(s).second) throw PartitionError("state " + s.label() + " in two classes");
    }
  }
  if (seen.size() != fock_dimension(sites, bosons)) {
    throw PartitionError("classes cover " + std::to_string(seen.size()) + " of " +
                         std::to_string(fock_dimension(sites, bosons)) + " Fock states");
  }
}

void write_basis_csv(std::ostream& os, const BasisDescriptor& basis) {
  os << "class_index,representative,multiplicity,kind\n";
  for (std::size_t i = 0; i < basis.classes.size(); ++i) {
    const auto& c = basis.classes[i];
    os << i << ',' << c.representative.label() << ',' << c.multiplicity() << ','
       << to_string(basis.kind) << '\n';
  }
}

}  // namespace bosehub
