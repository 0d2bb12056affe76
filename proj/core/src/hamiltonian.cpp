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

#include "bosehub/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "bosehub/errors.hpp"

namespace bosehub {

void ModelParams::validate() const {
  if (!std::isfinite(t) || !std::isfinite(U)) throw DomainError("t and U must be finite");
  if (!std::isfinite(phi)) throw DomainError("phi must be finite");
  if (bosons < 0) throw DomainError("negative boson count");
  if (sites == 0 && bosons > 0) throw DomainError("cannot place bosons on zero sites");
}

std::string_view to_string(PhaseOrientation o) {
  switch (o) {
    case PhaseOrientation::Lexicographic:
      return "lex";
    case PhaseOrientation::ReverseLexicographic:
      return "revlex";
    case PhaseOrientation::InteractionDescending:
      return "interaction";
  }
  return "unknown";
}

PhaseOrientation parse_phase_orientation(std::string_view name) {
  if (name == "lex") return PhaseOrientation::Lexicographic;
  if (name == "revlex") return PhaseOrientation::ReverseLexicographic;
  if (name == "interaction") return PhaseOrientation::InteractionDescending;
  throw DomainError("unknown phase orientation: " + std::string(name));
}

double interaction_count(const FockState& state) {
  double acc = 0.0;
  for (int n : state.occ) acc += 0.5 * n * (n - 1);
  return acc;
}

std::vector<std::pair<FockState, double>> apply_hamiltonian(const ModelParams& params,
                                                            const FockState& state) {
  std::vector<std::pair<FockState, double>> out;
  out.emplace_back(state, params.U * interaction_count(state));
  const std::size_t m = state.sites();
  if (m < 2 || params.t == 0.0) return out;
  // A two-site ring has both bonds between the same pair; they are counted
  // separately, as for any M.
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = (i + 1) % m;
    for (const auto& [to, from] : {std::pair{i, j}, std::pair{j, i}}) {
      const int n_from = state.occ[from];
      if (n_from == 0) continue;
      FockState target = state;
      const double amp = std::sqrt(static_cast<double>(n_from) * (state.occ[to] + 1));
      target.occ[from] -= 1;
      target.occ[to] += 1;
      out.emplace_back(std::move(target), -params.t * amp);
    }
  }
  return out;
}

namespace {

void check_model_matches(const ModelParams& params, const BasisDescriptor& basis) {
  if (basis.sites != params.sites || basis.bosons != params.bosons) {
    throw DimensionError("basis (M=" + std::to_string(basis.sites) +
                         ", N=" + std::to_string(basis.bosons) + ") does not match model (M=" +
                         std::to_string(params.sites) + ", N=" + std::to_string(params.bosons) +
                         ")");
  }
}

double hermiticity_scale(const ComplexMatrix& m) { return std::max(1.0, m.max_abs()); }

}  // namespace

HamiltonianMatrix build_full(const ModelParams& params, const BasisDescriptor& basis) {
  params.validate();
  check_model_matches(params, basis);
  if (basis.kind != BasisKind::Full) throw DimensionError("build_full needs the full Fock basis");
  if (basis.size() != fock_dimension(params.sites, params.bosons)) {
    throw DimensionError("full basis has the wrong number of states");
  }
  if (params.phi != 0.0) throw DomainError("the full-basis Hamiltonian is undeformed (phi = 0)");

  std::unordered_map<FockState, std::size_t, FockStateHash> index;
  for (std::size_t i = 0; i < basis.size(); ++i) index.emplace(basis.classes[i].representative, i);
  if (index.size() != basis.size()) throw DimensionError("full basis has duplicate states");

  HamiltonianMatrix h;
  h.entries = ComplexMatrix(basis.size(), basis.size());
  h.basis = basis;
  h.params = params;
  h.is_real = true;
  for (std::size_t col = 0; col < basis.size(); ++col) {
    for (const auto& [target, amp] : apply_hamiltonian(params, basis.classes[col].representative)) {
      const auto it = index.find(target);
      if (it == index.end()) throw DimensionError("hopping left the basis at " + target.label());
      h.entries(it->second, col) += amp;
    }
  }
  return h;
}

HamiltonianMatrix build_reduced(const ModelParams& params, const BasisDescriptor& basis) {
  params.validate();
  check_model_matches(params, basis);
  validate_partition(basis.classes, basis.sites, basis.bosons);

  std::unordered_map<FockState, std::size_t, FockStateHash> owner;
  for (std::size_t c = 0; c < basis.size(); ++c)
    for (const auto& s : basis.classes[c].members) owner.emplace(s, c);

  const std::size_t dim = basis.size();
  HamiltonianMatrix h;
  h.entries = ComplexMatrix(dim, dim);
  h.basis = basis;
  h.params = params;
  h.params.phi = 0.0;
  h.is_real = true;
  // <rep_a|H|C_b> summed over members of b, i.e. row rep_a of H applied.
  for (std::size_t a = 0; a < dim; ++a) {
    const auto& ca = basis.classes[a];
    std::vector<double> row(dim, 0.0);
    for (const auto& [target, amp] : apply_hamiltonian(params, ca.representative)) {
      row[owner.at(target)] += amp;
    }
    for (std::size_t b = 0; b < dim; ++b) {
      if (row[b] == 0.0) continue;
      const double ratio = static_cast<double>(ca.multiplicity()) /
                           static_cast<double>(basis.classes[b].multiplicity());
      h.entries(a, b) = std::sqrt(ratio) * row[b];
    }
  }
  const double defect = h.entries.hermiticity_defect();
  if (defect > 1e-12 * hermiticity_scale(h.entries)) {
    throw NotHermitianError("reduced matrix is not Hermitian; classes are not closed under a "
                            "symmetry of the Hamiltonian (defect " +
                            std::to_string(defect) + ")");
  }
  return h;
}

HamiltonianMatrix build_deformed(const ModelParams& params, const BasisDescriptor& basis,
                                 PhaseOrientation orientation) {
  if (basis.kind != BasisKind::FullyReduced) {
    throw DimensionError("the deformation is defined on the translation+parity reduced basis");
  }
  HamiltonianMatrix h = build_reduced(params, basis);
  h.params.phi = params.phi;
  if (params.phi == 0.0) return h;

  const std::size_t dim = h.dim();
  std::vector<std::size_t> rank(dim);
  {
    std::vector<std::size_t> order(dim);
    std::iota(order.begin(), order.end(), 0);
    switch (orientation) {
      case PhaseOrientation::Lexicographic:
        break;
      case PhaseOrientation::ReverseLexicographic:
        std::reverse(order.begin(), order.end());
        break;
      case PhaseOrientation::InteractionDescending:
        std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
          return interaction_count(basis.classes[x].representative) >
                 interaction_count(basis.classes[y].representative);
        });
        break;
    }
    for (std::size_t pos = 0; pos < dim; ++pos) rank[order[pos]] = pos;
  }

  const cplx up = std::polar(1.0, params.phi);
  const cplx down = std::conj(up);
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = 0; b < dim; ++b)
      if (a != b) h.entries(a, b) *= rank[a] < rank[b] ? up : down;
  h.is_real = false;
  return h;
}

HamiltonianMatrix build_hamiltonian(const ModelParams& params, const BasisDescriptor& basis,
                                    PhaseOrientation orientation) {
  if (params.phi != 0.0) return build_deformed(params, basis, orientation);
  if (basis.kind == BasisKind::Full) return build_full(params, basis);
  return build_reduced(params, basis);
}

GroundState ground_state(const HamiltonianMatrix& h) {
  const std::size_t dim = h.dim();
  if (dim == 0) throw DimensionError("empty Hamiltonian");
  const EigenDecomposition eig = hermitian_eigen(h.entries);

  GroundState gs;
  gs.energy = eig.values.front();
  gs.sweeps = eig.sweeps;
  gs.amplitudes.resize(dim);
  std::size_t largest = 0;
  for (std::size_t r = 0; r < dim; ++r) {
    gs.amplitudes[r] = eig.vectors(r, 0);
    if (std::abs(gs.amplitudes[r]) > std::abs(gs.amplitudes[largest]) + 1e-14) largest = r;
  }
  const cplx phase = std::conj(gs.amplitudes[largest]) / std::abs(gs.amplitudes[largest]);
  const double n = norm2(gs.amplitudes);
  double max_imag = 0.0;
  for (auto& z : gs.amplitudes) {
    z *= phase / n;
    max_imag = std::max(max_imag, std::abs(z.imag()));
  }
  if (h.is_real && max_imag < 1e-10) {
    for (auto& z : gs.amplitudes) z = z.real();
  }

  const CVector hv = h.entries.apply(gs.amplitudes);
  double r2 = 0.0;
  for (std::size_t i = 0; i < dim; ++i) r2 += std::norm(hv[i] - gs.energy * gs.amplitudes[i]);
  gs.residual = std::sqrt(r2);
  if (gs.residual > 1e-9 * std::max(1.0, h.entries.norm())) {
    throw ConvergenceError("ground state residual too large", eig.sweeps, gs.residual);
  }
  return gs;
}

std::vector<std::pair<PhaseOrientation, double>> phase_convention_study(const ModelParams& params) {
  const BasisDescriptor basis = make_basis(params.sites, params.bosons, BasisKind::FullyReduced);
  std::vector<std::pair<PhaseOrientation, double>> out;
  for (auto o : {PhaseOrientation::Lexicographic, PhaseOrientation::ReverseLexicographic,
                 PhaseOrientation::InteractionDescending}) {
    out.emplace_back(o, ground_state(build_deformed(params, basis, o)).energy);
  }
  return out;
}

void write_matrix_coo(std::ostream& os, const HamiltonianMatrix& h) {
  std::ostringstream header;
  header << std::setprecision(17) << "# dim=" << h.dim() << " t=" << h.params.t
         << " U=" << h.params.U << " phi=" << h.params.phi << " basis=" << to_string(h.basis.kind)
         << '\n';
  os << header.str();
  const auto old = os.precision(17);
  for (std::size_t r = 0; r < h.dim(); ++r)
    for (std::size_t c = 0; c < h.dim(); ++c) {
      const cplx z = h.entries(r, c);
      if (z != cplx{}) os << r << ' ' << c << ' ' << z.real() << ' ' << z.imag() << '\n';
    }
  os.precision(old);
}

void write_ground_state_csv(std::ostream& os, const GroundState& gs) {
  const auto old = os.precision(17);
  os << "class_index,amplitude_re,amplitude_im\n";
  for (std::size_t i = 0; i < gs.amplitudes.size(); ++i)
    os << i << ',' << gs.amplitudes[i].real() << ',' << gs.amplitudes[i].imag() << '\n';
  os.precision(old);
}

}  // namespace bosehub
