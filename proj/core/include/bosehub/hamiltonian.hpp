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

#include <iosfwd>
#include <string_view>
#include <utility>
#include <vector>

#include "bosehub/basis.hpp"
#include "bosehub/linalg.hpp"

namespace bosehub {

/// Ring Bose-Hubbard model
///   H = -t sum_bonds (a+_i a_{i+1} + a+_{i+1} a_i) + (U/2) sum_i n_i (n_i - 1)
/// with periodic boundaries. `phi` deforms the reduced matrix only.
struct ModelParams {
  double t = 1.0;
  double U = 0.0;
  std::size_t sites = 6;
  int bosons = 5;
  double phi = 0.0;

  void validate() const;
};

/// Orientation used to decide which off-diagonal entry of the reduced
/// matrix receives e^{+i phi} (the other gets e^{-i phi}). Entry (a, b)
/// gets e^{+i phi} when class a precedes class b in the chosen ordering.
enum class PhaseOrientation {
  /// Canonical ordering: ascending representative.
  Lexicographic,
  /// Descending representative. Gives the complex conjugate of the
  /// Lexicographic matrix, hence the same spectrum.
  ReverseLexicographic,
  /// Descending interaction energy sum_i n_i (n_i - 1), ties by ascending
  /// representative. Reproduces E0 = -4.6590 at t = 1, U = 5, phi = pi/2.
  InteractionDescending,
};

std::string_view to_string(PhaseOrientation o);
PhaseOrientation parse_phase_orientation(std::string_view name);

struct HamiltonianMatrix {
  ComplexMatrix entries;
  BasisDescriptor basis;
  ModelParams params;
  bool is_real = true;

  std::size_t dim() const noexcept { return entries.rows(); }
};

struct GroundState {
  double energy = 0.0;
  /// Unit norm; global phase fixed so the largest-magnitude amplitude is real
  /// and positive.
  CVector amplitudes;
  int sweeps = 0;
  double residual = 0.0;
};

/// H|s> as a list of (target state, amplitude), diagonal term first.
std::vector<std::pair<FockState, double>> apply_hamiltonian(const ModelParams& params,
                                                            const FockState& state);

/// Interaction energy per unit U: (1/2) sum_i n_i (n_i - 1).
double interaction_count(const FockState& state);

/// Full Fock-basis matrix. Throws DimensionError when the basis is not the
/// Full basis of (params.sites, params.bosons), DomainError when phi != 0.
HamiltonianMatrix build_full(const ModelParams& params, const BasisDescriptor& basis);

/// Matrix over normalized composite states |C> = m_C^{-1/2} sum_{s in C} |s>.
/// Throws PartitionError if the classes do not partition the Fock basis and
/// NotHermitianError if they are not closed under a symmetry of H.
HamiltonianMatrix build_reduced(const ModelParams& params, const BasisDescriptor& basis);

/// build_reduced at (t, U) with the off-diagonal entries rephased by
/// e^{+-i phi} according to `orientation`. Requires the fully reduced basis.
HamiltonianMatrix build_deformed(const ModelParams& params, const BasisDescriptor& basis,
                                 PhaseOrientation orientation = PhaseOrientation::Lexicographic);

/// Dispatch on basis.kind and params.phi.
HamiltonianMatrix build_hamiltonian(const ModelParams& params, const BasisDescriptor& basis,
                                    PhaseOrientation orientation = PhaseOrientation::Lexicographic);

/// Lowest eigenpair. Throws NotHermitianError or ConvergenceError; verifies
/// the residual ||Hv - Ev|| <= 1e-9 ||H||.
GroundState ground_state(const HamiltonianMatrix& h);

/// Exact ground energy for each orientation convention at the given model.
std::vector<std::pair<PhaseOrientation, double>> phase_convention_study(const ModelParams& params);

/// Header "# dim=<d> t=<t> U=<U> phi=<phi> basis=<kind>", then one
/// "row col re im" line per nonzero entry.
void write_matrix_coo(std::ostream& os, const HamiltonianMatrix& h);
/// CSV: class_index,amplitude_re,amplitude_im
void write_ground_state_csv(std::ostream& os, const GroundState& gs);

}  // namespace bosehub
