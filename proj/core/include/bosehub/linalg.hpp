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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace bosehub {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

/// Dense row-major complex matrix. Sized for the few-hundred-dimensional
/// problems of this library; no expression templates.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  static ComplexMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const cplx> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  CVector apply(std::span<const cplx> v) const;
  ComplexMatrix adjoint() const;

  /// max_ij |A_ij - conj(A_ji)|
  double hermiticity_defect() const;
  /// max_ij |A_ij|
  double max_abs() const;
  /// Frobenius norm.
  double norm() const;

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

cplx dot(std::span<const cplx> a, std::span<const cplx> b);  // sum conj(a_i) b_i
double norm2(std::span<const cplx> v);

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // column k pairs with values[k]
  int sweeps = 0;  // Jacobi sweeps, or worst-case QL iterations
};

/// Diagonalizes a Hermitian matrix. Real input goes through Householder
/// tridiagonalization and implicit QL (`max_sweeps` caps the QL iterations per
/// eigenvalue); complex input through cyclic Jacobi (`max_sweeps` sweeps).
/// Throws NotHermitianError when the input's Hermiticity defect exceeds
/// `hermiticity_tol * max(1, max|A|)` and ConvergenceError on the cap.
EigenDecomposition hermitian_eigen(const ComplexMatrix& a, double hermiticity_tol = 1e-12,
                                   int max_sweeps = 100);

struct ExtremalPair {
  double value = 0.0;
  CVector vector;
  int iterations = 0;
};

/// Lowest eigenpair by shifted inverse iteration followed by Rayleigh-quotient
/// refinement. Independent of the Jacobi path; used as a cross-check.
ExtremalPair lowest_eigenpair_inverse_iteration(const ComplexMatrix& a, double tol = 1e-12,
                                                int max_iterations = 5000);

/// Solves A x = b by Gaussian elimination with partial pivoting.
CVector solve(ComplexMatrix a, CVector b);

}  // namespace bosehub
