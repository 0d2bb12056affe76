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

#include "bosehub/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <numeric>

#include "bosehub/errors.hpp"

namespace bosehub {

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CVector ComplexMatrix::apply(std::span<const cplx> v) const {
  if (v.size() != cols_) throw DimensionError("matrix-vector size mismatch");
  CVector out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    cplx acc = 0.0;
    const cplx* row = data_.data() + r * cols_;
    for (std::size_t c = 0; c < cols_; ++c) acc += row[c] * v[c];
    out[r] = acc;
  }
  return out;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

double ComplexMatrix::hermiticity_defect() const {
  if (rows_ != cols_) return INFINITY;
  double worst = 0.0;
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = r; c < cols_; ++c)
      worst = std::max(worst, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
  return worst;
}

double ComplexMatrix::max_abs() const {
  double worst = 0.0;
  for (const auto& z : data_) worst = std::max(worst, std::abs(z));
  return worst;
}

double ComplexMatrix::norm() const {
  double acc = 0.0;
  for (const auto& z : data_) acc += std::norm(z);
  return std::sqrt(acc);
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  cplx acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return acc;
}

double norm2(std::span<const cplx> v) {
  double acc = 0.0;
  for (const auto& z : v) acc += std::norm(z);
  return std::sqrt(acc);
}

namespace {

double off_diagonal_norm(const ComplexMatrix& a) {
  double acc = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c)
      if (r != c) acc += std::norm(a(r, c));
  return std::sqrt(acc);
}

// Zeroes a(p, q) with a unitary rotation in the (p, q) plane. The pivot is
// first made real by rephasing column/row q, then a real Jacobi rotation
// finishes the job.
void rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
  const std::size_t n = a.rows();
  const cplx apq = a(p, q);
  const double g = std::abs(apq);
  if (g == 0.0) return;
  const cplx phase = apq / g;
  const cplx phase_conj = std::conj(phase);
  for (std::size_t r = 0; r < n; ++r) {
    a(r, q) *= phase_conj;
    v(r, q) *= phase_conj;
  }
  for (std::size_t r = 0; r < n; ++r) a(q, r) *= phase;

  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double theta = (aqq - app) / (2.0 * g);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  for (std::size_t r = 0; r < n; ++r) {
    const cplx arp = a(r, p);
    const cplx arq = a(r, q);
    a(r, p) = c * arp - s * arq;
    a(r, q) = s * arp + c * arq;
    const cplx vrp = v(r, p);
    const cplx vrq = v(r, q);
    v(r, p) = c * vrp - s * vrq;
    v(r, q) = s * vrp + c * vrq;
  }
  for (std::size_t r = 0; r < n; ++r) {
    const cplx apr = a(p, r);
    const cplx aqr = a(q, r);
    a(p, r) = c * apr - s * aqr;
    a(q, r) = s * apr + c * aqr;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = app - t * g;
  a(q, q) = aqq + t * g;
}

struct LuFactors {
  ComplexMatrix lu;
  std::vector<std::size_t> pivot;
};

LuFactors lu_factor(ComplexMatrix a) {
  const std::size_t n = a.rows();
  std::vector<std::size_t> pivot(n);
  std::iota(pivot.begin(), pivot.end(), 0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t best = k;
    for (std::size_t r = k + 1; r < n; ++r)
      if (std::abs(a(r, k)) > std::abs(a(best, k))) best = r;
    if (best != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(k, c), a(best, c));
      std::swap(pivot[k], pivot[best]);
    }
    cplx diag = a(k, k);
    // A singular shifted matrix means the shift hit an eigenvalue exactly;
    // nudging the pivot keeps inverse iteration well defined.
    if (std::abs(diag) < 1e-300) diag = a(k, k) = 1e-300;
    for (std::size_t r = k + 1; r < n; ++r) {
      const cplx f = a(r, k) / diag;
      a(r, k) = f;
      if (f == cplx{}) continue;
      for (std::size_t c = k + 1; c < n; ++c) a(r, c) -= f * a(k, c);
    }
  }
  return {std::move(a), std::move(pivot)};
}

CVector lu_solve(const LuFactors& f, std::span<const cplx> b) {
  const std::size_t n = f.lu.rows();
  CVector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[f.pivot[i]];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < i; ++k) x[i] -= f.lu(i, k) * x[k];
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) x[i] -= f.lu(i, k) * x[k];
    x[i] /= f.lu(i, i);
  }
  return x;
}

// Householder tridiagonalization followed by implicit QL on a real symmetric
// matrix (row-major n x n). On return `d` holds the eigenvalues and column k
// of `v` the matching eigenvector. Returns the largest QL iteration count.
int symmetric_tridiagonal_ql(std::vector<double>& v, std::vector<double>& d, std::size_t n,
                             int max_iterations) {
  auto V = [&](std::size_t r, std::size_t c) -> double& { return v[r * n + c]; };
  std::vector<double> e(n, 0.0);
  d.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) d[j] = V(n - 1, j);

  for (std::size_t i = n - 1; i > 0; --i) {
    double scale = 0.0, h = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = V(i - 1, j);
        V(i, j) = 0.0;
        V(j, i) = 0.0;
      }
    } else {
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = f > 0 ? -std::sqrt(h) : std::sqrt(h);
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        V(j, i) = f;
        g = e[j] + V(j, j) * f;
        for (std::size_t k = j + 1; k < i; ++k) {
          g += V(k, j) * d[k];
          e[k] += V(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (std::size_t k = j; k < i; ++k) V(k, j) -= f * e[k] + g * d[k];
        d[j] = V(i - 1, j);
        V(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  // Accumulate the transformations.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    V(n - 1, i) = V(i, i);
    V(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (std::size_t k = 0; k <= i; ++k) d[k] = V(k, i + 1) / h;
      for (std::size_t j = 0; j <= i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k <= i; ++k) g += V(k, i + 1) * V(k, j);
        for (std::size_t k = 0; k <= i; ++k) V(k, j) -= g * d[k];
      }
    }
    for (std::size_t k = 0; k <= i; ++k) V(k, i + 1) = 0.0;
  }
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = V(n - 1, j);
    V(n - 1, j) = 0.0;
  }
  V(n - 1, n - 1) = 1.0;
  e[0] = 0.0;

  // Implicit QL on the tridiagonal (d, e).
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  double f = 0.0, tst1 = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  int worst = 0;
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n && std::abs(e[m]) > eps * tst1) ++m;
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > max_iterations) {
          throw ConvergenceError("QL eigen solver did not converge after " +
                                     std::to_string(max_iterations) + " iterations",
                                 iter - 1, std::abs(e[l]));
        }
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t i = m; i-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          for (std::size_t k = 0; k < n; ++k) {
            h = V(k, i + 1);
            V(k, i + 1) = s * V(k, i) + c * h;
            V(k, i) = c * V(k, i) - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
      worst = std::max(worst, iter);
    }
    d[l] += f;
    e[l] = 0.0;
  }
  return worst;
}

EigenDecomposition sorted_decomposition(const std::vector<double>& values,
                                        const std::function<cplx(std::size_t, std::size_t)>& vec,
                                        std::size_t n, int sweeps) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  EigenDecomposition out;
  out.sweeps = sweeps;
  out.values.resize(n);
  out.vectors = ComplexMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = values[order[k]];
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = vec(r, order[k]);
  }
  return out;
}

}  // namespace

EigenDecomposition hermitian_eigen(const ComplexMatrix& input, double hermiticity_tol,
                                   int max_sweeps) {
  if (input.rows() != input.cols()) throw DimensionError("eigen solver needs a square matrix");
  const double scale = std::max(1.0, input.max_abs());
  const double defect = input.hermiticity_defect();
  if (defect > hermiticity_tol * scale) {
    throw NotHermitianError("matrix is not Hermitian (defect " + std::to_string(defect) + ")");
  }
  const std::size_t n = input.rows();
  bool real = true;
  for (std::size_t r = 0; r < n && real; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (input(r, c).imag() != 0.0) {
        real = false;
        break;
      }
  if (real && n > 0) {
    std::vector<double> v(n * n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        v[r * n + c] = 0.5 * (input(r, c).real() + input(c, r).real());
    std::vector<double> d;
    const int iterations = symmetric_tridiagonal_ql(v, d, n, max_sweeps);
    return sorted_decomposition(
        d, [&](std::size_t r, std::size_t k) { return cplx(v[r * n + k], 0.0); }, n, iterations);
  }

  ComplexMatrix a = input;
  // Symmetrize so round-off in the input cannot seed a drift.
  for (std::size_t r = 0; r < n; ++r) {
    a(r, r) = a(r, r).real();
    for (std::size_t c = r + 1; c < n; ++c) {
      const cplx avg = 0.5 * (a(r, c) + std::conj(a(c, r)));
      a(r, c) = avg;
      a(c, r) = std::conj(avg);
    }
  }
  ComplexMatrix v = ComplexMatrix::identity(n);
  const double target = 1e-15 * std::max(1e-300, a.norm());

  int sweep = 0;
  double off = off_diagonal_norm(a);
  while (off > target) {
    if (sweep == max_sweeps) {
      throw ConvergenceError("Jacobi eigen solver did not converge after " +
                                 std::to_string(sweep) + " sweeps (off-diagonal norm " +
                                 std::to_string(off) + ")",
                             sweep, off);
    }
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q)
        if (std::abs(a(p, q)) > 1e-300) rotate(a, v, p, q);
    ++sweep;
    const double next = off_diagonal_norm(a);
    // Round-off floor: further sweeps cannot reduce the residue.
    if (next >= off && next < 1e-12 * std::max(1.0, a.norm())) break;
    off = next;
  }

  std::vector<double> values(n);
  for (std::size_t k = 0; k < n; ++k) values[k] = a(k, k).real();
  return sorted_decomposition(values, [&](std::size_t r, std::size_t k) { return v(r, k); }, n,
                              sweep);
}

ExtremalPair lowest_eigenpair_inverse_iteration(const ComplexMatrix& a, double tol,
                                                int max_iterations) {
  const std::size_t n = a.rows();
  if (n == 0 || n != a.cols()) throw DimensionError("inverse iteration needs a square matrix");
  // Gershgorin lower bound: every eigenvalue lies above it.
  double lower = INFINITY;
  for (std::size_t r = 0; r < n; ++r) {
    double radius = 0.0;
    for (std::size_t c = 0; c < n; ++c)
      if (c != r) radius += std::abs(a(r, c));
    lower = std::min(lower, a(r, r).real() - radius);
  }
  const double scale = std::max(1.0, a.max_abs());
  const double shift = lower - 1e-3 * scale;
  ComplexMatrix shifted = a;
  for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= shift;
  const LuFactors lu = lu_factor(std::move(shifted));

  CVector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.01 * static_cast<double>(i % 7);
  double nx = norm2(x);
  for (auto& z : x) z /= nx;

  ExtremalPair out;
  double residual = INFINITY;
  for (int it = 1; it <= max_iterations; ++it) {
    x = lu_solve(lu, x);
    nx = norm2(x);
    for (auto& z : x) z /= nx;
    const CVector ax = a.apply(x);
    const double rho = dot(x, ax).real();
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) r2 += std::norm(ax[i] - rho * x[i]);
    residual = std::sqrt(r2);
    out.value = rho;
    out.iterations = it;
    if (residual <= tol * scale) {
      out.vector = std::move(x);
      return out;
    }
  }
  throw ConvergenceError("inverse iteration did not converge", max_iterations, residual);
}

CVector solve(ComplexMatrix a, CVector b) {
  if (a.rows() != a.cols() || b.size() != a.rows()) throw DimensionError("solve: size mismatch");
  return lu_solve(lu_factor(std::move(a)), b);
}

}  // namespace bosehub
