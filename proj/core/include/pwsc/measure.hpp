/*
 *  Copyright 2026 The pwsc Authors
 *
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 */

/**
 * Weighted matrix measure (logarithmic norm) and the small dense symmetric
 * linear algebra behind it.
 *
 * For a positive definite weight Q the measure of A is
 *
 *   mu_Q(A) = lambda_max( (Q A Q^-1 + Q^-1 A^T Q) / 2 ),
 *
 * the logarithmic norm induced by the vector norm |x|_Q = |Q x|_2. Only
 * small matrices (n <= ~10) are targeted: 1x1 and 2x2 eigenvalue problems
 * are solved in closed form, larger ones with cyclic Jacobi rotations.
 */

#ifndef PWSC_MEASURE_HPP_
#define PWSC_MEASURE_HPP_

#include "pwsc/types.hpp"

namespace pwsc {

/// Largest eigenvalue of a symmetric matrix. Throws NumericalError if S is
/// not symmetric within 1e-12 * |S|.
double sym_eig_max(const Matrix& S);

/// All eigenvalues of a symmetric matrix in ascending order (same methods
/// as sym_eig_max).
Vector sym_eigenvalues(const Matrix& S);

/// Lower Cholesky factor L with Q = L L^T, or an empty matrix when a pivot
/// is not strictly positive.
Matrix cholesky_lower(const Matrix& Q);

/// True iff Q is square, symmetric and every Cholesky pivot is positive.
bool is_positive_definite(const Matrix& Q);

/// Q^-1 from the Cholesky factor by two triangular solves.
Matrix spd_inverse(const Matrix& Q);

/// 2-norm condition number of a symmetric positive definite matrix.
double spd_condition(const Matrix& Q);

/// mu_Q(A). Throws PreconditionError for a non-PD Q and NumericalError when
/// cond(Q) exceeds 1e12.
double matrix_measure(const Matrix& Q, const Matrix& A);

/// Contraction certificate candidate: weight Q and rate c.
class Metric {
 public:
  /// Throws PreconditionError unless Q is PD and c >= 0.
  Metric(Matrix Q, double rate);

  static Metric identity(int n, double rate) { return Metric(Matrix::Identity(n, n), rate); }

  const Matrix& Q() const { return Q_; }
  double rate() const { return rate_; }
  int dimension() const { return static_cast<int>(Q_.rows()); }

  double measure(const Matrix& A) const;
  /// |Q v|_2
  double norm(const Vector& v) const { return (Q_ * v).norm(); }

 private:
  Matrix Q_;
  Matrix Q_inv_;
  double rate_;
};

}  // namespace pwsc

#endif  // PWSC_MEASURE_HPP_
