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

#include "pwsc/measure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pwsc/errors.hpp"

namespace pwsc {
namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr int kJacobiMaxSweeps = 50;
constexpr double kJacobiTol = 1e-14;
constexpr double kMaxCondition = 1e12;

Matrix checked_symmetric_part(const Matrix& S) {
  if (S.rows() != S.cols()) {
    throw NumericalError("symmetric eigenproblem needs a square matrix");
  }
  const double scale = S.norm();
  const double asym = (S - S.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= kSymmetryTol * scale)) {
    throw NumericalError("matrix is not symmetric (asymmetry " + std::to_string(asym) + ")");
  }
  return 0.5 * (S + S.transpose());
}

// Eigenvalues of [[a, b], [b, d]], ascending. The eigenvalue of larger
// magnitude comes from the mean/radius form, the other from the determinant.
std::pair<double, double> eig2(double a, double b, double d) {
  const double mean = 0.5 * (a + d);
  const double radius = std::hypot(0.5 * (a - d), b);
  const double det = a * d - b * b;
  double lo = 0.0;
  double hi = 0.0;
  if (mean >= 0.0) {
    hi = mean + radius;
    lo = hi != 0.0 ? det / hi : 0.0;
  } else {
    lo = mean - radius;
    hi = det / lo;
  }
  // -0.0 + 0.0 == +0.0
  return {std::min(lo, hi) + 0.0, std::max(lo, hi) + 0.0};
}

// Cyclic Jacobi; returns the diagonal after convergence.
Vector jacobi_eigenvalues(Matrix S) {
  const Eigen::Index n = S.rows();
  const double threshold = kJacobiTol * S.norm();
  for (int sweep = 0; sweep < kJacobiMaxSweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) off += 2.0 * S(p, q) * S(p, q);
    }
    if (std::sqrt(off) <= threshold) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (S(p, q) == 0.0) continue;
        const double theta = (S(q, q) - S(p, p)) / (2.0 * S(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double skp = S(k, p);
          const double skq = S(k, q);
          S(k, p) = c * skp - s * skq;
          S(k, q) = s * skp + c * skq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double spk = S(p, k);
          const double sqk = S(q, k);
          S(p, k) = c * spk - s * sqk;
          S(q, k) = s * spk + c * sqk;
        }
        S(p, q) = 0.0;
        S(q, p) = 0.0;
      }
    }
  }
  return S.diagonal();
}

}  // namespace

Vector sym_eigenvalues(const Matrix& S) {
  const Matrix sym = checked_symmetric_part(S);
  Vector eig;
  switch (sym.rows()) {
    case 0:
      return Vector();
    case 1:
      eig = sym.diagonal();
      break;
    case 2: {
      const auto [lo, hi] = eig2(sym(0, 0), sym(0, 1), sym(1, 1));
      eig.resize(2);
      eig << lo, hi;
      break;
    }
    default:
      eig = jacobi_eigenvalues(sym);
  }
  std::sort(eig.begin(), eig.end());
  return eig;
}

double sym_eig_max(const Matrix& S) {
  const Vector eig = sym_eigenvalues(S);
  if (eig.size() == 0) throw NumericalError("empty matrix has no eigenvalues");
  return eig(eig.size() - 1);
}

Matrix cholesky_lower(const Matrix& Q) {
  const Eigen::Index n = Q.rows();
  Matrix L = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = Q(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= L(j, k) * L(j, k);
    if (!(pivot > 0.0)) return Matrix();
    L(j, j) = std::sqrt(pivot);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double v = Q(i, j);
      for (Eigen::Index k = 0; k < j; ++k) v -= L(i, k) * L(j, k);
      L(i, j) = v / L(j, j);
    }
  }
  return L;
}

bool is_positive_definite(const Matrix& Q) {
  if (Q.rows() != Q.cols() || Q.rows() == 0) return false;
  if (!Q.allFinite()) return false;
  const double asym = (Q - Q.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol * Q.norm()) return false;
  return cholesky_lower(Q).size() != 0;
}

Matrix spd_inverse(const Matrix& Q) {
  const Matrix L = cholesky_lower(Q);
  if (L.size() == 0) throw PreconditionError("matrix is not positive definite");
  const Eigen::Index n = Q.rows();
  const Matrix Y = L.triangularView<Eigen::Lower>().solve(Matrix::Identity(n, n));
  const Matrix X = L.transpose().triangularView<Eigen::Upper>().solve(Y);
  return 0.5 * (X + X.transpose());
}

double spd_condition(const Matrix& Q) {
  return sym_eig_max(Q) * sym_eig_max(spd_inverse(Q));
}

namespace {

Matrix checked_inverse(const Matrix& Q) {
  if (!is_positive_definite(Q)) {
    throw PreconditionError("metric weight Q must be symmetric positive definite");
  }
  Matrix Q_inv = spd_inverse(Q);
  const double cond = sym_eig_max(Q) * sym_eig_max(Q_inv);
  if (!(cond <= kMaxCondition)) {
    throw NumericalError("metric weight Q is ill-conditioned (cond " + std::to_string(cond) + ")");
  }
  return Q_inv;
}

double measure_with_inverse(const Matrix& Q, const Matrix& Q_inv, const Matrix& A) {
  if (A.rows() != Q.rows() || A.cols() != Q.cols()) {
    throw PreconditionError("matrix measure: dimension mismatch between Q and A");
  }
  const Matrix M = Q * A * Q_inv;
  return sym_eig_max(0.5 * (M + M.transpose()));
}

}  // namespace

double matrix_measure(const Matrix& Q, const Matrix& A) {
  return measure_with_inverse(Q, checked_inverse(Q), A);
}

Metric::Metric(Matrix Q, double rate) : Q_(std::move(Q)), rate_(rate) {
  if (!(rate_ >= 0.0) || !std::isfinite(rate_)) {
    throw PreconditionError("contraction rate must be finite and >= 0");
  }
  Q_inv_ = checked_inverse(Q_);
}

double Metric::measure(const Matrix& A) const { return measure_with_inverse(Q_, Q_inv_, A); }

}  // namespace pwsc
