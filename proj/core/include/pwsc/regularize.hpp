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
 * Smoothing of the switched field inside bands {|H| < eps}.
 *
 * phi clamps s to [-1, 1]. For a chain the blend weights are
 *   w_1 = (1 - phi_1) / 2,  w_i = (phi_{i-1} - phi_i) / 2,  w_N = (1 + phi_{N-1}) / 2
 * with phi_k = phi(H_k(x) / eps). For a planar cross the weight of mode k
 * is (1 + s1 phi_1)(1 + s2 phi_2) / 4 where (s1, s2) is the sign pattern of
 * its sector. Outside every band the blend reduces to the active mode.
 */

#ifndef PWSC_REGULARIZE_HPP_
#define PWSC_REGULARIZE_HPP_

#include <iosfwd>
#include <vector>

#include "pwsc/filippov.hpp"
#include "pwsc/model.hpp"

namespace pwsc {

/// Clamp to [-1, 1].
double phi(double s);
/// 1 on [-1, 1] (closed, so the kinks take the inner value), 0 outside.
double phi_prime(double s);

class RegularizedSystem {
 public:
  /// Throws PreconditionError unless eps > 0.
  RegularizedSystem(PwsSystem base, double eps);

  const PwsSystem& base() const { return base_; }
  double eps() const { return eps_; }

  /// Blend weights of the modes at x (sum to 1).
  Vector weights(const Vector& x) const;
  Vector field(const Vector& x) const;
  Matrix jacobian(const Vector& x) const;
  /// True when |H_k(x)| < eps for some manifold (band interior).
  bool in_band(const Vector& x) const;

 private:
  /// Gradients of the weights, one column per mode.
  Matrix weight_gradients(const Vector& x) const;

  PwsSystem base_;
  double eps_;
};

Vector regularized_field_chain(const PwsSystem& system, double eps, const Vector& x);
Vector regularized_field_cross(const PwsSystem& system, double eps, const Vector& x);
Matrix regularized_jacobian_chain(const PwsSystem& system, double eps, const Vector& x);
Matrix regularized_jacobian_cross(const PwsSystem& system, double eps, const Vector& x);

/// RK4 on the blended field, on the grid t_k = k h. Steps that start in or
/// may reach a band are split into substeps no longer than eps / 10. All
/// samples belong to one SegmentKind::regularized segment.
Trajectory integrate_regularized(const PwsSystem& system, double eps, const Vector& x0,
                                 double t_final, const SolverOptions& options = {});

/// Sliding motion on chain manifold k (between modes k and k + 1) reduced to
/// the coordinates other than the pivot (largest |grad H| component). For a
/// manifold normal to one axis this is the convex combination with weight
/// f_{k+1,p} / (f_{k+1,p} - f_{k,p}) on f_k; otherwise the equivalent
/// Filippov form. Throws AssumptionError if the normal components of the
/// two fields coincide.
Vector reduced_sliding_field(const PwsSystem& system, std::size_t manifold, const Vector& x,
                             double tol = 1e-14);

struct ConvergenceRow {
  double eps = 0.0;
  double sup_gap = 0.0;
  double slope_to_prev = 0.0;  ///< NaN on the first row
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  /// Least-squares slope of log(gap) against log(eps).
  double fitted_slope = 0.0;
  bool strictly_decreasing() const;
};

/// Integrates the Filippov and the regularized solutions for every eps on a
/// shared grid and records sup_k |x(t_k) - x_eps(t_k)|. eps_list must be
/// strictly decreasing and positive. Rows may be computed concurrently.
ConvergenceTable convergence_study(const PwsSystem& system, const Vector& x0, double t_final,
                                   const std::vector<double>& eps_list,
                                   const SolverOptions& options = {});

/// CSV: eps,sup_gap,slope_to_prev (empty slope on the first row).
void write_convergence_csv(std::ostream& out, const ConvergenceTable& table);

}  // namespace pwsc

#endif  // PWSC_REGULARIZE_HPP_
