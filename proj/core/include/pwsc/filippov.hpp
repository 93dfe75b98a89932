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
 * Event-driven integration of Filippov solutions.
 *
 * Away from the switching manifolds the active mode is integrated with
 * fixed-step classical RK4 on the grid t_k = k h. A sign change of any H
 * during a step is localized by bisection on the sub-step length. On
 * arrival at a manifold the two adjacent Lie derivatives sigma_i (mode on
 * the negative side) and sigma_j (positive side) decide:
 *
 *   crossing   sigma_i * sigma_j > 0     continue in the mode the flow enters
 *   sliding    sigma_i > 0 > sigma_j     follow f_s = (1 - l) f_i + l f_j,
 *                                        l = sigma_i / (sigma_i - sigma_j)
 *   escaping   sigma_i < 0 < sigma_j     non-unique solution: EscapingRegionError
 *
 * Points with exactly one vanishing Lie derivative count as sliding. A
 * sliding segment ends when l leaves [0, 1]; l -> 0 continues in mode i,
 * l -> 1 in mode j. At the intersection of a planar cross the trajectory
 * crosses into the sector all four fields point into.
 */

#ifndef PWSC_FILIPPOV_HPP_
#define PWSC_FILIPPOV_HPP_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pwsc/model.hpp"

namespace pwsc {

struct BoundaryClass {
  enum class Kind { crossing, sliding, escaping, tangential };
  Kind kind = Kind::crossing;
  double sigma_i = 0.0;  ///< L_{f_i} H, f_i the mode on the H < 0 side
  double sigma_j = 0.0;  ///< L_{f_j} H, f_j the mode on the H > 0 side
  std::size_t mode_i = kNone;
  std::size_t mode_j = kNone;
  /// One Lie derivative within tol_lie of zero (reported as sliding unless
  /// tangential points are kept separate).
  bool tangential = false;
};

std::string to_string(BoundaryClass::Kind kind);

/// grad H(x) . f
double lie_derivative(const Manifold& manifold, const Vector& field_value, const Vector& x);

/// Classifies a point on exactly one manifold. Throws PreconditionError if
/// x lies on several manifolds and AssumptionError if both Lie derivatives
/// vanish.
BoundaryClass classify_boundary(const PwsSystem& system, std::size_t manifold, const Vector& x,
                                double tol_lie = kDefaultTolLie,
                                bool resolve_tangential = true);

/// l = sigma_i / (sigma_i - sigma_j). Throws PreconditionError unless
/// sigma_i >= 0 >= sigma_j with sigma_i != sigma_j.
double sliding_coefficient(double sigma_i, double sigma_j);

/// Filippov sliding vector between mode_i (H < 0) and mode_j (H > 0).
/// Identical fields return that field; otherwise the sliding_coefficient
/// precondition applies.
Vector sliding_field(const PwsSystem& system, std::size_t mode_i, std::size_t mode_j,
                     std::size_t manifold, const Vector& x);

struct SolverOptions {
  double step = 1e-3;
  double tol_event = 1e-10;
  int max_bisections = 80;
  double tol_lie = kDefaultTolLie;
  double tol_lambda = 1e-10;
  double tol_boundary = kDefaultTolBoundary;
  /// Consecutive events without time advance before giving up.
  int max_stalled_events = 32;
};

enum class SegmentKind { flow, slide, cross, regularized };

struct Segment {
  SegmentKind kind = SegmentKind::flow;
  double t_start = 0.0;
  double t_end = 0.0;
  std::size_t mode = kNone;       ///< flow: active mode
  std::size_t manifold = kNone;   ///< slide/cross: manifold (kNone at the intersection)
  std::size_t from_mode = kNone;  ///< slide: negative side; cross: origin
  std::size_t to_mode = kNone;    ///< slide: positive side; cross: destination
  std::vector<double> lambda;     ///< slide: l at each sample of the segment
};

struct Sample {
  double t = 0.0;
  Vector x;
  std::size_t segment = 0;
  std::optional<double> lambda;
  long long grid_index = -1;  ///< k if t == k h on the base grid, else -1
};

struct Trajectory {
  std::vector<Sample> samples;
  std::vector<Segment> segments;
  double step = 0.0;

  const Sample& back() const { return samples.back(); }
  bool has_sliding() const;
  /// Samples on the base grid, indexed by grid index (gaps stay empty).
  /// The pointers refer into this trajectory, hence no rvalue overload.
  std::vector<const Sample*> grid_samples() const&;
  std::vector<const Sample*> grid_samples() const&& = delete;
};

/// Integrates the Filippov solution from x0 over [0, t_final]. t_final = 0
/// yields the single sample x0.
Trajectory integrate(const PwsSystem& system, const Vector& x0, double t_final,
                     const SolverOptions& options = {});

/// Trajectory CSV: t,x1..xn,segment,mode_or_pair,lambda. Modes are printed
/// 1-based: flow "i", slide "i:j", cross "i>j". Numbers use 17 significant
/// digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

}  // namespace pwsc

#endif  // PWSC_FILIPPOV_HPP_
