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
 * Data model of a piecewise smooth (PWS) system
 *
 *   xdot = f_i(x),  x in S_i,  i = 1..N
 *
 * whose regions S_i are cut out by codimension-one switching manifolds
 * {H(x) = 0}. Two topologies are supported:
 *
 *  - chain: N-1 non-intersecting manifolds H_{i,i+1}; S_1 lies on the
 *    negative side of H_{1,2}, S_N on the positive side of H_{N-1,N} and
 *    S_i in between (H_{i-1,i} > 0, H_{i,i+1} < 0).
 *  - planar cross: n = 2, two manifolds H_1, H_2 meeting at one point, four
 *    modes with sign table
 *        S_1: H_1 > 0, H_2 < 0      S_2: H_1 > 0, H_2 > 0
 *        S_3: H_1 < 0, H_2 > 0      S_4: H_1 < 0, H_2 < 0
 *
 * Mode and manifold indices are 0-based in the API; reports print them
 * 1-based.
 */

#ifndef PWSC_MODEL_HPP_
#define PWSC_MODEL_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "pwsc/measure.hpp"
#include "pwsc/types.hpp"

namespace pwsc {

inline constexpr double kDefaultTolBoundary = 1e-9;
inline constexpr double kDefaultTolLie = 1e-10;

/// Central-difference Jacobian with step 1e-6 * (1 + |x_k|) per coordinate.
Matrix finite_difference_jacobian(const FieldFn& field, const Vector& x);

struct AffineField {
  Matrix A;
  Vector b;
};

/// One smooth vector field f_i together with its Jacobian.
class Mode {
 public:
  /// f(x) = A x + b.
  static Mode affine(Matrix A, Vector b);
  /// Caller-supplied field and Jacobian handles.
  static Mode smooth(int dimension, FieldFn field, JacobianFn jacobian);
  /// Explicit opt-in to a finite-difference Jacobian.
  static Mode smooth_with_fd_jacobian(int dimension, FieldFn field);

  int dimension() const { return dimension_; }
  bool is_affine() const { return std::holds_alternative<AffineField>(data_); }
  /// Throws PreconditionError for non-affine modes.
  const AffineField& affine_data() const;

  Vector field(const Vector& x) const;
  Matrix jacobian(const Vector& x) const;

 private:
  struct Smooth {
    FieldFn field;
    JacobianFn jacobian;
  };
  Mode(int dimension, std::variant<AffineField, Smooth> data)
      : dimension_(dimension), data_(std::move(data)) {}

  int dimension_;
  std::variant<AffineField, Smooth> data_;
};

/// Switching manifold {x : H(x) = 0}.
class Manifold {
 public:
  /// H(x) = c . x - d.
  static Manifold affine(Vector normal, double offset, std::string label);
  static Manifold smooth(int dimension, ScalarFn h, GradientFn gradient, std::string label);

  int dimension() const { return dimension_; }
  bool is_affine() const { return affine_; }
  const std::string& label() const { return label_; }
  /// Affine data; throws PreconditionError for smooth manifolds.
  const Vector& normal() const;
  double offset() const;

  double value(const Vector& x) const;
  /// grad H(x) as a column vector.
  Vector gradient(const Vector& x) const;
  /// Closest point on {H = level} along the gradient (closed form for
  /// affine H, Newton iteration otherwise).
  Vector project(const Vector& x, double level = 0.0) const;

 private:
  Manifold() = default;

  int dimension_ = 0;
  bool affine_ = false;
  Vector normal_;
  double offset_ = 0.0;
  ScalarFn h_;
  GradientFn gradient_;
  std::string label_;
};

/// Axis-aligned analysis box standing in for the forward invariant set C.
class AnalysisBox {
 public:
  /// Throws PreconditionError unless lower < upper componentwise and finite.
  AnalysisBox(Vector lower, Vector upper);

  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  int dimension() const { return static_cast<int>(lower_.size()); }
  Vector center() const { return 0.5 * (lower_ + upper_); }
  bool contains(const Vector& x, double slack = 0.0) const;

 private:
  Vector lower_;
  Vector upper_;
};

enum class Topology { chain, planar_cross };

std::string_view to_string(Topology topology);

class PwsSystem {
 public:
  /// Validates mode/manifold counts, dimensions and (for chains) that the
  /// manifold sign patterns sampled over the box all match a region.
  PwsSystem(Topology topology, std::vector<Mode> modes, std::vector<Manifold> manifolds,
            AnalysisBox box);

  int dimension() const { return box_.dimension(); }
  Topology topology() const { return topology_; }
  const std::vector<Mode>& modes() const { return modes_; }
  const std::vector<Manifold>& manifolds() const { return manifolds_; }
  const Mode& mode(std::size_t i) const { return modes_.at(i); }
  const Manifold& manifold(std::size_t k) const { return manifolds_.at(k); }
  std::size_t num_modes() const { return modes_.size(); }
  std::size_t num_manifolds() const { return manifolds_.size(); }
  const AnalysisBox& box() const { return box_; }
  /// All modes and manifolds affine.
  bool is_affine() const;

  /// Sign (+1/-1) of manifold k's H inside the region of mode i.
  int region_sign(std::size_t mode, std::size_t manifold) const;
  /// Mode whose region has the given strict sign pattern, or kNone.
  std::size_t mode_for_signs(const std::vector<int>& signs) const;
  /// (negative-side mode, positive-side mode) of manifold k at a point x on
  /// it. For the planar cross the other manifold's sign at x selects the
  /// pair; throws PreconditionError at the intersection itself.
  std::pair<std::size_t, std::size_t> adjacent_modes(std::size_t manifold, const Vector& x,
                                                     double tol_boundary = kDefaultTolBoundary) const;

 private:
  void validate_chain_cover() const;

  Topology topology_;
  std::vector<Mode> modes_;
  std::vector<Manifold> manifolds_;
  AnalysisBox box_;
};

/// Where a point sits relative to the switching structure.
struct RegionLocation {
  enum class Kind { interior, on_manifold };
  Kind kind = Kind::interior;
  std::size_t mode = kNone;             ///< valid for interior
  std::vector<std::size_t> manifolds;   ///< manifolds within tolerance
  std::vector<int> signs;               ///< -1, 0, +1 per manifold
  std::vector<double> values;           ///< H_k(x)

  bool interior() const { return kind == Kind::interior; }
};

/// Throws TopologyError if the strict sign pattern matches no region.
RegionLocation locate(const PwsSystem& system, const Vector& x,
                      double tol_boundary = kDefaultTolBoundary);

/// Points of {H_k = level} inside the box: a grid of `per_axis` points on
/// every axis but the pivot one (largest |grad H| component at the box
/// centre), with the pivot coordinate solved for.
std::vector<Vector> sample_level_set(const Manifold& manifold, const AnalysisBox& box,
                                     int per_axis, double level = 0.0);

struct TransversalityViolation {
  std::size_t manifold = 0;
  Vector point;
  double sigma_negative = 0.0;  ///< L_{f_i} H, mode on the negative side
  double sigma_positive = 0.0;  ///< L_{f_j} H, mode on the positive side
  std::string reason;
};

struct TransversalityReport {
  std::size_t samples_checked = 0;
  std::size_t samples_skipped = 0;  ///< points on a second manifold
  std::vector<TransversalityViolation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks that on every sampled point of each manifold inside the box at
/// least one adjacent Lie derivative is nonzero (and grad H != 0).
/// Throws PreconditionError if per_axis < 2.
TransversalityReport check_transversality(const PwsSystem& system, const AnalysisBox& box,
                                          int per_axis, double tol_lie = kDefaultTolLie,
                                          double tol_boundary = kDefaultTolBoundary);

struct IntersectionCheck {
  bool holds = false;
  Vector point;                       ///< intersection x~
  std::size_t sector = kNone;         ///< mode all fields point into
  Matrix lie;                         ///< 4x2: grad H_m(x~) . f_k(x~)
  std::string diagnostic;
};

/// Solves H_1 = H_2 = 0 and tests whether all four fields at x~ point into
/// one common sector. Throws AssumptionError when x~ is not unique, lies
/// outside the box, or any Lie derivative vanishes.
IntersectionCheck check_intersection_assumption(const PwsSystem& system,
                                                double tol_lie = kDefaultTolLie);

/// Intersection point of the two manifolds of a planar cross system.
Vector intersection_point(const PwsSystem& system);

struct LoadedConfig {
  PwsSystem system;
  std::optional<Metric> metric;
};

/// Parses the JSON configuration schema:
///   { "dimension": n, "topology": "chain" | "planar_cross",
///     "modes": [ {"A": [[...], ...], "b": [...]}, ... ],
///     "manifolds": [ {"c": [...], "d": d, "label": "..."}, ... ],
///     "box": {"lower": [...], "upper": [...]},
///     "metric": {"Q": [[...]], "c": rate}   (optional) }
/// Throws ConfigError on any schema or dimension violation.
LoadedConfig load_config(std::string_view config_text);
PwsSystem load_system(std::string_view config_text);
LoadedConfig load_config_file(const std::string& path);

/// Parses a JSON matrix literal ([[...], ...]).
Matrix parse_matrix(std::string_view json_text);

}  // namespace pwsc

#endif  // PWSC_MODEL_HPP_
