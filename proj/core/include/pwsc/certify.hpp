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
 * Contraction certificates in the matrix measure mu_Q.
 *
 * Chain systems: mu_Q(J_i) <= -c on the closure of each region, and
 * mu_Q((f_{k+1} - f_k) grad H_k^T) <= 0 on each manifold. Planar cross
 * systems add the combinations (f1 + f2 - f3 - f4) grad H1^T on the first
 * manifold, (f2 + f3 - f1 - f4) grad H2^T on the second, the half-manifold
 * terms +-(f2 + f4 - f1 - f3) grad H^T and the equality
 * f2 + f4 = f1 + f3 at the intersection. The regularized variants quantify
 * the same terms over eps-inflated regions and bands.
 */

#ifndef PWSC_CERTIFY_HPP_
#define PWSC_CERTIFY_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pwsc/filippov.hpp"
#include "pwsc/measure.hpp"
#include "pwsc/model.hpp"

namespace pwsc {

inline constexpr double kDefaultTolFlow = 1e-12;
inline constexpr double kDefaultTolZero = 1e-9;
inline constexpr double kDefaultTolEq = 1e-9;

enum class Strategy { vertex, grid };
std::string to_string(Strategy strategy);

struct CertifyOptions {
  Strategy strategy = Strategy::vertex;
  int manifold_points = 41;  ///< grid samples per axis on manifolds
  int region_points = 21;    ///< grid samples per axis in region interiors
  int band_levels = 5;       ///< level sets sampled across a band
  double tol_flow = kDefaultTolFlow;
  double tol_zero = kDefaultTolZero;
  double tol_eq = kDefaultTolEq;
};

/// One side of a sublevel description: H_k(x) rel level.
struct LevelConstraint {
  enum class Relation { le, ge, eq };
  std::size_t manifold = 0;
  Relation relation = Relation::le;
  double level = 0.0;
};

/// Box intersected with level constraints on the switching functions.
struct Domain {
  std::vector<LevelConstraint> constraints;
  std::string describe(const PwsSystem& system) const;
};

enum class ConditionKind { flow, jump, equality };
std::string to_string(ConditionKind kind);

struct ConditionResult {
  std::string id;
  std::string domain;
  ConditionKind kind = ConditionKind::flow;
  double bound = 0.0;      ///< -c for flow terms, 0 otherwise
  double worst = 0.0;      ///< max of the measure (or residual norm) over the domain
  double margin = 0.0;     ///< bound - worst
  double tolerance = 0.0;  ///< pass iff margin >= -tolerance
  std::optional<Vector> point;  ///< attaining point; empty for an empty domain
  Strategy method = Strategy::vertex;
  std::size_t evaluations = 0;
  bool empty_domain = false;
  bool passed = false;
};

struct CertificateReport {
  std::string check;  ///< "chain", "planar_cross", "regularized_chain", "regularized_cross"
  std::vector<ConditionResult> conditions;
  Metric metric;
  std::optional<double> eps;
  bool passed = false;

  /// Smallest flow margin when every zero-bound and equality term holds
  /// within tolerance; otherwise the most negative violated margin.
  double margin() const;
  /// Rate certified by this report (metric rate when passed, else none).
  std::optional<double> certified_rate() const;
  const ConditionResult& condition(const std::string& id) const;
};

CertificateReport check_chain_certificate(const PwsSystem& system, const Metric& metric,
                                          const CertifyOptions& options = {});
CertificateReport check_cross_certificate(const PwsSystem& system, const Metric& metric,
                                          const CertifyOptions& options = {});
/// Dispatches on the topology.
CertificateReport check_certificate(const PwsSystem& system, const Metric& metric,
                                    const CertifyOptions& options = {});

/// Throws PreconditionError("bands intersect - chain regularization
/// invalid") when two bands of width 2 eps meet inside the box.
CertificateReport check_regularized_chain(const PwsSystem& system, const Metric& metric,
                                          double eps, const CertifyOptions& options = {});
CertificateReport check_regularized_cross(const PwsSystem& system, const Metric& metric,
                                          double eps, const CertifyOptions& options = {});
CertificateReport check_regularized_certificate(const PwsSystem& system, const Metric& metric,
                                                double eps, const CertifyOptions& options = {});

/// Vertices of the box cut by affine level constraints (deduplicated).
/// Throws PreconditionError for non-affine manifolds.
std::vector<Vector> domain_vertices(const PwsSystem& system, const Domain& domain);
/// Sample points of the domain used by the grid strategy.
std::vector<Vector> domain_samples(const PwsSystem& system, const Domain& domain,
                                   const CertifyOptions& options);

/// Report as JSON with 17 significant digits.
void write_report_json(std::ostream& out, const CertificateReport& report);

struct PairwiseOptions {
  double tol_decay = 1e-2;
  double noise_floor = 1e-12;  ///< distances below this are not tested
  SolverOptions solver;
};

struct PairResult {
  Vector xa0;
  Vector xb0;
  double initial_distance = 0.0;  ///< |Q (xa0 - xb0)|
  /// max_t ln d(t) + c t - ln d(0).
  double max_log_growth = 0.0;
  /// max_{s < t} ln d(t) - ln d(s) + c (t - s).
  double max_window_growth = 0.0;
  /// cond(Q) max_t d(t) e^{ct} / d(0): a witness for the Euclidean bound.
  double alpha = 1.0;
  std::size_t grid_points = 0;
  bool coincident = false;
  bool passed = false;
};

struct PairwiseReport {
  Metric metric;
  double tol_decay = 0.0;
  double t_final = 0.0;
  std::vector<PairResult> pairs;
  bool passed = false;
};

/// Integrates both Filippov solutions of every pair and checks
/// d(t) <= e^{-c (t - s)} d(s) (1 + tol_decay) on all grid times s < t,
/// with d = |Q (x_a - x_b)|.
PairwiseReport pairwise_contraction_test(const PwsSystem& system, const Metric& metric,
                                         const std::vector<std::pair<Vector, Vector>>& pairs,
                                         double t_final, const PairwiseOptions& options = {});

/// count seeded uniform pairs in the box.
std::vector<std::pair<Vector, Vector>> random_pairs(const AnalysisBox& box, std::size_t count,
                                                    std::uint64_t seed);

void write_pairwise_json(std::ostream& out, const PairwiseReport& report);

}  // namespace pwsc

#endif  // PWSC_CERTIFY_HPP_
