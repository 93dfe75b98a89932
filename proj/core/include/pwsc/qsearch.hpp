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
 * Search for a contraction metric.
 *
 * Q = L L^T with L lower triangular, diagonal entries exp(theta), and Q
 * rescaled so that its largest diagonal entry is 1. For each trial rate c a
 * Nelder-Mead search maximizes the certificate margin over theta; an outer
 * bisection on c keeps the largest rate with a passing, positive-margin
 * certificate.
 */

#ifndef PWSC_QSEARCH_HPP_
#define PWSC_QSEARCH_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "pwsc/certify.hpp"

namespace pwsc {

struct SearchOptions {
  double c_lo = 0.0;
  double c_hi = 10.0;
  double c_tol = 1e-3;
  int max_iterations = 300;  ///< Nelder-Mead iterations per start
  int restarts = 3;          ///< random starts besides identity and warm start
  std::uint64_t seed = 1;
  /// Metrics with cond(Q) above this are not considered.
  double max_condition = 1e6;
  CertifyOptions certify;
};

struct SearchTraceEntry {
  double c = 0.0;
  bool feasible = false;
  double margin = 0.0;
};

struct SearchResult {
  Metric metric;
  CertificateReport report;
  std::vector<SearchTraceEntry> trace;
};

/// Certificate margin of (Q, c): positive iff the certificate passes with
/// room to spare.
double margin(const PwsSystem& system, const Metric& metric,
              const CertifyOptions& options = {});

/// Largest rate found together with its metric and passing report, or
/// nullopt when no rate in [c_lo, c_hi] admits a metric. Deterministic for
/// a fixed seed.
std::optional<SearchResult> search_certificate(const PwsSystem& system,
                                               const SearchOptions& options = {});

/// Q from Cholesky-factor parameters (n (n + 1) / 2 values, row-major lower
/// triangle, diagonal through exp), normalized to max diagonal 1.
Matrix metric_from_parameters(const Vector& theta, int n);

namespace detail {

struct NelderMeadResult {
  Vector x;
  double value = 0.0;
  int iterations = 0;
};

/// Maximizes f from x0 with an axis-aligned initial simplex of size step.
NelderMeadResult nelder_mead_maximize(const std::function<double(const Vector&)>& f,
                                      const Vector& x0, double step, int max_iterations,
                                      double tol = 1e-12);

}  // namespace detail
}  // namespace pwsc

#endif  // PWSC_QSEARCH_HPP_
