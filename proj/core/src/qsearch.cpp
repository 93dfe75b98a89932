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

#include "pwsc/qsearch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pwsc/errors.hpp"
#include "pwsc/sampling.hpp"

namespace pwsc {

double margin(const PwsSystem& system, const Metric& metric, const CertifyOptions& options) {
  return check_certificate(system, metric, options).margin();
}

Matrix metric_from_parameters(const Vector& theta, int n) {
  if (theta.size() != n * (n + 1) / 2) {
    throw PreconditionError("metric_from_parameters: wrong parameter count");
  }
  Matrix L = Matrix::Zero(n, n);
  Eigen::Index p = 0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c <= r; ++c) {
      L(r, c) = r == c ? std::exp(std::clamp(theta(p), -30.0, 30.0)) : theta(p);
      ++p;
    }
  }
  Matrix Q = L * L.transpose();
  Q /= Q.diagonal().maxCoeff();
  return 0.5 * (Q + Q.transpose());
}

namespace detail {

NelderMeadResult nelder_mead_maximize(const std::function<double(const Vector&)>& f,
                                      const Vector& x0, double step, int max_iterations,
                                      double tol) {
  const Eigen::Index n = x0.size();
  std::vector<Vector> pts;
  std::vector<double> vals;
  pts.push_back(x0);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector x = x0;
    x(i) += step;
    pts.push_back(x);
  }
  for (const auto& x : pts) vals.push_back(f(x));

  std::vector<std::size_t> order(pts.size());
  NelderMeadResult out;
  for (out.iterations = 0; out.iterations < max_iterations; ++out.iterations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[order.size() - 2];
    if (std::abs(vals[best] - vals[worst]) <= tol * (1.0 + std::abs(vals[best]))) break;

    Vector centroid = Vector::Zero(n);
    for (std::size_t i = 0; i + 1 < order.size(); ++i) centroid += pts[order[i]];
    centroid /= static_cast<double>(n);

    const Vector xr = centroid + (centroid - pts[worst]);
    const double fr = f(xr);
    if (fr > vals[best]) {
      const Vector xe = centroid + 2.0 * (centroid - pts[worst]);
      const double fe = f(xe);
      if (fe > fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
      continue;
    }
    if (fr > vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr > vals[worst];
    const Vector xc = outside ? Vector(centroid + 0.5 * (xr - centroid))
                              : Vector(centroid + 0.5 * (pts[worst] - centroid));
    const double fc = f(xc);
    if (fc > std::max(outside ? fr : vals[worst], vals[worst])) {
      pts[worst] = xc;
      vals[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i == best) continue;
      pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
      vals[i] = f(pts[i]);
    }
  }
  const auto it = std::max_element(vals.begin(), vals.end());
  out.x = pts[static_cast<std::size_t>(it - vals.begin())];
  out.value = *it;
  return out;
}

}  // namespace detail

namespace {

// Flow margin with an exact penalty on violated zero-bound and equality
// terms, so that the maximizer lands on the feasible set.
double penalized_margin(const CertificateReport& report) {
  double flow = std::numeric_limits<double>::infinity();
  double penalty = 0.0;
  for (const auto& c : report.conditions) {
    if (c.empty_domain) continue;
    if (c.kind == ConditionKind::flow) {
      flow = std::min(flow, c.margin);
    } else if (c.margin < 0.0) {
      penalty += c.margin;
    }
  }
  if (!std::isfinite(flow)) flow = 0.0;
  return flow + 100.0 * penalty;
}

bool lexicographic_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) != b(i)) return a(i) < b(i);
  }
  return false;
}

struct Attempt {
  Vector theta;
  std::optional<CertificateReport> report;  // set when feasible
  double margin = -std::numeric_limits<double>::infinity();
};

class Searcher {
 public:
  Searcher(const PwsSystem& system, const SearchOptions& options)
      : sys_(system), opt_(options), n_(system.dimension()),
        params_(n_ * (n_ + 1) / 2) {}

  Attempt attempt(double c) {
    std::vector<Vector> starts;
    if (warm_) starts.push_back(*warm_);
    starts.push_back(Vector::Zero(params_));
    SeededUniform rng(opt_.seed ^ 0x9e3779b97f4a7c15ULL);
    for (int r = 0; r < opt_.restarts; ++r) {
      Vector t(params_);
      for (Eigen::Index i = 0; i < params_; ++i) t(i) = rng.uniform(-1.0, 1.0);
      starts.push_back(t);
    }
    const auto objective = [&](const Vector& theta) {
      const auto report = try_evaluate(theta, c);
      return report ? penalized_margin(*report) : -std::numeric_limits<double>::max();
    };

    Attempt best;
    double best_obj = -std::numeric_limits<double>::infinity();
    for (const Vector& s : starts) {
      auto nm = detail::nelder_mead_maximize(objective, s, 0.5, opt_.max_iterations);
      for (const Vector& candidate : polish(nm.x)) {
        const auto checked = try_evaluate(candidate, c);
        if (!checked) continue;
        const CertificateReport& report = *checked;
        const double obj = penalized_margin(report);
        const bool feasible = report.passed && report.margin() > 0.0;
        const bool better = (feasible && !best.report) ||
                            (feasible == static_cast<bool>(best.report) &&
                             (obj > best_obj ||
                              (obj == best_obj && lexicographic_less(candidate, best.theta))));
        if (better) {
          best_obj = obj;
          best.theta = candidate;
          best.margin = report.margin();
          best.report.reset();
          if (feasible) best.report.emplace(report);
        }
      }
    }
    warm_ = best.theta;
    return best;
  }

  Metric metric_for(const Vector& theta, double c) const {
    return Metric(metric_from_parameters(theta, n_), c);
  }

 private:
  // Parameters whose Q is too ill-conditioned for the measure are rejected.
  std::optional<CertificateReport> try_evaluate(const Vector& theta, double c) const {
    try {
      const Matrix Q = metric_from_parameters(theta, n_);
      if (!(spd_condition(Q) <= opt_.max_condition)) return std::nullopt;
      return check_certificate(sys_, Metric(Q, c), opt_.certify);
    } catch (const NumericalError&) {
      return std::nullopt;
    } catch (const PreconditionError&) {
      return std::nullopt;
    }
  }

  // The optimizer plus copies with negligible or all off-diagonal factor
  // entries set to zero; structured data often needs exactly diagonal Q.
  std::vector<Vector> polish(const Vector& theta) const {
    std::vector<Vector> out{theta};
    Vector snapped = theta;
    Vector diagonal = theta;
    Eigen::Index p = 0;
    for (int r = 0; r < n_; ++r) {
      for (int col = 0; col <= r; ++col, ++p) {
        if (r == col) continue;
        if (std::abs(snapped(p)) < 1e-4) snapped(p) = 0.0;
        diagonal(p) = 0.0;
      }
    }
    out.push_back(snapped);
    out.push_back(diagonal);
    return out;
  }

  const PwsSystem& sys_;
  const SearchOptions& opt_;
  int n_;
  Eigen::Index params_;
  std::optional<Vector> warm_;
};

}  // namespace

std::optional<SearchResult> search_certificate(const PwsSystem& system,
                                               const SearchOptions& options) {
  if (!(options.c_lo >= 0.0) || !(options.c_hi > options.c_lo) || !(options.c_tol > 0.0)) {
    throw PreconditionError("search_certificate: need 0 <= c_lo < c_hi and c_tol > 0");
  }
  if (options.max_iterations < 1 || options.restarts < 0 || !(options.max_condition >= 1.0)) {
    throw PreconditionError("search_certificate: invalid iteration budget");
  }
  Searcher searcher(system, options);
  std::vector<SearchTraceEntry> trace;
  std::optional<std::pair<Vector, CertificateReport>> best;
  double best_c = 0.0;

  auto try_rate = [&](double c) {
    Attempt a = searcher.attempt(c);
    trace.push_back({c, static_cast<bool>(a.report), a.margin});
    if (a.report) {
      if (!best || c > best_c) {
        best.emplace(a.theta, *a.report);
        best_c = c;
      }
      return true;
    }
    return false;
  };

  double lo = options.c_lo;
  double hi = options.c_hi;
  if (!try_rate(lo)) return std::nullopt;
  if (try_rate(hi)) {
    lo = hi;
  } else {
    while (hi - lo > options.c_tol) {
      const double mid = 0.5 * (lo + hi);
      if (try_rate(mid)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
  }

  // Soundness: the returned metric is re-checked from scratch.
  const Metric metric = searcher.metric_for(best->first, best_c);
  CertificateReport report = check_certificate(system, metric, options.certify);
  if (!report.passed) {
    throw SolverError("search_certificate: re-check of the returned metric failed");
  }
  return SearchResult{metric, std::move(report), std::move(trace)};
}

}  // namespace pwsc
