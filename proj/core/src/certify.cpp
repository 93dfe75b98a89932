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

#include "pwsc/certify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include <Eigen/LU>

#include "pwsc/errors.hpp"
#include "pwsc/format.hpp"
#include "pwsc/sampling.hpp"

namespace pwsc {

std::string to_string(Strategy strategy) {
  return strategy == Strategy::vertex ? "vertex" : "grid";
}

std::string to_string(ConditionKind kind) {
  switch (kind) {
    case ConditionKind::flow:
      return "flow";
    case ConditionKind::jump:
      return "jump";
    case ConditionKind::equality:
      return "equality";
  }
  return "unknown";
}

namespace {

using Relation = LevelConstraint::Relation;

constexpr double kFeasibilityTol = 1e-9;

std::string label_of(const PwsSystem& system, std::size_t k) {
  const std::string& l = system.manifold(k).label();
  return l.empty() ? "H" + std::to_string(k + 1) : l;
}

std::string format_level(double v) {
  std::ostringstream os;
  os << v + 0.0;
  return os.str();
}

bool satisfies(const PwsSystem& system, const Domain& domain, const Vector& x, double tol) {
  for (const auto& c : domain.constraints) {
    const double h = system.manifold(c.manifold).value(x) - c.level;
    const double scale = tol * (1.0 + std::abs(c.level) + x.lpNorm<Eigen::Infinity>());
    switch (c.relation) {
      case Relation::le:
        if (h > scale) return false;
        break;
      case Relation::ge:
        if (h < -scale) return false;
        break;
      case Relation::eq:
        if (std::abs(h) > scale) return false;
        break;
    }
  }
  return true;
}

bool affine_data(const PwsSystem& system) { return system.is_affine(); }

void require_affine(const PwsSystem& system) {
  if (!affine_data(system)) {
    throw PreconditionError("vertex strategy requires affine modes and manifolds");
  }
}

// Combinations of `choose` indices out of [0, total).
void for_each_combination(int total, int choose, const std::function<void(const std::vector<int>&)>& fn) {
  if (choose < 0 || choose > total) return;
  std::vector<int> idx(static_cast<std::size_t>(choose));
  for (int i = 0; i < choose; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int i = choose - 1;
    while (i >= 0 && idx[i] == total - choose + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < choose; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

std::string Domain::describe(const PwsSystem& system) const {
  std::ostringstream os;
  os << "C";
  for (const auto& c : constraints) {
    os << " & " << label_of(system, c.manifold)
       << (c.relation == Relation::le ? " <= " : c.relation == Relation::ge ? " >= " : " = ")
       << format_level(c.level);
  }
  return os.str();
}

std::vector<Vector> domain_vertices(const PwsSystem& system, const Domain& domain) {
  for (const auto& c : domain.constraints) {
    if (!system.manifold(c.manifold).is_affine()) {
      throw PreconditionError("domain_vertices: manifolds must be affine");
    }
  }
  const AnalysisBox& box = system.box();
  const int n = box.dimension();

  // Rows a x = b that may be active: equalities always, then box faces and
  // inequality constraints.
  std::vector<Vector> eq_rows;
  std::vector<double> eq_rhs;
  std::vector<Vector> rows;
  std::vector<double> rhs;
  for (int i = 0; i < n; ++i) {
    Vector e = Vector::Zero(n);
    e(i) = 1.0;
    rows.push_back(e);
    rhs.push_back(box.upper()(i));
    rows.push_back(e);
    rhs.push_back(box.lower()(i));
  }
  for (const auto& c : domain.constraints) {
    const Manifold& m = system.manifold(c.manifold);
    (c.relation == Relation::eq ? eq_rows : rows).push_back(m.normal());
    (c.relation == Relation::eq ? eq_rhs : rhs).push_back(m.offset() + c.level);
  }
  const int n_eq = static_cast<int>(eq_rows.size());
  std::vector<Vector> out;
  if (n_eq > n) {
    // Overdetermined: solve in the least-squares sense and keep if exact.
    Matrix A(n_eq, n);
    Vector b(n_eq);
    for (int r = 0; r < n_eq; ++r) {
      A.row(r) = eq_rows[r].transpose();
      b(r) = eq_rhs[r];
    }
    const Vector x = A.colPivHouseholderQr().solve(b);
    if (box.contains(x, kFeasibilityTol) && satisfies(system, domain, x, kFeasibilityTol)) {
      out.push_back(x);
    }
    return out;
  }
  const double box_scale = 1.0 + std::max(box.lower().cwiseAbs().maxCoeff(),
                                          box.upper().cwiseAbs().maxCoeff());
  for_each_combination(static_cast<int>(rows.size()), n - n_eq, [&](const std::vector<int>& pick) {
    Matrix A(n, n);
    Vector b(n);
    int r = 0;
    for (int e = 0; e < n_eq; ++e, ++r) {
      A.row(r) = eq_rows[e].transpose();
      b(r) = eq_rhs[e];
    }
    for (int p : pick) {
      A.row(r) = rows[p].transpose();
      b(r) = rhs[p];
      ++r;
    }
    Eigen::FullPivLU<Matrix> lu(A);
    lu.setThreshold(1e-12);
    if (lu.rank() < n) return;
    Vector x = lu.solve(b);
    if (!x.allFinite()) return;
    if (!box.contains(x, kFeasibilityTol * box_scale)) return;
    if (!satisfies(system, domain, x, kFeasibilityTol)) return;
    for (int i = 0; i < n; ++i) x(i) = std::clamp(x(i), box.lower()(i), box.upper()(i));
    for (const Vector& v : out) {
      if ((v - x).lpNorm<Eigen::Infinity>() <= 1e-10 * box_scale) return;
    }
    out.push_back(std::move(x));
  });
  return out;
}

std::vector<Vector> domain_samples(const PwsSystem& system, const Domain& domain,
                                   const CertifyOptions& options) {
  const AnalysisBox& box = system.box();
  std::vector<Vector> candidates;
  const auto eq = std::find_if(domain.constraints.begin(), domain.constraints.end(),
                               [](const LevelConstraint& c) { return c.relation == Relation::eq; });
  if (eq != domain.constraints.end()) {
    candidates = sample_level_set(system.manifold(eq->manifold), box, options.manifold_points,
                                  eq->level);
  } else {
    // A slab lo <= H_k <= hi is sampled on level sets across its width.
    std::optional<std::pair<double, double>> slab;
    std::size_t slab_manifold = 0;
    for (const auto& a : domain.constraints) {
      if (a.relation != Relation::ge) continue;
      for (const auto& b : domain.constraints) {
        if (b.relation == Relation::le && b.manifold == a.manifold && !slab) {
          slab = std::make_pair(a.level, b.level);
          slab_manifold = a.manifold;
        }
      }
    }
    if (slab && slab->second >= slab->first) {
      const int levels = std::max(2, options.band_levels);
      for (int i = 0; i < levels; ++i) {
        const double level =
            slab->first + (slab->second - slab->first) * static_cast<double>(i) / (levels - 1);
        auto pts = sample_level_set(system.manifold(slab_manifold), box, options.manifold_points,
                                    level);
        candidates.insert(candidates.end(), pts.begin(), pts.end());
      }
    } else {
      candidates = detail::grid_points(box, options.region_points);
    }
  }
  std::vector<Vector> out;
  for (auto& x : candidates) {
    if (satisfies(system, domain, x, kFeasibilityTol)) out.push_back(std::move(x));
  }
  return out;
}

namespace {

using MatrixAt = std::function<Matrix(const Vector&)>;

struct Evaluator {
  const PwsSystem& system;
  const Metric& metric;
  const CertifyOptions& options;

  std::vector<Vector> points(const Domain& domain) const {
    if (options.strategy == Strategy::vertex) return domain_vertices(system, domain);
    return domain_samples(system, domain, options);
  }

  ConditionResult base(std::string id, const Domain& domain, ConditionKind kind, double bound,
                       double tolerance) const {
    ConditionResult r;
    r.id = std::move(id);
    r.domain = domain.describe(system);
    r.kind = kind;
    r.bound = bound;
    r.tolerance = tolerance;
    r.method = options.strategy;
    return r;
  }

  static void finish(ConditionResult& r) {
    if (r.empty_domain) {
      r.worst = -std::numeric_limits<double>::infinity();
      r.margin = std::numeric_limits<double>::infinity();
      r.passed = true;
      return;
    }
    r.margin = r.bound - r.worst;
    r.passed = r.margin >= -r.tolerance;
  }

  // Measure condition max_x mu_Q(M(x)) <= bound. Constant matrices are
  // evaluated once per domain.
  ConditionResult measure(std::string id, const Domain& domain, ConditionKind kind, double bound,
                          double tolerance, const MatrixAt& matrix_at, bool constant) const {
    ConditionResult r = base(std::move(id), domain, kind, bound, tolerance);
    const std::vector<Vector> pts = points(domain);
    r.empty_domain = pts.empty();
    if (!r.empty_domain) {
      const std::size_t count = constant && options.strategy == Strategy::vertex ? 1 : pts.size();
      r.worst = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < count; ++i) {
        const double v = metric.measure(matrix_at(pts[i]));
        if (v > r.worst || !r.point) {
          r.worst = v;
          r.point = pts[i];
        }
      }
      r.evaluations = count;
    }
    finish(r);
    return r;
  }

  ConditionResult residual(std::string id, const Domain& domain,
                           const std::function<Vector(const Vector&)>& vec_at) const {
    ConditionResult r = base(std::move(id), domain, ConditionKind::equality, 0.0, options.tol_eq);
    const std::vector<Vector> pts = points(domain);
    r.empty_domain = pts.empty();
    if (!r.empty_domain) {
      r.worst = -std::numeric_limits<double>::infinity();
      for (const Vector& x : pts) {
        const double v = vec_at(x).norm();
        if (v > r.worst) {
          r.worst = v;
          r.point = x;
        }
      }
      r.evaluations = pts.size();
    }
    finish(r);
    return r;
  }
};

void validate_metric(const PwsSystem& system, const Metric& metric) {
  if (metric.dimension() != system.dimension()) {
    throw PreconditionError("metric dimension does not match the system");
  }
}

MatrixAt mode_jacobian(const PwsSystem& system, std::size_t i) {
  return [&system, i](const Vector& x) { return system.mode(i).jacobian(x); };
}

// sum_k coeff_k f_k(x) grad H_m(x)^T
MatrixAt combination(const PwsSystem& system, std::vector<double> coeff, std::size_t m) {
  return [&system, coeff = std::move(coeff), m](const Vector& x) {
    Vector v = Vector::Zero(system.dimension());
    for (std::size_t k = 0; k < coeff.size(); ++k) {
      if (coeff[k] != 0.0) v += coeff[k] * system.mode(k).field(x);
    }
    return Matrix(v * system.manifold(m).gradient(x).transpose());
  };
}

// Sign combinations of the planar cross sectors.
std::vector<double> sector_coefficients(const PwsSystem& system, int which) {
  std::vector<double> c(4);
  for (std::size_t k = 0; k < 4; ++k) {
    const int s1 = system.region_sign(k, 0);
    const int s2 = system.region_sign(k, 1);
    c[k] = which == 0 ? s1 : which == 1 ? s2 : s1 * s2;
  }
  return c;
}

std::vector<double> scaled(std::vector<double> v, double s) {
  for (double& x : v) x *= s;
  return v;
}

void finalize(CertificateReport& report) {
  report.passed = std::all_of(report.conditions.begin(), report.conditions.end(),
                              [](const ConditionResult& c) { return c.passed; });
}

void require_intersection(const PwsSystem& system) {
  const IntersectionCheck check = check_intersection_assumption(system);
  if (!check.holds) {
    throw AssumptionError("intersection assumption fails: " + check.diagnostic);
  }
}

LevelConstraint le(std::size_t m, double level) { return {m, Relation::le, level}; }
LevelConstraint ge(std::size_t m, double level) { return {m, Relation::ge, level}; }
LevelConstraint eq(std::size_t m, double level) { return {m, Relation::eq, level}; }

std::string manifold_id(std::size_t m) { return std::to_string(m + 1); }

void check_bands_disjoint(const PwsSystem& system, double eps, const CertifyOptions& options) {
  // Closed bands shrunk by a relative hair so that exactly touching bands
  // (open bands disjoint) are accepted.
  const double w = eps * (1.0 - 1e-9);
  for (std::size_t a = 0; a < system.num_manifolds(); ++a) {
    for (std::size_t b = a + 1; b < system.num_manifolds(); ++b) {
      Domain both{{ge(a, -w), le(a, w), ge(b, -w), le(b, w)}};
      bool meet = false;
      if (system.manifold(a).is_affine() && system.manifold(b).is_affine()) {
        meet = !domain_vertices(system, both).empty();
      } else {
        meet = !domain_samples(system, both, options).empty();
      }
      if (meet) {
        throw PreconditionError("bands intersect - chain regularization invalid (" +
                                label_of(system, a) + ", " + label_of(system, b) + ")");
      }
    }
  }
}

CertificateReport chain_report(const PwsSystem& system, const Metric& metric,
                               std::optional<double> eps, const CertifyOptions& options) {
  if (system.topology() != Topology::chain) {
    throw TopologyError("chain certificate requested for a planar cross system");
  }
  validate_metric(system, metric);
  if (options.strategy == Strategy::vertex) require_affine(system);
  const double e = eps.value_or(0.0);
  if (eps) check_bands_disjoint(system, e, options);

  CertificateReport report{eps ? "regularized_chain" : "chain", {}, metric, eps, false};
  const Evaluator ev{system, metric, options};
  const std::size_t modes = system.num_modes();
  for (std::size_t i = 0; i < modes; ++i) {
    Domain d;
    if (i > 0) d.constraints.push_back(ge(i - 1, -e));
    if (i < system.num_manifolds()) d.constraints.push_back(le(i, e));
    report.conditions.push_back(ev.measure("flow.mode" + std::to_string(i + 1), d,
                                           ConditionKind::flow, -metric.rate(), options.tol_flow,
                                           mode_jacobian(system, i), system.mode(i).is_affine()));
  }
  for (std::size_t k = 0; k < system.num_manifolds(); ++k) {
    Domain d = eps ? Domain{{ge(k, -e), le(k, e)}} : Domain{{eq(k, 0.0)}};
    std::vector<double> coeff(modes, 0.0);
    coeff[k] = -1.0;
    coeff[k + 1] = 1.0;
    report.conditions.push_back(ev.measure("jump." + manifold_id(k), d, ConditionKind::jump, 0.0,
                                           options.tol_zero, combination(system, coeff, k),
                                           false));
  }
  finalize(report);
  return report;
}

}  // namespace

double CertificateReport::margin() const {
  double flow = std::numeric_limits<double>::infinity();
  double violation = std::numeric_limits<double>::infinity();
  for (const auto& c : conditions) {
    if (c.empty_domain) continue;
    if (c.kind == ConditionKind::flow) {
      flow = std::min(flow, c.margin);
    } else if (!c.passed) {
      violation = std::min(violation, c.margin);
    }
  }
  if (std::isfinite(violation)) return std::min(violation, flow);
  return flow;
}

std::optional<double> CertificateReport::certified_rate() const {
  if (!passed) return std::nullopt;
  return metric.rate();
}

const ConditionResult& CertificateReport::condition(const std::string& id) const {
  for (const auto& c : conditions) {
    if (c.id == id) return c;
  }
  throw PreconditionError("no condition with id " + id);
}

CertificateReport check_chain_certificate(const PwsSystem& system, const Metric& metric,
                                          const CertifyOptions& options) {
  return chain_report(system, metric, std::nullopt, options);
}

CertificateReport check_regularized_chain(const PwsSystem& system, const Metric& metric,
                                          double eps, const CertifyOptions& options) {
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
  return chain_report(system, metric, eps, options);
}

CertificateReport check_cross_certificate(const PwsSystem& system, const Metric& metric,
                                          const CertifyOptions& options) {
  if (system.topology() != Topology::planar_cross) {
    throw TopologyError("planar cross certificate requested for a chain system");
  }
  validate_metric(system, metric);
  if (options.strategy == Strategy::vertex) require_affine(system);
  require_intersection(system);

  CertificateReport report{"planar_cross", {}, metric, std::nullopt, false};
  const Evaluator ev{system, metric, options};
  for (std::size_t k = 0; k < 4; ++k) {
    Domain d{{system.region_sign(k, 0) > 0 ? ge(0, 0.0) : le(0, 0.0),
              system.region_sign(k, 1) > 0 ? ge(1, 0.0) : le(1, 0.0)}};
    report.conditions.push_back(ev.measure("flow.mode" + std::to_string(k + 1), d,
                                           ConditionKind::flow, -metric.rate(), options.tol_flow,
                                           mode_jacobian(system, k), system.mode(k).is_affine()));
  }
  for (std::size_t m = 0; m < 2; ++m) {
    report.conditions.push_back(ev.measure(
        "manifold." + manifold_id(m), Domain{{eq(m, 0.0)}}, ConditionKind::jump, 0.0,
        options.tol_zero, combination(system, sector_coefficients(system, static_cast<int>(m)), m),
        false));
  }
  const std::vector<double> mixed = sector_coefficients(system, 2);
  for (std::size_t m = 0; m < 2; ++m) {
    const std::size_t other = 1 - m;
    report.conditions.push_back(ev.measure("half." + manifold_id(m) + ".pos",
                                           Domain{{eq(m, 0.0), ge(other, 0.0)}},
                                           ConditionKind::jump, 0.0, options.tol_zero,
                                           combination(system, mixed, m), false));
    report.conditions.push_back(ev.measure("half." + manifold_id(m) + ".neg",
                                           Domain{{eq(m, 0.0), le(other, 0.0)}},
                                           ConditionKind::jump, 0.0, options.tol_zero,
                                           combination(system, scaled(mixed, -1.0), m), false));
  }
  {
    const Vector xt = intersection_point(system);
    ConditionResult r;
    r.id = "equality.intersection";
    r.domain = "intersection point";
    r.kind = ConditionKind::equality;
    r.tolerance = options.tol_eq;
    r.method = options.strategy;
    Vector v = Vector::Zero(2);
    for (std::size_t k = 0; k < 4; ++k) v += mixed[k] * system.mode(k).field(xt);
    r.worst = v.norm();
    r.margin = -r.worst;
    r.point = xt;
    r.evaluations = 1;
    r.passed = r.margin >= -r.tolerance;
    report.conditions.push_back(std::move(r));
  }
  finalize(report);
  return report;
}

CertificateReport check_regularized_cross(const PwsSystem& system, const Metric& metric,
                                          double eps, const CertifyOptions& options) {
  if (system.topology() != Topology::planar_cross) {
    throw TopologyError("planar cross certificate requested for a chain system");
  }
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
  validate_metric(system, metric);
  if (options.strategy == Strategy::vertex) require_affine(system);
  require_intersection(system);

  CertificateReport report{"regularized_cross", {}, metric, eps, false};
  const Evaluator ev{system, metric, options};
  for (std::size_t k = 0; k < 4; ++k) {
    Domain d{{system.region_sign(k, 0) > 0 ? ge(0, -eps) : le(0, eps),
              system.region_sign(k, 1) > 0 ? ge(1, -eps) : le(1, eps)}};
    report.conditions.push_back(ev.measure("flow.mode" + std::to_string(k + 1), d,
                                           ConditionKind::flow, -metric.rate(), options.tol_flow,
                                           mode_jacobian(system, k), system.mode(k).is_affine()));
  }
  for (std::size_t m = 0; m < 2; ++m) {
    report.conditions.push_back(ev.measure(
        "band." + manifold_id(m), Domain{{ge(m, -eps), le(m, eps)}}, ConditionKind::jump, 0.0,
        options.tol_zero,
        combination(system, sector_coefficients(system, static_cast<int>(m)), m), false));
  }
  // Band pieces outside the central square: the band of manifold m with the
  // other switching function beyond +eps or -eps.
  const std::vector<double> mixed = sector_coefficients(system, 2);
  for (std::size_t m = 0; m < 2; ++m) {
    const std::size_t other = 1 - m;
    report.conditions.push_back(ev.measure("band." + manifold_id(m) + ".pos",
                                           Domain{{ge(m, -eps), le(m, eps), ge(other, eps)}},
                                           ConditionKind::jump, 0.0, options.tol_zero,
                                           combination(system, mixed, m), false));
    report.conditions.push_back(ev.measure("band." + manifold_id(m) + ".neg",
                                           Domain{{ge(m, -eps), le(m, eps), le(other, -eps)}},
                                           ConditionKind::jump, 0.0, options.tol_zero,
                                           combination(system, scaled(mixed, -1.0), m), false));
  }
  report.conditions.push_back(
      ev.residual("equality.square", Domain{{ge(0, -eps), le(0, eps), ge(1, -eps), le(1, eps)}},
                  [&system, &mixed](const Vector& x) {
                    Vector v = Vector::Zero(system.dimension());
                    for (std::size_t k = 0; k < 4; ++k) v += mixed[k] * system.mode(k).field(x);
                    return v;
                  }));
  finalize(report);
  return report;
}

CertificateReport check_certificate(const PwsSystem& system, const Metric& metric,
                                    const CertifyOptions& options) {
  return system.topology() == Topology::chain ? check_chain_certificate(system, metric, options)
                                              : check_cross_certificate(system, metric, options);
}

CertificateReport check_regularized_certificate(const PwsSystem& system, const Metric& metric,
                                                double eps, const CertifyOptions& options) {
  return system.topology() == Topology::chain
             ? check_regularized_chain(system, metric, eps, options)
             : check_regularized_cross(system, metric, eps, options);
}

// ------------------------------------------------------------- JSON

namespace {

std::string json_number(double v) { return std::isfinite(v) ? format_double(v) : "null"; }

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    switch (ch) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      default:
        out += ch;
    }
  }
  return out + "\"";
}

std::string json_vector(const Vector& v) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += json_number(v(i));
  }
  return out + "]";
}

std::string json_matrix(const Matrix& m) {
  std::string out = "[";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (r) out += ", ";
    out += json_vector(m.row(r).transpose());
  }
  return out + "]";
}

}  // namespace

void write_report_json(std::ostream& out, const CertificateReport& report) {
  out << "{\n";
  out << "  \"check\": " << json_string(report.check) << ",\n";
  out << "  \"verdict\": " << json_string(report.passed ? "pass" : "fail") << ",\n";
  out << "  \"passed\": " << (report.passed ? "true" : "false") << ",\n";
  out << "  \"margin\": " << json_number(report.margin()) << ",\n";
  out << "  \"metric\": {\"Q\": " << json_matrix(report.metric.Q())
      << ", \"c\": " << json_number(report.metric.rate()) << "},\n";
  const auto rate = report.certified_rate();
  out << "  \"certified_rate\": " << (rate ? json_number(*rate) : "null") << ",\n";
  if (report.eps) out << "  \"eps\": " << json_number(*report.eps) << ",\n";
  out << "  \"conditions\": [";
  for (std::size_t i = 0; i < report.conditions.size(); ++i) {
    const auto& c = report.conditions[i];
    out << (i ? ",\n" : "\n") << "    {\"id\": " << json_string(c.id)
        << ", \"domain\": " << json_string(c.domain)
        << ", \"kind\": " << json_string(to_string(c.kind))
        << ", \"bound\": " << json_number(c.bound) << ", \"worst\": " << json_number(c.worst)
        << ", \"margin\": " << json_number(c.margin)
        << ", \"tolerance\": " << json_number(c.tolerance)
        << ", \"point\": " << (c.point ? json_vector(*c.point) : "null")
        << ", \"method\": " << json_string(to_string(c.method))
        << ", \"evaluations\": " << c.evaluations
        << ", \"empty_domain\": " << (c.empty_domain ? "true" : "false")
        << ", \"passed\": " << (c.passed ? "true" : "false") << "}";
  }
  out << "\n  ]\n}\n";
}

// --------------------------------------------------------- pairwise

std::vector<std::pair<Vector, Vector>> random_pairs(const AnalysisBox& box, std::size_t count,
                                                    std::uint64_t seed) {
  SeededUniform rng(seed);
  std::vector<std::pair<Vector, Vector>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Vector a = rng.point_in(box);
    Vector b = rng.point_in(box);
    out.emplace_back(std::move(a), std::move(b));
  }
  return out;
}

PairwiseReport pairwise_contraction_test(const PwsSystem& system, const Metric& metric,
                                         const std::vector<std::pair<Vector, Vector>>& pairs,
                                         double t_final, const PairwiseOptions& options) {
  validate_metric(system, metric);
  if (!(options.tol_decay >= 0.0)) throw PreconditionError("tol_decay must be >= 0");
  PairwiseReport report{metric, options.tol_decay, t_final, {}, true};
  const double c = metric.rate();
  const double allowed = std::log1p(options.tol_decay);
  const double cond = spd_condition(metric.Q());

  for (const auto& [xa0, xb0] : pairs) {
    PairResult r;
    r.xa0 = xa0;
    r.xb0 = xb0;
    r.initial_distance = metric.norm(xa0 - xb0);
    if (r.initial_distance <= options.noise_floor) {
      r.coincident = true;
      r.passed = true;
      report.pairs.push_back(std::move(r));
      continue;
    }
    const Trajectory ta = integrate(system, xa0, t_final, options.solver);
    const Trajectory tb = integrate(system, xb0, t_final, options.solver);
    const auto ga = ta.grid_samples();
    const auto gb = tb.grid_samples();
    const std::size_t shared = std::min(ga.size(), gb.size());
    const double g0 = std::log(r.initial_distance);
    // max over s < t of g(t) - g(s) is g(t) minus the running minimum.
    double running_min = std::numeric_limits<double>::infinity();
    double max_scaled = r.initial_distance;
    r.max_log_growth = 0.0;
    r.max_window_growth = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < shared; ++k) {
      if (ga[k] == nullptr || gb[k] == nullptr) continue;
      const double d = metric.norm(ga[k]->x - gb[k]->x);
      if (d <= options.noise_floor) continue;
      const double t = ga[k]->t;
      const double g = std::log(d) + c * t;
      ++r.grid_points;
      r.max_log_growth = std::max(r.max_log_growth, g - g0);
      if (std::isfinite(running_min)) {
        r.max_window_growth = std::max(r.max_window_growth, g - running_min);
      }
      running_min = std::min(running_min, g);
      max_scaled = std::max(max_scaled, std::exp(g));
    }
    if (!std::isfinite(r.max_window_growth)) r.max_window_growth = 0.0;
    r.alpha = cond * max_scaled / r.initial_distance;
    r.passed = r.max_window_growth <= allowed;
    report.passed = report.passed && r.passed;
    report.pairs.push_back(std::move(r));
  }
  return report;
}

void write_pairwise_json(std::ostream& out, const PairwiseReport& report) {
  out << "{\n";
  out << "  \"verdict\": " << json_string(report.passed ? "pass" : "fail") << ",\n";
  out << "  \"passed\": " << (report.passed ? "true" : "false") << ",\n";
  out << "  \"metric\": {\"Q\": " << json_matrix(report.metric.Q())
      << ", \"c\": " << json_number(report.metric.rate()) << "},\n";
  out << "  \"tol_decay\": " << json_number(report.tol_decay) << ",\n";
  out << "  \"t_final\": " << json_number(report.t_final) << ",\n";
  out << "  \"pairs\": [";
  for (std::size_t i = 0; i < report.pairs.size(); ++i) {
    const auto& p = report.pairs[i];
    out << (i ? ",\n" : "\n") << "    {\"xa0\": " << json_vector(p.xa0)
        << ", \"xb0\": " << json_vector(p.xb0)
        << ", \"initial_distance\": " << json_number(p.initial_distance)
        << ", \"max_log_growth\": " << json_number(p.max_log_growth)
        << ", \"max_window_growth\": " << json_number(p.max_window_growth)
        << ", \"alpha\": " << json_number(p.alpha) << ", \"grid_points\": " << p.grid_points
        << ", \"coincident\": " << (p.coincident ? "true" : "false")
        << ", \"passed\": " << (p.passed ? "true" : "false") << "}";
  }
  out << "\n  ]\n}\n";
}

}  // namespace pwsc
