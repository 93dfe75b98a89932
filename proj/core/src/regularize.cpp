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

#include "pwsc/regularize.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <ostream>

#include "pwsc/errors.hpp"
#include "pwsc/format.hpp"
#include "pwsc/integration.hpp"

namespace pwsc {

double phi(double s) { return std::clamp(s, -1.0, 1.0); }

double phi_prime(double s) { return std::abs(s) <= 1.0 ? 1.0 : 0.0; }

RegularizedSystem::RegularizedSystem(PwsSystem base, double eps)
    : base_(std::move(base)), eps_(eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw PreconditionError("regularization width eps must be positive and finite");
  }
}

Vector RegularizedSystem::weights(const Vector& x) const {
  const std::size_t modes = base_.num_modes();
  Vector w = Vector::Zero(static_cast<Eigen::Index>(modes));
  if (base_.topology() == Topology::chain) {
    double upper = 1.0;  // phi of the manifold below mode i, +1 for the first mode
    for (std::size_t i = 0; i < modes; ++i) {
      const double lower =
          i < base_.num_manifolds() ? phi(base_.manifold(i).value(x) / eps_) : -1.0;
      w(static_cast<Eigen::Index>(i)) = 0.5 * (upper - lower);
      upper = lower;
    }
    return w;
  }
  const double p1 = phi(base_.manifold(0).value(x) / eps_);
  const double p2 = phi(base_.manifold(1).value(x) / eps_);
  for (std::size_t k = 0; k < 4; ++k) {
    w(static_cast<Eigen::Index>(k)) = 0.25 * (1.0 + base_.region_sign(k, 0) * p1) *
                                      (1.0 + base_.region_sign(k, 1) * p2);
  }
  return w;
}

Matrix RegularizedSystem::weight_gradients(const Vector& x) const {
  const std::size_t modes = base_.num_modes();
  const int n = base_.dimension();
  Matrix g = Matrix::Zero(n, static_cast<Eigen::Index>(modes));
  if (base_.topology() == Topology::chain) {
    for (std::size_t k = 0; k < base_.num_manifolds(); ++k) {
      const Manifold& mf = base_.manifold(k);
      const double slope = phi_prime(mf.value(x) / eps_);
      if (slope == 0.0) continue;
      const Vector dphi = (slope / eps_) * mf.gradient(x);
      // phi_k enters w_k with -1/2 and w_{k+1} with +1/2.
      g.col(static_cast<Eigen::Index>(k)) -= 0.5 * dphi;
      g.col(static_cast<Eigen::Index>(k + 1)) += 0.5 * dphi;
    }
    return g;
  }
  const Manifold& m1 = base_.manifold(0);
  const Manifold& m2 = base_.manifold(1);
  const double h1 = m1.value(x) / eps_;
  const double h2 = m2.value(x) / eps_;
  const Vector d1 = (phi_prime(h1) / eps_) * m1.gradient(x);
  const Vector d2 = (phi_prime(h2) / eps_) * m2.gradient(x);
  for (std::size_t k = 0; k < 4; ++k) {
    const double s1 = base_.region_sign(k, 0);
    const double s2 = base_.region_sign(k, 1);
    g.col(static_cast<Eigen::Index>(k)) =
        0.25 * (s1 * (1.0 + s2 * phi(h2)) * d1 + s2 * (1.0 + s1 * phi(h1)) * d2);
  }
  return g;
}

Vector RegularizedSystem::field(const Vector& x) const {
  const Vector w = weights(x);
  Vector out = Vector::Zero(base_.dimension());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w(i) != 0.0) out += w(i) * base_.mode(static_cast<std::size_t>(i)).field(x);
  }
  return out;
}

Matrix RegularizedSystem::jacobian(const Vector& x) const {
  const Vector w = weights(x);
  const Matrix g = weight_gradients(x);
  const int n = base_.dimension();
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const Mode& mode = base_.mode(static_cast<std::size_t>(i));
    if (w(i) != 0.0) out += w(i) * mode.jacobian(x);
    if (!g.col(i).isZero(0.0)) out += mode.field(x) * g.col(i).transpose();
  }
  return out;
}

bool RegularizedSystem::in_band(const Vector& x) const {
  return std::any_of(base_.manifolds().begin(), base_.manifolds().end(),
                     [&](const Manifold& m) { return std::abs(m.value(x)) < eps_; });
}

namespace {

void require_topology(const PwsSystem& system, Topology topology, const char* what) {
  if (system.topology() != topology) {
    throw TopologyError(std::string(what) + ": system has topology " +
                        std::string(to_string(system.topology())));
  }
}

}  // namespace

Vector regularized_field_chain(const PwsSystem& system, double eps, const Vector& x) {
  require_topology(system, Topology::chain, "regularized_field_chain");
  return RegularizedSystem(system, eps).field(x);
}

Vector regularized_field_cross(const PwsSystem& system, double eps, const Vector& x) {
  require_topology(system, Topology::planar_cross, "regularized_field_cross");
  return RegularizedSystem(system, eps).field(x);
}

Matrix regularized_jacobian_chain(const PwsSystem& system, double eps, const Vector& x) {
  require_topology(system, Topology::chain, "regularized_jacobian_chain");
  return RegularizedSystem(system, eps).jacobian(x);
}

Matrix regularized_jacobian_cross(const PwsSystem& system, double eps, const Vector& x) {
  require_topology(system, Topology::planar_cross, "regularized_jacobian_cross");
  return RegularizedSystem(system, eps).jacobian(x);
}

Trajectory integrate_regularized(const PwsSystem& system, double eps, const Vector& x0,
                                 double t_final, const SolverOptions& options) {
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) {
    throw PreconditionError("integrate_regularized: final time must be finite and >= 0");
  }
  if (x0.size() != system.dimension() || !x0.allFinite()) {
    throw PreconditionError("integrate_regularized: initial state must be finite and match "
                            "the dimension");
  }
  const RegularizedSystem reg(system, eps);
  const detail::StepGrid grid(options.step, t_final);
  const auto f = [&reg](const Vector& y) { return reg.field(y); };
  const double band_step = eps / 10.0;

  Trajectory traj;
  traj.step = grid.step();
  Segment seg;
  seg.kind = SegmentKind::regularized;
  traj.segments.push_back(seg);

  Vector x = x0;
  traj.samples.push_back(Sample{0.0, x, 0, std::nullopt, 0});
  for (long long k = 1; k <= grid.steps(); ++k) {
    const double t0 = grid.time(k - 1);
    const double dt = grid.time(k) - t0;
    const Vector fx = f(x);
    bool near_band = false;
    for (const Manifold& m : system.manifolds()) {
      const double reach = eps + 2.0 * dt * std::abs(m.gradient(x).dot(fx));
      if (std::abs(m.value(x)) < reach) {
        near_band = true;
        break;
      }
    }
    long long substeps = near_band ? static_cast<long long>(std::ceil(dt / band_step)) : 1;
    if (substeps < 1) substeps = 1;
    if (substeps > 100000000LL) throw SolverError("step-size underflow in band substepping");
    const double h = dt / static_cast<double>(substeps);
    for (long long s = 0; s < substeps; ++s) x = detail::rk4_step(f, x, h);
    if (!x.allFinite()) throw SolverError("regularized integration produced a non-finite state");
    traj.samples.push_back(Sample{grid.time(k), x, 0, std::nullopt, k});
  }
  traj.segments.back().t_end = t_final;
  return traj;
}

Vector reduced_sliding_field(const PwsSystem& system, std::size_t manifold, const Vector& x,
                             double tol) {
  require_topology(system, Topology::chain, "reduced_sliding_field");
  if (manifold >= system.num_manifolds()) {
    throw PreconditionError("reduced_sliding_field: manifold index out of range");
  }
  const Manifold& mf = system.manifold(manifold);
  const Vector grad = mf.gradient(x);
  const Vector fi = system.mode(manifold).field(x);
  const Vector fj = system.mode(manifold + 1).field(x);
  Eigen::Index pivot = 0;
  grad.cwiseAbs().maxCoeff(&pivot);

  auto drop_pivot = [pivot](const Vector& v) {
    Vector out(v.size() - 1);
    for (Eigen::Index i = 0, j = 0; i < v.size(); ++i) {
      if (i != pivot) out(j++) = v(i);
    }
    return out;
  };

  bool axis_aligned = true;
  for (Eigen::Index i = 0; i < grad.size(); ++i) {
    if (i != pivot && grad(i) != 0.0) axis_aligned = false;
  }
  const double ni = axis_aligned ? fi(pivot) : grad.dot(fi);
  const double nj = axis_aligned ? fj(pivot) : grad.dot(fj);
  const double scale = std::max({1.0, std::abs(ni), std::abs(nj)});
  if (std::abs(nj - ni) <= tol * scale) {
    if ((fi - fj).lpNorm<Eigen::Infinity>() <= tol * scale) return drop_pivot(fi);
    throw AssumptionError("reduced_sliding_field: normal components of both fields coincide");
  }
  if (axis_aligned) {
    const double w = nj / (nj - ni);
    return drop_pivot(w * fi + (1.0 - w) * fj);
  }
  const double lambda = ni / (ni - nj);
  return drop_pivot((1.0 - lambda) * fi + lambda * fj);
}

bool ConvergenceTable::strictly_decreasing() const {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].sup_gap < rows[i - 1].sup_gap)) return false;
  }
  return true;
}

ConvergenceTable convergence_study(const PwsSystem& system, const Vector& x0, double t_final,
                                   const std::vector<double>& eps_list,
                                   const SolverOptions& options) {
  if (eps_list.empty()) throw PreconditionError("convergence_study: empty eps list");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0) || (i > 0 && !(eps_list[i] < eps_list[i - 1]))) {
      throw PreconditionError("convergence_study: eps list must be positive and strictly "
                              "decreasing");
    }
  }
  const Trajectory reference = integrate(system, x0, t_final, options);
  const auto ref_grid = reference.grid_samples();

  auto gap_for = [&](double eps) {
    const Trajectory reg = integrate_regularized(system, eps, x0, t_final, options);
    const auto reg_grid = reg.grid_samples();
    double gap = 0.0;
    const std::size_t shared = std::min(ref_grid.size(), reg_grid.size());
    for (std::size_t k = 0; k < shared; ++k) {
      if (ref_grid[k] == nullptr || reg_grid[k] == nullptr) continue;
      gap = std::max(gap, (ref_grid[k]->x - reg_grid[k]->x).norm());
    }
    return gap;
  };

  std::vector<std::future<double>> jobs;
  jobs.reserve(eps_list.size());
  for (double eps : eps_list) jobs.push_back(std::async(std::launch::async, gap_for, eps));

  ConvergenceTable table;
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    ConvergenceRow row;
    row.eps = eps_list[i];
    row.sup_gap = jobs[i].get();
    row.slope_to_prev = std::numeric_limits<double>::quiet_NaN();
    if (i > 0) {
      const ConvergenceRow& prev = table.rows.back();
      row.slope_to_prev = std::log(prev.sup_gap / row.sup_gap) / std::log(prev.eps / row.eps);
    }
    table.rows.push_back(row);
  }

  table.fitted_slope = std::numeric_limits<double>::quiet_NaN();
  if (table.rows.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(table.rows.size());
    for (const auto& r : table.rows) {
      const double lx = std::log(r.eps);
      const double ly = std::log(r.sup_gap);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    table.fitted_slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  return table;
}

void write_convergence_csv(std::ostream& out, const ConvergenceTable& table) {
  out << "eps,sup_gap,slope_to_prev\n";
  for (const auto& r : table.rows) {
    out << format_double(r.eps) << ',' << format_double(r.sup_gap) << ',';
    if (!std::isnan(r.slope_to_prev)) out << format_double(r.slope_to_prev);
    out << '\n';
  }
}

}  // namespace pwsc
