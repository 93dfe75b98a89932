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

#include "pwsc/filippov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "pwsc/errors.hpp"
#include "pwsc/format.hpp"
#include "pwsc/integration.hpp"

namespace pwsc {

std::string to_string(BoundaryClass::Kind kind) {
  switch (kind) {
    case BoundaryClass::Kind::crossing:
      return "crossing";
    case BoundaryClass::Kind::sliding:
      return "sliding";
    case BoundaryClass::Kind::escaping:
      return "escaping";
    case BoundaryClass::Kind::tangential:
      return "tangential";
  }
  return "unknown";
}

double lie_derivative(const Manifold& manifold, const Vector& field_value, const Vector& x) {
  return manifold.gradient(x).dot(field_value);
}

BoundaryClass classify_boundary(const PwsSystem& system, std::size_t manifold, const Vector& x,
                                double tol_lie, bool resolve_tangential) {
  if (manifold >= system.num_manifolds()) {
    throw PreconditionError("classify_boundary: manifold index out of range");
  }
  const double tol_on = kDefaultTolBoundary * (1.0 + x.lpNorm<Eigen::Infinity>());
  if (std::abs(system.manifold(manifold).value(x)) > tol_on) {
    throw PreconditionError("classify_boundary: point is not on the manifold");
  }
  for (std::size_t k = 0; k < system.num_manifolds(); ++k) {
    if (k != manifold && std::abs(system.manifold(k).value(x)) <= tol_on) {
      throw PreconditionError(
          "classify_boundary: point lies on several manifolds (use intersection handling)");
    }
  }
  BoundaryClass out;
  std::tie(out.mode_i, out.mode_j) = system.adjacent_modes(manifold, x, tol_on);
  const Manifold& mf = system.manifold(manifold);
  out.sigma_i = lie_derivative(mf, system.mode(out.mode_i).field(x), x);
  out.sigma_j = lie_derivative(mf, system.mode(out.mode_j).field(x), x);
  const bool zero_i = std::abs(out.sigma_i) <= tol_lie;
  const bool zero_j = std::abs(out.sigma_j) <= tol_lie;
  if (zero_i && zero_j) {
    std::ostringstream os;
    os << "both Lie derivatives vanish on " << mf.label() << " at (" << x.transpose()
       << "): transversality assumption violated";
    throw AssumptionError(os.str());
  }
  if (zero_i || zero_j) {
    out.tangential = true;
    out.kind = resolve_tangential ? BoundaryClass::Kind::sliding : BoundaryClass::Kind::tangential;
  } else if (out.sigma_i > 0.0 && out.sigma_j < 0.0) {
    out.kind = BoundaryClass::Kind::sliding;
  } else if (out.sigma_i < 0.0 && out.sigma_j > 0.0) {
    out.kind = BoundaryClass::Kind::escaping;
  } else {
    out.kind = BoundaryClass::Kind::crossing;
  }
  return out;
}

double sliding_coefficient(double sigma_i, double sigma_j) {
  if (!(sigma_i >= 0.0 && sigma_j <= 0.0 && sigma_i != sigma_j)) {
    throw PreconditionError("sliding_coefficient: needs sigma_i >= 0 >= sigma_j, not both zero");
  }
  return sigma_i / (sigma_i - sigma_j);
}

Vector sliding_field(const PwsSystem& system, std::size_t mode_i, std::size_t mode_j,
                     std::size_t manifold, const Vector& x) {
  const Manifold& mf = system.manifold(manifold);
  const Vector fi = system.mode(mode_i).field(x);
  const Vector fj = system.mode(mode_j).field(x);
  // Coinciding fields: every convex combination is the same vector.
  if (fi == fj) return fi;
  const double lambda =
      sliding_coefficient(lie_derivative(mf, fi, x), lie_derivative(mf, fj, x));
  return (1.0 - lambda) * fi + lambda * fj;
}

bool Trajectory::has_sliding() const {
  return std::any_of(segments.begin(), segments.end(), [](const Segment& s) {
    return s.kind == SegmentKind::slide && s.t_end > s.t_start;
  });
}

std::vector<const Sample*> Trajectory::grid_samples() const& {
  long long last = -1;
  for (const auto& s : samples) last = std::max(last, s.grid_index);
  std::vector<const Sample*> out(static_cast<std::size_t>(last + 1), nullptr);
  for (const auto& s : samples) {
    if (s.grid_index >= 0) out[static_cast<std::size_t>(s.grid_index)] = &s;
  }
  return out;
}

namespace {

class FilippovIntegrator {
 public:
  FilippovIntegrator(const PwsSystem& system, const SolverOptions& options, double t_final)
      : sys_(system), opt_(options), grid_(options.step, t_final) {}

  Trajectory run(const Vector& x0);

 private:
  enum class Phase { flow, slide };

  // Sliding state helpers.
  struct SlideSigmas {
    double sigma_i;
    double sigma_j;
  };
  SlideSigmas slide_sigmas(const Vector& y) const;
  double raw_lambda(const Vector& y) const;
  Vector slide_vector(const Vector& y) const;

  void step_flow(double dt);
  void step_slide(double dt);

  void enter_initial();
  void on_boundary(std::size_t manifold, std::size_t from);
  void on_intersection(std::size_t from);
  void start_flow(std::size_t mode);
  void start_slide(std::size_t manifold, std::size_t mode_i, std::size_t mode_j);
  void push_cross(std::size_t manifold, std::size_t from, std::size_t to);
  void advance_to(double t_new, const Vector& x_new, bool end_of_step,
                  std::optional<double> lambda = std::nullopt);
  void note_event();

  double bisect(const std::function<double(double)>& g, double hi) const {
    return detail::bisect_sign_change(g, 0.0, hi, opt_.tol_event, opt_.max_bisections);
  }

  const PwsSystem& sys_;
  SolverOptions opt_;
  detail::StepGrid grid_;
  Trajectory traj_;

  double t_ = 0.0;
  Vector x_;
  long long next_k_ = 1;
  Phase phase_ = Phase::flow;
  std::size_t mode_ = kNone;
  std::size_t manifold_ = kNone;
  std::size_t mode_i_ = kNone;
  std::size_t mode_j_ = kNone;
  int other_sign_ = 0;  // planar cross: sign of the other H while sliding

  std::optional<IntersectionCheck> intersection_;
  double last_event_t_ = -1.0;
  int stalled_ = 0;
};

FilippovIntegrator::SlideSigmas FilippovIntegrator::slide_sigmas(const Vector& y) const {
  const Manifold& mf = sys_.manifold(manifold_);
  const Vector g = mf.gradient(y);
  return {g.dot(sys_.mode(mode_i_).field(y)), g.dot(sys_.mode(mode_j_).field(y))};
}

// Unclamped l; values outside [0, 1] signal the end of the sliding region.
double FilippovIntegrator::raw_lambda(const Vector& y) const {
  const auto [si, sj] = slide_sigmas(y);
  const double denom = si - sj;
  if (denom > 0.0) return si / denom;
  if (si < -opt_.tol_lie && sj > opt_.tol_lie) {
    throw EscapingRegionError("sliding motion ran into the escaping region of " +
                                  sys_.manifold(manifold_).label(),
                              t_);
  }
  return si > 0.0 ? 2.0 : -1.0;
}

Vector FilippovIntegrator::slide_vector(const Vector& y) const {
  const double lambda = std::clamp(raw_lambda(y), 0.0, 1.0);
  return (1.0 - lambda) * sys_.mode(mode_i_).field(y) + lambda * sys_.mode(mode_j_).field(y);
}

void FilippovIntegrator::advance_to(double t_new, const Vector& x_new, bool end_of_step,
                                    std::optional<double> lambda) {
  Sample s;
  s.x = x_new;
  s.segment = traj_.segments.size() - 1;
  s.lambda = lambda;
  if (end_of_step) {
    s.t = grid_.time(next_k_);
    s.grid_index = next_k_;
    ++next_k_;
  } else {
    s.t = t_new;
  }
  t_ = s.t;
  x_ = x_new;
  traj_.segments.back().t_end = t_;
  if (lambda) traj_.segments.back().lambda.push_back(*lambda);
  traj_.samples.push_back(std::move(s));
}

void FilippovIntegrator::note_event() {
  if (t_ - last_event_t_ <= 1e-13 * std::max(1.0, std::abs(t_))) {
    if (++stalled_ > opt_.max_stalled_events) {
      throw SolverError("step-size underflow: repeated switching events without time advance");
    }
  } else {
    stalled_ = 0;
  }
  last_event_t_ = t_;
}

void FilippovIntegrator::start_flow(std::size_t mode) {
  phase_ = Phase::flow;
  mode_ = mode;
  Segment seg;
  seg.kind = SegmentKind::flow;
  seg.t_start = seg.t_end = t_;
  seg.mode = mode;
  traj_.segments.push_back(std::move(seg));
}

void FilippovIntegrator::start_slide(std::size_t manifold, std::size_t mode_i,
                                     std::size_t mode_j) {
  phase_ = Phase::slide;
  manifold_ = manifold;
  mode_i_ = mode_i;
  mode_j_ = mode_j;
  other_sign_ = 0;
  if (sys_.topology() == Topology::planar_cross) {
    other_sign_ = sys_.manifold(1 - manifold).value(x_) > 0.0 ? +1 : -1;
  }
  Segment seg;
  seg.kind = SegmentKind::slide;
  seg.t_start = seg.t_end = t_;
  seg.manifold = manifold;
  seg.from_mode = mode_i;
  seg.to_mode = mode_j;
  const double lambda = std::clamp(raw_lambda(x_), 0.0, 1.0);
  seg.lambda.push_back(lambda);
  traj_.segments.push_back(std::move(seg));
  // The entry point already lies on the manifold and belongs to the slide.
  traj_.samples.back().segment = traj_.segments.size() - 1;
  traj_.samples.back().lambda = lambda;
}

void FilippovIntegrator::push_cross(std::size_t manifold, std::size_t from, std::size_t to) {
  traj_.segments.back().t_end = t_;
  Segment seg;
  seg.kind = SegmentKind::cross;
  seg.t_start = seg.t_end = t_;
  seg.manifold = manifold;
  seg.from_mode = from;
  seg.to_mode = to;
  traj_.segments.push_back(std::move(seg));
  traj_.samples.back().segment = traj_.segments.size() - 1;
  traj_.samples.back().lambda.reset();
}

void FilippovIntegrator::on_intersection(std::size_t from) {
  if (!intersection_) intersection_ = check_intersection_assumption(sys_, opt_.tol_lie);
  if (!intersection_->holds) {
    throw AssumptionError("trajectory reached the manifold intersection but " +
                          intersection_->diagnostic);
  }
  x_ = intersection_->point;
  traj_.samples.back().x = x_;
  const std::size_t to = intersection_->sector;
  if (from != kNone) push_cross(kNone, from, to);
  start_flow(to);
}

void FilippovIntegrator::on_boundary(std::size_t manifold, std::size_t from) {
  const double tol_on = opt_.tol_boundary * (1.0 + x_.lpNorm<Eigen::Infinity>());
  if (sys_.topology() == Topology::planar_cross &&
      std::abs(sys_.manifold(1 - manifold).value(x_)) <= tol_on) {
    on_intersection(from);
    return;
  }
  const BoundaryClass cls = classify_boundary(sys_, manifold, x_, opt_.tol_lie, true);
  switch (cls.kind) {
    case BoundaryClass::Kind::escaping: {
      std::ostringstream os;
      os << "trajectory reached the escaping region of " << sys_.manifold(manifold).label()
         << " at t = " << t_ << ", x = (" << x_.transpose()
         << "); the Filippov solution is not unique there";
      throw EscapingRegionError(os.str(), t_);
    }
    case BoundaryClass::Kind::crossing: {
      const std::size_t to = cls.sigma_i > 0.0 ? cls.mode_j : cls.mode_i;
      if (from != kNone && to != from) push_cross(manifold, from, to);
      if (from == kNone || to != from) {
        start_flow(to);
      } else {
        start_flow(from);
      }
      return;
    }
    case BoundaryClass::Kind::sliding:
    case BoundaryClass::Kind::tangential:
      start_slide(manifold, cls.mode_i, cls.mode_j);
      return;
  }
}

void FilippovIntegrator::enter_initial() {
  const RegionLocation loc = locate(sys_, x_, opt_.tol_boundary);
  if (loc.interior()) {
    start_flow(loc.mode);
    traj_.samples.back().segment = traj_.segments.size() - 1;
    return;
  }
  // Provisional segment so the initial sample has an owner.
  start_flow(kNone);
  if (loc.manifolds.size() > 1) {
    on_intersection(kNone);
  } else {
    on_boundary(loc.manifolds.front(), kNone);
  }
  traj_.segments.erase(traj_.segments.begin());
  traj_.samples.back().segment = 0;
}

void FilippovIntegrator::step_flow(double dt) {
  const Mode& mode = sys_.mode(mode_);
  const auto f = [&mode](const Vector& y) { return mode.field(y); };
  const Vector x_end = detail::rk4_step(f, x_, dt);

  double best_tau = dt;
  std::size_t best_k = kNone;
  for (std::size_t k = 0; k < sys_.num_manifolds(); ++k) {
    const double s = sys_.region_sign(mode_, k);
    const Manifold& mf = sys_.manifold(k);
    if (s * mf.value(x_end) >= 0.0) continue;
    const auto g = [&](double tau) { return s * mf.value(detail::rk4_step(f, x_, tau)); };
    const double tau = bisect(g, dt);
    if (best_k == kNone || tau < best_tau) {
      best_tau = tau;
      best_k = k;
    }
  }
  if (best_k == kNone) {
    advance_to(t_ + dt, x_end, true);
    return;
  }
  const Vector x_hit = sys_.manifold(best_k).project(detail::rk4_step(f, x_, best_tau));
  advance_to(t_ + best_tau, x_hit, best_tau == dt);
  note_event();
  on_boundary(best_k, mode_);
}

void FilippovIntegrator::step_slide(double dt) {
  const Manifold& mf = sys_.manifold(manifold_);
  const auto fs = [this](const Vector& y) { return slide_vector(y); };
  const auto state_at = [&](double tau) { return mf.project(detail::rk4_step(fs, x_, tau)); };
  const Vector x_end = state_at(dt);
  const double lambda_end = raw_lambda(x_end);

  const bool exit_i = lambda_end < opt_.tol_lambda;
  const bool exit_j = lambda_end > 1.0 - opt_.tol_lambda;
  bool hit_other = false;
  if (other_sign_ != 0) {
    hit_other = other_sign_ * sys_.manifold(1 - manifold_).value(x_end) < 0.0;
  }
  if (!exit_i && !exit_j && !hit_other) {
    advance_to(t_ + dt, x_end, true, lambda_end);
    return;
  }

  // Exits are only taken after a full step outside [tol, 1 - tol]; the
  // exit point itself is the first sign change of the relevant sigma.
  enum class Exit { to_i, to_j, intersection };
  double best_tau = std::numeric_limits<double>::infinity();
  Exit best = Exit::to_i;
  auto consider = [&](double tau, Exit which) {
    if (tau < best_tau || (tau == best_tau && which == Exit::intersection)) {
      best_tau = tau;
      best = which;
    }
  };
  if (exit_i) {
    const auto g = [&](double tau) { return slide_sigmas(state_at(tau)).sigma_i; };
    consider(g(dt) < 0.0 ? bisect(g, dt) : dt, Exit::to_i);
  }
  if (exit_j) {
    const auto g = [&](double tau) { return -slide_sigmas(state_at(tau)).sigma_j; };
    consider(g(dt) < 0.0 ? bisect(g, dt) : dt, Exit::to_j);
  }
  if (hit_other) {
    const Manifold& other = sys_.manifold(1 - manifold_);
    const double s = other_sign_;
    const auto g = [&](double tau) { return s * other.value(state_at(tau)); };
    consider(bisect(g, dt), Exit::intersection);
  }

  const Vector x_exit = state_at(best_tau);
  const double lambda_exit =
      best == Exit::to_i ? 0.0 : best == Exit::to_j ? 1.0 : std::clamp(raw_lambda(x_exit), 0.0, 1.0);
  advance_to(t_ + best_tau, x_exit, best_tau == dt, lambda_exit);
  note_event();
  switch (best) {
    case Exit::to_i:
      start_flow(mode_i_);
      break;
    case Exit::to_j:
      start_flow(mode_j_);
      break;
    case Exit::intersection:
      on_intersection(mode_i_);
      break;
  }
}

Trajectory FilippovIntegrator::run(const Vector& x0) {
  if (x0.size() != sys_.dimension() || !x0.allFinite()) {
    throw PreconditionError("integrate: initial state must be finite and match the dimension");
  }
  traj_.step = grid_.step();
  x_ = x0;
  t_ = 0.0;
  Sample first;
  first.t = 0.0;
  first.x = x0;
  first.grid_index = 0;
  traj_.samples.push_back(std::move(first));
  enter_initial();

  while (next_k_ <= grid_.steps()) {
    const double dt = grid_.time(next_k_) - t_;
    if (!(dt > 0.0)) {
      // An event landed exactly on the grid time.
      traj_.samples.back().grid_index = next_k_;
      ++next_k_;
      continue;
    }
    if (phase_ == Phase::flow) {
      step_flow(dt);
    } else {
      step_slide(dt);
    }
  }
  return std::move(traj_);
}

}  // namespace

Trajectory integrate(const PwsSystem& system, const Vector& x0, double t_final,
                     const SolverOptions& options) {
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) {
    throw PreconditionError("integrate: final time must be finite and >= 0");
  }
  if (!(options.step > 0.0)) throw PreconditionError("integrate: step must be positive");
  FilippovIntegrator integrator(system, options, t_final);
  return integrator.run(x0);
}

namespace {

std::string mode_label(const Trajectory& traj, const Sample& s, std::string* kind) {
  const Segment& seg = traj.segments.at(s.segment);
  auto one = [](std::size_t m) { return m == kNone ? std::string("?") : std::to_string(m + 1); };
  switch (seg.kind) {
    case SegmentKind::flow:
      *kind = "flow";
      return one(seg.mode);
    case SegmentKind::slide:
      *kind = "slide";
      return one(seg.from_mode) + ":" + one(seg.to_mode);
    case SegmentKind::cross:
      *kind = "cross";
      return one(seg.from_mode) + ">" + one(seg.to_mode);
    case SegmentKind::regularized:
      *kind = "regularized";
      return "";
  }
  return "";
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  const std::size_t n = trajectory.samples.empty() ? 0 : trajectory.samples.front().x.size();
  out << "t";
  for (std::size_t i = 0; i < n; ++i) out << ",x" << i + 1;
  out << ",segment,mode_or_pair,lambda\n";
  for (const Sample& s : trajectory.samples) {
    out << format_double(s.t);
    for (Eigen::Index i = 0; i < s.x.size(); ++i) out << ',' << format_double(s.x(i));
    std::string kind;
    const std::string label = mode_label(trajectory, s, &kind);
    out << ',' << kind << ',' << label << ',';
    if (s.lambda && trajectory.segments.at(s.segment).kind == SegmentKind::slide) {
      out << format_double(*s.lambda);
    }
    out << '\n';
  }
}

}  // namespace pwsc
