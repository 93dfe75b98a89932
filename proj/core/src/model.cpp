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

#include "pwsc/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pwsc/errors.hpp"
#include "pwsc/sampling.hpp"

namespace pwsc {

Matrix finite_difference_jacobian(const FieldFn& field, const Vector& x) {
  const Eigen::Index n = x.size();
  Matrix J(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double h = 1e-6 * (1.0 + std::abs(x(k)));
    Vector xp = x;
    Vector xm = x;
    xp(k) += h;
    xm(k) -= h;
    J.col(k) = (field(xp) - field(xm)) / (2.0 * h);
  }
  return J;
}

// ---------------------------------------------------------------- Mode

Mode Mode::affine(Matrix A, Vector b) {
  if (A.rows() != A.cols() || A.rows() != b.size() || A.rows() == 0) {
    throw PreconditionError("affine mode needs a square A and matching b");
  }
  const int n = static_cast<int>(A.rows());
  return Mode(n, AffineField{std::move(A), std::move(b)});
}

Mode Mode::smooth(int dimension, FieldFn field, JacobianFn jacobian) {
  if (dimension <= 0 || !field || !jacobian) {
    throw PreconditionError("smooth mode needs a positive dimension, a field and a Jacobian");
  }
  return Mode(dimension, Smooth{std::move(field), std::move(jacobian)});
}

Mode Mode::smooth_with_fd_jacobian(int dimension, FieldFn field) {
  if (!field) throw PreconditionError("smooth mode needs a field handle");
  FieldFn copy = field;
  JacobianFn jac = [copy](const Vector& x) { return finite_difference_jacobian(copy, x); };
  return smooth(dimension, std::move(field), std::move(jac));
}

const AffineField& Mode::affine_data() const {
  if (const auto* a = std::get_if<AffineField>(&data_)) return *a;
  throw PreconditionError("mode is not affine");
}

Vector Mode::field(const Vector& x) const {
  if (const auto* a = std::get_if<AffineField>(&data_)) return a->A * x + a->b;
  return std::get<Smooth>(data_).field(x);
}

Matrix Mode::jacobian(const Vector& x) const {
  if (const auto* a = std::get_if<AffineField>(&data_)) return a->A;
  return std::get<Smooth>(data_).jacobian(x);
}

// ------------------------------------------------------------ Manifold

Manifold Manifold::affine(Vector normal, double offset, std::string label) {
  if (normal.size() == 0 || !(normal.norm() > 0.0) || !std::isfinite(offset)) {
    throw PreconditionError("affine manifold needs a nonzero finite normal");
  }
  Manifold m;
  m.dimension_ = static_cast<int>(normal.size());
  m.affine_ = true;
  m.normal_ = std::move(normal);
  m.offset_ = offset;
  m.label_ = std::move(label);
  return m;
}

Manifold Manifold::smooth(int dimension, ScalarFn h, GradientFn gradient, std::string label) {
  if (dimension <= 0 || !h || !gradient) {
    throw PreconditionError("smooth manifold needs H and grad H handles");
  }
  Manifold m;
  m.dimension_ = dimension;
  m.affine_ = false;
  m.h_ = std::move(h);
  m.gradient_ = std::move(gradient);
  m.label_ = std::move(label);
  return m;
}

const Vector& Manifold::normal() const {
  if (!affine_) throw PreconditionError("manifold is not affine");
  return normal_;
}

double Manifold::offset() const {
  if (!affine_) throw PreconditionError("manifold is not affine");
  return offset_;
}

double Manifold::value(const Vector& x) const {
  return affine_ ? normal_.dot(x) - offset_ : h_(x);
}

Vector Manifold::gradient(const Vector& x) const { return affine_ ? normal_ : gradient_(x); }

Vector Manifold::project(const Vector& x, double level) const {
  if (affine_) {
    return x - ((normal_.dot(x) - offset_ - level) / normal_.squaredNorm()) * normal_;
  }
  Vector y = x;
  for (int it = 0; it < 50; ++it) {
    const double r = h_(y) - level;
    if (std::abs(r) <= 1e-15 * (1.0 + y.lpNorm<Eigen::Infinity>())) break;
    const Vector g = gradient_(y);
    const double g2 = g.squaredNorm();
    if (!(g2 > 0.0)) throw NumericalError("projection: vanishing manifold gradient");
    y -= (r / g2) * g;
  }
  return y;
}

// --------------------------------------------------------- AnalysisBox

AnalysisBox::AnalysisBox(Vector lower, Vector upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() == 0 || lower_.size() != upper_.size()) {
    throw PreconditionError("analysis box bounds must be nonempty and of equal length");
  }
  if (!lower_.allFinite() || !upper_.allFinite()) {
    throw PreconditionError("analysis box must be bounded");
  }
  if (!(lower_.array() < upper_.array()).all()) {
    throw PreconditionError("analysis box needs lower < upper componentwise");
  }
}

bool AnalysisBox::contains(const Vector& x, double slack) const {
  return x.size() == lower_.size() && (x.array() >= lower_.array() - slack).all() &&
         (x.array() <= upper_.array() + slack).all();
}

std::string_view to_string(Topology topology) {
  return topology == Topology::chain ? "chain" : "planar_cross";
}

// ----------------------------------------------------------- PwsSystem

PwsSystem::PwsSystem(Topology topology, std::vector<Mode> modes, std::vector<Manifold> manifolds,
                     AnalysisBox box)
    : topology_(topology),
      modes_(std::move(modes)),
      manifolds_(std::move(manifolds)),
      box_(std::move(box)) {
  const int n = box_.dimension();
  if (modes_.empty()) throw PreconditionError("system needs at least one mode");
  for (const auto& m : modes_) {
    if (m.dimension() != n) throw PreconditionError("mode dimension differs from box dimension");
  }
  for (const auto& m : manifolds_) {
    if (m.dimension() != n) {
      throw PreconditionError("manifold dimension differs from box dimension");
    }
  }
  if (topology_ == Topology::chain) {
    if (modes_.size() != manifolds_.size() + 1) {
      throw PreconditionError("chain topology needs exactly one more mode than manifolds");
    }
    validate_chain_cover();
  } else {
    if (n != 2 || modes_.size() != 4 || manifolds_.size() != 2) {
      throw PreconditionError("planar_cross topology needs n = 2, four modes and two manifolds");
    }
  }
}

bool PwsSystem::is_affine() const {
  return std::all_of(modes_.begin(), modes_.end(), [](const Mode& m) { return m.is_affine(); }) &&
         std::all_of(manifolds_.begin(), manifolds_.end(),
                     [](const Manifold& m) { return m.is_affine(); });
}

int PwsSystem::region_sign(std::size_t mode, std::size_t manifold) const {
  if (mode >= modes_.size() || manifold >= manifolds_.size()) {
    throw PreconditionError("region_sign: index out of range");
  }
  if (topology_ == Topology::chain) return manifold < mode ? +1 : -1;
  // S_1: (+,-)  S_2: (+,+)  S_3: (-,+)  S_4: (-,-)
  static constexpr int kTable[4][2] = {{+1, -1}, {+1, +1}, {-1, +1}, {-1, -1}};
  return kTable[mode][manifold];
}

std::size_t PwsSystem::mode_for_signs(const std::vector<int>& signs) const {
  if (signs.size() != manifolds_.size()) return kNone;
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < manifolds_.size() && match; ++k) {
      match = region_sign(i, k) == signs[k];
    }
    if (match) return i;
  }
  return kNone;
}

std::pair<std::size_t, std::size_t> PwsSystem::adjacent_modes(std::size_t manifold, const Vector& x,
                                                              double tol_boundary) const {
  if (manifold >= manifolds_.size()) throw PreconditionError("adjacent_modes: bad manifold");
  if (topology_ == Topology::chain) return {manifold, manifold + 1};
  const std::size_t other = 1 - manifold;
  const double h_other = manifolds_[other].value(x);
  if (std::abs(h_other) <= tol_boundary) {
    throw PreconditionError("adjacent_modes: point lies on the intersection of both manifolds");
  }
  std::vector<int> signs(2);
  signs[other] = h_other > 0.0 ? +1 : -1;
  signs[manifold] = -1;
  const std::size_t neg = mode_for_signs(signs);
  signs[manifold] = +1;
  const std::size_t pos = mode_for_signs(signs);
  return {neg, pos};
}

void PwsSystem::validate_chain_cover() const {
  // With at most one manifold both sign patterns name a region.
  if (manifolds_.size() < 2) return;
  for (const Vector& x : detail::box_probe_points(box_)) {
    std::vector<int> signs(manifolds_.size());
    bool on_manifold = false;
    for (std::size_t k = 0; k < manifolds_.size(); ++k) {
      const double h = manifolds_[k].value(x);
      if (std::abs(h) <= 1e-12 * (1.0 + x.norm())) on_manifold = true;
      signs[k] = h > 0.0 ? +1 : -1;
    }
    if (on_manifold) continue;
    if (mode_for_signs(signs) == kNone) {
      std::ostringstream os;
      os << "chain manifolds are not ordered consistently: point (" << x.transpose()
         << ") matches no region";
      throw TopologyError(os.str());
    }
  }
}

// -------------------------------------------------------------- locate

RegionLocation locate(const PwsSystem& system, const Vector& x, double tol_boundary) {
  if (x.size() != system.dimension() || !x.allFinite()) {
    throw PreconditionError("locate: point must be finite and match the system dimension");
  }
  RegionLocation loc;
  const std::size_t m = system.num_manifolds();
  loc.signs.resize(m);
  loc.values.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double h = system.manifold(k).value(x);
    loc.values[k] = h;
    if (std::abs(h) <= tol_boundary) {
      loc.signs[k] = 0;
      loc.manifolds.push_back(k);
    } else {
      loc.signs[k] = h > 0.0 ? +1 : -1;
    }
  }
  if (!loc.manifolds.empty()) {
    loc.kind = RegionLocation::Kind::on_manifold;
    return loc;
  }
  loc.mode = system.mode_for_signs(loc.signs);
  if (loc.mode == kNone) {
    throw TopologyError("locate: manifold sign pattern matches no region");
  }
  return loc;
}

// ------------------------------------------------------------ sampling

std::vector<Vector> sample_level_set(const Manifold& manifold, const AnalysisBox& box,
                                     int per_axis, double level) {
  if (per_axis < 1) throw PreconditionError("sample_level_set: per_axis must be positive");
  const int n = box.dimension();
  const Vector center = box.center();
  const Vector g0 = manifold.gradient(center);
  Eigen::Index pivot = 0;
  g0.cwiseAbs().maxCoeff(&pivot);
  if (!(std::abs(g0(pivot)) > 0.0)) {
    throw NumericalError("sample_level_set: vanishing gradient at box centre");
  }
  const double slack = 1e-12 * (1.0 + box.upper().cwiseAbs().maxCoeff() +
                                box.lower().cwiseAbs().maxCoeff());
  std::vector<Vector> out;
  for (const Vector& base : detail::grid_points(box, per_axis, static_cast<int>(pivot))) {
    Vector x = base;
    if (manifold.is_affine()) {
      const Vector& c = manifold.normal();
      double rest = 0.0;
      for (int l = 0; l < n; ++l) {
        if (l != pivot) rest += c(l) * x(l);
      }
      x(pivot) = (manifold.offset() + level - rest) / c(pivot);
    } else {
      x(pivot) = center(pivot);
      bool converged = false;
      for (int it = 0; it < 60; ++it) {
        const double r = manifold.value(x) - level;
        if (std::abs(r) <= 1e-14 * (1.0 + x.lpNorm<Eigen::Infinity>())) {
          converged = true;
          break;
        }
        const double d = manifold.gradient(x)(pivot);
        if (!(std::abs(d) > 0.0)) break;
        x(pivot) -= r / d;
      }
      if (!converged) continue;
    }
    if (x(pivot) < box.lower()(pivot) - slack || x(pivot) > box.upper()(pivot) + slack) continue;
    x(pivot) = std::clamp(x(pivot), box.lower()(pivot), box.upper()(pivot));
    out.push_back(std::move(x));
  }
  return out;
}

// ----------------------------------------------------- transversality

TransversalityReport check_transversality(const PwsSystem& system, const AnalysisBox& box,
                                          int per_axis, double tol_lie, double tol_boundary) {
  if (per_axis < 2) throw PreconditionError("transversality grid needs >= 2 points per axis");
  TransversalityReport report;
  for (std::size_t k = 0; k < system.num_manifolds(); ++k) {
    const Manifold& mf = system.manifold(k);
    for (const Vector& x : sample_level_set(mf, box, per_axis)) {
      if (system.topology() == Topology::planar_cross &&
          std::abs(system.manifold(1 - k).value(x)) <= tol_boundary) {
        ++report.samples_skipped;
        continue;
      }
      ++report.samples_checked;
      const Vector g = mf.gradient(x);
      if (!(g.norm() > 0.0)) {
        report.violations.push_back({k, x, 0.0, 0.0, "vanishing gradient (not codimension one)"});
        continue;
      }
      const auto [neg, pos] = system.adjacent_modes(k, x, tol_boundary);
      const double s_neg = g.dot(system.mode(neg).field(x));
      const double s_pos = g.dot(system.mode(pos).field(x));
      if (std::abs(s_neg) <= tol_lie && std::abs(s_pos) <= tol_lie) {
        report.violations.push_back({k, x, s_neg, s_pos, "both Lie derivatives vanish"});
      }
    }
  }
  return report;
}

// -------------------------------------------------------- intersection

Vector intersection_point(const PwsSystem& system) {
  if (system.topology() != Topology::planar_cross) {
    throw PreconditionError("intersection point is only defined for planar_cross systems");
  }
  const Manifold& m1 = system.manifold(0);
  const Manifold& m2 = system.manifold(1);
  Vector x;
  if (m1.is_affine() && m2.is_affine()) {
    Matrix C(2, 2);
    C.row(0) = m1.normal().transpose();
    C.row(1) = m2.normal().transpose();
    const double det = C.determinant();
    if (!(std::abs(det) > 1e-12 * m1.normal().norm() * m2.normal().norm())) {
      throw AssumptionError("switching manifolds are parallel: no unique intersection point");
    }
    x = C.partialPivLu().solve(Eigen::Vector2d(m1.offset(), m2.offset()));
  } else {
    x = system.box().center();
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      const Eigen::Vector2d r(m1.value(x), m2.value(x));
      if (r.norm() <= 1e-14 * (1.0 + x.norm())) {
        converged = true;
        break;
      }
      Matrix J(2, 2);
      J.row(0) = m1.gradient(x).transpose();
      J.row(1) = m2.gradient(x).transpose();
      if (!(std::abs(J.determinant()) > 0.0)) break;
      x -= J.partialPivLu().solve(r);
    }
    if (!converged) throw AssumptionError("could not locate the manifold intersection");
  }
  if (!system.box().contains(x, 1e-12)) {
    throw AssumptionError("manifold intersection lies outside the analysis box");
  }
  return x;
}

IntersectionCheck check_intersection_assumption(const PwsSystem& system, double tol_lie) {
  IntersectionCheck out;
  out.point = intersection_point(system);
  out.lie.resize(4, 2);
  for (std::size_t k = 0; k < 4; ++k) {
    const Vector f = system.mode(k).field(out.point);
    for (std::size_t m = 0; m < 2; ++m) {
      const double v = system.manifold(m).gradient(out.point).dot(f);
      if (std::abs(v) <= tol_lie) {
        std::ostringstream os;
        os << "intersection assumption undecidable: Lie derivative of mode " << k + 1
           << " along " << system.manifold(m).label() << " vanishes at the intersection";
        throw AssumptionError(os.str());
      }
      out.lie(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m)) = v;
    }
  }
  const std::vector<int> signs = {out.lie(0, 0) > 0 ? +1 : -1, out.lie(0, 1) > 0 ? +1 : -1};
  out.holds = true;
  for (Eigen::Index k = 1; k < 4 && out.holds; ++k) {
    out.holds = (out.lie(k, 0) > 0 ? +1 : -1) == signs[0] && (out.lie(k, 1) > 0 ? +1 : -1) == signs[1];
  }
  std::ostringstream os;
  if (out.holds) {
    out.sector = system.mode_for_signs(signs);
    os << "all fields at the intersection point into the region of mode " << out.sector + 1;
  } else {
    os << "fields at the intersection do not share a common sector";
  }
  out.diagnostic = os.str();
  return out;
}

// ------------------------------------------------------------- config

namespace {

using nlohmann::json;

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ConfigError(what + " must be a number");
  return j.get<double>();
}

Vector vector_of(const json& j, Eigen::Index n, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + " must be an array");
  if (static_cast<Eigen::Index>(j.size()) != n) {
    throw ConfigError(what + " must have length " + std::to_string(n));
  }
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = number(j[static_cast<std::size_t>(i)], what);
  return v;
}

Matrix matrix_of(const json& j, Eigen::Index n, const std::string& what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n) {
    throw ConfigError(what + " must be an array of " + std::to_string(n) + " rows");
  }
  Matrix M(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    M.row(r) = vector_of(j[static_cast<std::size_t>(r)], n, what + " row").transpose();
  }
  return M;
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(std::string("missing required field '") + key + "'");
  }
  return j.at(key);
}

}  // namespace

Matrix parse_matrix(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("matrix literal is not valid JSON: ") + e.what());
  }
  if (j.is_object() && j.contains("Q")) j = j.at("Q");
  if (!j.is_array() || j.empty()) throw ConfigError("matrix must be a nonempty array of rows");
  return matrix_of(j, static_cast<Eigen::Index>(j.size()), "matrix");
}

LoadedConfig load_config(std::string_view config_text) {
  json j;
  try {
    j = json::parse(config_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");

  const json& jdim = field(j, "dimension");
  if (!jdim.is_number_integer() || jdim.get<long long>() < 1) {
    throw ConfigError("dimension must be a positive integer");
  }
  const auto n = static_cast<Eigen::Index>(jdim.get<long long>());

  const json& jtop = field(j, "topology");
  if (!jtop.is_string()) throw ConfigError("topology must be a string");
  Topology topology;
  if (jtop.get<std::string>() == "chain") {
    topology = Topology::chain;
  } else if (jtop.get<std::string>() == "planar_cross") {
    topology = Topology::planar_cross;
    if (n != 2) throw ConfigError("planar_cross topology requires dimension 2");
  } else {
    throw ConfigError("topology must be 'chain' or 'planar_cross'");
  }

  const json& jmodes = field(j, "modes");
  if (!jmodes.is_array() || jmodes.empty()) throw ConfigError("modes must be a nonempty array");
  std::vector<Mode> modes;
  for (std::size_t i = 0; i < jmodes.size(); ++i) {
    const std::string what = "modes[" + std::to_string(i) + "]";
    modes.push_back(Mode::affine(matrix_of(field(jmodes[i], "A"), n, what + ".A"),
                                 vector_of(field(jmodes[i], "b"), n, what + ".b")));
  }

  std::vector<Manifold> manifolds;
  if (j.contains("manifolds")) {
    const json& jman = j.at("manifolds");
    if (!jman.is_array()) throw ConfigError("manifolds must be an array");
    for (std::size_t k = 0; k < jman.size(); ++k) {
      const std::string what = "manifolds[" + std::to_string(k) + "]";
      Vector c = vector_of(field(jman[k], "c"), n, what + ".c");
      if (!(c.norm() > 0.0)) throw ConfigError(what + ".c must be nonzero");
      const double d = number(field(jman[k], "d"), what + ".d");
      std::string label;
      if (jman[k].contains("label")) {
        if (!jman[k].at("label").is_string()) throw ConfigError(what + ".label must be a string");
        label = jman[k].at("label").get<std::string>();
      } else if (topology == Topology::chain) {
        label = "H" + std::to_string(k + 1) + "," + std::to_string(k + 2);
      } else {
        label = "H" + std::to_string(k + 1);
      }
      manifolds.push_back(Manifold::affine(std::move(c), d, std::move(label)));
    }
  }

  const json& jbox = field(j, "box");
  Vector lower = vector_of(field(jbox, "lower"), n, "box.lower");
  Vector upper = vector_of(field(jbox, "upper"), n, "box.upper");

  std::optional<Metric> metric;
  if (j.contains("metric")) {
    const json& jm = j.at("metric");
    Matrix Q = matrix_of(field(jm, "Q"), n, "metric.Q");
    const double c = number(field(jm, "c"), "metric.c");
    if (!is_positive_definite(Q)) throw ConfigError("metric.Q is not positive definite");
    try {
      metric.emplace(std::move(Q), c);
    } catch (const Error& e) {
      throw ConfigError(std::string("invalid metric: ") + e.what());
    }
  }

  try {
    AnalysisBox box(std::move(lower), std::move(upper));
    return LoadedConfig{PwsSystem(topology, std::move(modes), std::move(manifolds), std::move(box)),
                        std::move(metric)};
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

PwsSystem load_system(std::string_view config_text) { return load_config(config_text).system; }

LoadedConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_config(buf.str());
}

}  // namespace pwsc
