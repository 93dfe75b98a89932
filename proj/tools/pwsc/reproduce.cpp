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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "pwsc/certify.hpp"
#include "pwsc/errors.hpp"
#include "pwsc/examples.hpp"
#include "pwsc/filippov.hpp"
#include "pwsc/format.hpp"

namespace pwsc::cli {

namespace {

struct Golden {
  std::vector<double> measures;  // mu_I of each mode, two decimals
  double rate;
  Vector equilibrium;
  double pairwise_t_final;
};

Golden golden_for(int id) {
  if (id == 1) return {{-0.50, -0.80, -0.88}, 0.5, (Vector(2) << 0.5, 0.0).finished(), 10.0};
  return {{-3.76, -1.88, -1.87, -7.88}, 1.87, (Vector(2) << 1.1, 0.45).finished(), 5.0};
}

std::vector<Vector> initial_states(int id) {
  std::vector<Vector> out;
  for (double a : {-4.0, 0.0, 4.0}) {
    for (double b : {-4.0, 0.0, 4.0}) {
      if (a == 0.0 && b == 0.0) continue;
      out.push_back((Vector(2) << a, b).finished());
    }
  }
  if (id == 1) {
    out.push_back((Vector(2) << -3.0, -4.0).finished());
  } else {
    out.push_back((Vector(2) << -2.0, -2.0).finished());
    out.push_back((Vector(2) << -2.0, 3.0).finished());
  }
  return out;
}

std::string vec_text(const Vector& v) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << format_double(v(i));
  os << ")";
  return os.str();
}

bool has_interior_lambda(const Trajectory& traj) {
  for (const auto& seg : traj.segments) {
    if (seg.kind != SegmentKind::slide) continue;
    for (double l : seg.lambda) {
      if (l > 0.0 && l < 1.0) return true;
    }
  }
  return false;
}

}  // namespace

std::vector<GoldenCheck> reproduce_example(int id, const std::string& out_dir) {
  if (id != 1 && id != 2) throw PreconditionError("reproduce: example id must be 1 or 2");
  const Golden golden = golden_for(id);
  const PwsSystem system = load_system(example_config(id));
  const std::string tag = "example" + std::to_string(id);
  std::vector<GoldenCheck> checks;
  auto add = [&](std::string name, bool ok, std::string detail) {
    checks.push_back({tag + "." + std::move(name), ok, std::move(detail)});
  };
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  for (std::size_t i = 0; i < system.num_modes(); ++i) {
    const double mu = matrix_measure(Matrix::Identity(2, 2), system.mode(i).jacobian(Vector::Zero(2)));
    std::ostringstream d;
    d << "mu_I = " << format_double(mu) << ", expected " << golden.measures[i] << " +- 0.01";
    add("measure.mode" + std::to_string(i + 1), std::abs(mu - golden.measures[i]) <= 0.01, d.str());
  }

  const TransversalityReport tr = check_transversality(system, system.box(), 101);
  add("transversality", tr.ok(),
      std::to_string(tr.violations.size()) + " violations over " +
          std::to_string(tr.samples_checked) + " samples");

  if (system.topology() == Topology::planar_cross) {
    const IntersectionCheck ic = check_intersection_assumption(system);
    add("intersection", ic.holds,
        "x~ = " + vec_text(ic.point) + ", common sector S" + std::to_string(ic.sector + 1));
  }

  const Metric metric = Metric::identity(2, golden.rate);
  const CertificateReport report = check_certificate(system, metric);
  add("certificate", report.passed,
      std::string(report.passed ? "passes" : "fails") + " with Q = I, c = " +
          format_double(golden.rate) + ", margin " + format_double(report.margin()));
  double worst_zero = 0.0;
  for (const auto& c : report.conditions) {
    if (c.kind != ConditionKind::flow && !c.empty_domain) worst_zero = std::max(worst_zero, c.worst);
  }
  add("certificate.zero_terms", worst_zero <= 1e-9,
      "largest jump/equality term " + format_double(worst_zero) + " (<= 1e-9)");
  const CertificateReport above = check_certificate(system, Metric::identity(2, golden.rate + 0.1));
  add("certificate.rate_above", !above.passed,
      "c = " + format_double(golden.rate + 0.1) + " must fail; margin " +
          format_double(above.margin()));
  if (!out_dir.empty()) {
    std::ofstream f(out_dir + "/" + tag + "_certificate.json");
    write_report_json(f, report);
  }

  bool any_slide = false;
  std::size_t k = 0;
  for (const Vector& x0 : initial_states(id)) {
    const Trajectory traj = integrate(system, x0, 20.0);
    const double dist = (traj.back().x - golden.equilibrium).norm();
    add("attraction" + vec_text(x0), dist <= 1e-4,
        "|x(20) - x_eq| = " + format_double(dist) + " (<= 1e-4)");
    any_slide = any_slide || has_interior_lambda(traj);
    if (!out_dir.empty()) {
      std::ofstream f(out_dir + "/" + tag + "_trajectory_" + std::to_string(++k) + ".csv");
      write_trajectory_csv(f, traj);
    }
  }
  add("sliding", any_slide, any_slide ? "a sliding segment with lambda in (0,1) occurs"
                                      : "no trajectory slides");

  const PairwiseReport pr = pairwise_contraction_test(
      system, metric, random_pairs(system.box(), 10, 42), golden.pairwise_t_final);
  double worst = -1e300;
  for (const auto& p : pr.pairs) worst = std::max(worst, p.max_window_growth);
  add("pairwise", pr.passed,
      "max log growth over any window " + format_double(worst) + " (<= log(1.01))");
  if (!out_dir.empty()) {
    std::ofstream f(out_dir + "/" + tag + "_pairwise.json");
    write_pairwise_json(f, pr);
  }
  return checks;
}

}  // namespace pwsc::cli
