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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "pwsc/certify.hpp"
#include "pwsc/errors.hpp"

namespace {

using oracle::mat2;
using oracle::vec;
using pwsc::Matrix;
using pwsc::Metric;
using pwsc::Vector;

pwsc::PwsSystem with_modes(const pwsc::PwsSystem& base, std::vector<pwsc::Mode> modes) {
  return pwsc::PwsSystem(base.topology(), std::move(modes), base.manifolds(), base.box());
}

pwsc::PwsSystem identical_cross_modes() {
  const auto ex = oracle::example(2);
  const auto m = pwsc::Mode::affine(mat2(-2, 0, 0, -3), vec({1, 1}));
  return with_modes(ex, {m, m, m, m});
}

/// max over the corners of [x1lo, x1hi] x [x2lo, x2hi] of mu_Q(g(x) grad^T)
/// for g affine in x: the measure is convex in an affine argument.
double corner_max(const Matrix& Q, const std::function<Vector(const Vector&)>& g,
                  const Vector& grad, double x1lo, double x1hi, double x2lo, double x2hi) {
  double worst = -INFINITY;
  for (double a : {x1lo, x1hi})
    for (double b : {x2lo, x2hi}) {
      const Vector x = vec({a, b});
      worst = std::max(worst, oracle::measure(Q, g(x) * grad.transpose()));
    }
  return worst;
}

TEST(ChainCertificate, ExampleOnePasses) {
  const auto s = oracle::example(1);
  const auto report = pwsc::check_chain_certificate(s, Metric::identity(2, 0.5));
  EXPECT_TRUE(report.passed);
  EXPECT_EQ(report.check, "chain");
  ASSERT_EQ(report.conditions.size(), 5u);
  for (std::size_t i = 0; i < 3; ++i) {
    const Matrix& A = s.mode(i).affine_data().A;
    const double mu = oracle::sym2_max(A(0, 0), 0.5 * (A(0, 1) + A(1, 0)), A(1, 1));
    const auto& c = report.condition("flow.mode" + std::to_string(i + 1));
    EXPECT_NEAR(c.worst, mu, 1e-12);
    EXPECT_NEAR(c.margin, -0.5 - mu, 1e-12);
  }
  // printed margins: 0.00, 0.29, 0.38
  EXPECT_NEAR(report.condition("flow.mode1").margin, 0.0, 1e-12);
  EXPECT_NEAR(report.condition("flow.mode2").margin, 0.29, 0.005);
  EXPECT_NEAR(report.condition("flow.mode3").margin, 0.38, 0.005);
  for (const char* id : {"jump.1", "jump.2"}) {
    EXPECT_LE(report.condition(id).worst, 1e-9);
    EXPECT_EQ(report.condition(id).kind, pwsc::ConditionKind::jump);
  }
  EXPECT_NEAR(report.margin(), 0.0, 1e-12);
  EXPECT_EQ(report.certified_rate(), 0.5);
}

TEST(ChainCertificate, RateTooHighFailsOnFirstMode) {
  const auto report = pwsc::check_chain_certificate(oracle::example(1), Metric::identity(2, 0.6));
  EXPECT_FALSE(report.passed);
  EXPECT_FALSE(report.condition("flow.mode1").passed);
  EXPECT_NEAR(report.condition("flow.mode1").margin, -0.1, 1e-12);
  EXPECT_TRUE(report.condition("flow.mode2").passed);
  EXPECT_NEAR(report.margin(), -0.1, 1e-12);
  EXPECT_FALSE(report.certified_rate().has_value());
}

TEST(ChainCertificate, SingleSmoothMode) {
  const auto s = pwsc::PwsSystem(
      pwsc::Topology::chain,
      {pwsc::Mode::smooth(
          2, [](const Vector& x) { return Vector(vec({-x(0) - x(0) * x(0) * x(0), -2 * x(1)})); },
          [](const Vector& x) { return Matrix(mat2(-1 - 3 * x(0) * x(0), 0, 0, -2)); })},
      {}, pwsc::AnalysisBox(vec({-1, -1}), vec({1, 1})));
  pwsc::CertifyOptions grid;
  grid.strategy = pwsc::Strategy::grid;
  const auto report = pwsc::check_chain_certificate(s, Metric::identity(2, 1.0), grid);
  EXPECT_TRUE(report.passed);
  ASSERT_EQ(report.conditions.size(), 1u);
  EXPECT_NEAR(report.conditions[0].worst, -1.0, 1e-12);
  EXPECT_THROW(pwsc::check_chain_certificate(s, Metric::identity(2, 1.0)),
               pwsc::PreconditionError);
}

TEST(ChainCertificate, Errors) {
  EXPECT_THROW(pwsc::check_chain_certificate(oracle::example(2), Metric::identity(2, 1)),
               pwsc::TopologyError);
  EXPECT_THROW(pwsc::check_chain_certificate(oracle::example(1), Metric::identity(3, 1)),
               pwsc::PreconditionError);
  EXPECT_THROW(pwsc::check_cross_certificate(oracle::example(1), Metric::identity(2, 1)),
               pwsc::TopologyError);
}

TEST(CrossCertificate, ExampleTwoPasses) {
  const auto s = oracle::example(2);
  const auto report = pwsc::check_cross_certificate(s, Metric::identity(2, 1.87));
  EXPECT_TRUE(report.passed);
  const double printed[4] = {-3.76, -1.88, -1.87, -7.88};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& c = report.condition("flow.mode" + std::to_string(i + 1));
    EXPECT_NEAR(c.worst, oracle::measure(Matrix::Identity(2, 2), s.mode(i).affine_data().A),
                1e-12);
    EXPECT_NEAR(c.worst, printed[i], 0.01);
  }
  for (const char* id :
       {"manifold.1", "manifold.2", "half.1.pos", "half.1.neg", "half.2.pos", "half.2.neg"}) {
    EXPECT_LE(std::abs(report.condition(id).worst), 1e-9) << id;
    EXPECT_TRUE(report.condition(id).passed) << id;
  }
  const auto& eq = report.condition("equality.intersection");
  EXPECT_EQ(eq.kind, pwsc::ConditionKind::equality);
  EXPECT_LE(eq.worst, 1e-9);
  ASSERT_TRUE(eq.point.has_value());
  EXPECT_LT(eq.point->norm(), 1e-15);
}

TEST(CrossCertificate, PerturbedOffsetBreaksEquality) {
  const auto ex = oracle::example(2);
  const auto& a4 = ex.mode(3).affine_data();
  const auto s = with_modes(ex, {ex.mode(0), ex.mode(1), ex.mode(2),
                                 pwsc::Mode::affine(a4.A, vec({7, -1.3}))});
  const auto report = pwsc::check_cross_certificate(s, Metric::identity(2, 1.87));
  EXPECT_FALSE(report.passed);
  EXPECT_NEAR(report.condition("equality.intersection").worst, 1.0, 1e-12);
  EXPECT_FALSE(report.condition("equality.intersection").passed);
}

TEST(CrossCertificate, IdenticalModesPass) {
  const auto report = pwsc::check_cross_certificate(identical_cross_modes(),
                                                    Metric::identity(2, 2.0));
  EXPECT_TRUE(report.passed);
  for (const auto& c : report.conditions)
    if (c.kind != pwsc::ConditionKind::flow) EXPECT_EQ(c.worst, 0.0) << c.id;
}

TEST(CrossCertificate, FailedIntersectionAssumption) {
  const auto ex = oracle::example(2);
  const auto out = [](double a, double b) { return pwsc::Mode::affine(Matrix::Zero(2, 2), vec({a, b})); };
  const auto s = with_modes(ex, {out(-1, 1), out(1, 1), out(1, -1), out(-1, -1)});
  EXPECT_THROW(pwsc::check_cross_certificate(s, Metric::identity(2, 0.0)), pwsc::AssumptionError);
}

TEST(RegularizedChain, Examples) {
  const auto s = oracle::example(1);
  const auto pass = pwsc::check_regularized_chain(s, Metric::identity(2, 0.5), 0.05);
  EXPECT_TRUE(pass.passed);
  EXPECT_EQ(pass.eps, 0.05);
  EXPECT_FALSE(pwsc::check_regularized_chain(s, Metric::identity(2, 0.9), 0.05).passed);
  try {
    pwsc::check_regularized_chain(s, Metric::identity(2, 0.5), 1.5);
    FAIL() << "expected PreconditionError";
  } catch (const pwsc::PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("bands intersect"), std::string::npos);
  }
}

TEST(RegularizedCross, ExampleTwoBandTermsAreExactlyTheCornerValues) {
  // The combinations do not vanish off the manifolds: at eps = 0.05 the band
  // terms are positive, so the regularized check fails for this example.
  const auto s = oracle::example(2);
  const double eps = 0.05;
  const auto report = pwsc::check_regularized_cross(s, Metric::identity(2, 1.87), eps);
  EXPECT_FALSE(report.passed);

  const Matrix I = Matrix::Identity(2, 2);
  auto combo = [&](int which) {
    return [&s, which](const Vector& x) {
      Vector g = Vector::Zero(2);
      for (int k = 0; k < 4; ++k) {
        const int w = which == 0   ? oracle::kCrossSigns[k][0]
                      : which == 1 ? oracle::kCrossSigns[k][1]
                                   : oracle::kCrossSigns[k][0] * oracle::kCrossSigns[k][1];
        g += w * s.mode(k).field(x);
      }
      return g;
    };
  };
  const Vector g1 = vec({0, 1}), g2 = vec({1, 0});
  const double band1 = corner_max(I, combo(0), g1, -5, 5, -eps, eps);
  const double band2 = corner_max(I, combo(1), g2, -eps, eps, -5, 5);
  const double band1_pos = corner_max(I, combo(2), g1, eps, 5, -eps, eps);
  const double band2_pos = corner_max(I, combo(2), g2, -eps, eps, eps, 5);
  EXPECT_NEAR(band1, 0.2, 1e-12);
  EXPECT_NEAR(report.condition("band.1").worst, band1, 1e-12);
  EXPECT_NEAR(report.condition("band.2").worst, band2, 1e-12);
  EXPECT_NEAR(report.condition("band.1.pos").worst, band1_pos, 1e-12);
  EXPECT_NEAR(report.condition("band.2.pos").worst, band2_pos, 1e-12);
  EXPECT_NEAR(band1_pos, std::sqrt(0.0125) - 0.05, 1e-12);
  EXPECT_FALSE(report.condition("band.1").passed);

  double residual = 0.0;
  for (double a : {-eps, eps})
    for (double b : {-eps, eps}) residual = std::max(residual, combo(2)(vec({a, b})).norm());
  EXPECT_NEAR(report.condition("equality.square").worst, residual, 1e-12);
  EXPECT_NEAR(residual, std::sqrt(20.0) * eps, 1e-12);
  for (std::size_t i = 0; i < 4; ++i)
    EXPECT_TRUE(report.condition("flow.mode" + std::to_string(i + 1)).passed);
}

TEST(RegularizedCross, BandTermsShrinkWithEps) {
  const auto s = oracle::example(2);
  double previous = INFINITY;
  for (double eps : {0.1, 0.01, 0.001}) {
    const auto r = pwsc::check_regularized_cross(s, Metric::identity(2, 1.87), eps);
    EXPECT_LT(r.condition("band.1").worst, previous);
    previous = r.condition("band.1").worst;
  }
}

TEST(RegularizedCross, IdenticalModesPassAndPerturbedFails) {
  EXPECT_TRUE(pwsc::check_regularized_cross(identical_cross_modes(), Metric::identity(2, 2.0), 0.1)
                  .passed);
  const auto ex = oracle::example(2);
  const auto s = with_modes(ex, {ex.mode(0), ex.mode(1), ex.mode(2),
                                 pwsc::Mode::affine(ex.mode(3).affine_data().A, vec({7, -1.3}))});
  const auto r = pwsc::check_regularized_cross(s, Metric::identity(2, 1.87), 0.05);
  EXPECT_FALSE(r.condition("equality.square").passed);
}

TEST(Domain, VerticesAndDescription) {
  const auto s = oracle::example(1);
  pwsc::Domain d;
  d.constraints = {{0, pwsc::LevelConstraint::Relation::ge, 0.0},
                   {1, pwsc::LevelConstraint::Relation::le, 0.0}};
  auto v = pwsc::domain_vertices(s, d);
  std::sort(v.begin(), v.end(), [](const Vector& a, const Vector& b) {
    return std::tie(a(0), a(1)) < std::tie(b(0), b(1));
  });
  ASSERT_EQ(v.size(), 4u);
  EXPECT_EQ(v[0], vec({0, -5}));
  EXPECT_EQ(v[3], vec({2, 5}));
  EXPECT_EQ(d.describe(s), "C & H12 >= 0 & H23 <= 0");
  pwsc::Domain shifted;
  shifted.constraints = {{0, pwsc::LevelConstraint::Relation::ge, -0.0}};
  EXPECT_EQ(shifted.describe(s), "C & H12 >= 0");
}

class CertifyProperty : public ::testing::TestWithParam<int> {
 protected:
  pwsc::CertificateReport check(const Metric& m, pwsc::Strategy strategy) const {
    pwsc::CertifyOptions opt;
    opt.strategy = strategy;
    return pwsc::check_certificate(oracle::example(GetParam()), m, opt);
  }
};

TEST_P(CertifyProperty, GridNeverExceedsVertex) {
  std::mt19937_64 rng(300 + GetParam());
  std::uniform_real_distribution<double> rate(0.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Metric m(oracle::random_spd(rng, 2), rate(rng));
    const auto vertex = check(m, pwsc::Strategy::vertex);
    const auto grid = check(m, pwsc::Strategy::grid);
    ASSERT_EQ(vertex.conditions.size(), grid.conditions.size());
    for (std::size_t k = 0; k < vertex.conditions.size(); ++k) {
      EXPECT_EQ(grid.conditions[k].method, pwsc::Strategy::grid);
      EXPECT_LE(grid.conditions[k].worst, vertex.conditions[k].worst + 1e-9)
          << vertex.conditions[k].id;
    }
  }
}

TEST_P(CertifyProperty, PassIffMarginNonNegative) {
  std::mt19937_64 rng(400 + GetParam());
  std::uniform_real_distribution<double> rate(0.0, 3.0);
  int passes = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const Matrix Q = trial % 3 == 0 ? Matrix(Matrix::Identity(2, 2)) : oracle::random_spd(rng, 2);
    const auto report = check(Metric(Q, rate(rng)), pwsc::Strategy::vertex);
    EXPECT_EQ(report.passed, report.margin() >= -1e-12);
    bool all = true;
    for (const auto& c : report.conditions) {
      EXPECT_EQ(c.passed, c.margin >= -c.tolerance) << c.id;
      EXPECT_NEAR(c.margin, c.bound - c.worst, 1e-15);
      all = all && c.passed;
    }
    EXPECT_EQ(report.passed, all);
    passes += report.passed;
  }
  EXPECT_GT(passes, 0);
}

TEST_P(CertifyProperty, ScalingMetricKeepsVerdicts) {
  std::mt19937_64 rng(500 + GetParam());
  std::uniform_real_distribution<double> gamma(0.01, 100.0), rate(0.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix Q = oracle::random_spd(rng, 2);
    const double c = rate(rng);
    const auto a = check(Metric(Q, c), pwsc::Strategy::vertex);
    const auto b = check(Metric(gamma(rng) * Q, c), pwsc::Strategy::vertex);
    EXPECT_EQ(a.passed, b.passed);
    for (std::size_t k = 0; k < a.conditions.size(); ++k)
      EXPECT_EQ(a.conditions[k].passed, b.conditions[k].passed) << a.conditions[k].id;
  }
}

TEST_P(CertifyProperty, CertifiedImpliesContracting) {
  const auto cfg = pwsc::load_config(oracle::config_text(GetParam()));
  const auto report = pwsc::check_certificate(cfg.system, *cfg.metric);
  ASSERT_TRUE(report.passed);
  const auto pairs = pwsc::random_pairs(cfg.system.box(), 10, 42);
  const auto pw = pwsc::pairwise_contraction_test(cfg.system, *cfg.metric, pairs,
                                                  GetParam() == 1 ? 10.0 : 5.0);
  EXPECT_TRUE(pw.passed);
  ASSERT_EQ(pw.pairs.size(), 10u);
  for (const auto& p : pw.pairs) {
    EXPECT_TRUE(p.passed);
    EXPECT_LE(p.max_window_growth, std::log1p(1e-2));
    EXPECT_GE(p.alpha, 1.0 - 1e-12);
    EXPECT_NEAR(p.initial_distance, (p.xa0 - p.xb0).norm(), 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(Examples, CertifyProperty, ::testing::Values(1, 2));

TEST(Pairwise, IdenticalStatesPassTrivially) {
  const auto s = oracle::example(1);
  const auto pw = pwsc::pairwise_contraction_test(s, Metric::identity(2, 0.5),
                                                  {{vec({1, 1}), vec({1, 1})}}, 3.0);
  EXPECT_TRUE(pw.passed);
  EXPECT_TRUE(pw.pairs[0].coincident);
}

TEST(Pairwise, WrongRateIsDetected) {
  const auto s = oracle::example(1);
  const auto pw = pwsc::pairwise_contraction_test(s, Metric::identity(2, 3.0),
                                                  pwsc::random_pairs(s.box(), 3, 1), 5.0);
  EXPECT_FALSE(pw.passed);
}

TEST(Pairwise, SeededPairsAreReproducible) {
  const auto box = oracle::example(1).box();
  const auto a = pwsc::random_pairs(box, 10, 42);
  const auto b = pwsc::random_pairs(box, 10, 42);
  const auto c = pwsc::random_pairs(box, 10, 43);
  ASSERT_EQ(a.size(), 10u);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].first, b[k].first);
    EXPECT_EQ(a[k].second, b[k].second);
    EXPECT_TRUE(box.contains(a[k].first) && box.contains(a[k].second));
  }
  EXPECT_NE(a[0].first, c[0].first);
}

TEST(ReportJson, RoundTrips) {
  const auto report = pwsc::check_certificate(oracle::example(1), Metric::identity(2, 0.6));
  std::ostringstream os;
  pwsc::write_report_json(os, report);
  const auto j = nlohmann::json::parse(os.str());
  EXPECT_EQ(j.at("check"), "chain");
  EXPECT_EQ(j.at("passed"), false);
  EXPECT_TRUE(j.at("certified_rate").is_null());
  ASSERT_EQ(j.at("conditions").size(), report.conditions.size());
  EXPECT_EQ(j.at("conditions")[0].at("margin").get<double>(), report.conditions[0].margin);
  EXPECT_EQ(j.at("metric").at("c").get<double>(), 0.6);
}

TEST(ReportJson, PairwiseRoundTrips) {
  const auto s = oracle::example(1);
  const auto pw = pwsc::pairwise_contraction_test(s, Metric::identity(2, 0.5),
                                                  pwsc::random_pairs(s.box(), 2, 7), 2.0);
  std::ostringstream os;
  pwsc::write_pairwise_json(os, pw);
  const auto j = nlohmann::json::parse(os.str());
  EXPECT_EQ(j.at("passed"), pw.passed);
  EXPECT_EQ(j.at("pairs").size(), 2u);
}

}  // namespace
