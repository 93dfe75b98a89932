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

#include <algorithm>

#include "oracles.hpp"
#include "pwsc/errors.hpp"
#include "pwsc/qsearch.hpp"

namespace {

using oracle::vec;
using pwsc::Matrix;
using pwsc::Metric;
using pwsc::Vector;

double largest_feasible(const std::vector<pwsc::SearchTraceEntry>& trace) {
  double best = -INFINITY;
  for (const auto& e : trace)
    if (e.feasible) best = std::max(best, e.c);
  return best;
}

TEST(Margin, ExampleOne) {
  const auto s = oracle::example(1);
  EXPECT_NEAR(pwsc::margin(s, Metric::identity(2, 0.5)), 0.0, 1e-12);
  EXPECT_NEAR(pwsc::margin(s, Metric::identity(2, 0.4)), 0.1, 1e-12);
  EXPECT_NEAR(pwsc::margin(s, Metric::identity(2, 0.6)), -0.1, 1e-12);
}

TEST(MetricParameters, IdentityAndNormalization) {
  EXPECT_EQ(pwsc::metric_from_parameters(Vector::Zero(3), 2), Matrix::Identity(2, 2));
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 4;
    Vector theta(n * (n + 1) / 2);
    for (int i = 0; i < theta.size(); ++i) theta(i) = u(rng);
    const Matrix Q = pwsc::metric_from_parameters(theta, n);
    EXPECT_NEAR(Q.diagonal().maxCoeff(), 1.0, 1e-15);
    EXPECT_TRUE(pwsc::is_positive_definite(Q));
    EXPECT_EQ(Q, Q.transpose());
  }
  EXPECT_THROW(pwsc::metric_from_parameters(Vector::Zero(2), 2), pwsc::PreconditionError);
}

TEST(NelderMead, MaximizesConcaveQuadratic) {
  const auto r = pwsc::detail::nelder_mead_maximize(
      [](const Vector& x) { return -(x(0) - 1) * (x(0) - 1) - 3 * (x(1) + 2) * (x(1) + 2); },
      vec({0, 0}), 0.5, 2000, 1e-14);
  EXPECT_NEAR(r.x(0), 1.0, 1e-5);
  EXPECT_NEAR(r.x(1), -2.0, 1e-5);
  EXPECT_NEAR(r.value, 0.0, 1e-9);
}

TEST(Search, ExampleOneBeatsWitness) {
  const auto s = oracle::example(1);
  const auto result = pwsc::search_certificate(s);
  ASSERT_TRUE(result.has_value());
  EXPECT_GE(result->metric.rate(), 0.5);
  EXPECT_TRUE(result->report.passed);
  EXPECT_TRUE(pwsc::check_certificate(s, result->metric).passed);
  EXPECT_LE(pwsc::spd_condition(result->metric.Q()), 1e6 * (1 + 1e-9));
  EXPECT_NEAR(result->metric.rate(), largest_feasible(result->trace), 1e-3);
}

TEST(Search, ExampleTwoBeatsWitness) {
  const auto s = oracle::example(2);
  const auto result = pwsc::search_certificate(s);
  ASSERT_TRUE(result.has_value());
  EXPECT_GE(result->metric.rate(), 1.87);
  EXPECT_TRUE(pwsc::check_certificate(s, result->metric).passed);
  EXPECT_NEAR(result->metric.rate(), largest_feasible(result->trace), 1e-3);
}

TEST(Search, ExpandingModeHasNoCertificate) {
  const auto s = pwsc::load_system(R"({"dimension": 2, "topology": "chain",
      "modes": [{"A": [[1, 0], [0, 1]], "b": [0, 0]}], "manifolds": [],
      "box": {"lower": [-1, -1], "upper": [1, 1]}})");
  EXPECT_FALSE(pwsc::search_certificate(s).has_value());
}

TEST(Search, SeedDeterminism) {
  const auto s = oracle::example(1);
  pwsc::SearchOptions opt;
  opt.seed = 99;
  const auto a = pwsc::search_certificate(s, opt);
  const auto b = pwsc::search_certificate(s, opt);
  ASSERT_TRUE(a && b);
  EXPECT_EQ(a->metric.rate(), b->metric.rate());
  EXPECT_EQ(a->metric.Q(), b->metric.Q());
  ASSERT_EQ(a->trace.size(), b->trace.size());
  for (std::size_t k = 0; k < a->trace.size(); ++k) EXPECT_EQ(a->trace[k].c, b->trace[k].c);
}

TEST(SearchProperty, ReturnedMetricsAreSound) {
  // Random stable two-mode chains whose jump on x1 = 0 is -beta e1, so the
  // jump term is certifiable. Whatever comes back must re-check.
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> u(-1, 1), beta(0.1, 2.0);
  int found = 0;
  for (int trial = 0; trial < 6; ++trial) {
    const Matrix A1 = oracle::random_matrix(rng, 2, 1.0) - 2.0 * Matrix::Identity(2, 2);
    Matrix A2 = A1;
    A2.col(0) += vec({u(rng), u(rng)});
    const Vector b1 = vec({u(rng), u(rng)});
    const Vector b2 = b1 - vec({beta(rng), 0});
    const std::vector<pwsc::Mode> modes{pwsc::Mode::affine(A1, b1), pwsc::Mode::affine(A2, b2)};
    const pwsc::PwsSystem s(pwsc::Topology::chain, modes,
                            {pwsc::Manifold::affine(vec({1, 0}), 0.0, "H")},
                            pwsc::AnalysisBox(vec({-2, -2}), vec({2, 2})));
    pwsc::SearchOptions opt;
    opt.c_hi = 4.0;
    opt.restarts = 1;
    opt.max_iterations = 150;
    const auto result = pwsc::search_certificate(s, opt);
    if (!result) continue;
    ++found;
    EXPECT_TRUE(pwsc::check_certificate(s, result->metric).passed);
    EXPECT_NEAR(result->metric.rate(), largest_feasible(result->trace), opt.c_tol);
  }
  EXPECT_GE(found, 3);
}

TEST(Search, Validation) {
  pwsc::SearchOptions bad;
  bad.c_lo = 2.0;
  bad.c_hi = 1.0;
  EXPECT_THROW(pwsc::search_certificate(oracle::example(1), bad), pwsc::PreconditionError);
}

}  // namespace
