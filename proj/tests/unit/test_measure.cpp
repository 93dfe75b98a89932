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

#include <random>

#include "oracles.hpp"
#include "pwsc/errors.hpp"
#include "pwsc/measure.hpp"

namespace {

using oracle::mat2;
using pwsc::Matrix;

TEST(SymEigMax, TwoByTwoClosedForm) {
  EXPECT_NEAR(pwsc::sym_eig_max(mat2(-1, 0.5, 0.5, -1)), -0.5, 1e-15);
}

TEST(SymEigMax, IdentityAndZero) {
  for (int n = 1; n <= 6; ++n) {
    EXPECT_NEAR(pwsc::sym_eig_max(Matrix::Identity(n, n)), 1.0, 1e-14) << n;
    EXPECT_EQ(pwsc::sym_eig_max(Matrix::Zero(n, n)), 0.0) << n;
  }
}

TEST(SymEigMax, RejectsNonSymmetric) {
  EXPECT_THROW(pwsc::sym_eig_max(mat2(0, 1, 0, 0)), pwsc::NumericalError);
}

TEST(SymEigMax, JacobiMatchesEigenSolver) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + trial % 6;
    const Matrix A = oracle::random_matrix(rng, n);
    const Matrix S = A + A.transpose();
    const double ref = oracle::max_eigenvalue(S);
    EXPECT_NEAR(pwsc::sym_eig_max(S), ref, 1e-10 * std::max(1.0, S.norm()));
    Eigen::SelfAdjointEigenSolver<Matrix> es(S);
    const pwsc::Vector all = pwsc::sym_eigenvalues(S);
    EXPECT_LT((all - es.eigenvalues()).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, S.norm()));
  }
}

TEST(PositiveDefinite, Examples) {
  EXPECT_TRUE(pwsc::is_positive_definite(Matrix::Identity(3, 3)));
  EXPECT_FALSE(pwsc::is_positive_definite(mat2(1, 0, 0, -1)));
  EXPECT_TRUE(pwsc::is_positive_definite(mat2(2, 1, 1, 2)));
  EXPECT_FALSE(pwsc::is_positive_definite(mat2(2, 1, 0, 2)));
  EXPECT_FALSE(pwsc::is_positive_definite(Matrix::Zero(2, 3)));
}

TEST(PositiveDefinite, InverseAndCondition) {
  const Matrix Q = mat2(2, 1, 1, 2);
  EXPECT_LT((pwsc::spd_inverse(Q) - Q.inverse()).norm(), 1e-14);
  EXPECT_NEAR(pwsc::spd_condition(Q), 3.0, 1e-12);
}

TEST(MatrixMeasure, ExampleModeValues) {
  const Matrix I = Matrix::Identity(2, 2);
  EXPECT_NEAR(pwsc::matrix_measure(I, mat2(-1, 1, 0, -1)), -0.50, 0.005);
  EXPECT_NEAR(pwsc::matrix_measure(I, mat2(-8, -2, 4, -4)), -3.76, 0.005);
}

TEST(MatrixMeasure, WeightedExample) {
  EXPECT_NEAR(pwsc::matrix_measure(mat2(2, 0, 0, 1), mat2(0, 1, 0, 0)), 1.0, 1e-14);
}

TEST(MatrixMeasure, IdentityWeightIsSymmetricPart) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix A = oracle::random_matrix(rng, 2);
    const double ref = oracle::sym2_max(A(0, 0), 0.5 * (A(0, 1) + A(1, 0)), A(1, 1));
    EXPECT_NEAR(pwsc::matrix_measure(Matrix::Identity(2, 2), A), ref, 1e-12);
  }
}

TEST(MatrixMeasure, Errors) {
  EXPECT_THROW(pwsc::matrix_measure(mat2(1, 0, 0, -1), Matrix::Zero(2, 2)),
               pwsc::PreconditionError);
  EXPECT_THROW(pwsc::matrix_measure(mat2(1, 0, 0, 1e-14), Matrix::Zero(2, 2)),
               pwsc::NumericalError);
}

TEST(MetricType, Validation) {
  EXPECT_THROW(pwsc::Metric(mat2(1, 0, 0, -1), 0.5), pwsc::PreconditionError);
  EXPECT_THROW(pwsc::Metric::identity(2, -0.1), pwsc::PreconditionError);
  const pwsc::Metric m(mat2(2, 0, 0, 1), 0.3);
  EXPECT_EQ(m.dimension(), 2);
  EXPECT_DOUBLE_EQ(m.rate(), 0.3);
  EXPECT_NEAR(m.norm(oracle::vec({1, 1})), std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(m.measure(mat2(0, 1, 0, 0)), 1.0, 1e-14);
}

class MeasureProperty : public ::testing::TestWithParam<int> {};

TEST_P(MeasureProperty, AgreesWithOracle) {
  std::mt19937_64 rng(1000 + GetParam());
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix Q = oracle::random_spd(rng, GetParam());
    const Matrix A = oracle::random_matrix(rng, GetParam());
    if (pwsc::spd_condition(Q) > 1e8) continue;
    EXPECT_NEAR(pwsc::matrix_measure(Q, A), oracle::measure(Q, A),
                1e-8 * std::max(1.0, std::abs(oracle::measure(Q, A))));
  }
}

TEST_P(MeasureProperty, Homogeneity) {
  std::mt19937_64 rng(2000 + GetParam());
  std::uniform_real_distribution<double> scale(0.0, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix Q = oracle::random_spd(rng, GetParam());
    const Matrix A = oracle::random_matrix(rng, GetParam());
    const double c = scale(rng);
    const double lhs = pwsc::matrix_measure(Q, c * A);
    const double rhs = c * pwsc::matrix_measure(Q, A);
    EXPECT_NEAR(lhs, rhs, 1e-9 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_P(MeasureProperty, Subadditivity) {
  std::mt19937_64 rng(3000 + GetParam());
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix Q = oracle::random_spd(rng, GetParam());
    const Matrix A = oracle::random_matrix(rng, GetParam());
    const Matrix B = oracle::random_matrix(rng, GetParam());
    EXPECT_LE(pwsc::matrix_measure(Q, A + B),
              pwsc::matrix_measure(Q, A) + pwsc::matrix_measure(Q, B) + 1e-9);
  }
}

TEST_P(MeasureProperty, CongruenceInequality) {
  std::mt19937_64 rng(4000 + GetParam());
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix Q = oracle::random_spd(rng, GetParam());
    const Matrix A = oracle::random_matrix(rng, GetParam());
    const double mu = pwsc::matrix_measure(Q, A);
    const Matrix Q2 = Q * Q;
    auto lmi = [&](double c) {
      return oracle::max_eigenvalue(Q2 * A + A.transpose() * Q2 + 2.0 * c * Q2);
    };
    const double tol = 1e-9 * (1.0 + Q2.norm() * (1.0 + A.norm()));
    // mu <= -c holds for c slightly below -mu and fails slightly above.
    EXPECT_LE(lmi(-mu - 1e-3), tol);
    EXPECT_GT(lmi(-mu + 1e-3), -tol);
  }
}

TEST(MeasureRankOne, ClosedForm) {
  std::mt19937_64 rng(5000);
  for (int n : {2, 3, 5, 8}) {
    for (int trial = 0; trial < 50; ++trial) {
      const pwsc::Vector u = oracle::random_matrix(rng, n).col(0);
      const pwsc::Vector v = oracle::random_matrix(rng, n).col(0);
      // lambda_max((u v^T + v u^T) / 2) = (u.v + |u||v|) / 2
      const double expected = 0.5 * (u.dot(v) + u.norm() * v.norm());
      EXPECT_NEAR(pwsc::matrix_measure(Matrix::Identity(n, n), u * v.transpose()), expected,
                  1e-10 * std::max(1.0, u.norm() * v.norm()));
    }
  }
}

TEST_P(MeasureProperty, ScalingInvariance) {
  std::mt19937_64 rng(6000 + GetParam());
  std::uniform_real_distribution<double> gamma(0.01, 100.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix Q = oracle::random_spd(rng, GetParam());
    const Matrix A = oracle::random_matrix(rng, GetParam());
    const double mu = pwsc::matrix_measure(Q, A);
    EXPECT_NEAR(pwsc::matrix_measure(gamma(rng) * Q, A), mu, 1e-9 * std::max(1.0, std::abs(mu)));
  }
}

INSTANTIATE_TEST_SUITE_P(Dimensions, MeasureProperty, ::testing::Values(1, 2, 3, 5, 8));

}  // namespace
