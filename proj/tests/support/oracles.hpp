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

// Independent reference computations for the tests. Nothing here calls into
// the library's numerics; only its data types are shared.

#ifndef PWSC_TESTS_ORACLES_HPP_
#define PWSC_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "pwsc/examples.hpp"
#include "pwsc/model.hpp"

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// lambda_max((Q A Q^-1 + Q^-1 A^T Q) / 2) through a dense inverse and
/// Eigen's symmetric eigensolver.
inline double measure(const MatrixXd& Q, const MatrixXd& A) {
  const MatrixXd Qi = Q.inverse();
  const MatrixXd S = 0.5 * (Q * A * Qi + Qi * A.transpose() * Q);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (S + S.transpose()));
  return es.eigenvalues().maxCoeff();
}

inline double max_eigenvalue(const MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (S + S.transpose()));
  return es.eigenvalues().maxCoeff();
}

/// Largest eigenvalue of [[a, b], [b, d]].
inline double sym2_max(double a, double b, double d) {
  return 0.5 * (a + d) + std::sqrt(0.25 * (a - d) * (a - d) + b * b);
}

inline MatrixXd central_difference(const std::function<VectorXd(const VectorXd&)>& f,
                                   const VectorXd& x, double h = 1e-7) {
  const VectorXd f0 = f(x);
  MatrixXd J(f0.size(), x.size());
  for (int k = 0; k < x.size(); ++k) {
    VectorXd xp = x, xm = x;
    xp(k) += h;
    xm(k) -= h;
    J.col(k) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return J;
}

/// x(t) for xdot = A x + b by the augmented matrix exponential.
inline VectorXd affine_flow(const MatrixXd& A, const VectorXd& b, const VectorXd& x0, double t) {
  const int n = static_cast<int>(A.rows());
  MatrixXd M = MatrixXd::Zero(n + 1, n + 1);
  M.topLeftCorner(n, n) = A * t;
  M.topRightCorner(n, 1) = b * t;
  const MatrixXd E = M.exp();
  return E.topLeftCorner(n, n) * x0 + E.topRightCorner(n, 1);
}

/// Plain fixed-step RK4 to t (last step shortened).
inline VectorXd rk4(const std::function<VectorXd(const VectorXd&)>& f, VectorXd x, double t,
                    double h) {
  double s = 0.0;
  while (s < t - 1e-15) {
    const double dt = std::min(h, t - s);
    const VectorXd k1 = f(x);
    const VectorXd k2 = f(x + 0.5 * dt * k1);
    const VectorXd k3 = f(x + 0.5 * dt * k2);
    const VectorXd k4 = f(x + dt * k3);
    x += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    s += dt;
  }
  return x;
}

/// Convex weight l in [0, 1] with grad . ((1 - l) fi + l fj) = 0, by
/// bisection (the map is affine and decreasing in l when sliding).
inline double sliding_weight(const VectorXd& fi, const VectorXd& fj, const VectorXd& grad) {
  auto g = [&](double l) { return grad.dot((1.0 - l) * fi + l * fj); };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double clamp1(double s) { return std::clamp(s, -1.0, 1.0); }

/// Chain blend weights from the manifold values, written as "share of the
/// band crossed" per mode.
inline VectorXd chain_weights(const std::vector<double>& h, double eps) {
  const std::size_t m = h.size();
  VectorXd w(static_cast<int>(m + 1));
  for (std::size_t i = 0; i <= m; ++i) {
    const double above = i == 0 ? 1.0 : 0.5 * (1.0 + clamp1(h[i - 1] / eps));
    const double below = i == m ? 1.0 : 0.5 * (1.0 - clamp1(h[i] / eps));
    w(static_cast<int>(i)) = above + below - 1.0;
  }
  return w;
}

/// Cross blend weight of a sector with signs (s1, s2).
inline double cross_weight(double h1, double h2, double eps, int s1, int s2) {
  return 0.25 * (1.0 + s1 * clamp1(h1 / eps)) * (1.0 + s2 * clamp1(h2 / eps));
}

/// Sector signs (H1, H2) of the planar cross modes in order.
inline constexpr int kCrossSigns[4][2] = {{+1, -1}, {+1, +1}, {-1, +1}, {-1, -1}};

inline VectorXd vec(std::initializer_list<double> v) {
  VectorXd x(static_cast<int>(v.size()));
  int i = 0;
  for (double e : v) x(i++) = e;
  return x;
}

inline MatrixXd mat2(double a, double b, double c, double d) {
  MatrixXd M(2, 2);
  M << a, b, c, d;
  return M;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string config_path(int id) {
  return std::string(PWSC_CONFIG_DIR) + "/example" + std::to_string(id) + ".json";
}

inline std::string config_text(int id) { return read_file(config_path(id)); }

inline pwsc::PwsSystem example(int id) { return pwsc::load_system(config_text(id)); }

/// Random symmetric positive definite matrix B B^T + 0.1 I.
inline MatrixXd random_spd(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatrixXd B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = u(rng);
  return B * B.transpose() + 0.1 * MatrixXd::Identity(n, n);
}

inline MatrixXd random_matrix(std::mt19937_64& rng, int n, double scale = 2.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = u(rng);
  return A;
}

}  // namespace oracle

#endif  // PWSC_TESTS_ORACLES_HPP_
