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

#ifndef PWSC_INTEGRATION_HPP_
#define PWSC_INTEGRATION_HPP_

#include <cmath>
#include <functional>

#include "pwsc/errors.hpp"
#include "pwsc/types.hpp"

namespace pwsc::detail {

/// One classical fourth-order Runge-Kutta step.
template <typename F>
Vector rk4_step(const F& f, const Vector& x, double dt) {
  const Vector k1 = f(x);
  const Vector k2 = f(x + 0.5 * dt * k1);
  const Vector k3 = f(x + 0.5 * dt * k2);
  const Vector k4 = f(x + dt * k3);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Bisection for g(lo) >= 0 > g(hi). Returns the end of the bracket on the
/// far (negative) side once |g| there is within tol or the budget is spent.
inline double bisect_sign_change(const std::function<double(double)>& g, double lo, double hi,
                                 double tol, int max_iterations) {
  double g_hi = g(hi);
  for (int it = 0; it < max_iterations && std::abs(g_hi) > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double g_mid = g(mid);
    if (g_mid < 0.0) {
      hi = mid;
      g_hi = g_mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

/// Fixed output grid t_k = k h, k = 0..K, with the last point at t_final.
class StepGrid {
 public:
  StepGrid(double step, double t_final) : step_(step), t_final_(t_final) {
    if (!(step > 0.0) || !std::isfinite(step)) throw PreconditionError("step must be positive");
    steps_ = t_final > 0.0 ? static_cast<long long>(std::ceil(t_final / step - 1e-9)) : 0;
    if (t_final > 0.0 && steps_ < 1) steps_ = 1;
  }

  double step() const { return step_; }
  long long steps() const { return steps_; }
  double time(long long k) const {
    return k >= steps_ ? t_final_ : static_cast<double>(k) * step_;
  }

 private:
  double step_;
  double t_final_;
  long long steps_ = 0;
};

}  // namespace pwsc::detail

#endif  // PWSC_INTEGRATION_HPP_
