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

#include "pwsc/sampling.hpp"

#include <cmath>

#include "pwsc/errors.hpp"

namespace pwsc {

Vector SeededUniform::point_in(const AnalysisBox& box) {
  Vector x(box.dimension());
  for (int i = 0; i < box.dimension(); ++i) x(i) = uniform(box.lower()(i), box.upper()(i));
  return x;
}

namespace detail {

std::vector<Vector> grid_points(const AnalysisBox& box, int per_axis, int fixed_axis) {
  const int n = box.dimension();
  const int free_axes = fixed_axis >= 0 ? n - 1 : n;
  const double total = std::pow(static_cast<double>(per_axis), free_axes);
  if (total > 1e6) throw PreconditionError("grid too large (more than 1e6 points)");

  auto coordinate = [&](int axis, int idx) {
    if (per_axis == 1) return 0.5 * (box.lower()(axis) + box.upper()(axis));
    const double s = static_cast<double>(idx) / (per_axis - 1);
    return idx == per_axis - 1 ? box.upper()(axis)
                               : box.lower()(axis) + s * (box.upper()(axis) - box.lower()(axis));
  };

  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(total));
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  const Vector center = box.center();
  while (true) {
    Vector x(n);
    for (int a = 0; a < n; ++a) x(a) = a == fixed_axis ? center(a) : coordinate(a, idx[a]);
    out.push_back(std::move(x));
    int a = 0;
    for (; a < n; ++a) {
      if (a == fixed_axis) continue;
      if (++idx[a] < per_axis) break;
      idx[a] = 0;
    }
    if (a == n) break;
  }
  return out;
}

std::vector<Vector> box_probe_points(const AnalysisBox& box) {
  const int n = box.dimension();
  std::vector<Vector> out;
  if (n <= 12) {
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      Vector x(n);
      for (int a = 0; a < n; ++a) x(a) = (mask >> a) & 1u ? box.upper()(a) : box.lower()(a);
      out.push_back(std::move(x));
    }
  }
  if (std::pow(9.0, n) <= 6561.0) {
    auto grid = grid_points(box, 9);
    out.insert(out.end(), grid.begin(), grid.end());
  } else {
    SeededUniform rng(0x5eed);
    for (int i = 0; i < 4096; ++i) out.push_back(rng.point_in(box));
  }
  return out;
}

}  // namespace detail
}  // namespace pwsc
