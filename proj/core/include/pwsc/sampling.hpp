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

#ifndef PWSC_SAMPLING_HPP_
#define PWSC_SAMPLING_HPP_

#include <cstdint>
#include <random>
#include <vector>

#include "pwsc/model.hpp"

namespace pwsc {

/// Seeded uniform generator whose output depends only on the seed (the
/// standard distributions are implementation-defined, so doubles are built
/// from raw mt19937_64 words).
class SeededUniform {
 public:
  explicit SeededUniform(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * next(); }
  Vector point_in(const AnalysisBox& box);

 private:
  std::mt19937_64 engine_;
};

namespace detail {

/// Tensor grid with `per_axis` points on every axis of the box; the axis
/// `fixed_axis` (if >= 0) is left at the box centre. Throws
/// PreconditionError beyond 1e6 points.
std::vector<Vector> grid_points(const AnalysisBox& box, int per_axis, int fixed_axis = -1);

/// Deterministic probe set for validating region covers: box corners
/// (n <= 12), a 9-per-axis grid when small, otherwise seeded random points.
std::vector<Vector> box_probe_points(const AnalysisBox& box);

}  // namespace detail
}  // namespace pwsc

#endif  // PWSC_SAMPLING_HPP_
