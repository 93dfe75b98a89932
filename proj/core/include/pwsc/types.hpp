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

#ifndef PWSC_TYPES_HPP_
#define PWSC_TYPES_HPP_

#include <cstddef>
#include <functional>
#include <limits>

#include <Eigen/Dense>

namespace pwsc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

using FieldFn = std::function<Vector(const Vector&)>;
using JacobianFn = std::function<Matrix(const Vector&)>;
using ScalarFn = std::function<double(const Vector&)>;
using GradientFn = std::function<Vector(const Vector&)>;

inline constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

}  // namespace pwsc

#endif  // PWSC_TYPES_HPP_
