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

#ifndef PWSC_ERRORS_HPP_
#define PWSC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace pwsc {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration text.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Manifold sign pattern matching no mode region.
class TopologyError : public Error {
 public:
  using Error::Error;
};

/// Transversality or intersection assumption violated or undecidable.
class AssumptionError : public Error {
 public:
  using Error::Error;
};

/// Ill-conditioned or non-symmetric input to the dense linear algebra.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Integration cannot continue (step underflow, event storm).
class SolverError : public Error {
 public:
  using Error::Error;
};

/// A trajectory reached the escaping part of a switching manifold, where
/// the Filippov solution is not unique.
class EscapingRegionError : public SolverError {
 public:
  EscapingRegionError(const std::string& what, double time)
      : SolverError(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace pwsc

#endif  // PWSC_ERRORS_HPP_
