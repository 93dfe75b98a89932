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

#ifndef PWSC_TOOLS_CLI_HPP_
#define PWSC_TOOLS_CLI_HPP_

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "pwsc/model.hpp"

namespace pwsc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;      ///< certificate, search or golden check failed
inline constexpr int kExitEscaping = 2;  ///< trajectory reached an escaping region
inline constexpr int kExitSolver = 3;    ///< other solver or assumption failure
inline constexpr int kExitUsage = 64;    ///< bad arguments, config or metric

/// Runs the command line given without the program name. Data outputs
/// whose path is "-" go to out; diagnostics and stdout manifests go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Comma-separated numbers, e.g. "-3,-4". Throws ConfigError.
std::vector<double> parse_list(std::string_view text);
Vector parse_vector(std::string_view text);

/// Loads a config file; a missing path named example1 or example2 (with or
/// without directory and .json suffix) resolves to the built-in example.
LoadedConfig resolve_config(const std::string& path);

struct GoldenCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Golden checks for a bundled example. When out_dir is non-empty the
/// trajectories and reports are written there. Throws PreconditionError for
/// ids other than 1 and 2.
std::vector<GoldenCheck> reproduce_example(int id, const std::string& out_dir = "");

}  // namespace pwsc::cli

#endif  // PWSC_TOOLS_CLI_HPP_
