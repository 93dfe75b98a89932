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

#ifndef PWSC_EXAMPLES_HPP_
#define PWSC_EXAMPLES_HPP_

#include <optional>
#include <string_view>

namespace pwsc {

/// Built-in configuration text of the bundled examples (ids 1 and 2).
/// Throws PreconditionError for other ids.
std::string_view example_config(int id);

/// Maps "example1" / "example2" (any directory prefix or .json suffix) to
/// the built-in id.
std::optional<int> example_id_for(std::string_view name);

}  // namespace pwsc

#endif  // PWSC_EXAMPLES_HPP_
