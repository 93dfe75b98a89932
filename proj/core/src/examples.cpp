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

#include "pwsc/examples.hpp"

#include <string>

#include "pwsc/errors.hpp"

namespace pwsc {

namespace {

constexpr std::string_view kExample1 = R"json(
{
  "dimension": 2,
  "topology": "chain",
  "modes": [
    {"A": [[-1, 1], [0, -1]], "b": [3, 0]},
    {"A": [[-2, 1], [0, -1]], "b": [1, 0]},
    {"A": [[-3, 1], [0, -1]], "b": [-2, 0]}
  ],
  "manifolds": [
    {"c": [1, 0], "d": 0, "label": "H12"},
    {"c": [1, 0], "d": 2, "label": "H23"}
  ],
  "box": {"lower": [-5, -5], "upper": [5, 5]},
  "metric": {"Q": [[1, 0], [0, 1]], "c": 0.5}
}
)json";

constexpr std::string_view kExample2 = R"json(
{
  "dimension": 2,
  "topology": "planar_cross",
  "modes": [
    {"A": [[-8, -2], [4, -4]], "b": [6, -1.5]},
    {"A": [[-2, -4], [3, -4]], "b": [4, -1.5]},
    {"A": [[-2, -2], [4, -10]], "b": [4, -1.3]},
    {"A": [[-8, -4], [3, -10]], "b": [6, -1.3]}
  ],
  "manifolds": [
    {"c": [0, 1], "d": 0, "label": "H1"},
    {"c": [1, 0], "d": 0, "label": "H2"}
  ],
  "box": {"lower": [-5, -5], "upper": [5, 5]},
  "metric": {"Q": [[1, 0], [0, 1]], "c": 1.87}
}
)json";

}  // namespace

std::string_view example_config(int id) {
  switch (id) {
    case 1:
      return kExample1;
    case 2:
      return kExample2;
    default:
      throw PreconditionError("unknown example id " + std::to_string(id) + " (expected 1 or 2)");
  }
}

std::optional<int> example_id_for(std::string_view name) {
  const auto slash = name.find_last_of("/\\");
  if (slash != std::string_view::npos) name.remove_prefix(slash + 1);
  constexpr std::string_view kSuffix = ".json";
  if (name.size() > kSuffix.size() && name.substr(name.size() - kSuffix.size()) == kSuffix) {
    name.remove_suffix(kSuffix.size());
  }
  if (name == "example1") return 1;
  if (name == "example2") return 2;
  return std::nullopt;
}

}  // namespace pwsc
