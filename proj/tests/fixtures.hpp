/*
   Copyright 2026 The kpzlab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <memory>
#include <vector>

#include "kpzlab/experiments.hpp"
#include "kpzlab/landscape.hpp"

namespace kpzlab::testing {

// Field with hand-written lines. delta = 10 keeps every shift at 0 for
// n <= 4, so raw positions equal window positions.
inline LppField field_from_lines(const std::vector<std::vector<double>>& rows,
                                 double delta = 10.0) {
  const int n = static_cast<int>(rows.size());
  std::vector<LppField::Line> lines;
  for (const auto& r : rows) lines.push_back(std::make_shared<std::vector<double>>(r));
  const double cells = static_cast<double>(rows[0].size());
  return LppField(LppScaling::for_lines(n), 0.0, cells * delta, delta, std::move(lines), 0);
}

using kpzlab::brute_force_passage;

}  // namespace kpzlab::testing
