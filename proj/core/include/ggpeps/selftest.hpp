/*
 * Copyright 2026 The ggpeps Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/**
 * @brief Built-in invariant suite: a fast pass over the core identities on
 * the 2 x 2 torus.
 */

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ggpeps {

struct SelftestCase {
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  std::string detail;
};

std::vector<SelftestCase> run_selftest(std::uint64_t seed = 1);

}  // namespace ggpeps
