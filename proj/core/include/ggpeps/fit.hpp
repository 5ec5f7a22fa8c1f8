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
 * @brief Wilson-loop tables and weighted least-squares fits of the area and
 * perimeter laws.
 */

#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ggpeps {

struct WilsonRow {
  int R1 = 1;
  int R2 = 1;
  double re = 0.0;
  double im = 0.0;
  double err_re = 0.0;
  double err_im = 0.0;
  long n_samples = 0;
};

enum class LoopRule {
  at_most_one,  // |R1 - R2| <= 1
  square_only,  // |R1 - R2| < 1
};

const char* to_string(LoopRule rule);
LoopRule loop_rule_from_string(const std::string& s);

/// Loops with 1 <= R1, R2 <= L/2 obeying the rule, ordered by (R1, R2).
std::vector<std::pair<int, int>> loop_set(int L, LoopRule rule);

/// Raised when fewer than three loops carry a resolvable signal.
class UnresolvableError : public std::runtime_error {
 public:
  explicit UnresolvableError(const std::string& what)
      : std::runtime_error(what) {}
};

struct FitResult {
  std::string model;  // "area" or "perimeter"
  double slope = 0.0;      // sigma or kappa_p
  double slope_err = 0.0;
  double intercept = 0.0;  // of ln W
  double intercept_err = 0.0;
  double cov[2][2]{};      // (slope, intercept)
  double chi2 = 0.0;
  int dof = 0;
  std::vector<std::pair<int, int>> loops;
};

/// Weighted least squares of ln Re<W> against R1 R2 (area) or 2(R1 + R2)
/// (perimeter); only loops with Re<W> > 3 err_re enter. Throws
/// UnresolvableError ("unresolvable regime") with fewer than three.
FitResult fit_area_law(std::span<const WilsonRow> rows);
FitResult fit_perimeter_law(std::span<const WilsonRow> rows);

/// chi2/dof of the perimeter fit divided by that of the area fit; large
/// values favour the area law.
double model_preference(const FitResult& area, const FitResult& perimeter);

}  // namespace ggpeps
