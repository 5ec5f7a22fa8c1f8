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

#include "ggpeps/fit.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

namespace ggpeps {

const char* to_string(LoopRule rule) {
  return rule == LoopRule::at_most_one ? "at_most_one" : "square_only";
}

LoopRule loop_rule_from_string(const std::string& s) {
  if (s == "at_most_one") return LoopRule::at_most_one;
  if (s == "square_only") return LoopRule::square_only;
  throw std::invalid_argument("wilson.rule: unknown rule '" + s + "'");
}

std::vector<std::pair<int, int>> loop_set(int L, LoopRule rule) {
  const int max_r = L / 2;
  const int max_diff = rule == LoopRule::at_most_one ? 1 : 0;
  std::vector<std::pair<int, int>> out;
  for (int a = 1; a <= max_r; ++a)
    for (int b = 1; b <= max_r; ++b)
      if (std::abs(a - b) <= max_diff) out.emplace_back(a, b);
  return out;
}

namespace {

FitResult wls(std::span<const WilsonRow> rows, bool area) {
  FitResult f;
  f.model = area ? "area" : "perimeter";
  double s = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
  std::vector<double> xs, ys, ws;
  for (const WilsonRow& r : rows) {
    if (!(r.err_re > 0) || !(r.re > 3.0 * r.err_re)) continue;
    const double x = area ? double(r.R1) * r.R2 : 2.0 * (r.R1 + r.R2);
    const double y = std::log(r.re);
    const double sig = r.err_re / r.re;
    const double w = 1.0 / (sig * sig);
    xs.push_back(x);
    ys.push_back(y);
    ws.push_back(w);
    s += w;
    sx += w * x;
    sxx += w * x * x;
    sy += w * y;
    sxy += w * x * y;
    f.loops.emplace_back(r.R1, r.R2);
  }
  if (f.loops.size() < 3) {
    throw UnresolvableError("unresolvable regime: " + std::to_string(f.loops.size()) +
                            " loop(s) with Re<W> > 3 err, need 3");
  }
  const double det = s * sxx - sx * sx;
  if (!(det > 1e-12 * s * sxx)) {
    throw UnresolvableError("unresolvable regime: resolvable loops share one " +
                            f.model);
  }
  // ln W = a + b x
  const double b = (s * sxy - sx * sy) / det;
  const double a = (sxx * sy - sx * sxy) / det;
  const double var_b = s / det;
  const double var_a = sxx / det;
  const double cov_ab = -sx / det;

  f.slope = -b;
  f.slope_err = std::sqrt(var_b);
  f.intercept = a;
  f.intercept_err = std::sqrt(var_a);
  f.cov[0][0] = var_b;
  f.cov[1][1] = var_a;
  f.cov[0][1] = f.cov[1][0] = -cov_ab;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - a - b * xs[i];
    f.chi2 += ws[i] * r * r;
  }
  f.dof = static_cast<int>(xs.size()) - 2;
  return f;
}

}  // namespace

FitResult fit_area_law(std::span<const WilsonRow> rows) { return wls(rows, true); }

FitResult fit_perimeter_law(std::span<const WilsonRow> rows) {
  return wls(rows, false);
}

double model_preference(const FitResult& area, const FitResult& perimeter) {
  if (area.dof < 1 || perimeter.dof < 1) return std::numeric_limits<double>::quiet_NaN();
  const double ra = area.chi2 / area.dof;
  const double rp = perimeter.chi2 / perimeter.dof;
  if (ra == 0.0) return rp == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return rp / ra;
}

}  // namespace ggpeps
