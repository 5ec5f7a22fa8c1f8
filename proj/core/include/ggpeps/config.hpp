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
 * @brief Run configuration: a flat `key = value` text format, validation
 * with field paths, and conversion into optimizer options.
 */

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ggpeps/fit.hpp"
#include "ggpeps/optimize.hpp"

namespace ggpeps {

/// Validation failure; `field()` is the dotted key that was rejected.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& why)
      : std::invalid_argument(field + ": " + why), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct RunConfig {
  int L = 2;
  int N = 3;
  int layers = 1;
  double init_y = 0.1;
  double init_z = 0.1;
  double jitter = 0.01;
  EvalMode mode = EvalMode::exact;
  /// coupling.g gives a one-point grid.
  std::vector<double> g_grid{1.0};
  MCConfig mc;
  /// Unset: bfgs in exact mode, descent in mc mode.
  std::optional<OptimizerKind> opt_kind;
  DescentSchedule schedule;
  /// opt.grad_tol when given; otherwise each optimizer keeps its default.
  std::optional<double> grad_tol;
  int bfgs_starts = 8;
  bool warm_start = false;
  ContractionStrategy exact_strategy = ContractionStrategy::orbit;
  int threads = 1;
  LoopRule loop_rule = LoopRule::at_most_one;
  /// Explicit loop list; empty means loop_set(L, loop_rule).
  std::vector<std::pair<int, int>> wilson_loops;
  std::uint64_t seed = 1;
  std::string out_dir = "out";

  /// Throws ConfigError on the first invalid field.
  void validate() const;

  double g() const { return g_grid.front(); }
  OptimizerKind optimizer() const {
    return opt_kind.value_or(mode == EvalMode::exact ? OptimizerKind::bfgs
                                                     : OptimizerKind::descent);
  }
  std::vector<std::pair<int, int>> loops() const;
  LatticeGeom geom() const { return LatticeGeom(L, N); }
  SweepOptions sweep_options() const;
};

/// Keys accepted by set_key, in canonical order.
const std::vector<std::string>& config_keys();

/// Sets one key from text. Throws ConfigError for unknown keys or bad values.
void set_key(RunConfig& cfg, const std::string& key, const std::string& value);

/// Canonical text of one key.
std::string get_key(const RunConfig& cfg, const std::string& key);

/// Parses `key = value` lines; '#' starts a comment. Validates the result.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// "a:b:n" (n evenly spaced points, endpoints included) or a comma list.
std::vector<double> parse_grid(const std::string& text);

/// Every key in canonical form; parse_config(format_config(c)) == c.
std::string format_config(const RunConfig& cfg);

const char* to_string(EvalMode m);
const char* to_string(OptimizerKind k);
const char* to_string(ContractionStrategy s);

}  // namespace ggpeps
