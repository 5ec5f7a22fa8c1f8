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
 * @brief Run orchestration behind the command line tool. Every run writes
 * its tables as CSV, its results as JSON and a manifest.json from which the
 * run can be replayed.
 */

#pragma once

#include <string>
#include <vector>

#include "ggpeps/config.hpp"

namespace ggpeps {

inline constexpr int kManifestSchemaVersion = 1;

std::string code_version();

struct RunRequest {
  /// minimize, sweep, measure, fit, exact, ed or selftest.
  std::string command;
  RunConfig config;
  /// measure / exact: explicit parameters (y1, z1, ...). When empty, measure
  /// reads them from `input` and exact uses the configured initial point.
  std::vector<double> params;
  /// measure: a run directory or a minimize/sweep CSV; fit: a Wilson CSV.
  std::string input;
};

struct RunReport {
  std::string command;
  std::string out_dir;
  std::vector<std::string> outputs;  // file names inside out_dir
  bool ok = true;
  std::string message;
  double seconds = 0.0;
};

/// Runs the request and writes its outputs and manifest into
/// config.out_dir. Errors inside the run are reported with ok = false;
/// invalid requests throw.
RunReport execute(const RunRequest& req);

/// Reconstructs the request recorded by a manifest.
RunRequest request_from_manifest(const std::string& manifest_path);

struct ReplayReport {
  RunReport run;
  std::vector<std::string> compared;    // CSV outputs compared byte by byte
  std::vector<std::string> mismatched;
  bool identical() const { return mismatched.empty() && !compared.empty(); }
};

/// Re-executes a recorded run into `out_dir` and compares every CSV output
/// with the original.
ReplayReport replay(const std::string& manifest_path, const std::string& out_dir);

/// Parameters of the row whose g matches `g` (or the only row) of a
/// minimize or sweep table; a directory means its minimize.csv.
std::vector<double> params_from_table(const std::string& path, double g, int layers);

}  // namespace ggpeps
