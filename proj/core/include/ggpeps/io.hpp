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
 * @brief CSV tables. Doubles are written with 17 significant digits so that
 * reading a table back yields the same bits.
 */

#pragma once

#include <span>
#include <string>
#include <vector>

#include "ggpeps/fit.hpp"
#include "ggpeps/optimize.hpp"

namespace ggpeps {

/// "%.17g"; non-finite values as nan, inf, -inf.
std::string format_double(double v);
/// Inverse of format_double. Throws std::invalid_argument.
double parse_double(const std::string& s);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws std::out_of_range.
  std::size_t column(const std::string& name) const;
};

/// No quoting: cells must not contain commas or newlines.
std::string to_csv(const CsvTable& t);
CsvTable from_csv(const std::string& text);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// Columns g, E, E_density, y1, z1, ..., yk, zk, iters, converged.
CsvTable sweep_table(std::span<const SweepPoint> points, int layers);

/// Columns start, iteration, g, y1, z1, ..., energy, energy_err, grad_norm.
std::vector<std::string> checkpoint_header(int layers);
std::vector<std::string> checkpoint_row(const Checkpoint& cp);

/// Columns R1, R2, re, im, err_re, err_im, n_samples.
CsvTable wilson_table(std::span<const WilsonRow> rows);
std::vector<WilsonRow> wilson_rows(const CsvTable& t);

}  // namespace ggpeps
