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

#include "ggpeps/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ggpeps {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  return v;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::out_of_range("csv: no column '" + name + "'");
}

std::string to_csv(const CsvTable& t) {
  auto line = [](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) s += ',';
      s += cells[i];
    }
    return s + '\n';
  };
  std::string out = line(t.header);
  for (const auto& r : t.rows) out += line(r);
  return out;
}

CsvTable from_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.emplace_back();
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      if (cells.size() != t.header.size()) {
        throw std::invalid_argument("csv: row has " + std::to_string(cells.size()) +
                                    " cells, header has " +
                                    std::to_string(t.header.size()));
      }
      t.rows.push_back(std::move(cells));
    }
  }
  if (first) throw std::invalid_argument("csv: empty table");
  return t;
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << content;
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

CsvTable sweep_table(std::span<const SweepPoint> points, int layers) {
  CsvTable t;
  t.header = {"g", "E", "E_density"};
  for (int i = 1; i <= layers; ++i) {
    t.header.push_back("y" + std::to_string(i));
    t.header.push_back("z" + std::to_string(i));
  }
  t.header.push_back("iters");
  t.header.push_back("converged");
  for (const SweepPoint& p : points) {
    std::vector<std::string> r{format_double(p.g), format_double(p.energy),
                               format_double(p.energy_density)};
    for (int i = 0; i < 2 * layers; ++i) {
      r.push_back(i < static_cast<int>(p.params.size()) ? format_double(p.params[i])
                                                        : "nan");
    }
    r.push_back(std::to_string(p.iterations));
    r.push_back(p.converged ? "1" : "0");
    t.rows.push_back(std::move(r));
  }
  return t;
}

std::vector<std::string> checkpoint_header(int layers) {
  std::vector<std::string> h{"start", "iteration", "g"};
  for (int i = 1; i <= layers; ++i) {
    h.push_back("y" + std::to_string(i));
    h.push_back("z" + std::to_string(i));
  }
  h.insert(h.end(), {"energy", "energy_err", "grad_norm"});
  return h;
}

std::vector<std::string> checkpoint_row(const Checkpoint& cp) {
  std::vector<std::string> r{std::to_string(cp.start), std::to_string(cp.iteration),
                             format_double(cp.g)};
  for (double p : cp.params) r.push_back(format_double(p));
  r.push_back(format_double(cp.energy));
  r.push_back(format_double(cp.energy_err));
  r.push_back(format_double(cp.grad_norm));
  return r;
}

CsvTable wilson_table(std::span<const WilsonRow> rows) {
  CsvTable t;
  t.header = {"R1", "R2", "re", "im", "err_re", "err_im", "n_samples"};
  for (const WilsonRow& w : rows) {
    t.rows.push_back({std::to_string(w.R1), std::to_string(w.R2), format_double(w.re),
                      format_double(w.im), format_double(w.err_re),
                      format_double(w.err_im), std::to_string(w.n_samples)});
  }
  return t;
}

std::vector<WilsonRow> wilson_rows(const CsvTable& t) {
  const std::size_t c1 = t.column("R1"), c2 = t.column("R2"), cre = t.column("re"),
                    cim = t.column("im"), cer = t.column("err_re"),
                    cei = t.column("err_im"), cn = t.column("n_samples");
  std::vector<WilsonRow> out;
  for (const auto& r : t.rows) {
    WilsonRow w;
    w.R1 = std::stoi(r[c1]);
    w.R2 = std::stoi(r[c2]);
    w.re = parse_double(r[cre]);
    w.im = parse_double(r[cim]);
    w.err_re = parse_double(r[cer]);
    w.err_im = parse_double(r[cei]);
    w.n_samples = std::stol(r[cn]);
    out.push_back(w);
  }
  return out;
}

}  // namespace ggpeps
