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

#include "ggpeps/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ggpeps {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(t.c_str(), &end);
  if (t.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(x)) {
    throw ConfigError(key, "expected a finite number, got '" + v + "'");
  }
  return x;
}

long long to_integer(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  errno = 0;
  char* end = nullptr;
  const long long x = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || *end != '\0' || errno == ERANGE) {
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  }
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  const long long x = to_integer(key, v);
  if (x < INT32_MIN || x > INT32_MAX) throw ConfigError(key, "out of range");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.push_back({});
  return out;
}

std::string grid_text(const std::vector<double>& grid) {
  std::string s;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i) s += ',';
    s += fmt_double(grid[i]);
  }
  return s;
}

std::vector<std::pair<int, int>> parse_loops(const std::string& key,
                                             const std::string& v) {
  std::vector<std::pair<int, int>> out;
  if (trim(v).empty()) return out;
  for (const std::string& item : split(v, ',')) {
    const auto x = item.find('x');
    if (x == std::string::npos) {
      throw ConfigError(key, "expected R1xR2 items, got '" + item + "'");
    }
    out.emplace_back(to_int(key, item.substr(0, x)), to_int(key, item.substr(x + 1)));
  }
  return out;
}

// Rethrows an invalid_argument of the form "field: why" as ConfigError.
[[noreturn]] void rethrow_field(const std::invalid_argument& e) {
  const std::string msg = e.what();
  const auto c = msg.find(": ");
  if (c == std::string::npos) throw ConfigError("config", msg);
  throw ConfigError(msg.substr(0, c), msg.substr(c + 2));
}

}  // namespace

const char* to_string(EvalMode m) { return m == EvalMode::mc ? "mc" : "exact"; }

const char* to_string(OptimizerKind k) {
  return k == OptimizerKind::bfgs ? "bfgs" : "descent";
}

const char* to_string(ContractionStrategy s) {
  return s == ContractionStrategy::gray ? "gray" : "orbit";
}

std::vector<double> parse_grid(const std::string& text) {
  const std::string t = trim(text);
  const std::string key = "coupling.grid";
  if (t.empty()) throw ConfigError(key, "empty grid");
  std::vector<double> out;
  if (t.find(':') != std::string::npos) {
    const auto parts = split(t, ':');
    if (parts.size() != 3) throw ConfigError(key, "expected a:b:n, got '" + text + "'");
    const double a = to_double(key, parts[0]);
    const double b = to_double(key, parts[1]);
    const int n = to_int(key, parts[2]);
    if (n < 1) throw ConfigError(key, "point count must be positive");
    if (n == 1) {
      if (a != b) throw ConfigError(key, "a single point needs a == b");
      return {a};
    }
    for (int i = 0; i < n; ++i) {
      out.push_back(i == n - 1 ? b : a + (b - a) * i / (n - 1));
    }
    return out;
  }
  for (const std::string& item : split(t, ',')) out.push_back(to_double(key, item));
  return out;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "lattice.L",        "lattice.N",         "ansatz.layers",
      "ansatz.init_y",    "ansatz.init_z",     "ansatz.jitter",
      "mode",             "coupling.grid",     "mc.warmup",
      "mc.samples",       "mc.recompute_interval", "mc.chains",
      "mc.n_bins",        "mc.thin",           "opt.kind",
      "opt.xi0",          "opt.decay",         "opt.max_iters",
      "opt.grad_tol",     "opt.patience",      "opt.starts",
      "opt.warm_start",   "exact.strategy",    "threads",
      "wilson.rule",      "wilson.loops",      "seed",
      "out_dir"};
  return keys;
}

void set_key(RunConfig& c, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "lattice.L") {
    c.L = to_int(key, v);
  } else if (key == "lattice.N") {
    c.N = to_int(key, v);
  } else if (key == "ansatz.layers") {
    c.layers = to_int(key, v);
  } else if (key == "ansatz.init_y") {
    c.init_y = to_double(key, v);
  } else if (key == "ansatz.init_z") {
    c.init_z = to_double(key, v);
  } else if (key == "ansatz.jitter") {
    c.jitter = to_double(key, v);
  } else if (key == "mode") {
    if (v == "mc") {
      c.mode = EvalMode::mc;
    } else if (v == "exact") {
      c.mode = EvalMode::exact;
    } else {
      throw ConfigError(key, "expected mc or exact, got '" + v + "'");
    }
  } else if (key == "coupling.g") {
    c.g_grid = {to_double(key, v)};
  } else if (key == "coupling.grid") {
    c.g_grid = parse_grid(v);
  } else if (key == "mc.warmup") {
    c.mc.warmup = static_cast<long>(to_integer(key, v));
  } else if (key == "mc.samples") {
    c.mc.samples = static_cast<long>(to_integer(key, v));
  } else if (key == "mc.recompute_interval") {
    c.mc.recompute_interval = to_int(key, v);
  } else if (key == "mc.chains") {
    c.mc.chains = to_int(key, v);
  } else if (key == "mc.n_bins") {
    c.mc.n_bins = to_int(key, v);
  } else if (key == "mc.thin") {
    c.mc.thin = static_cast<long>(to_integer(key, v));
  } else if (key == "opt.kind") {
    if (v == "default") {
      c.opt_kind.reset();
    } else if (v == "bfgs") {
      c.opt_kind = OptimizerKind::bfgs;
    } else if (v == "descent") {
      c.opt_kind = OptimizerKind::descent;
    } else {
      throw ConfigError(key, "expected bfgs, descent or default, got '" + v + "'");
    }
  } else if (key == "opt.xi0") {
    c.schedule.xi0 = to_double(key, v);
  } else if (key == "opt.decay") {
    c.schedule.decay = to_double(key, v);
  } else if (key == "opt.max_iters") {
    c.schedule.max_iters = to_int(key, v);
  } else if (key == "opt.grad_tol") {
    if (v == "default") {
      c.grad_tol.reset();
    } else {
      c.grad_tol = to_double(key, v);
    }
  } else if (key == "opt.patience") {
    c.schedule.patience = to_int(key, v);
  } else if (key == "opt.starts") {
    c.bfgs_starts = to_int(key, v);
  } else if (key == "opt.warm_start") {
    c.warm_start = to_bool(key, v);
  } else if (key == "exact.strategy") {
    if (v == "orbit") {
      c.exact_strategy = ContractionStrategy::orbit;
    } else if (v == "gray") {
      c.exact_strategy = ContractionStrategy::gray;
    } else {
      throw ConfigError(key, "expected orbit or gray, got '" + v + "'");
    }
  } else if (key == "threads") {
    c.threads = to_int(key, v);
  } else if (key == "wilson.rule") {
    try {
      c.loop_rule = loop_rule_from_string(v);
    } catch (const std::invalid_argument&) {
      throw ConfigError(key, "expected at_most_one or square_only, got '" + v + "'");
    }
  } else if (key == "wilson.loops") {
    c.wilson_loops = parse_loops(key, v);
  } else if (key == "seed") {
    const long long s = to_integer(key, v);
    if (s < 0) throw ConfigError(key, "must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "out_dir") {
    c.out_dir = v;
  } else {
    throw ConfigError(key, "unknown key");
  }
}

std::string get_key(const RunConfig& c, const std::string& key) {
  if (key == "lattice.L") return std::to_string(c.L);
  if (key == "lattice.N") return std::to_string(c.N);
  if (key == "ansatz.layers") return std::to_string(c.layers);
  if (key == "ansatz.init_y") return fmt_double(c.init_y);
  if (key == "ansatz.init_z") return fmt_double(c.init_z);
  if (key == "ansatz.jitter") return fmt_double(c.jitter);
  if (key == "mode") return to_string(c.mode);
  if (key == "coupling.g") return fmt_double(c.g());
  if (key == "coupling.grid") return grid_text(c.g_grid);
  if (key == "mc.warmup") return std::to_string(c.mc.warmup);
  if (key == "mc.samples") return std::to_string(c.mc.samples);
  if (key == "mc.recompute_interval") return std::to_string(c.mc.recompute_interval);
  if (key == "mc.chains") return std::to_string(c.mc.chains);
  if (key == "mc.n_bins") return std::to_string(c.mc.n_bins);
  if (key == "mc.thin") return std::to_string(c.mc.thin);
  if (key == "opt.kind") return c.opt_kind ? to_string(*c.opt_kind) : "default";
  if (key == "opt.xi0") return fmt_double(c.schedule.xi0);
  if (key == "opt.decay") return fmt_double(c.schedule.decay);
  if (key == "opt.max_iters") return std::to_string(c.schedule.max_iters);
  if (key == "opt.grad_tol") return c.grad_tol ? fmt_double(*c.grad_tol) : "default";
  if (key == "opt.patience") return std::to_string(c.schedule.patience);
  if (key == "opt.starts") return std::to_string(c.bfgs_starts);
  if (key == "opt.warm_start") return c.warm_start ? "true" : "false";
  if (key == "exact.strategy") return to_string(c.exact_strategy);
  if (key == "threads") return std::to_string(c.threads);
  if (key == "wilson.rule") return to_string(c.loop_rule);
  if (key == "wilson.loops") {
    std::string s;
    for (const auto& [a, b] : c.wilson_loops) {
      if (!s.empty()) s += ',';
      s += std::to_string(a) + "x" + std::to_string(b);
    }
    return s;
  }
  if (key == "seed") return std::to_string(c.seed);
  if (key == "out_dir") return c.out_dir;
  throw ConfigError(key, "unknown key");
}

void RunConfig::validate() const {
  if (L < 2 || L % 2 != 0) {
    throw ConfigError("lattice.L", "must be even and at least 2, got " + std::to_string(L));
  }
  if (N < 3) {
    throw ConfigError("lattice.N", "must be at least 3 (a Z_2 flux shift is orthogonal on a link)");
  }
  if (layers < 1) throw ConfigError("ansatz.layers", "must be positive");
  if (std::abs(init_y) > kParamClamp) throw ConfigError("ansatz.init_y", "outside the parameter clamp");
  if (std::abs(init_z) > kParamClamp) throw ConfigError("ansatz.init_z", "outside the parameter clamp");
  if (jitter < 0) throw ConfigError("ansatz.jitter", "must be non-negative");
  if (g_grid.empty()) throw ConfigError("coupling.grid", "empty grid");
  for (std::size_t i = 0; i < g_grid.size(); ++i) {
    if (!(g_grid[i] > 0)) throw ConfigError("coupling.grid", "couplings must be positive");
    if (i && !(g_grid[i] > g_grid[i - 1])) {
      throw ConfigError("coupling.grid", "must be strictly increasing");
    }
  }
  try {
    mc.validate();
    schedule.validate();
  } catch (const std::invalid_argument& e) {
    rethrow_field(e);
  }
  if (grad_tol && !(*grad_tol >= 0)) throw ConfigError("opt.grad_tol", "must be non-negative");
  if (bfgs_starts < 1) throw ConfigError("opt.starts", "must be positive");
  if (threads < 1) throw ConfigError("threads", "must be positive");
  if (optimizer() == OptimizerKind::bfgs && mode != EvalMode::exact) {
    throw ConfigError("opt.kind", "bfgs requires mode = exact");
  }
  if (mode == EvalMode::exact &&
      std::pow(static_cast<double>(N), 2.0 * L * L) > kMaxExactConfigs) {
    throw ConfigError("mode", "exact contraction is infeasible at L = " +
                                  std::to_string(L) + "; use mode = mc");
  }
  for (const auto& [a, b] : wilson_loops) {
    if (a < 1 || b < 1 || a > L / 2 || b > L / 2) {
      throw ConfigError("wilson.loops", "loop " + std::to_string(a) + "x" +
                                            std::to_string(b) + " exceeds L/2 = " +
                                            std::to_string(L / 2));
    }
  }
  if (out_dir.empty()) throw ConfigError("out_dir", "must not be empty");
}

std::vector<std::pair<int, int>> RunConfig::loops() const {
  return wilson_loops.empty() ? loop_set(L, loop_rule) : wilson_loops;
}

SweepOptions RunConfig::sweep_options() const {
  SweepOptions o;
  o.mode = mode;
  o.kind = optimizer();
  o.L = L;
  o.N = N;
  o.layers = layers;
  o.init_y = init_y;
  o.init_z = init_z;
  o.init_jitter = jitter;
  o.seed = seed;
  o.warm_start = warm_start;
  o.threads = threads;
  o.mc = mc;
  o.mc.seed = seed;
  o.schedule = schedule;
  o.bfgs.starts = bfgs_starts;
  o.bfgs.seed = seed;
  if (grad_tol) {
    o.schedule.grad_tol = *grad_tol;
    o.bfgs.grad_tol = *grad_tol;
  }
  o.exact.strategy = exact_strategy;
  return o;
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool have_g = false;
  bool have_grid = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key == "coupling.g") have_g = true;
    if (key == "coupling.grid") have_grid = true;
    if (have_g && have_grid) {
      throw ConfigError("coupling", "give either coupling.g or coupling.grid");
    }
    set_key(c, key, line.substr(eq + 1));
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const RunConfig& c) {
  std::string s;
  for (const std::string& k : config_keys()) s += k + " = " + get_key(c, k) + "\n";
  return s;
}

}  // namespace ggpeps
