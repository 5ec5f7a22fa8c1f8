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

// ggpeps: variational Monte Carlo for Z_N lattice gauge theory with gauged
// Gaussian fermionic PEPS.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ggpeps/config.hpp"
#include "ggpeps/io.hpp"
#include "ggpeps/runs.hpp"

namespace {

using ggpeps::ConfigError;
using ggpeps::RunConfig;
using ggpeps::RunRequest;

struct Common {
  std::string config_file;
  std::vector<std::string> sets;
  // Flag name -> config key; empty values are not applied.
  std::map<std::string, std::string> flags;
  std::string params;
  std::string from;
  std::string input;
};

const std::vector<std::pair<std::string, std::string>> kFlagKeys{
    {"L", "lattice.L"},          {"N", "lattice.N"},
    {"layers", "ansatz.layers"}, {"mode", "mode"},
    {"g", "coupling.g"},         {"g-grid", "coupling.grid"},
    {"kind", "opt.kind"},        {"seed", "seed"},
    {"out", "out_dir"},          {"warmup", "mc.warmup"},
    {"samples", "mc.samples"},   {"chains", "mc.chains"},
    {"threads", "threads"},      {"starts", "opt.starts"},
    {"max-iters", "opt.max_iters"}, {"loops", "wilson.loops"},
    {"rule", "wilson.rule"},     {"strategy", "exact.strategy"},
};

void add_common(CLI::App* sub, Common& c, bool with_params, bool with_from,
                bool with_input) {
  sub->add_option("-c,--config", c.config_file, "configuration file (key = value)");
  sub->add_option("--set", c.sets, "override one key: key=value (repeatable)");
  for (const auto& [flag, key] : kFlagKeys) {
    sub->add_option("--" + flag, c.flags[flag], "sets " + key);
  }
  sub->add_flag_callback("--warm-start", [&c] { c.sets.push_back("opt.warm_start=true"); },
                         "warm-start each sweep point from the previous one");
  if (with_params) sub->add_option("--params", c.params, "parameters y1,z1,y2,z2,...");
  if (with_from) sub->add_option("--from", c.from, "minimize run directory or CSV");
  if (with_input) sub->add_option("input", c.input, "Wilson-loop CSV")->required();
}

RunConfig build_config(const Common& c) {
  RunConfig cfg = c.config_file.empty() ? RunConfig{} : ggpeps::load_config(c.config_file);
  for (const auto& [flag, key] : kFlagKeys) {
    const auto it = c.flags.find(flag);
    if (it != c.flags.end() && !it->second.empty()) ggpeps::set_key(cfg, key, it->second);
  }
  for (const std::string& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set", "expected key=value, got '" + s + "'");
    ggpeps::set_key(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

std::vector<double> parse_params(const std::string& s) {
  std::vector<double> out;
  if (s.empty()) return out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t comma = std::min(s.find(',', pos), s.size());
    try {
      out.push_back(ggpeps::parse_double(s.substr(pos, comma - pos)));
    } catch (const std::invalid_argument&) {
      throw ConfigError("params", "not a number list: '" + s + "'");
    }
    pos = comma + 1;
  }
  return out;
}

int report(const ggpeps::RunReport& r) {
  std::cout << r.message << "\n";
  std::printf("[%s] %s in %.3f s, outputs in %s\n", r.command.c_str(),
              r.ok ? "ok" : "FAILED", r.seconds, r.out_dir.c_str());
  return r.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ggpeps: gauged Gaussian fermionic PEPS for Z_N lattice gauge theory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ggpeps::code_version());

  struct Sub {
    const char* name;
    const char* help;
    bool params, from, input;
  };
  const std::vector<Sub> subs{
      {"minimize", "minimize the energy at one coupling", false, false, false},
      {"sweep", "minimize over a coupling grid", false, false, false},
      {"measure", "Wilson-loop campaign for given parameters", true, true, false},
      {"fit", "area- and perimeter-law fits of a Wilson-loop table", false, false, true},
      {"exact", "exact contraction at given parameters", true, false, false},
      {"ed", "exact diagonalization ground energy", false, false, false},
      {"selftest", "run the invariant suite", false, false, false},
  };
  std::map<std::string, Common> commons;
  for (const Sub& s : subs) {
    add_common(app.add_subcommand(s.name, s.help), commons[s.name], s.params, s.from,
               s.input);
  }
  std::string manifest, replay_out;
  CLI::App* rp = app.add_subcommand("replay", "re-run a recorded run and compare its CSV outputs");
  rp->add_option("manifest", manifest, "manifest.json of the original run")->required();
  rp->add_option("--out", replay_out, "output directory for the replay")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (rp->parsed()) {
      const ggpeps::ReplayReport rr = ggpeps::replay(manifest, replay_out);
      report(rr.run);
      for (const std::string& f : rr.compared) {
        const bool bad = std::find(rr.mismatched.begin(), rr.mismatched.end(), f) !=
                         rr.mismatched.end();
        std::printf("%s %s\n", bad ? "DIFFERS  " : "identical", f.c_str());
      }
      return rr.identical() && rr.run.ok ? 0 : 1;
    }
    for (const Sub& s : subs) {
      if (!app.got_subcommand(s.name)) continue;
      const Common& c = commons[s.name];
      RunRequest req;
      req.command = s.name;
      req.config = build_config(c);
      req.params = parse_params(c.params);
      req.input = s.input ? c.input : c.from;
      return report(ggpeps::execute(req));
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
