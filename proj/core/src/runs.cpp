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

#include "ggpeps/runs.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>

#include "ggpeps/exact.hpp"
#include "ggpeps/io.hpp"
#include "ggpeps/sampler.hpp"
#include "ggpeps/selftest.hpp"
#include "json.hpp"

#ifndef GGPEPS_VERSION
#define GGPEPS_VERSION "unknown"
#endif

namespace ggpeps {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string code_version() { return GGPEPS_VERSION; }

namespace {

// JSON numbers cannot hold nan or inf.
json num(double v) { return std::isfinite(v) ? json(v) : json(format_double(v)); }

double from_num(const json& j) {
  return j.is_string() ? parse_double(j.get<std::string>()) : j.get<double>();
}

Ansatz ansatz_from(const RunConfig& c, const std::vector<double>& params) {
  if (params.empty()) {
    return Ansatz::with_default_init(c.geom(), c.layers, c.seed, c.init_y, c.init_z,
                                     c.jitter);
  }
  if (params.size() != static_cast<std::size_t>(2 * c.layers)) {
    throw ConfigError("params", "expected " + std::to_string(2 * c.layers) +
                                    " values for ansatz.layers = " +
                                    std::to_string(c.layers) + ", got " +
                                    std::to_string(params.size()));
  }
  Ansatz A(c.geom(), std::vector<LayerParams>(c.layers));
  A.set_param_vector(params);
  A.rebuild();
  return A;
}

json point_json(const SweepPoint& p) {
  json j;
  j["g"] = num(p.g);
  j["energy"] = num(p.energy);
  j["energy_density"] = num(p.energy_density);
  j["energy_err"] = num(p.energy_err);
  json ps = json::array();
  for (double v : p.params) ps.push_back(num(v));
  j["params"] = ps;
  j["iterations"] = p.iterations;
  j["converged"] = p.converged;
  if (!p.error.empty()) j["error"] = p.error;
  return j;
}

json fit_json(const FitResult& f) {
  json j;
  j["model"] = f.model;
  j["slope"] = num(f.slope);
  j["slope_err"] = num(f.slope_err);
  j["intercept"] = num(f.intercept);
  j["intercept_err"] = num(f.intercept_err);
  j["cov"] = {{num(f.cov[0][0]), num(f.cov[0][1])}, {num(f.cov[1][0]), num(f.cov[1][1])}};
  j["chi2"] = num(f.chi2);
  j["dof"] = f.dof;
  json loops = json::array();
  for (const auto& [a, b] : f.loops) loops.push_back({a, b});
  j["loops"] = loops;
  return j;
}

struct Ctx {
  const RunRequest& req;
  RunReport& rep;
  json results;

  std::string path(const std::string& name) const {
    return (fs::path(req.config.out_dir) / name).string();
  }
  void emit(const std::string& name, const std::string& content) {
    write_file(path(name), content);
    rep.outputs.push_back(name);
  }
};

void do_minimize(Ctx& x) {
  const RunConfig& c = x.req.config;
  if (c.g_grid.size() != 1) throw ConfigError("coupling.grid", "minimize takes one coupling");
  CsvTable cps;
  cps.header = checkpoint_header(c.layers);
  const SweepPoint pt = minimize_point(c.g(), c.sweep_options(), std::nullopt,
                                       [&](const Checkpoint& cp) {
                                         cps.rows.push_back(checkpoint_row(cp));
                                       });
  x.emit("minimize.csv", to_csv(sweep_table(std::span(&pt, 1), c.layers)));
  x.emit("checkpoints.csv", to_csv(cps));
  x.results["point"] = point_json(pt);
  char buf[160];
  std::snprintf(buf, sizeof buf, "g = %.6g  E = %.12g  E/plaquette = %.12g  iters = %d%s",
                pt.g, pt.energy, pt.energy_density, pt.iterations,
                pt.converged ? "" : "  (not converged)");
  x.rep.message = buf;
  if (!pt.error.empty()) {
    x.rep.ok = false;
    x.rep.message += "\nerror: " + pt.error;
  }
}

void do_sweep(Ctx& x) {
  const RunConfig& c = x.req.config;
  const std::vector<SweepPoint> pts = sweep(c.g_grid, c.sweep_options());
  x.emit("sweep.csv", to_csv(sweep_table(pts, c.layers)));
  json arr = json::array();
  int failed = 0;
  for (const SweepPoint& p : pts) {
    arr.push_back(point_json(p));
    if (!p.error.empty()) ++failed;
  }
  x.results["points"] = arr;
  x.rep.message = std::to_string(pts.size()) + " points, " + std::to_string(failed) +
                  " failed";
  x.rep.ok = failed == 0;
}

void do_measure(Ctx& x) {
  const RunConfig& c = x.req.config;
  if (c.g_grid.size() != 1) throw ConfigError("coupling.grid", "measure takes one coupling");
  std::vector<double> params = x.req.params;
  if (params.empty()) {
    if (x.req.input.empty()) {
      throw ConfigError("params", "measure needs --params or --from");
    }
    params = params_from_table(x.req.input, c.g(), c.layers);
  }
  const Ansatz A = ansatz_from(c, params);
  ObservableSet obs;
  obs.energy = true;
  obs.gradient = false;
  obs.wilson_loops = c.loops();
  MCConfig mc = c.mc;
  mc.seed = c.seed;
  const RunResult r = run_chain(A, c.g(), obs, mc);

  std::vector<WilsonRow> rows;
  for (const WilsonEstimate& w : r.wilson) {
    WilsonRow row;
    row.R1 = w.R1;
    row.R2 = w.R2;
    row.re = w.estimate.mean.real();
    row.im = w.estimate.mean.imag();
    row.err_re = w.estimate.stderr_re;
    row.err_im = w.estimate.stderr_im;
    row.n_samples = w.estimate.n_samples;
    rows.push_back(row);
  }
  x.emit("wilson.csv", to_csv(wilson_table(rows)));
  json ps = json::array();
  for (double v : params) ps.push_back(num(v));
  x.results["params"] = ps;
  x.results["energy"] = {num(r.energy.energy.mean), num(r.energy.energy.err)};
  x.results["acceptance_rate"] = num(r.acceptance_rate);
  x.results["n_measurements"] = r.n_measurements;
  x.results["loop_rule"] = c.wilson_loops.empty() ? to_string(c.loop_rule) : "explicit";
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu loops, acceptance %.4f, E = %.8g +- %.2g",
                rows.size(), r.acceptance_rate, r.energy.energy.mean, r.energy.energy.err);
  x.rep.message = buf;
}

void do_fit(Ctx& x) {
  if (x.req.input.empty()) throw ConfigError("input", "fit needs a Wilson-loop CSV");
  const std::vector<WilsonRow> rows = wilson_rows(from_csv(read_file(x.req.input)));
  CsvTable t;
  t.header = {"model", "slope", "slope_err", "intercept", "intercept_err", "cov_ss",
              "cov_si", "cov_ii", "chi2", "dof", "n_loops"};
  std::vector<FitResult> fits;
  std::string errors;
  for (bool area : {true, false}) {
    try {
      fits.push_back(area ? fit_area_law(rows) : fit_perimeter_law(rows));
      const FitResult& f = fits.back();
      t.rows.push_back({f.model, format_double(f.slope), format_double(f.slope_err),
                        format_double(f.intercept), format_double(f.intercept_err),
                        format_double(f.cov[0][0]), format_double(f.cov[0][1]),
                        format_double(f.cov[1][1]), format_double(f.chi2),
                        std::to_string(f.dof), std::to_string(f.loops.size())});
      x.results[f.model] = fit_json(f);
    } catch (const UnresolvableError& e) {
      const char* model = area ? "area" : "perimeter";
      x.results[model] = {{"error", e.what()}};
      errors += std::string(model) + ": " + e.what() + "\n";
    }
  }
  x.emit("fit.csv", to_csv(t));
  if (fits.size() == 2) x.results["model_preference"] = num(model_preference(fits[0], fits[1]));
  if (!errors.empty()) {
    x.rep.ok = false;
    x.rep.message = errors;
    return;
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "sigma = %.6g +- %.2g  kappa_p = %.6g +- %.2g",
                fits[0].slope, fits[0].slope_err, fits[1].slope, fits[1].slope_err);
  x.rep.message = buf;
}

void do_exact(Ctx& x) {
  const RunConfig& c = x.req.config;
  if (c.mode != EvalMode::exact) throw ConfigError("mode", "exact requires mode = exact");
  const Ansatz A = ansatz_from(c, x.req.params);
  CsvTable t;
  t.header = {"g", "E", "E_density", "P_re", "P_im", "W11_re", "W11_im"};
  for (int i = 1; i <= c.layers; ++i) {
    t.header.push_back("dE_dy" + std::to_string(i));
    t.header.push_back("dE_dz" + std::to_string(i));
  }
  ExactOptions ex;
  ex.strategy = c.exact_strategy;
  ex.threads = c.threads;
  json arr = json::array();
  for (double g : c.g_grid) {
    const ExactResult r = exact_contract(A, g, ex);
    std::vector<std::string> row{format_double(g), format_double(r.energy),
                                 format_double(r.energy_density), format_double(r.p.real()),
                                 format_double(r.p.imag()), format_double(r.w11.real()),
                                 format_double(r.w11.imag())};
    for (double d : r.grad) row.push_back(format_double(d));
    t.rows.push_back(std::move(row));
    json gj = json::array();
    for (double d : r.grad) gj.push_back(num(d));
    arr.push_back({{"g", num(g)}, {"energy", num(r.energy)},
                   {"energy_density", num(r.energy_density)},
                   {"p", {num(r.p.real()), num(r.p.imag())}},
                   {"w11", {num(r.w11.real()), num(r.w11.imag())}},
                   {"grad", gj}, {"n_configs", r.n_configs}});
  }
  x.emit("exact.csv", to_csv(t));
  json ps = json::array();
  for (double v : A.param_vector()) ps.push_back(num(v));
  x.results["params"] = ps;
  x.results["points"] = arr;
  x.rep.message = std::to_string(c.g_grid.size()) + " coupling(s) contracted";
  if (c.g_grid.size() == 1) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "E = %.12g  E/plaquette = %.12g  <P> = %.10g%+.3gi",
                  arr[0]["energy"].get<double>(), arr[0]["energy_density"].get<double>(),
                  arr[0]["p"][0].get<double>(), arr[0]["p"][1].get<double>());
    x.rep.message = buf;
  }
}

void do_ed(Ctx& x) {
  const RunConfig& c = x.req.config;
  CsvTable t;
  t.header = {"L", "N", "g", "E0", "E0_density", "sector_dim", "residual", "lanczos_steps"};
  json arr = json::array();
  std::string msg;
  for (double g : c.g_grid) {
    const EDResult r = ed_ground_energy(EDSpec{c.L, c.N, g});
    const double dens = r.E0 / (c.L * c.L);
    t.rows.push_back({std::to_string(c.L), std::to_string(c.N), format_double(g),
                      format_double(r.E0), format_double(dens), std::to_string(r.sector_dim),
                      format_double(r.residual), std::to_string(r.lanczos_steps)});
    arr.push_back({{"g", num(g)}, {"E0", num(r.E0)}, {"E0_density", num(dens)},
                   {"sector_dim", r.sector_dim}, {"residual", num(r.residual)},
                   {"lanczos_steps", r.lanczos_steps}});
    char buf[160];
    std::snprintf(buf, sizeof buf, "g = %.6g  E0 = %.12g  sector dimension = %d\n", g,
                  r.E0, r.sector_dim);
    msg += buf;
  }
  if (!msg.empty()) msg.pop_back();
  x.emit("ed.csv", to_csv(t));
  x.results["points"] = arr;
  x.rep.message = msg;
}

void do_selftest(Ctx& x) {
  const std::vector<SelftestCase> cases = run_selftest(x.req.config.seed);
  CsvTable t;
  t.header = {"name", "passed"};
  json arr = json::array();
  int failed = 0;
  std::string msg;
  for (const SelftestCase& s : cases) {
    t.rows.push_back({s.name, s.passed ? "1" : "0"});
    arr.push_back({{"name", s.name}, {"passed", s.passed}, {"seconds", s.seconds},
                   {"detail", s.detail}});
    if (!s.passed) ++failed;
    msg += std::string(s.passed ? "PASS " : "FAIL ") + s.name + "  " + s.detail + "\n";
  }
  x.emit("selftest.csv", to_csv(t));
  x.results["cases"] = arr;
  msg += std::to_string(cases.size() - failed) + "/" + std::to_string(cases.size()) +
         " passed";
  x.rep.message = msg;
  x.rep.ok = failed == 0;
}

}  // namespace

RunReport execute(const RunRequest& req) {
  req.config.validate();
  RunReport rep;
  rep.command = req.command;
  rep.out_dir = req.config.out_dir;
  Ctx x{req, rep, json::object()};
  fs::create_directories(req.config.out_dir);

  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (req.command == "minimize") {
      do_minimize(x);
    } else if (req.command == "sweep") {
      do_sweep(x);
    } else if (req.command == "measure") {
      do_measure(x);
    } else if (req.command == "fit") {
      do_fit(x);
    } else if (req.command == "exact") {
      do_exact(x);
    } else if (req.command == "ed") {
      do_ed(x);
    } else if (req.command == "selftest") {
      do_selftest(x);
    } else {
      throw ConfigError("command", "unknown command '" + req.command + "'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    rep.ok = false;
    rep.message = std::string("error: ") + e.what();
  }
  rep.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::string results_name = req.command + ".json";
  write_file(x.path(results_name), x.results.dump(2) + "\n");
  rep.outputs.push_back(results_name);

  json m;
  m["schema_version"] = kManifestSchemaVersion;
  m["command"] = req.command;
  m["code_version"] = code_version();
  json cfg = json::object();
  for (const std::string& k : config_keys()) cfg[k] = get_key(req.config, k);
  m["config"] = cfg;
  m["seeds"] = {{"master", req.config.seed},
                {"init", req.config.seed},
                {"mc", req.config.seed},
                {"bfgs", req.config.seed}};
  json ps = json::array();
  for (double v : req.params) ps.push_back(format_double(v));
  m["params"] = ps;
  m["input"] = req.input.empty() ? std::string() : fs::absolute(req.input).string();
  m["outputs"] = rep.outputs;
  m["timings"] = {{"wall_seconds", rep.seconds}};
  m["ok"] = rep.ok;
  m["message"] = rep.message;
  write_file(x.path("manifest.json"), m.dump(2) + "\n");
  return rep;
}

RunRequest request_from_manifest(const std::string& manifest_path) {
  const json m = json::parse(read_file(manifest_path));
  if (m.value("schema_version", 0) != kManifestSchemaVersion) {
    throw std::runtime_error("manifest: unsupported schema_version");
  }
  RunRequest req;
  req.command = m.at("command").get<std::string>();
  for (const auto& [k, v] : m.at("config").items()) set_key(req.config, k, v.get<std::string>());
  req.config.validate();
  for (const auto& p : m.at("params")) req.params.push_back(from_num(p));
  req.input = m.value("input", std::string());
  return req;
}

ReplayReport replay(const std::string& manifest_path, const std::string& out_dir) {
  RunRequest req = request_from_manifest(manifest_path);
  const fs::path orig = fs::path(manifest_path).parent_path();
  req.config.out_dir = out_dir;
  ReplayReport rr;
  rr.run = execute(req);
  for (const std::string& name : rr.run.outputs) {
    if (fs::path(name).extension() != ".csv") continue;
    rr.compared.push_back(name);
    const fs::path a = orig / name;
    if (!fs::exists(a) ||
        read_file(a.string()) != read_file((fs::path(out_dir) / name).string())) {
      rr.mismatched.push_back(name);
    }
  }
  return rr;
}

std::vector<double> params_from_table(const std::string& path, double g, int layers) {
  fs::path p(path);
  if (fs::is_directory(p)) p /= "minimize.csv";
  const CsvTable t = from_csv(read_file(p.string()));
  const std::size_t cg = t.column("g");
  const std::vector<std::string>* row = nullptr;
  if (t.rows.size() == 1) {
    row = &t.rows.front();
  } else {
    for (const auto& r : t.rows)
      if (parse_double(r[cg]) == g) row = &r;
  }
  if (!row) {
    throw std::runtime_error("no row with g = " + format_double(g) + " in '" +
                             p.string() + "'");
  }
  std::vector<double> out;
  for (int i = 1; i <= layers; ++i) {
    out.push_back(parse_double((*row)[t.column("y" + std::to_string(i))]));
    out.push_back(parse_double((*row)[t.column("z" + std::to_string(i))]));
  }
  return out;
}

}  // namespace ggpeps
