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

#include "ggpeps/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>

#include "ggpeps/rng.hpp"

namespace ggpeps {

namespace {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void clamp_params(std::vector<double>& p) {
  for (double& x : p) x = std::clamp(x, -kParamClamp, kParamClamp);
}

std::vector<LayerParams> to_layers(std::span<const double> p) {
  if (p.size() % 2 != 0 || p.empty()) {
    throw std::invalid_argument("parameter vector must hold (y, z) pairs");
  }
  std::vector<LayerParams> out;
  for (std::size_t i = 0; i < p.size(); i += 2) out.push_back({p[i], p[i + 1]});
  return out;
}

}  // namespace

void DescentSchedule::validate() const {
  if (!(xi0 > 0)) throw std::invalid_argument("opt.xi0: must be positive");
  if (!(decay > 0 && decay <= 1)) {
    throw std::invalid_argument("opt.decay: must lie in (0, 1]");
  }
  if (max_iters < 1) throw std::invalid_argument("opt.max_iters: must be positive");
  if (!(grad_tol >= 0)) throw std::invalid_argument("opt.grad_tol: must be non-negative");
  if (patience < 1) throw std::invalid_argument("opt.patience: must be positive");
}

double DescentSchedule::step(int iteration) const {
  return xi0 * std::pow(decay, iteration);
}

DescentResult gradient_descent(const Objective& f, std::vector<double> p0,
                               const DescentSchedule& sched, double g,
                               double grad_scale, const CheckpointSink& sink) {
  sched.validate();
  DescentResult out;
  std::vector<double> p = std::move(p0);
  clamp_params(p);
  int below = 0;
  for (int it = 0; it < sched.max_iters; ++it) {
    const Evaluation ev = f(p, it);
    if (!std::isfinite(ev.energy) || !all_finite(ev.grad) || ev.grad.size() != p.size()) {
      out.aborted = true;
      out.message = "non-finite energy or gradient at iteration " + std::to_string(it);
      break;
    }
    Checkpoint cp;
    cp.iteration = it;
    cp.g = g;
    cp.params = p;
    cp.energy = ev.energy;
    cp.energy_err = ev.energy_err;
    cp.grad_norm = max_abs(ev.grad) * grad_scale;
    out.trajectory.push_back(cp);
    if (sink) sink(cp);

    below = cp.grad_norm < sched.grad_tol ? below + 1 : 0;
    if (below >= sched.patience) {
      out.converged = true;
      break;
    }
    const double xi = sched.step(it);
    for (std::size_t k = 0; k < p.size(); ++k) p[k] -= xi * ev.grad[k];
    clamp_params(p);
  }
  out.params = out.trajectory.empty() ? p : out.trajectory.back().params;
  return out;
}

DescentResult gradient_descent(const Ansatz& A0, double g, const MCConfig& mc,
                               const DescentSchedule& sched,
                               const CheckpointSink& sink) {
  mc.validate();
  const LatticeGeom geom = A0.geom();
  ObservableSet obs;
  obs.energy = true;
  obs.gradient = true;
  auto f = [&](std::span<const double> p, int it) {
    const Ansatz A(geom, to_layers(p));
    MCConfig cfg = mc;
    cfg.seed = derive_seed(mc.seed, static_cast<std::uint64_t>(it));
    const RunResult r = run_chain(A, g, obs, cfg);
    Evaluation ev;
    ev.energy = r.energy.energy.mean;
    ev.energy_err = r.energy.energy.err;
    for (const JackknifeValue& v : r.energy.grad) {
      ev.grad.push_back(v.mean);
      ev.grad_err.push_back(v.err);
    }
    return ev;
  };
  return gradient_descent(f, A0.param_vector(), sched, g,
                          1.0 / geom.n_plaquettes(), sink);
}

Evaluation exact_objective(const LatticeGeom& geom, std::span<const double> p,
                           double g, const ExactOptions& ex) {
  const Ansatz A(geom, to_layers(p));
  const ExactResult r = exact_contract(A, g, ex);
  Evaluation ev;
  ev.energy = r.energy;
  ev.grad = r.grad;
  ev.grad_err.assign(r.grad.size(), 0.0);
  return ev;
}

DescentResult gradient_descent_exact(const Ansatz& A0, double g,
                                     const ExactOptions& ex,
                                     const DescentSchedule& sched,
                                     const CheckpointSink& sink) {
  const LatticeGeom geom = A0.geom();
  auto f = [&](std::span<const double> p, int) {
    return exact_objective(geom, p, g, ex);
  };
  return gradient_descent(f, A0.param_vector(), sched, g,
                          1.0 / geom.n_plaquettes(), sink);
}

// --- BFGS ----------------------------------------------------------------------

BfgsRun bfgs_run(const std::function<Evaluation(std::span<const double>)>& f,
                 std::vector<double> x0, const BfgsOptions& opts,
                 std::uint64_t restart_seed, const BfgsObserver& observe) {
  const Eigen::Index n = static_cast<Eigen::Index>(x0.size());
  Rng rng(restart_seed);
  BfgsRun run;
  clamp_params(x0);
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(x0.data(), n);

  auto eval = [&](const Eigen::VectorXd& p) {
    ++run.evaluations;
    Evaluation ev = f(std::span<const double>(p.data(), static_cast<std::size_t>(n)));
    if (!std::isfinite(ev.energy) || !all_finite(ev.grad) ||
        static_cast<Eigen::Index>(ev.grad.size()) != n) {
      throw NumericalError("bfgs: non-finite energy or gradient", INFINITY);
    }
    return ev;
  };
  auto as_vec = [&](const std::vector<double>& v) {
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), n));
  };

  Evaluation ev = eval(x);
  Eigen::VectorXd gr = as_vec(ev.grad);
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
  bool fresh_H = true;

  Eigen::VectorXd best_x = x;
  Evaluation best_ev = ev;
  auto track_best = [&] {
    if (ev.energy < best_ev.energy) {
      best_x = x;
      best_ev = ev;
    }
  };

  // Coordinates pinned at the box with the descent direction pointing out
  // are held fixed; convergence is judged on the remaining components.
  std::vector<bool> active(static_cast<std::size_t>(n), false);
  auto update_active = [&] {
    bool changed = false;
    for (Eigen::Index k = 0; k < n; ++k) {
      const bool a = (x[k] >= kParamClamp && gr[k] < 0) || (x[k] <= -kParamClamp && gr[k] > 0);
      changed = changed || a != active[k];
      active[k] = a;
    }
    return changed;
  };
  auto projected = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out = v;
    for (Eigen::Index k = 0; k < n; ++k)
      if (active[k]) out[k] = 0.0;
    return out;
  };

  constexpr double c1 = 1e-4;
  for (int it = 0; it < opts.max_iters; ++it) {
    if (observe) observe(it, std::span<const double>(x.data(), n), ev);
    if (update_active()) {
      H.setIdentity();
      fresh_H = true;
    }
    const Eigen::VectorXd pg = projected(gr);
    if (pg.cwiseAbs().maxCoeff() < opts.grad_tol) {
      run.converged = true;
      break;
    }
    ++run.iterations;
    Eigen::VectorXd d = projected(-H * pg);
    if (!(pg.dot(d) < 0)) {
      H.setIdentity();
      fresh_H = true;
      d = -pg;
    }
    // Bound the trial step so a poor Hessian guess cannot leave the box.
    double t = std::min(1.0, 1.0 / std::max(1e-300, d.cwiseAbs().maxCoeff()));
    const double tol = 1e-12 * std::max(1.0, std::abs(ev.energy));
    bool found = false;
    Eigen::VectorXd xn;
    Evaluation evn;
    for (int ls = 0; ls < 60; ++ls) {
      xn = (x + t * d).cwiseMax(-kParamClamp).cwiseMin(kParamClamp);
      evn = eval(xn);
      if (evn.energy <= ev.energy + c1 * gr.dot(xn - x) + tol) {
        found = true;
        break;
      }
      t *= 0.5;
    }
    if (!found) {
      if (run.restarts >= opts.max_restarts) break;
      ++run.restarts;
      for (Eigen::Index k = 0; k < n; ++k)
        x[k] = std::clamp(best_x[k] + rng.uniform(-opts.jitter, opts.jitter),
                          -kParamClamp, kParamClamp);
      ev = eval(x);
      gr = as_vec(ev.grad);
      H.setIdentity();
      fresh_H = true;
      track_best();
      continue;
    }
    const Eigen::VectorXd s = xn - x;
    const Eigen::VectorXd gn = as_vec(evn.grad);
    const Eigen::VectorXd y = projected(gn - gr);
    const double sy = s.dot(y);
    if (sy > 1e-16 * s.norm() * y.norm()) {
      if (fresh_H) {
        H *= sy / y.squaredNorm();
        fresh_H = false;
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) +
          rho * s * s.transpose();
    }
    x = xn;
    ev = evn;
    gr = gn;
    track_best();
  }
  if (!run.converged) {
    x = best_x;
    ev = best_ev;
  }
  run.params.assign(x.data(), x.data() + n);
  run.energy = ev.energy;
  run.grad = ev.grad;
  return run;
}

BfgsResult bfgs_minimize(const Ansatz& A0, double g, const BfgsOptions& opts,
                         const ExactOptions& ex, const CheckpointSink& sink) {
  if (opts.starts < 1) throw std::invalid_argument("opt.starts: must be positive");
  const LatticeGeom geom = A0.geom();
  const std::vector<double> x0 = A0.param_vector();
  auto f = [&](std::span<const double> p) { return exact_objective(geom, p, g, ex); };

  std::vector<std::vector<double>> starts{x0};
  for (int s = 1; s < opts.starts; ++s) {
    Rng rng(derive_seed(opts.seed, static_cast<std::uint64_t>(s)));
    std::vector<double> p = x0;
    for (double& v : p) v += rng.uniform(-opts.jitter, opts.jitter);
    starts.push_back(std::move(p));
  }
  for (const auto& e : opts.extra_starts) {
    if (e.size() != x0.size()) {
      throw std::invalid_argument("bfgs: extra start has the wrong parameter count");
    }
    starts.push_back(e);
  }

  BfgsResult out;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    BfgsObserver obs;
    if (sink) {
      obs = [&, s](int it, std::span<const double> x, const Evaluation& ev) {
        Checkpoint cp;
        cp.start = static_cast<int>(s);
        cp.iteration = it;
        cp.g = g;
        cp.params.assign(x.begin(), x.end());
        cp.energy = ev.energy;
        cp.grad_norm = max_abs(ev.grad);
        sink(cp);
      };
    }
    out.runs.push_back(bfgs_run(f, starts[s], opts,
                                derive_seed(opts.seed, 1000 + s), obs));
  }
  std::size_t best = 0;
  for (std::size_t s = 1; s < out.runs.size(); ++s)
    if (out.runs[s].energy < out.runs[best].energy) best = s;
  out.best = out.runs[best];
  out.flagged = !out.best.converged;
  return out;
}

// --- Sweeps --------------------------------------------------------------------

SweepPoint minimize_point(double g, const SweepOptions& opts,
                          const std::optional<std::vector<double>>& start,
                          const CheckpointSink& sink) {
  const LatticeGeom geom(opts.L, opts.N);
  const Ansatz A0 =
      start ? Ansatz(geom, to_layers(*start))
            : Ansatz::with_default_init(geom, opts.layers, opts.seed, opts.init_y,
                                        opts.init_z, opts.init_jitter);
  SweepPoint pt;
  pt.g = g;
  if (opts.kind == OptimizerKind::bfgs) {
    if (opts.mode != EvalMode::exact) {
      throw std::invalid_argument("opt.kind: bfgs requires mode = exact");
    }
    BfgsOptions bo = opts.bfgs;
    if (opts.nested_layers && opts.layers > 1 && !start) {
      SweepOptions sub = opts;
      sub.layers = opts.layers - 1;
      std::vector<double> p = minimize_point(g, sub).params;
      p.push_back(0.0);
      p.push_back(0.0);
      bo.extra_starts.push_back(std::move(p));
    }
    const BfgsResult r = bfgs_minimize(A0, g, bo, opts.exact, sink);
    pt.energy = r.best.energy;
    pt.params = r.best.params;
    pt.iterations = r.best.iterations;
    pt.converged = !r.flagged;
  } else {
    const DescentResult r =
        opts.mode == EvalMode::mc
            ? gradient_descent(A0, g, opts.mc, opts.schedule, sink)
            : gradient_descent_exact(A0, g, opts.exact, opts.schedule, sink);
    if (r.trajectory.empty()) throw NumericalError(r.message, INFINITY);
    pt.energy = r.trajectory.back().energy;
    pt.energy_err = r.trajectory.back().energy_err;
    pt.params = r.params;
    pt.iterations = static_cast<int>(r.trajectory.size());
    pt.converged = r.converged;
    if (r.aborted) pt.error = r.message;
  }
  pt.energy_density = pt.energy / geom.n_plaquettes();
  return pt;
}

std::vector<SweepPoint> sweep(std::span<const double> grid,
                              const SweepOptions& opts) {
  if (grid.empty()) throw std::invalid_argument("coupling.grid: empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("coupling.grid: must be strictly increasing");
    }
  }
  if (opts.threads < 1) throw std::invalid_argument("sweep.threads: must be positive");
  std::vector<SweepPoint> out(grid.size());
  auto one = [&](std::size_t i, const std::optional<std::vector<double>>& start) {
    try {
      out[i] = minimize_point(grid[i], opts, start);
    } catch (const std::exception& e) {
      out[i] = SweepPoint{};
      out[i].g = grid[i];
      out[i].energy = std::numeric_limits<double>::quiet_NaN();
      out[i].energy_density = out[i].energy;
      out[i].error = e.what();
    }
  };

  if (opts.warm_start) {
    std::optional<std::vector<double>> start;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      one(i, start);
      if (out[i].error.empty()) start = out[i].params;
    }
    return out;
  }
  const std::size_t nt = std::min<std::size_t>(opts.threads, grid.size());
  std::vector<std::future<void>> futs;
  for (std::size_t t = 0; t < nt; ++t) {
    futs.push_back(std::async(nt > 1 ? std::launch::async : std::launch::deferred,
                              [&, t] {
                                for (std::size_t i = t; i < grid.size(); i += nt)
                                  one(i, std::nullopt);
                              }));
  }
  for (auto& f : futs) f.get();
  return out;
}

}  // namespace ggpeps
