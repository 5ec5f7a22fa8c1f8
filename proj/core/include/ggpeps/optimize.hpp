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
 * @brief Variational drivers: decaying-step gradient descent (sampled or
 * exact gradients), multi-start BFGS on the exact energy, coupling sweeps.
 */

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ggpeps/ansatz.hpp"
#include "ggpeps/exact.hpp"
#include "ggpeps/sampler.hpp"

namespace ggpeps {

/// Optimizers keep every parameter inside [-kParamClamp, kParamClamp].
inline constexpr double kParamClamp = 10.0;

/// Energy and gradient at one parameter point.
struct Evaluation {
  double energy = 0.0;
  double energy_err = 0.0;
  std::vector<double> grad;
  std::vector<double> grad_err;
};

using Objective = std::function<Evaluation(std::span<const double> params,
                                           int iteration)>;

struct Checkpoint {
  int start = 0;  // multi-start index (0 for descent)
  int iteration = 0;
  double g = 0.0;
  std::vector<double> params;  // (y1, z1, y2, z2, ...)
  double energy = 0.0;
  double energy_err = 0.0;
  double grad_norm = 0.0;
};

using CheckpointSink = std::function<void(const Checkpoint&)>;

/// Step xi0 * decay^i.
struct DescentSchedule {
  double xi0 = 0.01;
  double decay = 0.99;
  int max_iters = 300;
  /// Early stop once grad_norm stays below this for `patience` iterations.
  double grad_tol = 1e-4;
  int patience = 5;

  void validate() const;
  double step(int iteration) const;
};

struct DescentResult {
  std::vector<Checkpoint> trajectory;
  std::vector<double> params;
  bool converged = false;  // early stop triggered
  bool aborted = false;    // non-finite gradient
  std::string message;
};

/// Generic descent on an objective; `grad_scale` converts the raw gradient
/// into the quantity compared against grad_tol (max-norm times grad_scale).
DescentResult gradient_descent(const Objective& f, std::vector<double> p0,
                               const DescentSchedule& sched, double g,
                               double grad_scale = 1.0,
                               const CheckpointSink& sink = {});

/// MC mode: every iteration freezes the ansatz and runs a chain seeded
/// with derive_seed(mc.seed, iteration).
DescentResult gradient_descent(const Ansatz& A0, double g, const MCConfig& mc,
                               const DescentSchedule& sched,
                               const CheckpointSink& sink = {});

/// Exact-gradient variant of the descent.
DescentResult gradient_descent_exact(const Ansatz& A0, double g,
                                     const ExactOptions& ex,
                                     const DescentSchedule& sched,
                                     const CheckpointSink& sink = {});

struct BfgsOptions {
  int starts = 8;             // start 0 is the given point, the rest jittered
  double jitter = 0.05;
  std::uint64_t seed = 1;
  double grad_tol = 1e-8;     // max-norm
  int max_iters = 1000;
  int max_restarts = 3;
  /// Extra starting points tried in addition to the jittered ones.
  std::vector<std::vector<double>> extra_starts;
};

struct BfgsRun {
  std::vector<double> params;
  double energy = 0.0;
  std::vector<double> grad;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  int restarts = 0;
};

using BfgsObserver =
    std::function<void(int iteration, std::span<const double> x,
                       const Evaluation& ev)>;

/// One quasi-Newton run with Armijo backtracking from x0; on line-search
/// failure restarts from a perturbed point up to max_restarts times.
BfgsRun bfgs_run(const std::function<Evaluation(std::span<const double>)>& f,
                 std::vector<double> x0, const BfgsOptions& opts,
                 std::uint64_t restart_seed, const BfgsObserver& observe = {});

struct BfgsResult {
  BfgsRun best;
  std::vector<BfgsRun> runs;
  /// True when no start converged (best-so-far is returned).
  bool flagged = false;
};

/// Multi-start BFGS on the exact energy of A0's geometry and layer count.
BfgsResult bfgs_minimize(const Ansatz& A0, double g, const BfgsOptions& opts,
                         const ExactOptions& ex = {},
                         const CheckpointSink& sink = {});

/// Exact energy and gradient of the ansatz with parameters p.
Evaluation exact_objective(const LatticeGeom& geom, std::span<const double> p,
                           double g, const ExactOptions& ex);

enum class OptimizerKind { descent, bfgs };
enum class EvalMode { mc, exact };

struct SweepOptions {
  EvalMode mode = EvalMode::exact;
  OptimizerKind kind = OptimizerKind::bfgs;
  int L = 2;
  int N = 3;
  int layers = 1;
  double init_y = 0.1;
  double init_z = 0.1;
  double init_jitter = 0.01;
  std::uint64_t seed = 1;
  bool warm_start = false;
  /// BFGS with k > 1 layers also starts from the (k-1)-layer optimum padded
  /// with a y = z = 0 layer, which reproduces the (k-1)-layer state.
  bool nested_layers = true;
  int threads = 1;  // concurrent points (cold sweeps only)
  MCConfig mc;
  DescentSchedule schedule;
  BfgsOptions bfgs;
  ExactOptions exact;
};

struct SweepPoint {
  double g = 0.0;
  double energy = 0.0;
  double energy_density = 0.0;
  double energy_err = 0.0;
  std::vector<double> params;
  int iterations = 0;
  bool converged = false;
  std::string error;  // non-empty if the point failed
};

/// Requires a strictly increasing grid. Failed points are recorded and the
/// sweep continues.
std::vector<SweepPoint> sweep(std::span<const double> grid,
                              const SweepOptions& opts);

/// Minimization at one coupling, optionally from a given start.
SweepPoint minimize_point(double g, const SweepOptions& opts,
                          const std::optional<std::vector<double>>& start = {},
                          const CheckpointSink& sink = {});

}  // namespace ggpeps
