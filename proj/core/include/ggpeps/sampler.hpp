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
 * @brief Metropolis sampling of gauge-field configurations with single-link
 * updates and incrementally updated Pfaffian caches.
 */

#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ggpeps/ansatz.hpp"
#include "ggpeps/estimators.hpp"
#include "ggpeps/galg.hpp"
#include "ggpeps/lattice.hpp"
#include "ggpeps/rng.hpp"

namespace ggpeps {

struct MCConfig {
  long warmup = 10000;
  long samples = 100000;
  std::uint64_t seed = 1;
  int recompute_interval = 1000;
  int chains = 1;
  int n_bins = 50;
  long thin = 1;  // measure every `thin`-th post-warm-up step

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct MCEstimate {
  cplx mean;
  double stderr_re = 0.0;
  double stderr_im = 0.0;
  long n_samples = 0;
  int n_bins = 0;
  double acceptance_rate = 0.0;
};

/// Jackknife-over-bins standard error of the mean. Throws
/// std::invalid_argument when samples.size() < 2 * n_bins.
double binned_error(std::span<const double> samples, int n_bins);
std::pair<double, double> binned_error(std::span<const cplx> samples,
                                       int n_bins);

/// sum_i log |Pf(Gamma_in(G) + D_i)| from scratch.
double log_weight_fresh(const GaugeConfig& G, const Ansatz& A);

/**
 * One Markov chain. Owns the configuration, one PfaffianCache per layer and
 * its RNG; the ansatz must stay frozen (not rebuilt) while the chain lives.
 */
class Chain {
 public:
  /// Starts from the all-zero configuration.
  Chain(const Ansatz& A, std::uint64_t seed, int recompute_interval = 1000);

  /// One single-link Metropolis update; returns true if accepted.
  bool step();

  const GaugeConfig& config() const noexcept { return G_; }
  const Ansatz& ansatz() const noexcept { return *A_; }
  /// A_i^{-1} per layer.
  std::vector<const RMatrix*> inverses() const;
  /// sum_i log |Pf(A_i)| as tracked by the caches.
  double log_weight() const;

  long steps() const noexcept { return steps_; }
  long accepted() const noexcept { return accepted_; }
  /// Proposals whose weight ratio came out below -1e-8.
  long negative_ratios() const noexcept { return negative_; }

  /// Rebuilds every layer cache from scratch.
  void refresh();

 private:
  const Ansatz* A_;
  GaugeConfig G_;
  Rng rng_;
  std::vector<PfaffianCache> caches_;
  long steps_ = 0;
  long accepted_ = 0;
  long negative_ = 0;
};

struct ObservableSet {
  bool energy = true;
  bool gradient = true;
  /// Rectangular Wilson loops (R1, R2).
  std::vector<std::pair<int, int>> wilson_loops;
  /// Average each Wilson loop over all L^2 translations per sample.
  bool wilson_translation_average = true;
  EstimatorOptions estimator;
};

struct WilsonEstimate {
  int R1 = 1;
  int R2 = 1;
  MCEstimate estimate;
};

struct RunResult {
  EnergyAccumulator::Result energy;  // only meaningful if requested
  std::vector<WilsonEstimate> wilson;
  double acceptance_rate = 0.0;
  long n_measurements = 0;
  long excluded = 0;
  long negative_ratios = 0;
  double max_cache_drift = 0.0;  // relative, checked at chain end
};

/// Warm-up, then one measurement per `thin` steps; chains are merged in
/// index order so the result is fully determined by cfg.seed. Throws
/// NumericalError if the excluded-sample rate exceeds 1e-6.
RunResult run_chain(const Ansatz& A, double g, const ObservableSet& obs,
                    const MCConfig& cfg);

}  // namespace ggpeps
