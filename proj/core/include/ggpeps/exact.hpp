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
 * @brief Reference engines: exact contraction by summing over every gauge
 * configuration, exact diagonalization in the gauge-invariant sector, and
 * literal Fock-space amplitudes for systems of at most 12 modes.
 */

#pragma once

#include <Eigen/Sparse>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ggpeps/ansatz.hpp"
#include "ggpeps/estimators.hpp"
#include "ggpeps/lattice.hpp"

namespace ggpeps {

/// Largest configuration count N^(2L^2) the exact engines accept.
inline constexpr double kMaxExactConfigs = 1e7;

/// Throws std::invalid_argument (pointing at MC mode) above the limit.
std::uint64_t exact_config_count(const LatticeGeom& geom);

struct GaugeOrbits {
  std::vector<std::uint64_t> representatives;  // smallest code per orbit
  std::vector<int> sizes;
  std::vector<int> orbit_of;  // per configuration code
};

/// Orbits of the group generated by the vertex gauge transformations.
GaugeOrbits gauge_orbits(const LatticeGeom& geom);

enum class ContractionStrategy {
  /// One configuration per gauge orbit, weighted by the orbit size.
  orbit,
  /// Every configuration, visited in reflected Gray-code order with
  /// incremental Pfaffian updates.
  gray,
};

struct ExactOptions {
  ContractionStrategy strategy = ContractionStrategy::orbit;
  EstimatorOptions estimator;
  bool with_raise = false;  // also evaluate <P^dag>
  int recompute_interval = 100;
  int threads = 1;
};

struct ExactResult {
  double energy = 0.0;
  double energy_density = 0.0;
  cplx p;      // <P> on the representative link
  cplx p_dag;  // <P^dag>, if requested
  cplx w11;    // <W(1,1)> on the representative plaquette
  std::vector<double> grad;       // dE / dp
  std::vector<double> grad_imag;  // imaginary part of the complex local-energy gradient
  std::vector<double> p_grad_re;  // d Re<P> / dp
  std::uint64_t n_configs = 0;    // configurations evaluated
};

ExactResult exact_contract(const Ansatz& A, double g,
                           const ExactOptions& opts = {});

/// log |Psi(G)|^2 (up to a G-independent constant) for every configuration
/// code, either from scratch or along the Gray-code walk.
std::vector<double> exact_log_weights(const Ansatz& A,
                                      ContractionStrategy strategy,
                                      int recompute_interval = 100);

/// Sum_G exp(log_w(G)) F(G) / Sum_G exp(log_w(G)) for a diagonal observable.
cplx exact_diagonal_expectation(const Ansatz& A,
                                std::span<const OrientedLink> path);

/**
 * <P> on `link` as sum_G Psi*(G-)Psi(G) / sum_G |Psi(G)|^2, with every term
 * evaluated by the general overlap identity
 * Tr(XY) = 2^-n Pf(Gamma_X) Pf(Gamma_Y - Gamma_X^-1) on full matrices:
 * X is the (mixed) projector operator, Y the fiducial state. Prefactors come
 * from per-link Fock overlaps. Independent of the block-ratio kernels.
 */
cplx electric_overlap_oracle(const Ansatz& A, LinkId link, int shift = -1);

/// Psi*(G')Psi(G) including every scalar prefactor, with G' = G shifted by
/// `shift` on `link` (shift = 0 gives |Psi(G)|^2). Full Pfaffians.
cplx pipeline_amplitude_product(const Ansatz& A, const GaugeConfig& G,
                                LinkId link, int shift);

// --- Exact diagonalization ---------------------------------------------------

struct EDSpec {
  int L = 2;
  int N = 3;
  double g = 1.0;
};

struct EDResult {
  double E0 = 0.0;
  double residual = 0.0;
  int sector_dim = 0;
  int lanczos_steps = 0;
  std::vector<double> ground_state;  // empty when loaded from the disk cache
  bool from_cache = false;
};

/// Hamiltonian on the full group-element basis (index = config code).
Eigen::SparseMatrix<double> build_hamiltonian(const LatticeGeom& geom,
                                              double g);

/// Lanczos in the gauge-invariant sector. With a non-empty cache_dir the
/// result is read from / written to a JSON file keyed by (L, N, g).
EDResult ed_ground_energy(const EDSpec& spec, const std::string& cache_dir = "");

/// Ground energy from dense diagonalization in the orbit basis.
double ed_dense_ground_energy(const EDSpec& spec);

/// max over vertices x of || Theta(x) psi - psi ||.
double gauss_law_residual(const LatticeGeom& geom, std::span<const double> psi);

// --- Literal Fock-space amplitudes ------------------------------------------

/// <Omega| prod omega prod U_G A |Omega> for a single-layer ansatz on the
/// L = 1 torus (one vertex, 8 modes, two self-loop links).
cplx fock_amplitude_single_vertex(const LayerParams& params,
                                  const GaugeConfig& G);

/**
 * Two vertices joined into a horizontal ring by two links, keeping only the
 * l, r modes (4 per vertex, 8 in total) and the y pairing
 * exp(y l+^dag r+^dag - y r-^dag l-^dag). Link 0 has base x0 (parity +1),
 * link 1 base x1 (parity -1).
 */
struct ToyRing {
  /// Literal Fock amplitude.
  static cplx fock_amplitude(double y, int q0, int q1, int N = 3);
  /// Psi*(G')Psi(G) from covariance data, G' shifted by `shift` on `link`.
  static cplx pipeline_product(double y, int q0, int q1, int link, int shift,
                               int N = 3);
};

}  // namespace ggpeps
