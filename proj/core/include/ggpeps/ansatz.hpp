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
 * @brief The variational family: per-layer (y, z), cached covariance
 * blocks, squared norms and log-norm gradients.
 */

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ggpeps/galg.hpp"
#include "ggpeps/gstate.hpp"
#include "ggpeps/lattice.hpp"

namespace ggpeps {

enum class Param : int { y = 0, z = 1 };

TMatrix t_matrix(double y, double z);
/// dT/dy or dT/dz (T is linear in both).
TMatrix t_matrix_derivative(Param alpha);

struct LayerParams {
  double y = 0.0;
  double z = 0.0;
  friend bool operator==(const LayerParams&, const LayerParams&) = default;
};

/// Cached data for one layer.
struct LayerCache {
  RMatrix d;                  // 16 x 16 vertex block of D
  std::array<RMatrix, 2> dd;  // d(d)/dy, d(d)/dz
  RMatrix D;                  // full direct sum
};

class Ansatz {
 public:
  /// Caches are built immediately.
  Ansatz(const LatticeGeom& geom, std::vector<LayerParams> layers);

  /// Layers at (y0, z0) plus independent uniform jitter in [-jitter, jitter]
  /// drawn from `seed`.
  static Ansatz with_default_init(const LatticeGeom& geom, int n_layers,
                                  std::uint64_t seed, double y0 = 0.1,
                                  double z0 = 0.1, double jitter = 0.01);

  const LatticeGeom& geom() const noexcept { return geom_; }
  int n_layers() const noexcept { return static_cast<int>(layers_.size()); }
  int n_params() const noexcept { return 2 * n_layers(); }
  const std::vector<LayerParams>& layers() const noexcept { return layers_; }
  const LayerParams& layer(int i) const { return layers_.at(i); }

  /// Flat parameter vector (y1, z1, y2, z2, ...).
  std::vector<double> param_vector() const;

  /// Parameter changes mark the caches stale; call rebuild() before use.
  void set_layers(std::vector<LayerParams> layers);
  void set_param_vector(std::span<const double> p);

  void rebuild();
  bool stale() const noexcept { return stale_; }

  /// Throws std::logic_error when the caches are stale.
  const LayerCache& cache(int layer) const;

 private:
  LatticeGeom geom_;
  std::vector<LayerParams> layers_;
  std::vector<LayerCache> caches_;
  bool stale_ = true;
};

struct NormSq {
  double log_total = 0.0;
  std::vector<double> log_layers;  // log n_i
  double value() const;
};

/// n_i = sqrt(det((1 - Gamma_in(G) D_i) / 2)), accumulated in the log domain.
/// Throws std::domain_error for a determinant below -1e-12.
NormSq norm_sq(const GaugeConfig& G, const Ansatz& A);

/// (d_alpha |Psi_i|^2) / |Psi_i|^2 = -1/2 Tr(Gamma_in dD (1 - Gamma_in D)^-1).
double log_norm_grad(const GaugeConfig& G, const Ansatz& A, int layer,
                     Param alpha);

/// Tr(M dD) where dD is the direct sum of one 16 x 16 block per vertex.
template <class Scalar>
Scalar trace_with_vertex_blocks(const Mat<Scalar>& M, const RMatrix& block) {
  Scalar acc(0);
  const Eigen::Index n = M.rows() / kMajoranaPerVertex;
  for (Eigen::Index v = 0; v < n; ++v) {
    const Eigen::Index o = v * kMajoranaPerVertex;
    for (int a = 0; a < kMajoranaPerVertex; ++a)
      for (int b = 0; b < kMajoranaPerVertex; ++b)
        acc += M(o + a, o + b) * block(b, a);
  }
  return acc;
}

}  // namespace ggpeps
