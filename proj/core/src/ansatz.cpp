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

#include "ggpeps/ansatz.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "ggpeps/rng.hpp"

namespace ggpeps {

namespace {

RMatrix real_part_checked(const CMatrix& M, const char* what) {
  const double imag = M.imag().cwiseAbs().maxCoeff();
  if (imag > 1e-10) {
    throw std::logic_error(std::string(what) +
                           ": unexpected imaginary part " +
                           std::to_string(imag));
  }
  return M.real();
}

}  // namespace

TMatrix t_matrix(double y, double z) {
  const double w = z / std::sqrt(2.0);
  TMatrix T;
  T << 0.0, y, w, w,
      -y, 0.0, -w, w,
      -w, w, 0.0, y,
      -w, -w, -y, 0.0;
  return T;
}

TMatrix t_matrix_derivative(Param alpha) {
  return alpha == Param::y ? t_matrix(1.0, 0.0) : t_matrix(0.0, 1.0);
}

Ansatz::Ansatz(const LatticeGeom& geom, std::vector<LayerParams> layers)
    : geom_(geom), layers_(std::move(layers)) {
  if (layers_.empty()) {
    throw std::invalid_argument("Ansatz: at least one layer is required");
  }
  rebuild();
}

Ansatz Ansatz::with_default_init(const LatticeGeom& geom, int n_layers,
                                 std::uint64_t seed, double y0, double z0,
                                 double jitter) {
  if (n_layers < 1) {
    throw std::invalid_argument("ansatz.layers must be positive, got " +
                                std::to_string(n_layers));
  }
  Rng rng(derive_seed(seed, 0x616e7361747aULL));
  std::vector<LayerParams> layers;
  for (int i = 0; i < n_layers; ++i) {
    const double jy = rng.uniform(-jitter, jitter);
    const double jz = rng.uniform(-jitter, jitter);
    layers.push_back({y0 + jy, z0 + jz});
  }
  return Ansatz(geom, std::move(layers));
}

std::vector<double> Ansatz::param_vector() const {
  std::vector<double> p;
  p.reserve(layers_.size() * 2);
  for (const LayerParams& l : layers_) {
    p.push_back(l.y);
    p.push_back(l.z);
  }
  return p;
}

void Ansatz::set_layers(std::vector<LayerParams> layers) {
  if (layers.empty()) {
    throw std::invalid_argument("Ansatz: at least one layer is required");
  }
  layers_ = std::move(layers);
  stale_ = true;
}

void Ansatz::set_param_vector(std::span<const double> p) {
  if (p.size() % 2 != 0 || p.empty()) {
    throw std::invalid_argument("Ansatz: parameter vector of size " +
                                std::to_string(p.size()));
  }
  std::vector<LayerParams> layers;
  for (std::size_t i = 0; i < p.size(); i += 2) layers.push_back({p[i], p[i + 1]});
  set_layers(std::move(layers));
}

void Ansatz::rebuild() {
  caches_.clear();
  caches_.reserve(layers_.size());
  for (const LayerParams& l : layers_) {
    if (!std::isfinite(l.y) || !std::isfinite(l.z)) {
      throw std::invalid_argument("Ansatz: non-finite layer parameter");
    }
    const TMatrix T = t_matrix(l.y, l.z);
    LayerCache c;
    c.d = real_part_checked(vertex_D_block(T).gamma, "vertex_D_block");
    for (Param a : {Param::y, Param::z}) {
      c.dd[static_cast<int>(a)] = real_part_checked(
          d_vertex_D_block(T, t_matrix_derivative(a)), "d_vertex_D_block");
    }
    c.D = assemble_D(geom_, c.d);
    caches_.push_back(std::move(c));
  }
  stale_ = false;
}

const LayerCache& Ansatz::cache(int layer) const {
  if (stale_) {
    throw std::logic_error("Ansatz: caches are stale; call rebuild()");
  }
  return caches_.at(static_cast<std::size_t>(layer));
}

double NormSq::value() const { return std::exp(log_total); }

NormSq norm_sq(const GaugeConfig& G, const Ansatz& A) {
  const RMatrix Gin = assemble_Gamma_in(G);
  const Eigen::Index dim = Gin.rows();
  NormSq out;
  for (int i = 0; i < A.n_layers(); ++i) {
    const RMatrix M =
        (RMatrix::Identity(dim, dim) - Gin * A.cache(i).D) / 2.0;
    const LogValue<double> ld = log_det(M);
    double log_n;
    if (ld.phase > 0) {
      log_n = 0.5 * ld.log_abs;
    } else if (ld.is_zero() || ld.log_abs < std::log(1e-12)) {
      log_n = -std::numeric_limits<double>::infinity();  // clamp to 0
    } else {
      throw std::domain_error(
          "norm_sq: negative determinant " + std::to_string(-std::exp(ld.log_abs)) +
          " signals a covariance convention error");
    }
    out.log_layers.push_back(log_n);
    out.log_total += log_n;
  }
  return out;
}

double log_norm_grad(const GaugeConfig& G, const Ansatz& A, int layer,
                     Param alpha) {
  const LayerCache& c = A.cache(layer);
  const RMatrix Gin = assemble_Gamma_in(G);
  const Eigen::Index dim = Gin.rows();
  const RMatrix M = RMatrix::Identity(dim, dim) - Gin * c.D;
  const RMatrix Minv = inverse(M);
  const RMatrix dD = assemble_D(A.geom(), c.dd[static_cast<int>(alpha)]);
  return -0.5 * (Gin * dD * Minv).trace();
}

}  // namespace ggpeps
