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
 * @brief Majorana covariance blocks of the fiducial state, the gauged link
 * projectors and the mixed link operators, all derived from explicit
 * Fock-space evaluation.
 *
 * Every vertex carries 8 virtual Dirac modes in the order
 * {l+, l-, r+, r-, u+, u-, d+, d-}. Global Dirac index = 8 * vertex + mode,
 * global Majorana index = 2 * Dirac index + component.
 *
 * A link block covers the 4 Dirac modes meeting on a link, ordered
 * (tail+, tail-, head+, head-): for a horizontal link these are
 * r+(x), r-(x), l+(x+e1), l-(x+e1); for a vertical link
 * u+(x), u-(x), d+(x+e2), d-(x+e2).
 */

#pragma once

#include <array>
#include <vector>

#include "ggpeps/fock.hpp"
#include "ggpeps/galg.hpp"
#include "ggpeps/lattice.hpp"

namespace ggpeps {

enum VertexMode : int {
  kLPlus = 0,
  kLMinus = 1,
  kRPlus = 2,
  kRMinus = 3,
  kUPlus = 4,
  kUMinus = 5,
  kDPlus = 6,
  kDMinus = 7,
};

inline constexpr int kModesPerVertex = 8;
inline constexpr int kMajoranaPerVertex = 16;
inline constexpr int kLinkMajoranas = 8;

inline int dirac_index(int vertex, int mode) noexcept {
  return kModesPerVertex * vertex + mode;
}
inline int majorana_index(int vertex, int mode, int component) noexcept {
  return 2 * dirac_index(vertex, mode) + component;
}
inline int covariance_dim(const LatticeGeom& geom) noexcept {
  return kMajoranaPerVertex * geom.n_vertices();
}

/// Rows of T act on these modes ("a" modes), columns on the "b" modes.
inline constexpr std::array<int, 4> kTRowModes{kLPlus, kRMinus, kUMinus,
                                               kDPlus};
inline constexpr std::array<int, 4> kTColModes{kLMinus, kRPlus, kUPlus,
                                               kDMinus};

using TMatrix = Eigen::Matrix4cd;

/// exp(sum_ij T_ij a_i^dag b_j^dag) on the 8 modes of one vertex.
fock::QuadraticOp fiducial_exponent(const TMatrix& T);

struct VertexBlock {
  CMatrix gamma;   // 16 x 16
  double norm_sq;  // <Omega|A^dag A|Omega>
};

VertexBlock vertex_D_block(const TMatrix& T);

/// Derivative of vertex_D_block(T) along dT.
CMatrix d_vertex_D_block(const TMatrix& T, const TMatrix& dT);

/// Global Majorana indices of a link block, in block order.
std::array<int, kLinkMajoranas> link_majorana_indices(const LatticeGeom& geom,
                                                      LinkId link);

/// Fock program of U_l(q)^dag |omega_l> on the 4 link modes
/// (tail+, tail-, head+, head-).
fock::OperatorProgram link_state_program(int q, Dir dir, int parity_sign,
                                         int N);

struct LinkBlock {
  RMatrix gamma;   // 8 x 8
  double norm_sq;  // <omega_l|omega_l>
};

LinkBlock link_in_block(int q, Dir dir, int parity_sign, int N);

struct MixedLinkBlock {
  CMatrix gamma;  // 8 x 8
  /// <omega_l(q)|omega_l(q + shift)> / <omega_l|omega_l>.
  cplx overlap_ratio;
};

/// Mixed covariance of |omega_l(q + shift)><omega_l(q)|, where
/// |omega_l(q)> = U_l(q)^dag |omega_l>.
MixedLinkBlock mixed_link_block(int q, int shift, Dir dir, int parity_sign,
                                int N);

struct ModifiedBlock {
  CMatrix block;  // 8 x 8, M(phi) on the + modes and M(-phi) on the - modes
  double prefactor;
};

/// Closed-form replacement block with t = tan(phi / 2). Majorana order of
/// each M is (r1, r2, l1, l2). Throws std::domain_error when cos(phi) = -1.
ModifiedBlock modified_block(double phi);

/// Link blocks for every (direction, parity, q), plus the mixed blocks for
/// q -> q - 1 (lowering) and q -> q + 1 (raising).
class LinkBlockTable {
 public:
  explicit LinkBlockTable(int N);

  int N() const noexcept { return N_; }
  const RMatrix& block(Dir dir, int parity_sign, int q) const {
    return blocks_[slot(dir, parity_sign, q)].gamma;
  }
  double norm_sq(Dir dir, int parity_sign, int q) const {
    return blocks_[slot(dir, parity_sign, q)].norm_sq;
  }
  /// shift must be -1 or +1.
  const MixedLinkBlock& mixed(Dir dir, int parity_sign, int q,
                              int shift) const {
    return (shift < 0 ? lower_ : raise_)[slot(dir, parity_sign, q)];
  }

 private:
  std::size_t slot(Dir dir, int parity_sign, int q) const noexcept {
    return static_cast<std::size_t>(
        (static_cast<int>(dir) * 2 + (parity_sign > 0 ? 0 : 1)) * N_ + q);
  }

  int N_;
  std::vector<LinkBlock> blocks_;
  std::vector<MixedLinkBlock> lower_;
  std::vector<MixedLinkBlock> raise_;
};

/// Returns the shared table for group order N (built on first use).
const LinkBlockTable& link_block_table(int N);

/// Writes an 8 x 8 link block at the given Majorana indices.
template <class Scalar>
void place_link_block(Mat<Scalar>& M,
                      const std::array<int, kLinkMajoranas>& idx,
                      const Mat<Scalar>& block) {
  for (int i = 0; i < kLinkMajoranas; ++i)
    for (int j = 0; j < kLinkMajoranas; ++j) M(idx[i], idx[j]) = block(i, j);
}

/// Gamma_in(G): the direct sum of all link blocks in global indexing.
/// Throws std::logic_error if two links claim the same Majorana index.
RMatrix assemble_Gamma_in(const GaugeConfig& G, const LinkBlockTable& table);
RMatrix assemble_Gamma_in(const GaugeConfig& G);

/// D: direct sum of one vertex block per vertex.
RMatrix assemble_D(const LatticeGeom& geom, const RMatrix& vertex_block);

}  // namespace ggpeps
