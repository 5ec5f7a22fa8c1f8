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

#include "ggpeps/gstate.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ggpeps {

namespace {

// Local mode order inside a link's 4-mode Fock space.
constexpr int kTailPlus = 0;
constexpr int kTailMinus = 1;
constexpr int kHeadPlus = 2;
constexpr int kHeadMinus = 3;

double group_angle(int N) { return 2.0 * std::numbers::pi / N; }

fock::QuadraticOp omega_exponent(Dir dir) {
  using fock::create;
  if (dir == Dir::horizontal) {
    // l+^dag(x+e1) r-^dag(x) + l-^dag(x+e1) r+^dag(x)
    return {{1.0, create(kHeadPlus), create(kTailMinus)},
            {1.0, create(kHeadMinus), create(kTailPlus)}};
  }
  // u+^dag(x) d-^dag(x+e2) + u-^dag(x) d+^dag(x+e2)
  return {{1.0, create(kTailPlus), create(kHeadMinus)},
          {1.0, create(kTailMinus), create(kHeadPlus)}};
}

void check_parity(int parity_sign) {
  if (parity_sign != 1 && parity_sign != -1) {
    throw std::invalid_argument("parity sign must be +1 or -1, got " +
                                std::to_string(parity_sign));
  }
}

}  // namespace

fock::QuadraticOp fiducial_exponent(const TMatrix& T) {
  fock::QuadraticOp op;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (T(i, j) == cplx(0)) continue;
      op.push_back({T(i, j), fock::create(kTRowModes[i]),
                    fock::create(kTColModes[j])});
    }
  }
  return op;
}

VertexBlock vertex_D_block(const TMatrix& T) {
  const fock::FockCovariance cov = fock::fock_covariance(
      kModesPerVertex, {fock::ExpQuadratic{fiducial_exponent(T)}});
  return {cov.gamma, cov.norm_sq};
}

CMatrix d_vertex_D_block(const TMatrix& T, const TMatrix& dT) {
  const fock::FockSpace space(kModesPerVertex);
  const fock::FockVector psi = space.apply_exp(fiducial_exponent(T),
                                               space.vacuum());
  // All a^dag b^dag monomials commute, so d/dalpha exp(X) = dX exp(X).
  const fock::FockVector dpsi = space.apply(fiducial_exponent(dT), psi);
  return fock::state_covariance_derivative(space, psi, dpsi);
}

std::array<int, kLinkMajoranas> link_majorana_indices(const LatticeGeom& geom,
                                                      LinkId link) {
  const int tail = geom.vertex_index(link.vertex);
  const int head = geom.vertex_index(link_head(geom, link));
  const bool horiz = link.dir == Dir::horizontal;
  const int modes[4][2] = {
      {tail, horiz ? kRPlus : kUPlus},
      {tail, horiz ? kRMinus : kUMinus},
      {head, horiz ? kLPlus : kDPlus},
      {head, horiz ? kLMinus : kDMinus},
  };
  std::array<int, kLinkMajoranas> idx{};
  for (int m = 0; m < 4; ++m) {
    idx[2 * m] = majorana_index(modes[m][0], modes[m][1], 0);
    idx[2 * m + 1] = majorana_index(modes[m][0], modes[m][1], 1);
  }
  return idx;
}

fock::OperatorProgram link_state_program(int q, Dir dir, int parity_sign,
                                         int N) {
  check_parity(parity_sign);
  // U_l(q) = exp(i s q delta (n_tail+ - n_tail-)); the program applies the
  // adjoint to |omega_l>.
  const double phi = parity_sign * q * group_angle(N);
  return {fock::ExpQuadratic{omega_exponent(dir)},
          fock::NumberPhase{kTailPlus, -phi},
          fock::NumberPhase{kTailMinus, phi}};
}

LinkBlock link_in_block(int q, Dir dir, int parity_sign, int N) {
  const fock::FockCovariance cov =
      fock::fock_covariance(4, link_state_program(q, dir, parity_sign, N));
  const double imag = cov.gamma.imag().cwiseAbs().maxCoeff();
  if (imag > 1e-12) {
    throw std::logic_error("link_in_block: covariance is not real (" +
                           std::to_string(imag) + ")");
  }
  return {cov.gamma.real(), cov.norm_sq};
}

MixedLinkBlock mixed_link_block(int q, int shift, Dir dir, int parity_sign,
                                int N) {
  const fock::FockSpace space(4);
  const fock::FockVector bra =
      space.run(link_state_program(q, dir, parity_sign, N));
  const fock::FockVector ket =
      space.run(link_state_program(q + shift, dir, parity_sign, N));
  const fock::MixedCovariance mc = fock::mixed_covariance(space, ket, bra);
  return {mc.gamma, mc.overlap / bra.squaredNorm()};
}

ModifiedBlock modified_block(double phi) {
  const double c = std::cos(phi);
  if (std::abs(1.0 + c) < 1e-12) {
    throw std::domain_error("modified_block: phi = pi has no finite tan(phi/2)");
  }
  const cplx i(0, 1);
  auto M = [&](double angle) {
    const double t = std::tan(angle / 2.0);
    Eigen::Matrix4cd m;
    m << 0.0, i * t, -t, -1.0,
        -i * t, 0.0, -1.0, t,
        t, 1.0, 0.0, i * t,
        1.0, -t, -i * t, 0.0;
    return m;
  };
  // (r1, r2, l1, l2) of the + modes sit at link-block positions
  // (0, 1, 4, 5); the - modes at (2, 3, 6, 7).
  constexpr int plus[4] = {0, 1, 4, 5};
  constexpr int minus[4] = {2, 3, 6, 7};
  const Eigen::Matrix4cd mp = M(phi);
  const Eigen::Matrix4cd mm = M(-phi);
  CMatrix block = CMatrix::Zero(kLinkMajoranas, kLinkMajoranas);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      block(plus[a], plus[b]) = mp(a, b);
      block(minus[a], minus[b]) = mm(a, b);
    }
  }
  return {block, 0.5 * (1.0 + c)};
}

LinkBlockTable::LinkBlockTable(int N) : N_(N) {
  if (N < 3) {
    // For N = 2 the shifted link states are orthogonal.
    throw std::invalid_argument("LinkBlockTable: N must be at least 3");
  }
  const std::size_t n = static_cast<std::size_t>(4 * N);
  blocks_.resize(n);
  lower_.resize(n);
  raise_.resize(n);
  for (Dir dir : {Dir::horizontal, Dir::vertical}) {
    for (int s : {1, -1}) {
      for (int q = 0; q < N; ++q) {
        const std::size_t k = slot(dir, s, q);
        blocks_[k] = link_in_block(q, dir, s, N);
        lower_[k] = mixed_link_block(q, -1, dir, s, N);
        raise_[k] = mixed_link_block(q, +1, dir, s, N);
      }
    }
  }
}

const LinkBlockTable& link_block_table(int N) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<LinkBlockTable>> tables;
  const std::lock_guard<std::mutex> lock(mu);
  auto& slot = tables[N];
  if (!slot) slot = std::make_unique<LinkBlockTable>(N);
  return *slot;
}

RMatrix assemble_Gamma_in(const GaugeConfig& G, const LinkBlockTable& table) {
  const LatticeGeom& geom = G.geom();
  if (table.N() != geom.N()) {
    throw std::invalid_argument("assemble_Gamma_in: table built for N = " +
                                std::to_string(table.N()));
  }
  const int dim = covariance_dim(geom);
  RMatrix M = RMatrix::Zero(dim, dim);
  std::vector<char> covered(static_cast<std::size_t>(dim), 0);
  for (int l = 0; l < geom.n_links(); ++l) {
    const LinkId link = link_at(geom, l);
    const auto idx = link_majorana_indices(geom, link);
    for (int a : idx) {
      if (covered[static_cast<std::size_t>(a)]++) {
        throw std::logic_error("assemble_Gamma_in: Majorana index " +
                               std::to_string(a) + " claimed twice");
      }
    }
    place_link_block(
        M, idx, table.block(link.dir, staggering_sign(link.vertex), G[l]));
  }
  return M;
}

RMatrix assemble_Gamma_in(const GaugeConfig& G) {
  return assemble_Gamma_in(G, link_block_table(G.geom().N()));
}

RMatrix assemble_D(const LatticeGeom& geom, const RMatrix& vertex_block) {
  const int dim = covariance_dim(geom);
  RMatrix D = RMatrix::Zero(dim, dim);
  for (int v = 0; v < geom.n_vertices(); ++v) {
    D.block(kMajoranaPerVertex * v, kMajoranaPerVertex * v,
            kMajoranaPerVertex, kMajoranaPerVertex) = vertex_block;
  }
  return D;
}

}  // namespace ggpeps
