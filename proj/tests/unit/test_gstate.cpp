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

#include <gtest/gtest.h>

#include <numbers>
#include <set>

#include "ggpeps/ansatz.hpp"
#include "ggpeps/gstate.hpp"
#include "ggpeps/rng.hpp"

namespace ggpeps {
namespace {

constexpr double kDelta = 2.0 * std::numbers::pi / 3.0;

CMatrix vacuum_block(int modes) {
  CMatrix g = CMatrix::Zero(2 * modes, 2 * modes);
  for (int k = 0; k < modes; ++k) {
    g(2 * k, 2 * k + 1) = 1.0;
    g(2 * k + 1, 2 * k) = -1.0;
  }
  return g;
}

TEST(VertexBlock, ZeroTIsVacuum) {
  const VertexBlock b = vertex_D_block(TMatrix::Zero());
  EXPECT_NEAR(b.norm_sq, 1.0, 1e-15);
  EXPECT_LT((b.gamma - vacuum_block(8)).norm(), 1e-14);
}

TEST(VertexBlock, PureRealAntisymmetric) {
  for (auto [y, z] : {std::pair{0.3, 0.3}, {-0.7, 0.2}, {1.5, -2.0}}) {
    const CMatrix g = vertex_D_block(t_matrix(y, z)).gamma;
    EXPECT_LT(g.imag().norm(), 1e-12);
    EXPECT_LT((g + g.transpose()).norm(), 1e-12);
    EXPECT_LT((g * g + CMatrix::Identity(16, 16)).norm(), 1e-11) << y << " " << z;
  }
}

TEST(VertexBlock, InvariantUnderVirtualSymmetry) {
  // Charges of G0 on {l+, l-, r+, r-, u+, u-, d+, d-}.
  const int charge[8] = {+1, -1, -1, +1, -1, +1, +1, -1};
  const fock::FockSpace s(kModesPerVertex);
  for (auto [y, z] : {std::pair{0.3, 0.3}, {-0.4, 0.9}}) {
    const fock::FockVector psi = s.apply_exp(fiducial_exponent(t_matrix(y, z)), s.vacuum());
    for (double theta : {0.3, kDelta, 2.5}) {
      fock::FockVector rot = psi;
      for (int m = 0; m < 8; ++m) rot = s.apply_number_phase(m, charge[m] * theta, rot);
      EXPECT_LT((rot - psi).norm(), 1e-12 * psi.norm());
    }
  }
}

TEST(VertexBlock, DerivativeMatchesFiniteDifference) {
  const TMatrix T = t_matrix(0.2, 0.1);
  const double h = 1e-7;
  for (Param a : {Param::y, Param::z}) {
    const TMatrix dT = t_matrix_derivative(a);
    const CMatrix fd =
        (vertex_D_block(T + h * dT).gamma - vertex_D_block(T - h * dT).gamma) / (2 * h);
    EXPECT_LT((d_vertex_D_block(T, dT) - fd).norm(), 1e-7);
  }
}

TEST(LinkBlock, ZeroFluxIndependentOfParity) {
  const RMatrix ref = link_in_block(0, Dir::horizontal, 1, 3).gamma;
  for (Dir d : {Dir::horizontal, Dir::vertical})
    for (int s : {1, -1}) {
      const LinkBlock b = link_in_block(0, d, s, 3);
      EXPECT_NEAR(b.norm_sq, 4.0, 1e-13);
      if (d == Dir::horizontal) {
        EXPECT_LT((b.gamma - ref).norm(), 1e-14);
      }
    }
  EXPECT_LT((link_in_block(0, Dir::vertical, 1, 3).gamma -
             link_in_block(0, Dir::vertical, -1, 3).gamma).norm(), 1e-14);
}

TEST(LinkBlock, ParityFlipConjugatesFlux) {
  for (Dir d : {Dir::horizontal, Dir::vertical}) {
    EXPECT_LT((link_in_block(1, d, 1, 3).gamma - link_in_block(2, d, -1, 3).gamma).norm(),
              1e-13);
    EXPECT_LT((link_in_block(2, d, 1, 3).gamma - link_in_block(1, d, -1, 3).gamma).norm(),
              1e-13);
  }
}

TEST(LinkBlock, PureForEveryFlux) {
  for (int N : {2, 3, 5})
    for (int q = 0; q < N; ++q)
      for (Dir d : {Dir::horizontal, Dir::vertical})
        for (int s : {1, -1}) {
          const RMatrix g = link_in_block(q, d, s, N).gamma;
          EXPECT_LT((g * g + RMatrix::Identity(8, 8)).norm(), 1e-12);
          EXPECT_LT((g + g.transpose()).norm(), 1e-13);
        }
}

TEST(LinkBlock, FluxChangesTheBlock) {
  EXPECT_GT((link_in_block(1, Dir::horizontal, 1, 3).gamma -
             link_in_block(0, Dir::horizontal, 1, 3).gamma).norm(), 0.1);
  EXPECT_THROW(link_in_block(0, Dir::horizontal, 0, 3), std::invalid_argument);
}

TEST(LinkBlockTable, MatchesDirectEvaluation) {
  const LinkBlockTable& t = link_block_table(3);
  EXPECT_EQ(&t, &link_block_table(3));
  for (int q = 0; q < 3; ++q)
    for (Dir d : {Dir::horizontal, Dir::vertical})
      for (int s : {1, -1}) {
        EXPECT_LT((t.block(d, s, q) - link_in_block(q, d, s, 3).gamma).norm(), 1e-15);
        const MixedLinkBlock m = mixed_link_block(q, 1, d, s, 3);
        EXPECT_LT((t.mixed(d, s, q, 1).gamma - m.gamma).norm(), 1e-15);
      }
}

TEST(MixedLinkBlock, ZeroShiftIsTheStateBlock) {
  for (int q = 0; q < 3; ++q) {
    const MixedLinkBlock m = mixed_link_block(q, 0, Dir::vertical, -1, 3);
    EXPECT_NEAR(std::abs(m.overlap_ratio - 1.0), 0.0, 1e-14);
    EXPECT_LT((m.gamma - link_in_block(q, Dir::vertical, -1, 3).gamma.cast<cplx>()).norm(),
              1e-13);
  }
}

TEST(MixedLinkBlock, RaiseAndLowerOverlapsAreConjugate) {
  const LinkBlockTable& t = link_block_table(3);
  for (int q = 0; q < 3; ++q)
    for (Dir d : {Dir::horizontal, Dir::vertical})
      for (int s : {1, -1}) {
        const cplx up = t.mixed(d, s, q, 1).overlap_ratio;
        const cplx down = t.mixed(d, s, (q + 1) % 3, -1).overlap_ratio;
        EXPECT_NEAR(std::abs(up - std::conj(down)), 0.0, 1e-14);
        EXPECT_GT(std::abs(up), 1e-3);
      }
}

TEST(LinkIndices, CoverEveryMajoranaOnce) {
  for (int L : {1, 2, 3}) {
    const LatticeGeom g(L);
    std::set<int> seen;
    for (int i = 0; i < g.n_links(); ++i)
      for (int m : link_majorana_indices(g, link_at(g, i))) {
        EXPECT_TRUE(seen.insert(m).second) << "index " << m;
      }
    EXPECT_EQ(static_cast<int>(seen.size()), covariance_dim(g));
  }
}

TEST(LinkIndices, HorizontalBlockOrder) {
  const LatticeGeom g(2);
  const auto idx = link_majorana_indices(g, {{0, 0}, Dir::horizontal});
  EXPECT_EQ(idx[0], majorana_index(0, kRPlus, 0));
  EXPECT_EQ(idx[3], majorana_index(0, kRMinus, 1));
  EXPECT_EQ(idx[4], majorana_index(1, kLPlus, 0));
  EXPECT_EQ(idx[7], majorana_index(1, kLMinus, 1));
}

TEST(GammaIn, PureAndLocalToLinks) {
  const LatticeGeom g(2);
  Rng rng(21);
  GaugeConfig G(g);
  for (int i = 0; i < g.n_links(); ++i) G.set(i, rng.below(3));
  const RMatrix a = assemble_Gamma_in(G);
  const int n = covariance_dim(g);
  EXPECT_LT((a * a + RMatrix::Identity(n, n)).norm(), 1e-12);

  GaugeConfig H = G;
  H.set(5, G[5] + 1);
  const RMatrix b = assemble_Gamma_in(H);
  const auto idx = link_majorana_indices(g, link_at(g, 5));
  const std::set<int> touched(idx.begin(), idx.end());
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (!touched.count(r) || !touched.count(c)) {
        ASSERT_EQ(a(r, c), b(r, c));
      }
  EXPECT_GT((a - b).norm(), 0.1);
}

TEST(AssembleD, RepeatsTheVertexBlock) {
  const LatticeGeom g(2);
  const RMatrix d = vertex_D_block(t_matrix(0.3, -0.1)).gamma.real();
  const RMatrix D = assemble_D(g, d);
  for (int v = 0; v < 4; ++v) EXPECT_EQ(D.block(16 * v, 16 * v, 16, 16), d);
  EXPECT_EQ(D.block(0, 16, 16, 16).norm(), 0.0);
}

TEST(ModifiedBlock, ClosedFormValues) {
  const ModifiedBlock m0 = modified_block(0.0);
  EXPECT_NEAR(m0.prefactor, 1.0, 1e-15);
  EXPECT_LT(m0.block.imag().norm(), 1e-15);
  EXPECT_LT((m0.block + m0.block.transpose()).norm(), 1e-15);

  const ModifiedBlock m = modified_block(kDelta);
  EXPECT_NEAR(m.prefactor, 0.25, 1e-15);
  // t = tan(pi / 3) on the + modes, -t on the - modes.
  EXPECT_NEAR(m.block(0, 4).real(), -std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(m.block(0, 1).imag(), std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(m.block(2, 3).imag(), -std::sqrt(3.0), 1e-14);
  EXPECT_EQ(m.block(0, 2), cplx(0.0));
  EXPECT_THROW(modified_block(std::numbers::pi), std::domain_error);
}

}  // namespace
}  // namespace ggpeps
