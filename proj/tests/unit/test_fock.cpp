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

#include "ggpeps/fock.hpp"
#include "ggpeps/rng.hpp"

namespace ggpeps::fock {
namespace {

CMatrix anticommutator(const FockSpace& s, int a, int b) {
  CMatrix out(s.dim(), s.dim());
  for (Eigen::Index k = 0; k < s.dim(); ++k) {
    FockVector e = FockVector::Zero(s.dim());
    e(k) = 1.0;
    out.col(k) = s.apply_majorana(a, s.apply_majorana(b, e)) +
                 s.apply_majorana(b, s.apply_majorana(a, e));
  }
  return out;
}

TEST(FockSpace, RejectsModeCounts) {
  EXPECT_THROW(FockSpace(0), std::invalid_argument);
  EXPECT_THROW(FockSpace(kMaxModes + 1), std::invalid_argument);
  EXPECT_NO_THROW(FockSpace{kMaxModes});
}

TEST(FockSpace, MajoranaAnticommutators) {
  const FockSpace s(3);
  const CMatrix id = CMatrix::Identity(s.dim(), s.dim());
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      const CMatrix ac = anticommutator(s, a, b);
      EXPECT_LT((ac - (a == b ? 2.0 : 0.0) * id).norm(), 1e-13) << a << "," << b;
    }
}

TEST(FockSpace, CreationAnticommutesAcrossModes) {
  const FockSpace s(4);
  const FockVector v = s.vacuum();
  const FockVector ab = s.apply(create(1), s.apply(create(3), v));
  const FockVector ba = s.apply(create(3), s.apply(create(1), v));
  EXPECT_LT((ab + ba).norm(), 1e-15);
  EXPECT_NEAR(ab.norm(), 1.0, 1e-15);
  EXPECT_LT(s.apply(create(1), s.apply(create(1), v)).norm(), 1e-15);
}

TEST(FockCovariance, VacuumAndOccupied) {
  const FockCovariance vac = fock_covariance(2, {});
  EXPECT_NEAR(vac.norm_sq, 1.0, 1e-15);
  CMatrix expect = CMatrix::Zero(4, 4);
  expect(0, 1) = expect(2, 3) = 1.0;
  expect(1, 0) = expect(3, 2) = -1.0;
  EXPECT_LT((vac.gamma - expect).norm(), 1e-14);

  const FockCovariance occ = fock_covariance(2, {ApplyMode{create(1)}});
  expect(2, 3) = -1.0;
  expect(3, 2) = 1.0;
  EXPECT_LT((occ.gamma - expect).norm(), 1e-14);
}

TEST(FockCovariance, ZeroNormThrows) {
  EXPECT_THROW(fock_covariance(2, {ApplyMode{annihilate(0)}}), std::exception);
}

TEST(FockCovariance, PairedStateIsPureAndReal) {
  const QuadraticOp op{{cplx(0.7, 0.0), create(0), create(3)},
                       {cplx(-0.4, 0.0), create(1), create(2)}};
  const FockCovariance c = fock_covariance(4, {ExpQuadratic{op}});
  EXPECT_NEAR(c.norm_sq, (1 + 0.49) * (1 + 0.16), 1e-13);
  EXPECT_LT(c.gamma.imag().norm(), 1e-13);
  const CMatrix sq = c.gamma * c.gamma + CMatrix::Identity(8, 8);
  EXPECT_LT(sq.norm(), 1e-12);
  EXPECT_LT((c.gamma + c.gamma.transpose()).norm(), 1e-13);
}

TEST(FockProgram, NumberPhaseOnOccupiedMode) {
  const FockSpace s(2);
  const FockVector v = s.run({ApplyMode{create(1)}, NumberPhase{1, 0.3}, NumberPhase{0, 5.0}});
  EXPECT_NEAR(std::arg(v(2)), 0.3, 1e-14);
  EXPECT_NEAR(std::abs(v(2)), 1.0, 1e-14);
}

TEST(FockProgram, ProjectVacuumKeepsOnlyEmptyModes) {
  const FockSpace s(2);
  const QuadraticOp op{{cplx(1.0, 0.0), create(0), create(1)}};
  const FockVector v = s.run({ExpQuadratic{op}, ProjectVacuum{{0}}});
  EXPECT_NEAR(std::abs(v(0)), 1.0, 1e-15);
  EXPECT_NEAR(v.norm(), 1.0, 1e-15);
}

TEST(MixedCovariance, EqualStatesReduceToStateCovariance) {
  const FockSpace s(3);
  const QuadraticOp op{{cplx(0.2, 0.1), create(0), create(2)}};
  const FockVector psi = s.apply_exp(op, s.vacuum());
  const MixedCovariance m = mixed_covariance(s, psi, psi);
  const FockCovariance c = state_covariance(s, psi);
  EXPECT_LT((m.gamma - c.gamma).norm(), 1e-13);
  EXPECT_NEAR(std::abs(m.overlap - psi.squaredNorm()), 0.0, 1e-14);
}

TEST(StateCovarianceDerivative, MatchesFiniteDifference) {
  const FockSpace s(4);
  auto psi_of = [&](double a) {
    const QuadraticOp op{{cplx(a, 0.0), create(0), create(1)},
                         {cplx(0.3 * a + 0.1, 0.0), create(2), create(3)},
                         {cplx(0.25, 0.0), create(0), create(3)}};
    return s.apply_exp(op, s.vacuum());
  };
  const double a = 0.4, h = 1e-6;
  const FockVector psi = psi_of(a);
  const FockVector dpsi = (psi_of(a + h) - psi_of(a - h)) / (2 * h);
  const CMatrix fd = (state_covariance(s, psi_of(a + h)).gamma -
                      state_covariance(s, psi_of(a - h)).gamma) /
                     (2 * h);
  EXPECT_LT((state_covariance_derivative(s, psi, dpsi) - fd).norm(), 1e-7);
}

}  // namespace
}  // namespace ggpeps::fock
