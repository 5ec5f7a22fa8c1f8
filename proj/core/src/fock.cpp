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

#include "ggpeps/fock.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace ggpeps::fock {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic> majorana_images(
    const FockSpace& space, const FockVector& psi) {
  const int m = 2 * space.n_modes();
  CMatrix W(space.dim(), m);
  for (int a = 0; a < m; ++a) W.col(a) = space.apply_majorana(a, psi);
  return W;
}

}  // namespace

FockSpace::FockSpace(int n_modes) : n_(n_modes) {
  if (n_modes < 1 || n_modes > kMaxModes) {
    throw std::invalid_argument("FockSpace: mode count " +
                                std::to_string(n_modes) +
                                " outside [1, " + std::to_string(kMaxModes) +
                                "]");
  }
}

void FockSpace::check_mode(int mode) const {
  if (mode < 0 || mode >= n_) {
    throw std::out_of_range("FockSpace: mode index " + std::to_string(mode) +
                            " out of range");
  }
}

FockVector FockSpace::vacuum() const {
  FockVector v = FockVector::Zero(dim());
  v(0) = 1.0;
  return v;
}

FockVector FockSpace::apply(const ModeOp& op, const FockVector& v) const {
  check_mode(op.mode);
  FockVector out = FockVector::Zero(dim());
  const std::uint32_t bit = 1u << op.mode;
  const std::uint32_t below = bit - 1u;
  for (Eigen::Index b = 0; b < dim(); ++b) {
    if (v(b) == cplx(0)) continue;
    const auto ub = static_cast<std::uint32_t>(b);
    const bool occupied = (ub & bit) != 0;
    if (occupied == op.dagger) continue;
    const double sign = (std::popcount(ub & below) % 2 == 0) ? 1.0 : -1.0;
    out(static_cast<Eigen::Index>(ub ^ bit)) += sign * v(b);
  }
  return out;
}

FockVector FockSpace::apply(const QuadraticOp& op, const FockVector& v) const {
  FockVector out = FockVector::Zero(dim());
  for (const QuadraticTerm& t : op) {
    if (t.coef == cplx(0)) continue;
    out += t.coef * apply(t.first, apply(t.second, v));
  }
  return out;
}

FockVector FockSpace::apply_exp(const QuadraticOp& op,
                                const FockVector& v) const {
  FockVector sum = v;
  FockVector term = v;
  for (int k = 1; k < 400; ++k) {
    term = apply(op, term) / static_cast<double>(k);
    const double tn = term.norm();
    sum += term;
    if (tn == 0.0 || tn <= 1e-18 * sum.norm()) return sum;
  }
  throw std::runtime_error("FockSpace::apply_exp: Taylor series did not converge");
}

FockVector FockSpace::apply_number_phase(int mode, double angle,
                                         const FockVector& v) const {
  check_mode(mode);
  FockVector out = v;
  const cplx phase = std::polar(1.0, angle);
  const Eigen::Index bit = Eigen::Index{1} << mode;
  for (Eigen::Index b = 0; b < dim(); ++b)
    if ((b & bit) != 0) out(b) *= phase;
  return out;
}

FockVector FockSpace::project_vacuum(std::span<const int> modes,
                                     const FockVector& v) const {
  Eigen::Index mask = 0;
  for (int m : modes) {
    check_mode(m);
    mask |= Eigen::Index{1} << m;
  }
  FockVector out = v;
  for (Eigen::Index b = 0; b < dim(); ++b)
    if ((b & mask) != 0) out(b) = 0.0;
  return out;
}

FockVector FockSpace::apply_majorana(int a, const FockVector& v) const {
  const int mode = a / 2;
  const FockVector c = apply(annihilate(mode), v);
  const FockVector cd = apply(create(mode), v);
  if (a % 2 == 0) return c + cd;
  return cplx(0, 1) * (c - cd);
}

FockVector FockSpace::run(const OperatorProgram& program, FockVector v) const {
  for (const ProgramStep& step : program) {
    v = std::visit(
        overloaded{
            [&](const ExpQuadratic& s) { return apply_exp(s.op, v); },
            [&](const NumberPhase& s) {
              return apply_number_phase(s.mode, s.angle, v);
            },
            [&](const ApplyMode& s) { return apply(s.op, v); },
            [&](const ApplyQuadratic& s) { return apply(s.op, v); },
            [&](const ProjectVacuum& s) {
              return project_vacuum(s.modes, v);
            },
        },
        step);
  }
  return v;
}

FockCovariance state_covariance(const FockSpace& space, const FockVector& psi) {
  const double norm_sq = psi.squaredNorm();
  if (!(norm_sq > 0.0)) {
    throw std::domain_error("fock: zero-norm state has no covariance");
  }
  const CMatrix W = majorana_images(space, psi);
  const CMatrix G = W.adjoint() * W;
  FockCovariance out;
  out.gamma = cplx(0, 0.5) * (G - G.transpose()) / norm_sq;
  out.norm_sq = norm_sq;
  return out;
}

FockCovariance fock_covariance(int n_modes, const OperatorProgram& program) {
  const FockSpace space(n_modes);
  return state_covariance(space, space.run(program));
}

MixedCovariance mixed_covariance(const FockSpace& space, const FockVector& ket,
                                 const FockVector& bra) {
  const cplx overlap = bra.dot(ket);  // conjugates bra
  if (std::abs(overlap) == 0.0) {
    throw std::domain_error("fock: vanishing overlap in mixed covariance");
  }
  const CMatrix Wk = majorana_images(space, ket);
  const CMatrix Wb = majorana_images(space, bra);
  const CMatrix G = Wb.adjoint() * Wk;
  return {cplx(0, 0.5) * (G - G.transpose()) / overlap, overlap};
}

CMatrix state_covariance_derivative(const FockSpace& space,
                                    const FockVector& psi,
                                    const FockVector& dpsi) {
  const double norm_sq = psi.squaredNorm();
  if (!(norm_sq > 0.0)) {
    throw std::domain_error("fock: zero-norm state has no covariance");
  }
  const CMatrix W = majorana_images(space, psi);
  const CMatrix dW = majorana_images(space, dpsi);
  const CMatrix G = W.adjoint() * W;
  const CMatrix dG = dW.adjoint() * W + W.adjoint() * dW;
  const double dnorm = 2.0 * psi.dot(dpsi).real();
  const CMatrix gamma = cplx(0, 0.5) * (G - G.transpose()) / norm_sq;
  return cplx(0, 0.5) * (dG - dG.transpose()) / norm_sq -
         gamma * (dnorm / norm_sq);
}

}  // namespace ggpeps::fock
