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
 * @brief Explicit Fock-space evaluation for a handful of Dirac modes.
 *
 * Mode operators act on 2^n dimensional state vectors in the occupation
 * basis (bit k of the basis index = occupation of mode k) with the
 * Jordan-Wigner sign (-1)^(number of occupied modes below k).
 *
 * Majorana convention: gamma_{2k} = c_k + c_k^dag and
 * gamma_{2k+1} = i (c_k - c_k^dag). Covariances are
 * Gamma_ab = (i/2) <[gamma_a, gamma_b]> / <norm>.
 */

#pragma once

#include <variant>
#include <vector>

#include "ggpeps/galg.hpp"

namespace ggpeps::fock {

inline constexpr int kMaxModes = 12;

using FockVector = CVector;

struct ModeOp {
  int mode = 0;
  bool dagger = false;
};

inline ModeOp create(int mode) { return {mode, true}; }
inline ModeOp annihilate(int mode) { return {mode, false}; }

/// coef * first * second (operator product, `second` acts first).
struct QuadraticTerm {
  cplx coef;
  ModeOp first;
  ModeOp second;
};

using QuadraticOp = std::vector<QuadraticTerm>;

/// Step of an operator program. Steps are applied in order, each acting on
/// the result of the previous one (so the program {A, B} builds B A |vac>).
struct ExpQuadratic {
  QuadraticOp op;
};
struct NumberPhase {
  int mode;
  double angle;  // multiplies by exp(i angle n_mode)
};
struct ApplyMode {
  ModeOp op;
};
struct ApplyQuadratic {
  QuadraticOp op;
};
/// Projects the listed modes onto their vacuum.
struct ProjectVacuum {
  std::vector<int> modes;
};

using ProgramStep =
    std::variant<ExpQuadratic, NumberPhase, ApplyMode, ApplyQuadratic,
                 ProjectVacuum>;
using OperatorProgram = std::vector<ProgramStep>;

class FockSpace {
 public:
  /// Throws std::invalid_argument for n_modes outside [1, kMaxModes].
  explicit FockSpace(int n_modes);

  int n_modes() const noexcept { return n_; }
  Eigen::Index dim() const noexcept { return Eigen::Index{1} << n_; }

  FockVector vacuum() const;

  FockVector apply(const ModeOp& op, const FockVector& v) const;
  FockVector apply(const QuadraticOp& op, const FockVector& v) const;
  /// exp(op) v by Taylor series; exact for nilpotent pairing operators.
  FockVector apply_exp(const QuadraticOp& op, const FockVector& v) const;
  FockVector apply_number_phase(int mode, double angle,
                                const FockVector& v) const;
  FockVector project_vacuum(std::span<const int> modes,
                            const FockVector& v) const;
  FockVector apply_majorana(int a, const FockVector& v) const;

  FockVector run(const OperatorProgram& program, FockVector v) const;
  FockVector run(const OperatorProgram& program) const {
    return run(program, vacuum());
  }

 private:
  void check_mode(int mode) const;
  int n_;
};

struct FockCovariance {
  CMatrix gamma;   // 2n x 2n
  double norm_sq;  // <psi|psi> of the unnormalized state
};

/// Covariance of the state program |vac>. Throws for a zero-norm state.
FockCovariance fock_covariance(int n_modes, const OperatorProgram& program);

/// Covariance of an explicit vector.
FockCovariance state_covariance(const FockSpace& space, const FockVector& psi);

/// Gamma_ab = (i/2) <bra|[gamma_a, gamma_b]|ket> / <bra|ket>: the
/// covariance (Grassmann moments) of the operator |ket><bra|.
struct MixedCovariance {
  CMatrix gamma;
  cplx overlap;  // <bra|ket>
};
MixedCovariance mixed_covariance(const FockSpace& space, const FockVector& ket,
                                 const FockVector& bra);

/// d Gamma for the state psi(alpha) with d psi / d alpha = dpsi.
CMatrix state_covariance_derivative(const FockSpace& space,
                                    const FockVector& psi,
                                    const FockVector& dpsi);

}  // namespace ggpeps::fock
