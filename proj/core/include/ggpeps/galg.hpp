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
 * @brief Dense antisymmetric linear algebra: Pfaffians, determinants,
 * inverses and low-rank Pfaffian/determinant ratio updates.
 */

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ggpeps {

using cplx = std::complex<double>;
using RMatrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Raised when a matrix is too ill-conditioned for the requested operation.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double condition)
      : std::runtime_error(what), condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

/// A value stored as phase * exp(log_abs). A zero value has phase == 0.
template <class Scalar>
struct LogValue {
  double log_abs = 0.0;
  Scalar phase = Scalar(1);

  Scalar value() const { return phase * std::exp(log_abs); }
  bool is_zero() const { return phase == Scalar(0); }
};

/// Returns (A - A^T) / 2.
template <class Scalar>
Mat<Scalar> antisymmetrize(const Mat<Scalar>& A) {
  return (A - A.transpose()) / Scalar(2);
}

/// Maximum |A + A^T| entry.
template <class Scalar>
double antisymmetry_residual(const Mat<Scalar>& A) {
  return (A + A.transpose()).cwiseAbs().maxCoeff();
}

/// Pfaffian by Parlett-Reid tridiagonalization with partial pivoting.
/// The input is copied and antisymmetrized. Throws on odd dimension.
template <class Scalar>
Scalar pfaffian(const Mat<Scalar>& A);

template <class Scalar>
LogValue<Scalar> log_pfaffian(const Mat<Scalar>& A);

/// Determinant by LU with partial pivoting.
template <class Scalar>
Scalar det(const Mat<Scalar>& A);

template <class Scalar>
LogValue<Scalar> log_det(const Mat<Scalar>& A);

template <class Scalar>
double log_abs_det(const Mat<Scalar>& A) {
  return log_det(A).log_abs;
}

/// Reciprocal 1-norm condition estimate from the LU factorization.
template <class Scalar>
double condition_estimate(const Mat<Scalar>& A);

/// Inverse via LU. Throws NumericalError if the condition estimate exceeds
/// max_condition.
template <class Scalar>
Mat<Scalar> inverse(const Mat<Scalar>& A, double max_condition = 1e12);

/// Pf(A + P D P^T) / Pf(A), where P selects the index set S, given the
/// S x S block of A^{-1} (ainv_block) and the antisymmetric block change D.
/// Evaluated as (-1)^{|S|/2} Pf([[D, 1], [-1, ainv_block]]), which needs no
/// inversion of either block.
template <class Scalar>
Scalar pfaffian_block_ratio(const Mat<Scalar>& ainv_block,
                            const Mat<Scalar>& delta);

/// C_ij = dPf(A)/dA_ij (A_ij and A_ji = -A_ij varied together) for
/// first <= i, j < first + count, from Pfaffians of the (n-2) minors. Finite
/// even where A is singular.
template <class Scalar>
Mat<Scalar> pfaffian_cofactors(const Mat<Scalar>& A, Eigen::Index first,
                               Eigen::Index count);

/// det(A + P D P^T) / det(A) = det(1 + D ainv_block).
template <class Scalar>
Scalar det_block_ratio(const Mat<Scalar>& ainv_block, const Mat<Scalar>& delta);

/// Gathers the S x S block of M.
template <class Scalar>
Mat<Scalar> gather_block(const Mat<Scalar>& M, std::span<const int> S) {
  Mat<Scalar> out(S.size(), S.size());
  for (std::size_t i = 0; i < S.size(); ++i)
    for (std::size_t j = 0; j < S.size(); ++j) out(i, j) = M(S[i], S[j]);
  return out;
}

/**
 * Single-owner cache of a real antisymmetric matrix A, its inverse and
 * log Pf(A), supporting replacement of one principal block at a time.
 *
 * Ratios for a proposed block replacement cost O(|S|^3); accepting a
 * replacement updates the inverse by the Woodbury identity in
 * O(dim^2 |S|). After `recompute_interval` accepted updates the cache
 * reports needs_refresh() and refresh() rebuilds from A.
 */
class PfaffianCache {
 public:
  PfaffianCache() = default;
  PfaffianCache(RMatrix A, int recompute_interval);

  int dim() const noexcept { return static_cast<int>(A_.rows()); }
  const RMatrix& matrix() const noexcept { return A_; }
  const RMatrix& inverse() const noexcept { return ainv_; }
  double log_abs_pfaffian() const noexcept { return log_pf_.log_abs; }
  double pfaffian_sign() const noexcept { return log_pf_.phase; }

  /// Pf(A') / Pf(A) with block S of A replaced by new_block.
  double pfaffian_ratio(std::span<const int> S, const RMatrix& new_block) const;
  /// det(A') / det(A); the square of pfaffian_ratio.
  double det_ratio(std::span<const int> S, const RMatrix& new_block) const;

  /// Replaces block S by new_block; `ratio` must be the value returned by
  /// pfaffian_ratio for the same arguments.
  void accept(std::span<const int> S, const RMatrix& new_block, double ratio);

  int staleness() const noexcept { return staleness_; }
  bool needs_refresh() const noexcept { return staleness_ >= interval_; }

  /// Recomputes inverse and Pfaffian from the stored matrix.
  void refresh();

 private:
  RMatrix A_;
  RMatrix ainv_;
  LogValue<double> log_pf_;
  int interval_ = 1000;
  int staleness_ = 0;
};

/// det(A')/det(A) where A' has block S replaced by B; see PfaffianCache.
double block_det_ratio(const PfaffianCache& cache, std::span<const int> S,
                       const RMatrix& B);

}  // namespace ggpeps
