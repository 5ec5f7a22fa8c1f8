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

#include "ggpeps/galg.hpp"

#include <cmath>
#include <limits>

namespace ggpeps {

namespace {

template <class Scalar>
Scalar unit_phase(Scalar v) {
  return v / Scalar(std::abs(v));
}

// Parlett-Reid LTL^T reduction. Calls visit(pivot) for each 2x2 pivot and
// returns the accumulated permutation sign, or 0 if a zero pivot column is
// met (singular matrix).
template <class Scalar, class Visit>
int parlett_reid(Mat<Scalar>& A, Visit&& visit) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n) throw std::invalid_argument("pfaffian: matrix not square");
  if (n % 2 != 0) {
    throw std::invalid_argument("pfaffian: odd dimension " + std::to_string(n));
  }
  int sign = 1;
  for (Eigen::Index k = 0; k + 1 < n; k += 2) {
    Eigen::Index rel = 0;
    const double colmax = A.col(k).tail(n - k - 1).cwiseAbs().maxCoeff(&rel);
    const Eigen::Index kp = k + 1 + rel;
    if (kp != k + 1) {
      A.row(k + 1).swap(A.row(kp));
      A.col(k + 1).swap(A.col(kp));
      sign = -sign;
    }
    if (colmax == 0.0) return 0;
    const Scalar piv = A(k, k + 1);
    visit(piv);
    const Eigen::Index r = n - k - 2;
    if (r > 0) {
      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> tau =
          -A.col(k).segment(k + 2, r) / piv;
      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> u =
          A.col(k + 1).segment(k + 2, r);
      A.block(k + 2, k + 2, r, r).noalias() +=
          tau * u.transpose() - u * tau.transpose();
    }
  }
  return sign;
}

}  // namespace

template <class Scalar>
Scalar pfaffian(const Mat<Scalar>& A) {
  if (A.rows() == 0) return Scalar(1);
  Mat<Scalar> work = antisymmetrize(A);
  Scalar pf(1);
  const int sign = parlett_reid(work, [&](Scalar piv) { pf *= piv; });
  return sign == 0 ? Scalar(0) : Scalar(sign) * pf;
}

template <class Scalar>
LogValue<Scalar> log_pfaffian(const Mat<Scalar>& A) {
  LogValue<Scalar> out;
  if (A.rows() == 0) return out;
  Mat<Scalar> work = antisymmetrize(A);
  Scalar phase(1);
  double log_abs = 0.0;
  const int sign = parlett_reid(work, [&](Scalar piv) {
    log_abs += std::log(std::abs(piv));
    phase *= unit_phase(piv);
  });
  if (sign == 0) {
    out.phase = Scalar(0);
    out.log_abs = -std::numeric_limits<double>::infinity();
    return out;
  }
  out.log_abs = log_abs;
  out.phase = Scalar(sign) * phase;
  return out;
}

template <class Scalar>
LogValue<Scalar> log_det(const Mat<Scalar>& A) {
  LogValue<Scalar> out;
  if (A.rows() == 0) return out;
  const Eigen::PartialPivLU<Mat<Scalar>> lu(A);
  const auto& LU = lu.matrixLU();
  Scalar phase(lu.permutationP().determinant());
  double log_abs = 0.0;
  for (Eigen::Index i = 0; i < LU.rows(); ++i) {
    const Scalar d = LU(i, i);
    if (d == Scalar(0)) {
      out.phase = Scalar(0);
      out.log_abs = -std::numeric_limits<double>::infinity();
      return out;
    }
    log_abs += std::log(std::abs(d));
    phase *= unit_phase(d);
  }
  out.log_abs = log_abs;
  out.phase = phase;
  return out;
}

template <class Scalar>
Scalar det(const Mat<Scalar>& A) {
  if (A.rows() == 0) return Scalar(1);
  return Eigen::PartialPivLU<Mat<Scalar>>(A).determinant();
}

template <class Scalar>
double condition_estimate(const Mat<Scalar>& A) {
  const double rc = Eigen::PartialPivLU<Mat<Scalar>>(A).rcond();
  return rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
}

template <class Scalar>
Mat<Scalar> inverse(const Mat<Scalar>& A, double max_condition) {
  const Eigen::PartialPivLU<Mat<Scalar>> lu(A);
  const double rc = lu.rcond();
  const double cond =
      rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  if (!(cond <= max_condition)) {
    throw NumericalError("inverse: matrix is near-singular (condition estimate " +
                             std::to_string(cond) + ")",
                         cond);
  }
  return lu.inverse();
}

template <class Scalar>
Scalar pfaffian_block_ratio(const Mat<Scalar>& ainv_block,
                            const Mat<Scalar>& delta) {
  const Eigen::Index k = delta.rows();
  Mat<Scalar> M(2 * k, 2 * k);
  M.topLeftCorner(k, k) = delta;
  M.topRightCorner(k, k).setIdentity();
  M.bottomLeftCorner(k, k) = -Mat<Scalar>::Identity(k, k);
  M.bottomRightCorner(k, k) = ainv_block;
  const Scalar pf = pfaffian(M);
  return (k / 2) % 2 == 0 ? pf : -pf;
}

template <class Scalar>
Mat<Scalar> pfaffian_cofactors(const Mat<Scalar>& A, Eigen::Index first,
                               Eigen::Index count) {
  const Eigen::Index n = A.rows();
  if (first < 0 || count < 0 || first + count > n) {
    throw std::invalid_argument("pfaffian_cofactors: index range out of bounds");
  }
  Mat<Scalar> C = Mat<Scalar>::Zero(count, count);
  std::vector<Eigen::Index> keep;
  keep.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index a = 0; a < count; ++a) {
    for (Eigen::Index b = a + 1; b < count; ++b) {
      const Eigen::Index i = first + a, j = first + b;
      keep.clear();
      for (Eigen::Index r = 0; r < n; ++r)
        if (r != i && r != j) keep.push_back(r);
      Mat<Scalar> minor(n - 2, n - 2);
      for (Eigen::Index r = 0; r < n - 2; ++r)
        for (Eigen::Index c = 0; c < n - 2; ++c) minor(r, c) = A(keep[r], keep[c]);
      const Scalar pf = n > 2 ? pfaffian(minor) : Scalar(1);
      C(a, b) = (i + j) % 2 == 1 ? pf : Scalar(-pf);
      C(b, a) = -C(a, b);
    }
  }
  return C;
}

template <class Scalar>
Scalar det_block_ratio(const Mat<Scalar>& ainv_block,
                       const Mat<Scalar>& delta) {
  const Eigen::Index k = delta.rows();
  const Mat<Scalar> M = Mat<Scalar>::Identity(k, k) + delta * ainv_block;
  return det(M);
}

template double pfaffian<double>(const RMatrix&);
template cplx pfaffian<cplx>(const CMatrix&);
template LogValue<double> log_pfaffian<double>(const RMatrix&);
template LogValue<cplx> log_pfaffian<cplx>(const CMatrix&);
template double det<double>(const RMatrix&);
template cplx det<cplx>(const CMatrix&);
template LogValue<double> log_det<double>(const RMatrix&);
template LogValue<cplx> log_det<cplx>(const CMatrix&);
template double condition_estimate<double>(const RMatrix&);
template double condition_estimate<cplx>(const CMatrix&);
template RMatrix inverse<double>(const RMatrix&, double);
template CMatrix inverse<cplx>(const CMatrix&, double);
template double pfaffian_block_ratio<double>(const RMatrix&, const RMatrix&);
template cplx pfaffian_block_ratio<cplx>(const CMatrix&, const CMatrix&);
template double det_block_ratio<double>(const RMatrix&, const RMatrix&);
template RMatrix pfaffian_cofactors<double>(const RMatrix&, Eigen::Index, Eigen::Index);
template CMatrix pfaffian_cofactors<cplx>(const CMatrix&, Eigen::Index, Eigen::Index);
template cplx det_block_ratio<cplx>(const CMatrix&, const CMatrix&);

// --- PfaffianCache ---------------------------------------------------------

PfaffianCache::PfaffianCache(RMatrix A, int recompute_interval)
    : A_(std::move(A)), interval_(recompute_interval) {
  if (interval_ < 1) {
    throw std::invalid_argument("PfaffianCache: recompute interval must be >= 1");
  }
  refresh();
}

void PfaffianCache::refresh() {
  A_ = antisymmetrize(A_);
  ainv_ = ggpeps::inverse(A_, 1e14);
  ainv_ = antisymmetrize(ainv_);
  log_pf_ = log_pfaffian(A_);
  staleness_ = 0;
}

double PfaffianCache::pfaffian_ratio(std::span<const int> S,
                                     const RMatrix& new_block) const {
  const RMatrix delta = new_block - gather_block(A_, S);
  return pfaffian_block_ratio(gather_block(ainv_, S), delta);
}

double PfaffianCache::det_ratio(std::span<const int> S,
                                const RMatrix& new_block) const {
  const double r = pfaffian_ratio(S, new_block);
  return r * r;
}

void PfaffianCache::accept(std::span<const int> S, const RMatrix& new_block,
                           double ratio) {
  const auto k = static_cast<Eigen::Index>(S.size());
  const Eigen::Index n = A_.rows();
  const RMatrix delta = new_block - gather_block(A_, S);
  const RMatrix V = gather_block(ainv_, S);

  RMatrix Y(k, n);  // rows S of A^{-1}
  RMatrix Z(n, k);  // columns S of A^{-1}
  for (Eigen::Index i = 0; i < k; ++i) {
    Y.row(i) = ainv_.row(S[i]);
    Z.col(i) = ainv_.col(S[i]);
  }

  // (A + P D P^T)^{-1} = A^{-1} - A^{-1} P (1 + D V)^{-1} D P^T A^{-1}.
  const RMatrix K =
      (RMatrix::Identity(k, k) + delta * V).partialPivLu().solve(delta);
  const RMatrix KY = K * Y;
  ainv_.noalias() -= Z * KY;
  ainv_ = antisymmetrize(ainv_);

  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) A_(S[i], S[j]) = new_block(i, j);

  log_pf_.log_abs += std::log(std::abs(ratio));
  if (ratio < 0) log_pf_.phase = -log_pf_.phase;
  ++staleness_;
}

double block_det_ratio(const PfaffianCache& cache, std::span<const int> S,
                       const RMatrix& B) {
  return cache.det_ratio(S, B);
}

}  // namespace ggpeps
