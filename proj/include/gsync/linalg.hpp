/*
 * Copyright (c) 2026, The gsync Authors.
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

#pragma once

#include <complex>

#ifndef lapack_complex_float
#define lapack_complex_float std::complex<float>
#endif
#ifndef lapack_complex_double
#define lapack_complex_double std::complex<double>
#endif
#include <lapacke.h>

#include <Eigen/Dense>
#include <string>
#include <type_traits>
#include <vector>

#include "gsync/errors.hpp"

namespace gsync {

using cplx = std::complex<double>;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
inline constexpr bool is_complex_v = !std::is_same_v<Scalar, double>;

/// Eigenpairs sorted by non-increasing eigenvalue.
template <typename Scalar>
struct EigenPairs {
  Eigen::VectorXd values;
  Mat<Scalar> vectors;
};

/// Relative Hermiticity defect ||H - H*||_F / max(1, ||H||_F).
template <typename Scalar>
double hermitian_defect(const Mat<Scalar>& h) {
  const double scale = std::max(1.0, h.norm());
  return (h - h.adjoint()).norm() / scale;
}

namespace lapack {

/// Largest k eigenpairs of a Hermitian matrix through ?syevr / ?heevr
/// (MRRR with an index range). Only the lower triangle is read.
template <typename Scalar>
EigenPairs<Scalar> top_eigenpairs(const Mat<Scalar>& h, int k) {
  const lapack_int m = static_cast<lapack_int>(h.rows());
  Mat<Scalar> a = h;
  Eigen::VectorXd w(m);
  Mat<Scalar> z(m, k);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(k));
  lapack_int found = 0;
  lapack_int info = 0;
  const lapack_int il = m - k + 1;
  if constexpr (is_complex_v<Scalar>) {
    info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', m, a.data(), m, 0.0,
                          0.0, il, m, 0.0, &found, w.data(), z.data(), m,
                          support.data());
  } else {
    info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', m, a.data(), m, 0.0,
                          0.0, il, m, 0.0, &found, w.data(), z.data(), m,
                          support.data());
  }
  if (info != 0 || found != k) {
    throw ComputeError("hermitian eigensolver failed (info=" +
                       std::to_string(info) + ", found=" +
                       std::to_string(found) + ")");
  }
  // LAPACK returns ascending order.
  EigenPairs<Scalar> out;
  out.values.resize(k);
  out.vectors.resize(m, k);
  for (int c = 0; c < k; ++c) {
    out.values(c) = w(k - 1 - c);
    out.vectors.col(c) = z.col(k - 1 - c);
  }
  return out;
}

/// All eigenvalues, ascending.
template <typename Scalar>
Eigen::VectorXd eigenvalues(const Mat<Scalar>& h) {
  const lapack_int m = static_cast<lapack_int>(h.rows());
  Eigen::VectorXd w(m);
  if (m == 0) return w;
  Mat<Scalar> a = h;
  lapack_int info = 0;
  if constexpr (is_complex_v<Scalar>) {
    info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', m, a.data(), m, w.data());
  } else {
    info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', m, a.data(), m, w.data());
  }
  if (info != 0) {
    throw ComputeError("hermitian eigenvalue routine failed (info=" +
                       std::to_string(info) + ")");
  }
  return w;
}

}  // namespace lapack
}  // namespace gsync
