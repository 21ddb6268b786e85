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

#include <algorithm>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "gsync/errors.hpp"
#include "gsync/instance.hpp"
#include "gsync/linalg.hpp"
#include "gsync/random.hpp"

namespace gsync {

struct SolverOptions {
  /// Matrices up to this size use the dense LAPACK path.
  Eigen::Index dense_limit = 1500;
  /// Relative Hermiticity tolerance for input validation.
  double hermitian_tolerance = 1e-10;
  /// Iterative path stops once every residual is below this times ||H||_F.
  double residual_tolerance = 1e-9;
  /// Krylov basis size before an explicit restart; 0 picks a default.
  Eigen::Index max_basis = 0;
  int max_restarts = 200;
  std::uint64_t start_seed = 0x5eedULL;
};

namespace detail {

// Orthogonalizes v against the first `cols` columns of q (two passes of
// classical Gram-Schmidt) and normalizes it. Returns false when v had no
// component outside the span.
template <typename Scalar>
bool orthonormalize_against(const Mat<Scalar>& q, Eigen::Index cols, Vec<Scalar>& v) {
  const double original = v.norm();
  if (original == 0.0) return false;
  for (int pass = 0; pass < 2; ++pass) {
    if (cols > 0) v -= q.leftCols(cols) * (q.leftCols(cols).adjoint() * v);
  }
  const double remaining = v.norm();
  if (remaining <= 1e-10 * original) return false;
  v /= remaining;
  return true;
}

/**
 * Block Krylov iteration with Rayleigh-Ritz extraction and explicit restarts.
 *
 * The start block has k columns drawn from a fixed seed. Each step applies H
 * to the newest block and orthogonalizes the result against the whole basis,
 * so clusters of up to k equal eigenvalues are resolved. When a block
 * collapses (an invariant subspace was found) the missing directions are
 * filled with fresh seeded vectors.
 */
template <typename Scalar>
EigenPairs<Scalar> block_krylov_top(const Mat<Scalar>& h, int k, const SolverOptions& opts) {
  const Eigen::Index m = h.rows();
  const Eigen::Index b = k;
  Eigen::Index max_basis =
      opts.max_basis > 0 ? opts.max_basis : std::max<Eigen::Index>(30 * b, 120);
  max_basis = std::min(std::max(max_basis, 2 * b), m);
  const double tol = opts.residual_tolerance * std::max(1.0, h.norm());

  KeyedStream rng(opts.start_seed, StreamTag::SolverStart);
  auto random_vector = [&] {
    Vec<Scalar> v(m);
    for (Eigen::Index i = 0; i < m; ++i) v(i) = standard_gaussian<Scalar>(rng);
    return v;
  };

  Mat<Scalar> q(m, max_basis);
  Mat<Scalar> hq(m, max_basis);
  Eigen::Index cols = 0;

  auto append = [&](const Mat<Scalar>& block) {
    Eigen::Index added = 0;
    for (Eigen::Index c = 0; c < block.cols() && cols < max_basis; ++c) {
      Vec<Scalar> v = block.col(c);
      int attempts = 0;
      while (!orthonormalize_against(q, cols, v)) {
        if (++attempts > 8) throw ComputeError("block Krylov: cannot extend basis");
        v = random_vector();
      }
      q.col(cols) = v;
      hq.col(cols) = h * v;
      ++cols;
      ++added;
    }
    return added;
  };

  Mat<Scalar> start(m, b);
  for (Eigen::Index c = 0; c < b; ++c) start.col(c) = random_vector();
  Eigen::Index block_begin = 0;
  Eigen::Index block_size = append(start);

  EigenPairs<Scalar> best;
  for (int restart = 0; restart <= opts.max_restarts; ++restart) {
    while (true) {
      Mat<Scalar> t = q.leftCols(cols).adjoint() * hq.leftCols(cols);
      t = (0.5 * (t + t.adjoint())).eval();
      Eigen::SelfAdjointEigenSolver<Mat<Scalar>> small(t);
      if (small.info() != Eigen::Success) throw ComputeError("Rayleigh-Ritz step failed");
      const Eigen::Index take = std::min<Eigen::Index>(cols, std::max<Eigen::Index>(k, b));
      const Mat<Scalar> y = small.eigenvectors().rightCols(take).rowwise().reverse();
      const Eigen::VectorXd theta = small.eigenvalues().tail(take).reverse();

      best.values = theta.head(std::min<Eigen::Index>(take, k));
      best.vectors = q.leftCols(cols) * y.leftCols(best.values.size());
      bool converged = cols >= k;
      if (converged) {
        const Mat<Scalar> hv = hq.leftCols(cols) * y.leftCols(k);
        for (int c = 0; c < k; ++c) {
          const double r = (hv.col(c) - theta(c) * best.vectors.col(c)).norm();
          if (r > tol) {
            converged = false;
            break;
          }
        }
      }
      if (converged) return best;
      if (cols == m) {
        throw ComputeError("block Krylov: full basis without convergence");
      }
      if (cols >= max_basis) {
        // Restart from the leading Ritz vectors.
        const Mat<Scalar> keep = q.leftCols(cols) * y.leftCols(std::min<Eigen::Index>(take, b));
        cols = 0;
        block_begin = 0;
        block_size = append(keep);
        break;
      }
      const Mat<Scalar> next = hq.middleCols(block_begin, block_size);
      block_begin = cols;
      block_size = append(next);
    }
  }
  throw ComputeError("block Krylov: no convergence after " +
                     std::to_string(opts.max_restarts) + " restarts");
}

}  // namespace detail

/**
 * The k largest eigenvalues (by signed value) of a Hermitian matrix and
 * orthonormal eigenvectors, sorted non-increasing.
 *
 * Dense ?syevr/?heevr up to opts.dense_limit rows, block Krylov above. Both
 * paths are deterministic for a given input.
 */
template <typename Scalar>
EigenPairs<Scalar> top_eigenpairs(const Mat<Scalar>& h, int k, const SolverOptions& opts = {}) {
  if (h.rows() != h.cols()) throw InvalidArgument("top_eigenpairs: matrix is not square");
  if (k < 1 || k > h.rows()) {
    throw InvalidArgument("top_eigenpairs: k must lie in [1, " + std::to_string(h.rows()) + "]");
  }
  if (!h.allFinite()) throw InvalidArgument("top_eigenpairs: non-finite entries");
  if (hermitian_defect(h) > opts.hermitian_tolerance) {
    throw InvalidArgument("top_eigenpairs: matrix is not Hermitian");
  }
  if (h.rows() <= opts.dense_limit) return lapack::top_eigenpairs(h, k);
  return detail::block_krylov_top(h, k, opts);
}

/// ||H v_c - lambda_c v_c|| for every returned pair.
template <typename Scalar>
Eigen::VectorXd eigen_residuals(const Mat<Scalar>& h, const EigenPairs<Scalar>& pairs) {
  const Mat<Scalar> hv = h * pairs.vectors;
  Eigen::VectorXd r(pairs.values.size());
  for (Eigen::Index c = 0; c < r.size(); ++c) {
    r(c) = (hv.col(c) - pairs.values(c) * pairs.vectors.col(c)).norm();
  }
  return r;
}

/// Top d+1 eigenvalues of Y and the nd x d matrix of the top d eigenvectors.
template <typename Scalar>
struct SpectralResult {
  Eigen::VectorXd eigenvalues;  // lambda_1 >= ... >= lambda_{d+1}
  Mat<Scalar> x_tilde;
  Eigen::VectorXd residuals;

  double lambda_1() const { return eigenvalues(0); }
  double lambda_d1() const { return eigenvalues(eigenvalues.size() - 1); }
};

template <typename Scalar>
SpectralResult<Scalar> spectral_synchronize(const Mat<Scalar>& y, int d,
                                            const SolverOptions& opts = {}) {
  detail::require(d >= 1, "spectral_synchronize: d must be >= 1");
  detail::require(y.rows() % d == 0, "spectral_synchronize: size is not a multiple of d");
  detail::require(y.rows() >= d + 1, "spectral_synchronize: matrix too small");
  auto pairs = top_eigenpairs(y, d + 1, opts);
  SpectralResult<Scalar> out;
  out.residuals = eigen_residuals(y, pairs);
  out.eigenvalues = pairs.values;
  out.x_tilde = pairs.vectors.leftCols(d);
  return out;
}

template <typename Scalar>
SpectralResult<Scalar> spectral_synchronize(const SyncInstance<Scalar>& inst,
                                            const SolverOptions& opts = {}) {
  return spectral_synchronize(inst.Y, inst.d(), opts);
}

}  // namespace gsync
