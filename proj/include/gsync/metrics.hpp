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
#include <cmath>
#include <limits>
#include <vector>

#include "gsync/errors.hpp"
#include "gsync/group.hpp"
#include "gsync/linalg.hpp"

// Error measures between rank-d projectors. Every projector distance is
// evaluated through d x d Gram matrices:
//   || A A*/a - B B*/b ||_F^2 = ||A*A||^2/a^2 + ||B*B||^2/b^2 - 2 ||A*B||^2/(ab)
// which costs O(n d^2) instead of forming nd x nd products.

namespace gsync {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace detail {

template <typename Scalar>
double projector_distance_sq(const Mat<Scalar>& a, double a_scale, const Mat<Scalar>& b,
                             double b_scale) {
  const double aa = (a.adjoint() * a).squaredNorm() / (a_scale * a_scale);
  const double bb = (b.adjoint() * b).squaredNorm() / (b_scale * b_scale);
  const double ab = (a.adjoint() * b).squaredNorm() / (a_scale * b_scale);
  return std::max(0.0, aa + bb - 2.0 * ab);
}

}  // namespace detail

/**
 * Average squared alignment error
 *   (1/n^2) sum_{i,j} || pi(g_i g_j^-1) - pi(h_i h_j^-1) ||_F^2
 *   = || X X^* / n - Xh Xh^* / n ||_F^2.
 * Invariant under h_i -> h_i a for any fixed a.
 */
template <typename Scalar>
double mse(const std::vector<GroupElement<Scalar>>& truth,
           const std::vector<GroupElement<Scalar>>& estimate) {
  if (truth.empty() || truth.size() != estimate.size()) {
    throw InvalidArgument("mse: element lists must be non-empty and of equal length");
  }
  const int d = truth.front().dim();
  const auto n = static_cast<Eigen::Index>(truth.size());
  Mat<Scalar> x(n * d, d), xh(n * d, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (truth[i].dim() != d || estimate[i].dim() != d) {
      throw InvalidArgument("mse: group elements of different dimensions");
    }
    x.block(i * d, 0, d, d) = truth[i].rep;
    xh.block(i * d, 0, d, d) = estimate[i].rep;
  }
  const double nn = static_cast<double>(n);
  return detail::projector_distance_sq(x, nn, xh, nn);
}

/// Same quantity from stacked nd x d block columns.
template <typename Scalar>
double mse_stacked(const Mat<Scalar>& x, const Mat<Scalar>& x_hat) {
  if (x.rows() != x_hat.rows() || x.cols() != x_hat.cols() || x.cols() == 0 ||
      x.rows() % x.cols() != 0) {
    throw InvalidArgument("mse: stacked shapes disagree");
  }
  const double n = static_cast<double>(x.rows() / x.cols());
  return detail::projector_distance_sq(x, n, x_hat, n);
}

/**
 * MSE proxy || X X^* / n - Xt Xt^* ||_F^2 = 2d - 2 || X^* Xt ||_F^2 / n, where X
 * has orthogonal columns of norm sqrt(n) and Xt orthonormal columns.
 * Clamped to [0, 2d].
 */
template <typename Scalar>
double mse_proxy(const Mat<Scalar>& x, const Mat<Scalar>& x_tilde) {
  if (x.rows() != x_tilde.rows() || x.cols() != x_tilde.cols() || x.cols() == 0 ||
      x.rows() % x.cols() != 0) {
    throw InvalidArgument("mse_proxy: shapes disagree");
  }
  const Eigen::Index d = x.cols();
  const double n = static_cast<double>(x.rows() / d);
  const Mat<Scalar> eye = Mat<Scalar>::Identity(d, d);
  if ((x.adjoint() * x / n - eye).norm() > 1e-6) {
    throw InvalidArgument("mse_proxy: X columns are not orthogonal with norm sqrt(n)");
  }
  if ((x_tilde.adjoint() * x_tilde - eye).norm() > 1e-6) {
    throw InvalidArgument("mse_proxy: X_tilde columns are not orthonormal");
  }
  const double overlap = (x.adjoint() * x_tilde).squaredNorm() / n;
  return std::clamp(2.0 * static_cast<double>(d) - 2.0 * overlap, 0.0,
                    2.0 * static_cast<double>(d));
}

/// Rounding error R = || Xh Xh*/n - Xt Xt* ||_F^2.
template <typename Scalar>
double rounding_error(const Mat<Scalar>& x_hat, const Mat<Scalar>& x_tilde) {
  if (x_hat.rows() != x_tilde.rows() || x_hat.cols() != x_tilde.cols() || x_hat.cols() == 0 ||
      x_hat.rows() % x_hat.cols() != 0) {
    throw InvalidArgument("rounding_error: shapes disagree");
  }
  const double n = static_cast<double>(x_hat.rows() / x_hat.cols());
  return detail::projector_distance_sq(x_hat, n, x_tilde, 1.0);
}

/// Consistent risk estimate computed from the observed eigenvalues.
struct PhiHat {
  double phi = 0.0;        // 2d / gamma_hat^2
  double eta = 1.0;        // max(lambda_1 / lambda_{d+1}, 1)
  double gamma_hat = 1.0;  // eta + sqrt(eta^2 - 1)
  bool degenerate = false; // lambda_{d+1} <= 0
  bool unstable = false;   // eta < 1.05, estimate is unreliable near threshold
};

inline constexpr double kPhiStabilityEta = 1.05;

inline PhiHat phi_hat(double lambda_1, double lambda_d1, int d) {
  detail::require(d >= 1, "phi_hat: d must be >= 1");
  PhiHat out;
  if (!(lambda_d1 > 0.0)) {
    out.degenerate = true;
    out.phi = 0.0;
    out.eta = kInf;
    out.gamma_hat = kInf;
    return out;
  }
  out.eta = std::max(lambda_1 / lambda_d1, 1.0);
  out.gamma_hat = out.eta + std::sqrt(out.eta * out.eta - 1.0);
  out.phi = out.eta == 1.0 ? 2.0 * d : 2.0 * d / (out.gamma_hat * out.gamma_hat);
  out.unstable = out.eta < kPhiStabilityEta;
  return out;
}

/// Noise-to-signal ratio beta_n and effective SNR gamma = 1 / beta_n.
struct Beta {
  double beta = kInf;
  double gamma = 0.0;
};

inline Beta beta(double p, double q, double sigma, double n) {
  detail::require(p >= 0.0 && q >= 0.0 && sigma >= 0.0 && n > 0.0,
                  "beta: parameters must be non-negative and n positive");
  if (p == 0.0 || q == 0.0) return {kInf, 0.0};
  const double b = std::sqrt(1.0 - p + sigma * sigma) / (p * std::sqrt(q * n));
  return {b, b == 0.0 ? kInf : 1.0 / b};
}

/// Limit of the MSE proxy: 2d / gamma^2 above the threshold gamma = 1, 2d below.
inline double theoretical_limit_mse(double gamma, int d) {
  detail::require(gamma >= 0.0, "theoretical_limit_mse: gamma must be >= 0");
  if (gamma > 1.0) return 2.0 * d / (gamma * gamma);
  return 2.0 * d;
}

/// All error measures of one synchronization run. Rounding-dependent fields
/// are NaN when no rounding was performed.
struct MetricsReport {
  double mse = std::numeric_limits<double>::quiet_NaN();
  double mse_proxy = 0.0;
  double rounding_error = std::numeric_limits<double>::quiet_NaN();
  double eta = 1.0;
  double phi_hat = 0.0;
  double gamma_hat = 1.0;
  double beta = 0.0;
  double theory_mse = 0.0;
  bool phi_degenerate = false;
  bool phi_unstable = false;
};

}  // namespace gsync
