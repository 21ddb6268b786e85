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

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "gsync/errors.hpp"
#include "gsync/group.hpp"
#include "gsync/instance.hpp"
#include "gsync/linalg.hpp"

namespace gsync {

/// Group elements recovered from the spectral estimate.
template <typename Scalar>
struct RoundedEstimate {
  std::vector<GroupElement<Scalar>> elements;
  Mat<Scalar> estimate_stack;            // [pi(h_1); ...; pi(h_n)]
  std::vector<double> per_block_error;   // D_i = || pi(h_i) - sqrt(n) Xt_i ||_F
  std::size_t degenerate_blocks = 0;
  /// Ideal-rounding objective || Xh Xh*/n - Xt Xt* ||_F^2 (brute force only).
  double objective = std::numeric_limits<double>::quiet_NaN();

  double sum_squared_block_error() const {
    double s = 0.0;
    for (double v : per_block_error) s += v * v;
    return s;
  }
};

/// Rounds each d x d block sqrt(n) Xt_i to its nearest group element.
/// Uses the eigenbasis exactly as returned by the solver.
template <typename Scalar>
RoundedEstimate<Scalar> blockwise_round(const GroupSpec& spec, const Mat<Scalar>& x_tilde) {
  check_field<Scalar>(spec);
  const int d = spec.dim();
  if (x_tilde.cols() != d || x_tilde.rows() == 0 || x_tilde.rows() % d != 0) {
    throw InvalidArgument("blockwise_round: X_tilde must be nd x d with d = " +
                          std::to_string(d));
  }
  const Eigen::Index n = x_tilde.rows() / d;
  const double root_n = std::sqrt(static_cast<double>(n));

  RoundedEstimate<Scalar> out;
  out.elements.reserve(static_cast<std::size_t>(n));
  out.per_block_error.reserve(static_cast<std::size_t>(n));
  out.estimate_stack.resize(x_tilde.rows(), d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Mat<Scalar> target = root_n * x_tilde.block(i * d, 0, d, d);
    Projection<Scalar> proj = project_to_group<Scalar>(spec, target);
    out.degenerate_blocks += proj.degenerate ? 1 : 0;
    out.per_block_error.push_back(distance(proj.element, target));
    out.estimate_stack.block(i * d, 0, d, d) = proj.element.rep;
    out.elements.push_back(std::move(proj.element));
  }
  return out;
}

inline constexpr int kMaxBruteForceZ2 = 16;

/**
 * Ideal rounding for Z_2 by exhaustive search: minimizes
 * || s s^T / n - x x^T ||_F^2 over sign vectors s, with s_1 = +1 fixed
 * (the objective is invariant under a global flip). Ties keep the first
 * assignment in enumeration order.
 */
inline RoundedEstimate<double> ideal_round_bruteforce_z2(const Eigen::VectorXd& x_tilde) {
  const auto n = static_cast<int>(x_tilde.size());
  if (n < 1) throw InvalidArgument("ideal_round_bruteforce_z2: empty input");
  if (n > kMaxBruteForceZ2) {
    throw UnsupportedSize("ideal_round_bruteforce_z2: n = " + std::to_string(n) +
                          " exceeds the enumeration bound " +
                          std::to_string(kMaxBruteForceZ2));
  }
  const Eigen::MatrixXd w = x_tilde * x_tilde.transpose();
  const double nn = static_cast<double>(n);

  double best = std::numeric_limits<double>::infinity();
  std::uint32_t best_mask = 0;
  Eigen::VectorXd s(n);
  const std::uint32_t count = 1u << (n - 1);
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    s(0) = 1.0;
    for (int i = 1; i < n; ++i) s(i) = (mask >> (i - 1)) & 1u ? -1.0 : 1.0;
    const double value = (s * s.transpose() / nn - w).squaredNorm();
    if (value < best) {
      best = value;
      best_mask = mask;
    }
  }

  RoundedEstimate<double> out;
  out.objective = best;
  out.estimate_stack.resize(n, 1);
  for (int i = 0; i < n; ++i) {
    const double sign = i > 0 && ((best_mask >> (i - 1)) & 1u) ? -1.0 : 1.0;
    out.estimate_stack(i, 0) = sign;
    out.elements.push_back({Eigen::MatrixXd::Constant(1, 1, sign)});
    out.per_block_error.push_back(std::abs(sign - std::sqrt(nn) * x_tilde(i)));
  }
  return out;
}

}  // namespace gsync
