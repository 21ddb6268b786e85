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
#include <string>
#include <vector>

#include "gsync/group.hpp"
#include "gsync/linalg.hpp"
#include "gsync/random.hpp"

namespace gsync {

/// Parameters of the random synchronization model: n elements, each pair
/// observed with probability q, an observed pair clean with probability p
/// (otherwise replaced by a Haar draw), plus additive Gaussian noise of
/// entry scale sigma / sqrt(d).
struct ModelParams {
  GroupSpec group = GroupSpec::special_orthogonal(3);
  std::int64_t n = 2;
  double p = 1.0;
  double q = 1.0;
  double sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const {
    detail::require(n >= 2, "n must be >= 2 (got " + std::to_string(n) + ")");
    detail::require(p >= 0.0 && p <= 1.0, "p must lie in [0, 1]");
    detail::require(q >= 0.0 && q <= 1.0, "q must lie in [0, 1]");
    detail::require(sigma >= 0.0 && std::isfinite(sigma), "sigma must be finite and >= 0");
  }

  /// tau^2 = q (1 - p + sigma^2), the per-entry variance scale of the noise part.
  double tau_squared() const { return q * (1.0 - p + sigma * sigma); }
};

struct Edge {
  int i = 0;
  int j = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/**
 * A generated problem: ground truth, observation graph, corruption mask and
 * the assembled nd x nd Hermitian measurement matrix.
 *
 * Y has identity diagonal blocks, block (i, j) is zero exactly when the pair
 * is unobserved, and the lower triangle mirrors the upper by conjugate
 * transpose.
 */
template <typename Scalar>
struct SyncInstance {
  ModelParams params;
  std::vector<GroupElement<Scalar>> truth;
  std::vector<Edge> edges;       // i < j, row-major order
  std::vector<bool> corrupted;   // parallel to edges
  Mat<Scalar> Y;

  int n() const { return static_cast<int>(params.n); }
  int d() const { return params.group.dim(); }

  /// The nd x d block column X = [pi(g_1); ...; pi(g_n)].
  Mat<Scalar> truth_stack() const { return stack(truth); }

  std::size_t corrupted_count() const {
    std::size_t c = 0;
    for (bool b : corrupted) c += b ? 1 : 0;
    return c;
  }

  static Mat<Scalar> stack(const std::vector<GroupElement<Scalar>>& elems) {
    if (elems.empty()) return {};
    const int d = elems.front().dim();
    Mat<Scalar> x(static_cast<Eigen::Index>(elems.size()) * d, d);
    for (std::size_t i = 0; i < elems.size(); ++i) {
      x.block(static_cast<Eigen::Index>(i) * d, 0, d, d) = elems[i].rep;
    }
    return x;
  }
};

namespace detail {

// Noise part of block (i, j): outlier Haar draw (when the edge is corrupted)
// plus (sigma / sqrt(d)) * gaussian matrix.
template <typename Scalar>
Mat<Scalar> additive_noise_block(const ModelParams& params, int i, int j) {
  const int d = params.group.dim();
  Mat<Scalar> e(d, d);
  KeyedStream rng(params.seed, StreamTag::EdgeNoise, i, j);
  for (int c = 0; c < d; ++c) {
    for (int r = 0; r < d; ++r) e(r, c) = standard_gaussian<Scalar>(rng);
  }
  return (params.sigma / std::sqrt(static_cast<double>(d))) * e;
}

inline bool edge_observed(const ModelParams& params, int i, int j) {
  if (params.q >= 1.0) return true;
  KeyedStream rng(params.seed, StreamTag::EdgeObserved, i, j);
  return rng.uniform() < params.q;
}

inline bool edge_clean(const ModelParams& params, int i, int j) {
  if (params.p >= 1.0) return true;
  KeyedStream rng(params.seed, StreamTag::EdgeClean, i, j);
  return rng.uniform() < params.p;
}

template <typename Scalar>
GroupElement<Scalar> edge_outlier(const ModelParams& params, int i, int j) {
  KeyedStream rng(params.seed, StreamTag::EdgeOutlier, i, j);
  return sample_haar<Scalar>(params.group, rng);
}

}  // namespace detail

/// Ground-truth elements g_1..g_n, i.i.d. Haar, keyed by (seed, i).
template <typename Scalar>
std::vector<GroupElement<Scalar>> sample_truth(const ModelParams& params) {
  std::vector<GroupElement<Scalar>> truth;
  truth.reserve(static_cast<std::size_t>(params.n));
  for (std::int64_t i = 0; i < params.n; ++i) {
    KeyedStream rng(params.seed, StreamTag::Truth, static_cast<std::uint64_t>(i));
    truth.push_back(sample_haar<Scalar>(params.group, rng));
  }
  return truth;
}

/**
 * Draws an instance of the model.
 *
 * Every random choice for pair (i, j) comes from streams keyed by
 * (seed, purpose, i, j): observation, clean/corrupt, outlier element and
 * additive noise each have their own stream. The result therefore does not
 * depend on generation order, and instances that differ only in p share
 * their observation graph.
 */
template <typename Scalar>
SyncInstance<Scalar> generate_instance(const ModelParams& params) {
  params.validate();
  check_field<Scalar>(params.group);
  const int n = static_cast<int>(params.n);
  const int d = params.group.dim();

  SyncInstance<Scalar> inst;
  inst.params = params;
  inst.truth = sample_truth<Scalar>(params);
  inst.Y = Mat<Scalar>::Identity(static_cast<Eigen::Index>(n) * d,
                                 static_cast<Eigen::Index>(n) * d);

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!detail::edge_observed(params, i, j)) continue;
      const bool clean = detail::edge_clean(params, i, j);
      Mat<Scalar> block =
          clean ? Mat<Scalar>(inst.truth[i].rep * inst.truth[j].rep.adjoint())
                : detail::edge_outlier<Scalar>(params, i, j).rep;
      if (params.sigma > 0.0) block += detail::additive_noise_block<Scalar>(params, i, j);
      inst.Y.block(i * d, j * d, d, d) = block;
      inst.Y.block(j * d, i * d, d, d) = block.adjoint();
      inst.edges.push_back({i, j});
      inst.corrupted.push_back(!clean);
    }
  }
  return inst;
}

/**
 * The normalized pure-noise matrix
 *   W = 1/(tau sqrt(n)) E .* (outlier-indicator .* Pi + sigma/sqrt(d) Eps),
 * with zero block diagonal. Off-diagonal entries have mean zero and second
 * absolute moment 1/(nd).
 *
 * Uses the same keyed streams as generate_instance, so for equal params
 * Y = I + (clean observed blocks of X X*) + tau sqrt(n) W.
 */
template <typename Scalar>
Mat<Scalar> assemble_noise_matrix(const ModelParams& params) {
  params.validate();
  check_field<Scalar>(params.group);
  const double tau2 = params.tau_squared();
  if (!(tau2 > 0.0)) {
    throw InvalidArgument("noise matrix needs tau^2 = q(1 - p + sigma^2) > 0");
  }
  const int n = static_cast<int>(params.n);
  const int d = params.group.dim();
  const double scale = 1.0 / (std::sqrt(tau2) * std::sqrt(static_cast<double>(n)));

  Mat<Scalar> w = Mat<Scalar>::Zero(static_cast<Eigen::Index>(n) * d,
                                    static_cast<Eigen::Index>(n) * d);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!detail::edge_observed(params, i, j)) continue;
      Mat<Scalar> block = Mat<Scalar>::Zero(d, d);
      if (!detail::edge_clean(params, i, j)) {
        block = detail::edge_outlier<Scalar>(params, i, j).rep;
      }
      if (params.sigma > 0.0) block += detail::additive_noise_block<Scalar>(params, i, j);
      block *= scale;
      w.block(i * d, j * d, d, d) = block;
      w.block(j * d, i * d, d, d) = block.adjoint();
    }
  }
  return w;
}

}  // namespace gsync
