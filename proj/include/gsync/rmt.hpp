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
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "gsync/errors.hpp"
#include "gsync/group.hpp"
#include "gsync/linalg.hpp"
#include "gsync/random.hpp"

namespace gsync {

/// Sorted (ascending) spectrum of an nd x nd Hermitian matrix.
struct EmpiricalSpectralDistribution {
  std::vector<double> eigenvalues;
  int n = 0;
  int d = 1;

  std::size_t size() const { return eigenvalues.size(); }
};

template <typename Scalar>
EmpiricalSpectralDistribution esd(const Mat<Scalar>& h, int d = 1) {
  if (h.rows() != h.cols()) throw InvalidArgument("esd: matrix is not square");
  detail::require(d >= 1 && h.rows() % d == 0, "esd: size is not a multiple of d");
  if (hermitian_defect(h) > 1e-10) throw InvalidArgument("esd: matrix is not Hermitian");
  const Eigen::VectorXd w = lapack::eigenvalues(h);
  EmpiricalSpectralDistribution out;
  out.eigenvalues.assign(w.data(), w.data() + w.size());
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  out.d = d;
  out.n = static_cast<int>(h.rows() / d);
  return out;
}

/// Semicircle density (1/2pi) sqrt(4 - x^2) on [-2, 2].
inline double semicircle_pdf(double x) {
  if (std::abs(x) >= 2.0) return 0.0;
  return std::sqrt(4.0 - x * x) / (2.0 * std::numbers::pi);
}

/// F(x) = 1/2 + x sqrt(4 - x^2) / (4 pi) + arcsin(x / 2) / pi on [-2, 2].
inline double semicircle_cdf(double x) {
  if (x <= -2.0) return 0.0;
  if (x >= 2.0) return 1.0;
  const double pi = std::numbers::pi;
  return 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * pi) + std::asin(0.5 * x) / pi;
}

/// Inverse of semicircle_cdf by bisection, u in [0, 1].
inline double semicircle_quantile(double u) {
  detail::require(u >= 0.0 && u <= 1.0, "semicircle_quantile: u must lie in [0, 1]");
  double lo = -2.0, hi = 2.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (semicircle_cdf(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Kolmogorov-Smirnov distance between the empirical CDF and the semicircle law.
inline double ks_to_semicircle(const EmpiricalSpectralDistribution& e) {
  if (e.eigenvalues.empty()) throw InvalidArgument("ks_to_semicircle: empty spectrum");
  const auto& v = e.eigenvalues;
  const double m = static_cast<double>(v.size());
  double sup = 0.0;
  // Walk groups of equal values so point masses are handled exactly.
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    const double f = semicircle_cdf(v[i]);
    sup = std::max(sup, std::abs(f - static_cast<double>(i) / m));
    sup = std::max(sup, std::abs(static_cast<double>(j) / m - f));
    i = j;
  }
  return sup;
}

inline std::pair<double, double> edge_eigenvalues(const EmpiricalSpectralDistribution& e) {
  if (e.eigenvalues.empty()) throw InvalidArgument("edge_eigenvalues: empty spectrum");
  return {e.eigenvalues.front(), e.eigenvalues.back()};
}

/**
 * Monte Carlo moments of the entries of pi(g), g ~ Haar.
 *
 * Entries are indexed a = i * d + j. `covariance(a, b)` estimates
 * E[(x_a - m_a) conj(x_b - m_b)]; for an irreducible representation it
 * should be delta_ab / d.
 */
struct MomentReport {
  std::string group;
  std::size_t samples = 0;
  int d = 0;
  Mat<cplx> mean;
  Eigen::MatrixXd mean_stderr;
  Eigen::MatrixXd second_moment;  // E|x_ij|^2
  Eigen::MatrixXd second_moment_stderr;
  Mat<cplx> covariance;           // d^2 x d^2
  Eigen::MatrixXd covariance_stderr;

  /// max over entries of |mean| / stderr.
  double max_mean_z() const {
    double z = 0.0;
    for (Eigen::Index i = 0; i < mean.size(); ++i) {
      if (mean_stderr(i) > 0) z = std::max(z, std::abs(mean(i)) / mean_stderr(i));
      else if (std::abs(mean(i)) > 0) return kInfZ;
    }
    return z;
  }
  /// max over a != b of |covariance(a, b)|.
  double max_offdiagonal_covariance() const {
    double c = 0.0;
    for (Eigen::Index a = 0; a < covariance.rows(); ++a) {
      for (Eigen::Index b = 0; b < covariance.cols(); ++b) {
        if (a != b) c = std::max(c, std::abs(covariance(a, b)));
      }
    }
    return c;
  }

  static constexpr double kInfZ = 1e300;
};

inline MomentReport schur_orthogonality_check(const GroupSpec& spec, std::size_t samples,
                                              std::uint64_t seed = 1) {
  detail::require(samples >= 2, "schur_orthogonality_check: need at least 2 samples");
  const int d = spec.dim();
  const int dd = d * d;
  KeyedStream rng(seed, StreamTag::Sampling);

  // Collect all draws as complex d^2-vectors.
  Mat<cplx> draws(dd, static_cast<Eigen::Index>(samples));
  with_scalar(spec, [&]<typename Scalar>(std::type_identity<Scalar>) {
    for (std::size_t s = 0; s < samples; ++s) {
      const GroupElement<Scalar> g = sample_haar<Scalar>(spec, rng);
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) draws(i * d + j, static_cast<Eigen::Index>(s)) = cplx(g.rep(i, j));
      }
    }
  });

  const double count = static_cast<double>(samples);
  MomentReport r;
  r.group = spec.name();
  r.samples = samples;
  r.d = d;
  const Vec<cplx> mu = draws.rowwise().sum() / count;
  const Mat<cplx> centered = draws.colwise() - mu;

  r.mean.resize(d, d);
  r.mean_stderr.resize(d, d);
  r.second_moment.resize(d, d);
  r.second_moment_stderr.resize(d, d);
  for (int a = 0; a < dd; ++a) {
    const int i = a / d, j = a % d;
    r.mean(i, j) = mu(a);
    const double var = centered.row(a).squaredNorm() / (count - 1.0);
    r.mean_stderr(i, j) = std::sqrt(var / count);
    const Eigen::RowVectorXd abs2 = draws.row(a).cwiseAbs2();
    const double m2 = abs2.mean();
    r.second_moment(i, j) = m2;
    r.second_moment_stderr(i, j) =
        std::sqrt((abs2.array() - m2).square().sum() / (count - 1.0) / count);
  }

  r.covariance = centered * centered.adjoint() / (count - 1.0);
  r.covariance_stderr.resize(dd, dd);
  for (int a = 0; a < dd; ++a) {
    for (int b = 0; b < dd; ++b) {
      const Vec<cplx> prod = (centered.row(a).array() * centered.row(b).conjugate().array()).transpose();
      const cplx m = prod.mean();
      const double var = (prod.array() - m).abs2().sum() / (count - 1.0);
      r.covariance_stderr(a, b) = std::sqrt(var / count);
    }
  }
  return r;
}

}  // namespace gsync
