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
#include <charconv>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <type_traits>

#include <Eigen/Dense>

#include "gsync/errors.hpp"
#include "gsync/linalg.hpp"
#include "gsync/random.hpp"

namespace gsync {

enum class GroupKind { Cyclic, Unitary, SpecialUnitary, Orthogonal, SpecialOrthogonal };
enum class Field { Real, Complex };

/**
 * A compact group together with its defining d-dimensional unitary
 * representation.
 *
 * Z_2 is represented as {+1, -1} over the reals, Z_L (L > 2) as the L-th
 * roots of unity, and the matrix groups by their defining representation.
 */
class GroupSpec {
 public:
  static GroupSpec cyclic(int order) {
    detail::require(order >= 2, "cyclic group order must be >= 2");
    return GroupSpec(GroupKind::Cyclic, 1, order,
                     order == 2 ? Field::Real : Field::Complex);
  }
  static GroupSpec unitary(int d) {
    detail::require(d >= 1, "U(d) requires d >= 1");
    return GroupSpec(GroupKind::Unitary, d, 0, Field::Complex);
  }
  static GroupSpec special_unitary(int d) {
    detail::require(d >= 2, "SU(d) requires d >= 2");
    return GroupSpec(GroupKind::SpecialUnitary, d, 0, Field::Complex);
  }
  static GroupSpec orthogonal(int d) {
    detail::require(d >= 1, "O(d) requires d >= 1");
    return GroupSpec(GroupKind::Orthogonal, d, 0, Field::Real);
  }
  static GroupSpec special_orthogonal(int d) {
    detail::require(d >= 2, "SO(d) requires d >= 2");
    return GroupSpec(GroupKind::SpecialOrthogonal, d, 0, Field::Real);
  }

  /// Parses the lowercase names z2, z3, ..., u1, u2, su2, so2, so3, o3, ...
  static GroupSpec parse(std::string_view name) {
    auto number = [&](std::string_view digits) {
      int value = 0;
      auto [ptr, ec] =
          std::from_chars(digits.data(), digits.data() + digits.size(), value);
      if (digits.empty() || ec != std::errc() ||
          ptr != digits.data() + digits.size()) {
        throw InvalidArgument("unknown group name '" + std::string(name) + "'");
      }
      return value;
    };
    if (name.starts_with("su")) return special_unitary(number(name.substr(2)));
    if (name.starts_with("so")) return special_orthogonal(number(name.substr(2)));
    if (name.starts_with("z")) return cyclic(number(name.substr(1)));
    if (name.starts_with("u")) return unitary(number(name.substr(1)));
    if (name.starts_with("o")) return orthogonal(number(name.substr(1)));
    throw InvalidArgument("unknown group name '" + std::string(name) + "'");
  }

  GroupKind kind() const noexcept { return kind_; }
  int dim() const noexcept { return dim_; }
  /// Order L for cyclic groups, 0 otherwise.
  int order() const noexcept { return order_; }
  Field field() const noexcept { return field_; }
  bool is_real() const noexcept { return field_ == Field::Real; }

  std::string name() const {
    switch (kind_) {
      case GroupKind::Cyclic: return "z" + std::to_string(order_);
      case GroupKind::Unitary: return "u" + std::to_string(dim_);
      case GroupKind::SpecialUnitary: return "su" + std::to_string(dim_);
      case GroupKind::Orthogonal: return "o" + std::to_string(dim_);
      case GroupKind::SpecialOrthogonal: return "so" + std::to_string(dim_);
    }
    return "?";
  }

  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;

 private:
  GroupSpec(GroupKind kind, int dim, int order, Field field)
      : kind_(kind), dim_(dim), order_(order), field_(field) {}

  GroupKind kind_;
  int dim_;
  int order_;
  Field field_;
};

/// Calls f(std::type_identity<Scalar>{}) with the scalar type matching the
/// group's field.
template <typename F>
decltype(auto) with_scalar(const GroupSpec& spec, F&& f) {
  if (spec.is_real()) return std::forward<F>(f)(std::type_identity<double>{});
  return std::forward<F>(f)(std::type_identity<cplx>{});
}

/// pi(g) for some g in a group; always a d x d unitary matrix.
template <typename Scalar>
struct GroupElement {
  Mat<Scalar> rep;

  int dim() const noexcept { return static_cast<int>(rep.rows()); }
};

inline constexpr double kUnitarityTolerance = 1e-8;

template <typename Scalar>
void check_field(const GroupSpec& spec) {
  if (spec.is_real() == is_complex_v<Scalar>) {
    throw InvalidArgument("scalar type does not match the field of group " +
                          spec.name());
  }
}

template <typename Scalar>
GroupElement<Scalar> identity(const GroupSpec& spec) {
  check_field<Scalar>(spec);
  return {Mat<Scalar>::Identity(spec.dim(), spec.dim())};
}

template <typename Scalar>
GroupElement<Scalar> multiply(const GroupElement<Scalar>& a,
                              const GroupElement<Scalar>& b) {
  if (a.rep.rows() != b.rep.rows() || a.rep.cols() != b.rep.cols() ||
      a.rep.rows() != a.rep.cols()) {
    throw InvalidArgument("multiply: dimension mismatch");
  }
  return {a.rep * b.rep};
}

template <typename Scalar>
GroupElement<Scalar> inverse(const GroupElement<Scalar>& a) {
  return {a.rep.adjoint()};
}

/// ||M M* - I||_F.
template <typename Derived>
double unitarity_defect(const Eigen::MatrixBase<Derived>& m) {
  using Plain = typename Derived::PlainObject;
  return (m * m.adjoint() - Plain::Identity(m.rows(), m.rows())).norm();
}

/// The L-th root of unity exp(2 pi i k / L).
inline cplx root_of_unity(int k, int order) {
  const double angle = 2.0 * std::numbers::pi * k / order;
  return std::polar(1.0, angle);
}

/// True when rep is a valid element of spec within the given tolerance.
template <typename Scalar>
bool is_member(const GroupSpec& spec, const GroupElement<Scalar>& g,
               double tol = kUnitarityTolerance) {
  if (spec.is_real() == is_complex_v<Scalar>) return false;
  if (g.rep.rows() != spec.dim() || g.rep.cols() != spec.dim()) return false;
  if (!g.rep.allFinite()) return false;
  if (unitarity_defect(g.rep) > tol) return false;
  switch (spec.kind()) {
    case GroupKind::SpecialOrthogonal:
    case GroupKind::SpecialUnitary:
      return std::abs(g.rep.determinant() - Scalar(1)) <= tol;
    case GroupKind::Cyclic: {
      const cplx z = cplx(g.rep(0, 0));
      const double turns = std::arg(z) * spec.order() / (2.0 * std::numbers::pi);
      const int k = static_cast<int>(std::lround(turns));
      return std::abs(z - root_of_unity(k, spec.order())) <= tol;
    }
    default:
      return true;
  }
}

namespace detail {

template <typename Scalar>
Mat<Scalar> ginibre(int d, KeyedStream& rng) {
  Mat<Scalar> a(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) a(i, j) = standard_gaussian<Scalar>(rng);
  }
  return a;
}

// Q from QR of a Ginibre matrix with R's diagonal made positive (real) or
// unimodular-normalized (complex); exactly Haar on O(d) / U(d).
template <typename Scalar>
Mat<Scalar> haar_qr(int d, KeyedStream& rng) {
  Eigen::HouseholderQR<Mat<Scalar>> qr(ginibre<Scalar>(d, rng));
  Mat<Scalar> q = qr.householderQ();
  const auto& r = qr.matrixQR();
  for (int j = 0; j < d; ++j) {
    const Scalar rjj = r(j, j);
    const double mag = std::abs(rjj);
    const Scalar phase = mag > 0 ? rjj / mag : Scalar(1);
    q.col(j) *= phase;
  }
  return q;
}

}  // namespace detail

/// Draws pi(g) with g from the normalized Haar measure.
template <typename Scalar>
GroupElement<Scalar> sample_haar(const GroupSpec& spec, KeyedStream& rng) {
  check_field<Scalar>(spec);
  const int d = spec.dim();
  switch (spec.kind()) {
    case GroupKind::Cyclic: {
      const int order = spec.order();
      int k = static_cast<int>(rng.uniform() * order);
      k = std::min(k, order - 1);
      Mat<Scalar> rep(1, 1);
      if constexpr (is_complex_v<Scalar>) {
        rep(0, 0) = root_of_unity(k, order);
      } else {
        rep(0, 0) = k == 0 ? 1.0 : -1.0;
      }
      return {rep};
    }
    case GroupKind::Unitary:
    case GroupKind::Orthogonal:
      return {detail::haar_qr<Scalar>(d, rng)};
    case GroupKind::SpecialOrthogonal: {
      Mat<Scalar> q = detail::haar_qr<Scalar>(d, rng);
      if (std::real(Scalar(q.determinant())) < 0) q.col(d - 1) *= Scalar(-1);
      return {q};
    }
    case GroupKind::SpecialUnitary: {
      Mat<Scalar> q = detail::haar_qr<Scalar>(d, rng);
      if constexpr (is_complex_v<Scalar>) {
        const double theta = std::arg(cplx(q.determinant()));
        int k = static_cast<int>(rng.uniform() * d);
        k = std::min(k, d - 1);
        const cplx root =
            std::polar(1.0, (theta + 2.0 * std::numbers::pi * k) / d);
        q /= root;
      }
      return {q};
    }
  }
  throw InvalidArgument("sample_haar: unknown group kind");
}

/// Result of rounding a matrix to the group. `degenerate` is set when the
/// minimizer is not unique in a way the deterministic tie rule had to settle
/// (zero input for cyclic groups, an ambiguous determinant correction).
template <typename Scalar>
struct Projection {
  GroupElement<Scalar> element;
  bool degenerate = false;
};

/// Element of the group nearest to m in Frobenius norm.
template <typename Scalar, typename Derived>
Projection<Scalar> project_to_group(const GroupSpec& spec,
                                    const Eigen::MatrixBase<Derived>& m_in) {
  check_field<Scalar>(spec);
  const int d = spec.dim();
  if (m_in.rows() != d || m_in.cols() != d) {
    throw InvalidArgument("project_to_group: expected a " + std::to_string(d) +
                          "x" + std::to_string(d) + " matrix");
  }
  const Mat<Scalar> m = m_in;
  if (!m.allFinite()) throw InvalidArgument("project_to_group: non-finite input");

  switch (spec.kind()) {
    case GroupKind::Cyclic: {
      const cplx z = cplx(m(0, 0));
      Mat<Scalar> rep(1, 1);
      if constexpr (!is_complex_v<Scalar>) {
        // Z_2: sign of the real part, tie -> +1.
        rep(0, 0) = z.real() < 0 ? -1.0 : 1.0;
        return {{rep}, z.real() == 0.0};
      } else {
        const int order = spec.order();
        if (std::abs(z) == 0.0) return {identity<Scalar>(spec), true};
        double angle = std::arg(z);
        if (angle < 0) angle += 2.0 * std::numbers::pi;
        const double turns = angle * order / (2.0 * std::numbers::pi);
        const int lo = static_cast<int>(std::floor(turns)) % order;
        const int hi = (lo + 1) % order;
        const double dlo = std::abs(z - std::abs(z) * root_of_unity(lo, order));
        const double dhi = std::abs(z - std::abs(z) * root_of_unity(hi, order));
        int k = dlo < dhi ? lo : (dhi < dlo ? hi : std::min(lo, hi));
        rep(0, 0) = root_of_unity(k, order);
        return {{rep}, false};
      }
    }
    case GroupKind::SpecialUnitary:
      if constexpr (is_complex_v<Scalar>) {
        if (d == 2) {
          // SU(2) spans a 4-dim real subspace {[[a, -conj(b)], [b, conj(a)]]}
          // with constant norm on the group: project onto it, then normalize.
          const cplx a = 0.5 * (m(0, 0) + std::conj(m(1, 1)));
          const cplx b = 0.5 * (m(1, 0) - std::conj(m(0, 1)));
          const double r = std::sqrt(std::norm(a) + std::norm(b));
          if (r == 0.0) return {identity<Scalar>(spec), true};
          Mat<Scalar> rep(2, 2);
          rep << a / r, -std::conj(b) / r, b / r, std::conj(a) / r;
          return {{rep}, false};
        }
      }
      throw Unsupported("nearest-element projection is implemented for SU(2) only");
    default:
      break;
  }

  Eigen::JacobiSVD<Mat<Scalar>> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat<Scalar> u = svd.matrixU();
  const Mat<Scalar>& v = svd.matrixV();
  const Eigen::VectorXd& s = svd.singularValues();
  const double scale = std::max(1.0, s(0));
  bool degenerate = s(d - 1) <= 1e-12 * scale;

  if (spec.kind() == GroupKind::SpecialOrthogonal) {
    const double det = std::real(Scalar((u * v.adjoint()).determinant()));
    if (det < 0) {
      // Flip the direction of the smallest singular value.
      u.col(d - 1) *= Scalar(-1);
      if (d >= 2 && s(d - 2) - s(d - 1) <= 1e-12 * scale) degenerate = true;
    }
  }
  return {{u * v.adjoint()}, degenerate};
}

/// ||pi(g) - m||_F.
template <typename Scalar, typename Derived>
double distance(const GroupElement<Scalar>& g, const Eigen::MatrixBase<Derived>& m) {
  return (g.rep - m).norm();
}

}  // namespace gsync
