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

#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "gsync/group.hpp"
#include "gsync/random.hpp"

namespace gsync {
namespace {

using Eigen::MatrixXd;

Mat<double> rotation_z(double theta) {
  Mat<double> r = Mat<double>::Identity(3, 3);
  r(0, 0) = std::cos(theta);
  r(0, 1) = -std::sin(theta);
  r(1, 0) = std::sin(theta);
  r(1, 1) = std::cos(theta);
  return r;
}

TEST(GroupSpec, DimensionsAndFields) {
  EXPECT_EQ(GroupSpec::cyclic(2).dim(), 1);
  EXPECT_TRUE(GroupSpec::cyclic(2).is_real());
  EXPECT_FALSE(GroupSpec::cyclic(3).is_real());
  EXPECT_EQ(GroupSpec::cyclic(5).order(), 5);
  EXPECT_FALSE(GroupSpec::unitary(2).is_real());
  EXPECT_FALSE(GroupSpec::special_unitary(2).is_real());
  EXPECT_TRUE(GroupSpec::special_orthogonal(3).is_real());
  EXPECT_TRUE(GroupSpec::orthogonal(3).is_real());
  EXPECT_EQ(GroupSpec::orthogonal(3).dim(), 3);
}

TEST(GroupSpec, ParsesCliNames) {
  for (const char* name : {"z2", "z3", "z7", "u1", "u2", "su2", "so2", "so3", "o3"}) {
    EXPECT_EQ(GroupSpec::parse(name).name(), name);
  }
  EXPECT_EQ(GroupSpec::parse("so3"), GroupSpec::special_orthogonal(3));
  EXPECT_EQ(GroupSpec::parse("z4").kind(), GroupKind::Cyclic);
  for (const char* bad : {"", "so", "x3", "z", "z1", "su1", "u0", "so3x", "SO3"}) {
    EXPECT_THROW(GroupSpec::parse(bad), InvalidArgument) << bad;
  }
}

TEST(GroupAlgebra, IdentityAndInverseLaws) {
  const GroupSpec so3 = GroupSpec::special_orthogonal(3);
  KeyedStream rng(11);
  for (int k = 0; k < 20; ++k) {
    const auto g = sample_haar<double>(so3, rng);
    EXPECT_LT((multiply(g, identity<double>(so3)).rep - g.rep).norm(), 1e-14);
    EXPECT_LT((multiply(g, inverse(g)).rep - Mat<double>::Identity(3, 3)).norm(), 1e-12);
  }
}

TEST(GroupAlgebra, Z4RootArithmetic) {
  const GroupElement<cplx> i{Mat<cplx>::Constant(1, 1, root_of_unity(1, 4))};
  const auto prod = multiply(i, i);
  EXPECT_NEAR(std::abs(prod.rep(0, 0) - cplx(-1.0, 0.0)), 0.0, 1e-15);
  EXPECT_TRUE(is_member(GroupSpec::cyclic(4), prod));
}

TEST(GroupAlgebra, Z2MinusOneIsSelfInverse) {
  const GroupElement<double> m{Mat<double>::Constant(1, 1, -1.0)};
  EXPECT_EQ(inverse(m).rep(0, 0), -1.0);
  const GroupElement<double> e = identity<double>(GroupSpec::cyclic(2));
  EXPECT_EQ(inverse(e).rep(0, 0), 1.0);
}

TEST(GroupAlgebra, RotationInverseIsReverseRotation) {
  const GroupElement<double> r{rotation_z(0.7)};
  const auto inv = inverse(r);
  EXPECT_LT((inv.rep - rotation_z(-0.7)).norm(), 1e-15);
  EXPECT_LT((r.rep * inv.rep - Mat<double>::Identity(3, 3)).norm(), 1e-15);
}

TEST(GroupAlgebra, MultiplyRejectsDimensionMismatch) {
  const GroupElement<double> a{Mat<double>::Identity(2, 2)};
  const GroupElement<double> b{Mat<double>::Identity(3, 3)};
  EXPECT_THROW(multiply(a, b), InvalidArgument);
}

TEST(GroupAlgebra, ClosureUnderRandomDraws) {
  KeyedStream rng(3);
  for (const char* name : {"z2", "z5", "u1", "u2", "su2", "so2", "so3", "o3"}) {
    const GroupSpec spec = GroupSpec::parse(name);
    with_scalar(spec, [&]<typename S>(std::type_identity<S>) {
      for (int k = 0; k < 50; ++k) {
        const auto a = sample_haar<S>(spec, rng);
        const auto b = sample_haar<S>(spec, rng);
        EXPECT_TRUE(is_member(spec, a)) << name;
        EXPECT_TRUE(is_member(spec, multiply(a, b))) << name;
        EXPECT_TRUE(is_member(spec, inverse(a))) << name;
      }
    });
  }
}

TEST(Haar, Z2FrequenciesAreBalanced) {
  constexpr int kN = 20000;
  KeyedStream rng(5, StreamTag::Sampling);
  int plus = 0;
  for (int k = 0; k < kN; ++k) {
    const double v = sample_haar<double>(GroupSpec::cyclic(2), rng).rep(0, 0);
    ASSERT_TRUE(v == 1.0 || v == -1.0);
    plus += v > 0 ? 1 : 0;
  }
  EXPECT_NEAR(static_cast<double>(plus) / kN, 0.5, 3.0 / std::sqrt(kN));
}

TEST(Haar, CyclicDrawsCoverAllRoots) {
  KeyedStream rng(8);
  std::vector<int> counts(5, 0);
  for (int k = 0; k < 5000; ++k) {
    const cplx z = sample_haar<cplx>(GroupSpec::cyclic(5), rng).rep(0, 0);
    int idx = -1;
    for (int r = 0; r < 5; ++r) {
      if (std::abs(z - root_of_unity(r, 5)) < 1e-12) idx = r;
    }
    ASSERT_GE(idx, 0);
    ++counts[idx];
  }
  for (int c : counts) EXPECT_NEAR(c / 5000.0, 0.2, 4.0 * std::sqrt(0.16 / 5000.0));
}

TEST(Haar, DeterminantsMatchKind) {
  KeyedStream rng(9);
  int negative = 0;
  for (int k = 0; k < 400; ++k) {
    const auto so = sample_haar<double>(GroupSpec::special_orthogonal(3), rng);
    EXPECT_NEAR(so.rep.determinant(), 1.0, 1e-10);
    const auto su = sample_haar<cplx>(GroupSpec::special_unitary(3), rng);
    EXPECT_NEAR(std::abs(su.rep.determinant() - cplx(1.0)), 0.0, 1e-10);
    negative += sample_haar<double>(GroupSpec::orthogonal(3), rng).rep.determinant() < 0 ? 1 : 0;
  }
  // O(3) draws both components.
  EXPECT_GT(negative, 150);
  EXPECT_LT(negative, 250);
}

TEST(Haar, So3EntryMeansVanish) {
  constexpr int kN = 100000;
  KeyedStream rng(21, StreamTag::Sampling);
  Mat<double> sum = Mat<double>::Zero(3, 3);
  for (int k = 0; k < kN; ++k) sum += sample_haar<double>(GroupSpec::special_orthogonal(3), rng).rep;
  const Mat<double> mean = sum / kN;
  for (int a = 0; a < 9; ++a) EXPECT_LT(std::abs(mean(a)), 4.0 / std::sqrt(kN));
}

TEST(Haar, U2CornerSecondMomentIsHalf) {
  constexpr int kN = 100000;
  KeyedStream rng(22, StreamTag::Sampling);
  double acc = 0.0;
  for (int k = 0; k < kN; ++k) acc += std::norm(sample_haar<cplx>(GroupSpec::unitary(2), rng).rep(0, 0));
  EXPECT_NEAR(acc / kN, 0.5, 0.02);
}

// Moments of g and h g agree when h is fixed.
TEST(Haar, LeftInvariance) {
  constexpr int kN = 100000;
  for (const char* name : {"so3", "u2"}) {
    const GroupSpec spec = GroupSpec::parse(name);
    with_scalar(spec, [&]<typename S>(std::type_identity<S>) {
      KeyedStream fixed(1234);
      const auto h = sample_haar<S>(spec, fixed);
      KeyedStream rng(99, StreamTag::Sampling);
      const int d = spec.dim();
      Mat<S> m1 = Mat<S>::Zero(d, d), m1h = Mat<S>::Zero(d, d);
      MatrixXd m2 = MatrixXd::Zero(d, d), m2h = MatrixXd::Zero(d, d);
      for (int k = 0; k < kN; ++k) {
        const auto g = sample_haar<S>(spec, rng);
        const Mat<S> hg = h.rep * g.rep;
        m1 += g.rep;
        m1h += hg;
        m2 += g.rep.cwiseAbs2();
        m2h += hg.cwiseAbs2();
      }
      const double tol = 5.0 / std::sqrt(kN);
      EXPECT_LT(((m1 - m1h) / kN).cwiseAbs().maxCoeff(), tol) << name;
      EXPECT_LT(((m2 - m2h) / kN).cwiseAbs().maxCoeff(), tol) << name;
    });
  }
}

// E[pi_ij conj(pi_lk)] = delta_il delta_jk / d.
TEST(Haar, SchurOrthogonalityOfEntries) {
  constexpr int kN = 100000;
  for (const char* name : {"so3", "u2", "su2", "o3", "z3"}) {
    const GroupSpec spec = GroupSpec::parse(name);
    with_scalar(spec, [&]<typename S>(std::type_identity<S>) {
      const int d = spec.dim();
      KeyedStream rng(77, StreamTag::Sampling);
      Mat<cplx> gram = Mat<cplx>::Zero(d * d, d * d);
      Vec<cplx> mean = Vec<cplx>::Zero(d * d);
      Vec<cplx> v(d * d);
      for (int k = 0; k < kN; ++k) {
        const auto g = sample_haar<S>(spec, rng);
        for (int a = 0; a < d * d; ++a) v(a) = cplx(g.rep(a / d, a % d));
        gram += v * v.adjoint();
        mean += v;
      }
      gram /= kN;
      mean /= kN;
      const double tol = 5.0 / std::sqrt(kN);
      EXPECT_LT(mean.cwiseAbs().maxCoeff(), tol) << name;
      const Mat<cplx> expected = Mat<cplx>::Identity(d * d, d * d) / static_cast<double>(d);
      EXPECT_LT((gram - expected).cwiseAbs().maxCoeff(), tol) << name;
    });
  }
}

TEST(Haar, SamplingIsDeterministicPerKey) {
  KeyedStream a(42, StreamTag::Truth, 3), b(42, StreamTag::Truth, 3), c(42, StreamTag::Truth, 4);
  const auto ga = sample_haar<cplx>(GroupSpec::unitary(3), a);
  const auto gb = sample_haar<cplx>(GroupSpec::unitary(3), b);
  const auto gc = sample_haar<cplx>(GroupSpec::unitary(3), c);
  EXPECT_EQ(ga.rep, gb.rep);
  EXPECT_NE(ga.rep, gc.rep);
}

TEST(Projection, Z2SignRule) {
  const GroupSpec z2 = GroupSpec::cyclic(2);
  EXPECT_EQ(project_to_group<double>(z2, Mat<double>::Constant(1, 1, 0.3)).element.rep(0, 0), 1.0);
  EXPECT_EQ(project_to_group<double>(z2, Mat<double>::Constant(1, 1, -2.0)).element.rep(0, 0), -1.0);
  const auto zero = project_to_group<double>(z2, Mat<double>::Zero(1, 1));
  EXPECT_EQ(zero.element.rep(0, 0), 1.0);
  EXPECT_TRUE(zero.degenerate);
}

TEST(Projection, CyclicZeroAndTies) {
  const GroupSpec z4 = GroupSpec::cyclic(4);
  const auto zero = project_to_group<cplx>(z4, Mat<cplx>::Zero(1, 1));
  EXPECT_TRUE(zero.degenerate);
  EXPECT_EQ(zero.element.rep(0, 0), cplx(1.0));
  // exp(i pi/4) is equidistant from 1 and i; the smaller angle wins.
  const auto tie = project_to_group<cplx>(z4, Mat<cplx>::Constant(1, 1, std::polar(1.0, std::numbers::pi / 4)));
  EXPECT_LT(std::abs(tie.element.rep(0, 0) - cplx(1.0)), 1e-12);
}

TEST(Projection, CyclicMatchesExhaustiveSearch) {
  KeyedStream rng(31);
  for (int order : {3, 4, 5, 8}) {
    const GroupSpec spec = GroupSpec::cyclic(order);
    for (int k = 0; k < 500; ++k) {
      const cplx m(3.0 * rng.normal(), 3.0 * rng.normal());
      const auto proj = project_to_group<cplx>(spec, Mat<cplx>::Constant(1, 1, m));
      double best = 1e300;
      for (int r = 0; r < order; ++r) best = std::min(best, std::abs(root_of_unity(r, order) - m));
      EXPECT_DOUBLE_EQ(std::abs(proj.element.rep(0, 0) - m), best);
      EXPECT_TRUE(is_member(spec, proj.element));
    }
  }
}

TEST(Projection, OrthogonalIsIdempotentOnGroup) {
  KeyedStream rng(4);
  const GroupSpec o3 = GroupSpec::orthogonal(3);
  for (int k = 0; k < 50; ++k) {
    const auto g = sample_haar<double>(o3, rng);
    EXPECT_LT((project_to_group<double>(o3, g.rep).element.rep - g.rep).norm(), 1e-8);
  }
}

TEST(Projection, IdempotentForAllKinds) {
  KeyedStream rng(6);
  for (const char* name : {"z2", "z3", "u1", "u2", "su2", "so2", "so3", "o3"}) {
    const GroupSpec spec = GroupSpec::parse(name);
    with_scalar(spec, [&]<typename S>(std::type_identity<S>) {
      for (int k = 0; k < 50; ++k) {
        const auto g = sample_haar<S>(spec, rng);
        EXPECT_LT((project_to_group<S>(spec, g.rep).element.rep - g.rep).norm(), 1e-8) << name;
      }
    });
  }
}

// Projection beats every one of 1000 random group elements.
TEST(Projection, OptimalAgainstRandomElements) {
  KeyedStream rng(12);
  for (const char* name : {"u2", "su2", "so2", "so3", "o3", "u1"}) {
    const GroupSpec spec = GroupSpec::parse(name);
    with_scalar(spec, [&]<typename S>(std::type_identity<S>) {
      const int d = spec.dim();
      for (int trial = 0; trial < 5; ++trial) {
        Mat<S> m(d, d);
        for (int a = 0; a < d * d; ++a) m(a) = standard_gaussian<S>(rng);
        const auto proj = project_to_group<S>(spec, m);
        ASSERT_TRUE(is_member(spec, proj.element)) << name;
        const double dp = distance(proj.element, m);
        for (int k = 0; k < 1000; ++k) {
          EXPECT_LE(dp, distance(sample_haar<S>(spec, rng), m) + 1e-12) << name;
        }
      }
    });
  }
}

TEST(Projection, So3ReflectionMatchesGridSearch) {
  const GroupSpec so3 = GroupSpec::special_orthogonal(3);
  Mat<double> m = Mat<double>::Identity(3, 3);
  m(2, 2) = -1.0;
  const auto proj = project_to_group<double>(so3, m);
  ASSERT_TRUE(is_member(so3, proj.element));
  EXPECT_TRUE(proj.degenerate);
  const double dp = distance(proj.element, m);
  EXPECT_NEAR(dp, 2.0, 1e-12);

  KeyedStream rng(2024, StreamTag::Sampling);
  double grid = 1e300;
  for (int k = 0; k < 1000000; ++k) grid = std::min(grid, distance(sample_haar<double>(so3, rng), m));
  EXPECT_LE(dp, grid + 1e-12);
  EXPECT_LE(grid - dp, 1e-2);
}

TEST(Projection, SpecialUnitaryAboveTwoIsUnsupported) {
  const GroupSpec su3 = GroupSpec::special_unitary(3);
  EXPECT_THROW(project_to_group<cplx>(su3, Mat<cplx>::Identity(3, 3)), Unsupported);
}

TEST(Projection, RejectsWrongShapeAndNonFinite) {
  const GroupSpec so3 = GroupSpec::special_orthogonal(3);
  EXPECT_THROW(project_to_group<double>(so3, Mat<double>::Identity(2, 2)), InvalidArgument);
  Mat<double> bad = Mat<double>::Identity(3, 3);
  bad(0, 0) = std::nan("");
  EXPECT_THROW(project_to_group<double>(so3, bad), InvalidArgument);
}

TEST(Projection, FieldMismatchIsRejected) {
  EXPECT_THROW(identity<double>(GroupSpec::unitary(2)), InvalidArgument);
  EXPECT_THROW(identity<cplx>(GroupSpec::special_orthogonal(3)), InvalidArgument);
}

}  // namespace
}  // namespace gsync
