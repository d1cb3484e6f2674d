#include <gtest/gtest.h>

#include "protkin/geometry.hpp"
#include "protkin/topology.hpp"
#include "test_util.hpp"

using namespace protkin;
using protkin::testing::max_entry_diff;
using protkin::testing::random_params;
using protkin::testing::uniform;

namespace {

// Plain 4x4 product written independently of the library's 3x4 storage.
using Full = std::array<std::array<double, 4>, 4>;

Full full(const Transform<double>& m) {
  Full f{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) f[r][c] = m(r, c);
  return f;
}

Full product(const Full& a, const Full& b) {
  Full out{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      for (int k = 0; k < 4; ++k) out[r][c] += a[r][k] * b[k][c];
  return out;
}

struct FullView {
  const Full& f;
  double operator()(int r, int c) const { return f[r][c]; }
};

Transform<double> random_transform(std::mt19937_64& rng) {
  return bond_transform(random_params(rng), uniform(rng, -kPi, kPi)) *
         bond_transform(random_params(rng), uniform(rng, -kPi, kPi));
}

}  // namespace

TEST(BondTransform, ZeroParametersGiveIdentity) {
  const auto m = bond_transform_unchecked(0.0, 0.0, 0.0);
  EXPECT_EQ(m, Transform<double>::identity());
}

TEST(BondTransform, CheckedFormRejectsNonPositiveLength) {
  EXPECT_THROW(bond_transform({0.0, 0.0}, 0.0), DomainError);
  EXPECT_THROW(bond_transform({1.0, -1.0}, 0.0), DomainError);
  EXPECT_THROW(bond_transform_derivative({1.0, 0.0}, 0.0), DomainError);
  EXPECT_THROW(bond_transform({0.0, 1.0}, 0.0), DomainError);
  EXPECT_THROW(bond_transform({2 * kPi, 1.0}, 0.0), DomainError);
  EXPECT_NO_THROW(bond_transform({1.0, 1.0}, 0.0));
}

TEST(BondTransform, NCaTranslationColumn) {
  for (double alpha : {-2.0, 0.0, 0.7, 3.0}) {
    const auto m = bond_transform(kNCaBond, alpha);
    EXPECT_NEAR(m(0, 3), 1.460 * std::cos(kPi - 1.9391), 1e-15);
    EXPECT_DOUBLE_EQ(m(1, 3), 0.0);
    EXPECT_NEAR(m(2, 3), -1.460 * std::sin(kPi - 1.9391), 1e-15);
    EXPECT_DOUBLE_EQ(m(3, 3), 1.0);
    // Frozen from an independent numpy evaluation of Ry Tx Rx.
    EXPECT_NEAR(m(0, 3), 0.52564874, 1e-8);
    EXPECT_NEAR(m(2, 3), -1.36209156, 1e-8);
  }
}

TEST(BondTransform, EqualsFactoredTripleProduct) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const TransformParams p = random_params(rng);
    const double alpha = uniform(rng, -2 * kPi, 2 * kPi);
    const Full triple = product(product(full(rotation_y(p.theta)), full(translation_x(p.d))), full(rotation_x(alpha)));
    ASSERT_LE(max_entry_diff(bond_transform(p, alpha), FullView{triple}), 1e-12) << "sample " << i;
  }
}

TEST(BondTransform, RigidInvariants) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 200; ++i) {
    const auto m = bond_transform(random_params(rng), uniform(rng, -kPi, kPi));
    EXPECT_LE(orthonormality_error(m), 1e-12);
    EXPECT_NEAR(rotation_determinant(m), 1.0, 1e-12);
    for (int c = 0; c < 3; ++c) EXPECT_EQ(m(3, c), 0.0);
    EXPECT_EQ(m(3, 3), 1.0);
  }
}

TEST(BondTransformDerivative, GeneratorAtZero) {
  const auto g = bond_transform_derivative_unchecked(0.0, 0.0);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      double expected = 0.0;
      if (r == 1 && c == 2) expected = -1.0;
      if (r == 2 && c == 1) expected = 1.0;
      EXPECT_EQ(g(r, c), expected) << r << "," << c;
    }
  }
}

TEST(BondTransformDerivative, MatchesCentralDifferences) {
  std::mt19937_64 rng(13);
  const double h = 1e-6;
  for (int i = 0; i < 1000; ++i) {
    const TransformParams p = random_params(rng);
    const double alpha = uniform(rng, -kPi, kPi);
    const auto d = bond_transform_derivative(p, alpha);
    const auto plus = bond_transform(p, alpha + h);
    const auto minus = bond_transform(p, alpha - h);
    double scale = 0.0, worst = 0.0;
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        const double fd = (plus(r, c) - minus(r, c)) / (2 * h);
        worst = std::max(worst, std::abs(fd - d(r, c)));
        scale = std::max(scale, std::abs(d(r, c)));
      }
    }
    ASSERT_LE(worst, 1e-7) << "sample " << i;
    ASSERT_LE(worst / scale, 1e-6) << "sample " << i;
  }
}

TEST(BondTransformDerivative, LastRowZero) {
  std::mt19937_64 rng(14);
  for (int i = 0; i < 20; ++i) {
    const auto d = bond_transform_derivative(random_params(rng), uniform(rng, -kPi, kPi));
    for (int c = 0; c < 4; ++c) EXPECT_EQ(d(3, c), 0.0);
  }
}

TEST(Compose, IdentityIsNeutral) {
  std::mt19937_64 rng(15);
  const auto x = random_transform(rng);
  EXPECT_EQ(compose(Transform<double>::identity(), x), x);
  EXPECT_EQ(compose(x, Transform<double>::identity()), x);
}

TEST(Compose, MatchesFullProductAndIsAssociative) {
  std::mt19937_64 rng(16);
  for (int i = 0; i < 200; ++i) {
    const auto a = random_transform(rng), b = random_transform(rng), c = random_transform(rng);
    const Full ab = product(full(a), full(b));
    EXPECT_LE(max_entry_diff(a * b, FullView{ab}), 1e-12);
    EXPECT_LE(max_entry_diff((a * b) * c, a * (b * c)), 1e-10);
  }
}

TEST(Compose, LongChainsStayRigid) {
  std::mt19937_64 rng(17);
  Transform<double> m;
  for (int i = 0; i < 10000; ++i) m = m * bond_transform(random_params(rng), uniform(rng, -kPi, kPi));
  EXPECT_LE(orthonormality_error(m), 1e-9);
  EXPECT_NEAR(rotation_determinant(m), 1.0, 1e-9);
}

TEST(ApplyPoint, IdentityOriginAndDistances) {
  std::mt19937_64 rng(18);
  const Vec3d p = protkin::testing::random_point(rng);
  EXPECT_EQ(apply_point(Transform<double>::identity(), p), p);
  for (int i = 0; i < 100; ++i) {
    const auto m = random_transform(rng);
    EXPECT_EQ(apply_point(m, Vec3d{}), m.translation());
    const Vec3d a = protkin::testing::random_point(rng), b = protkin::testing::random_point(rng);
    EXPECT_NEAR(distance(apply_point(m, a), apply_point(m, b)), distance(a, b), 1e-10);
  }
}

TEST(InvertRigid, TwoSidedInverse) {
  std::mt19937_64 rng(19);
  EXPECT_EQ(invert_rigid(Transform<double>::identity()), Transform<double>::identity());
  for (int i = 0; i < 200; ++i) {
    const auto single = bond_transform(random_params(rng), uniform(rng, -kPi, kPi));
    EXPECT_LE(max_entry_diff(single * invert_rigid(single), Transform<double>::identity()), 1e-12);
    const auto a = random_transform(rng), b = random_transform(rng);
    EXPECT_LE(max_entry_diff(a * invert_rigid(a), Transform<double>::identity()), 1e-10);
    EXPECT_LE(max_entry_diff(invert_rigid(a) * a, Transform<double>::identity()), 1e-10);
    EXPECT_LE(max_entry_diff(invert_rigid(a * b), invert_rigid(b) * invert_rigid(a)), 1e-10);
  }
}

TEST(InvertRigid, RejectsNonRigid) {
  Transform<double> m;
  m.at(0, 0) = 2.0;
  EXPECT_THROW(invert_rigid(m), DomainError);
  m.at(0, 0) = 1.0 + 1e-7;
  EXPECT_NO_THROW(invert_rigid(m));
}

TEST(Transform, SinglePrecisionCast) {
  std::mt19937_64 rng(20);
  const auto m = random_transform(rng);
  const auto f = m.cast<float>();
  EXPECT_LE(max_entry_diff(f.cast<double>(), m), 1e-6);
  EXPECT_LE(orthonormality_error(f), 1e-6f);
}
