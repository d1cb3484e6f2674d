#include <gtest/gtest.h>

#include "protkin/bench.hpp"
#include "protkin/lrmsd.hpp"
#include "protkin/oracle.hpp"
#include "eigen_oracle.hpp"
#include "test_util.hpp"

using namespace protkin;
using protkin::testing::det3;
using protkin::testing::largest_root_by_bisection;
using protkin::testing::random_point;
using protkin::testing::uniform;

namespace {

std::vector<Vec3d> random_points(Rng& rng, std::size_t n, double scale = 10.0) {
  std::vector<Vec3d> out(n);
  for (auto& p : out) p = random_point(rng, scale);
  return out;
}

double orthonormality(const Mat3& m) {
  double worst = 0.0;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += m[k][a] * m[k][b];
      worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
    }
  }
  return worst;
}

Mat4 random_symmetric(Rng& rng) {
  Mat4 t{};
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) t[a][b] = t[b][a] = uniform(rng, -5.0, 5.0);
  return t;
}

}  // namespace

TEST(Center, Examples) {
  const std::vector<Vec3d> one{{1, 2, 3}};
  const Centered c1 = center(one);
  EXPECT_EQ(c1.points[0], Vec3d{});
  EXPECT_EQ(c1.centroid, (Vec3d{1, 2, 3}));
  const std::vector<Vec3d> two{{0, 0, 0}, {2, 0, 0}};
  const Centered c2 = center(two);
  EXPECT_EQ(c2.points[0], (Vec3d{-1, 0, 0}));
  EXPECT_EQ(c2.points[1], (Vec3d{1, 0, 0}));
  Rng rng(31);
  const Centered c3 = center(random_points(rng, 17));
  Vec3d mean;
  for (const auto& p : c3.points) mean += p;
  EXPECT_LT(norm(mean / 17.0), 1e-12);
  const Centered again = center(c3.points);
  for (std::size_t i = 0; i < 17; ++i) EXPECT_LT(distance(again.points[i], c3.points[i]), 1e-12);
  EXPECT_THROW(center(std::vector<Vec3d>{}), InputError);
}

TEST(Correlation, Examples) {
  const std::vector<Vec3d> e1{{1, 0, 0}};
  const Mat3 r = correlation(e1, e1);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) EXPECT_EQ(r[a][b], (a == 0 && b == 0) ? 1.0 : 0.0);
  Rng rng(32);
  const auto x = random_points(rng, 5), y = random_points(rng, 5);
  const Mat3 zero = correlation(x, std::vector<Vec3d>(5));
  for (const auto& row : zero)
    for (double e : row) EXPECT_EQ(e, 0.0);
  const Mat3 rxy = correlation(x, y);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      double s = 0.0;
      for (int i = 0; i < 5; ++i) s += x[i][a] * y[i][b];
      EXPECT_NEAR(rxy[a][b], s, 1e-12);
    }
  }
  EXPECT_THROW(correlation(x, std::span(y).first(4)), InputError);
}

TEST(BuildT, Examples) {
  const Mat4 zero = build_t(Mat3{});
  for (const auto& row : zero)
    for (double e : row) EXPECT_EQ(e, 0.0);
  const Mat4 t = build_t(Mat3{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}});
  const double diag[4] = {3, -1, -1, -1};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) EXPECT_EQ(t[a][b], a == b ? diag[a] : 0.0);
  Rng rng(33);
  for (int k = 0; k < 50; ++k) {
    Mat3 r{};
    for (auto& row : r)
      for (double& e : row) e = uniform(rng, -10, 10);
    const Mat4 m = build_t(r);
    double trace = 0.0;
    for (int a = 0; a < 4; ++a) {
      trace += m[a][a];
      for (int b = 0; b < 4; ++b) EXPECT_EQ(m[a][b], m[b][a]);
    }
    EXPECT_LT(std::abs(trace), 1e-14 * 30);
  }
}

TEST(MaxEigenpair, Examples) {
  Mat4 d{};
  d[0][0] = 3;
  d[1][1] = d[2][2] = d[3][3] = -1;
  Eigenpair ep = max_eigenpair(d);
  EXPECT_EQ(ep.value, 3.0);
  EXPECT_EQ(ep.vector, (Quaternion{1, 0, 0, 0}));

  Mat4 id{};
  for (int i = 0; i < 4; ++i) id[i][i] = 1.0;
  ep = max_eigenpair(id);
  EXPECT_EQ(ep.value, 1.0);
  EXPECT_EQ(ep.vector, (Quaternion{1, 0, 0, 0}));

  Mat4 asym = id;
  asym[0][1] = 1e-6;
  EXPECT_THROW(max_eigenpair(asym), DomainError);
}

TEST(MaxEigenpair, MatchesCharacteristicPolynomial) {
  Rng rng(34);
  for (int k = 0; k < 200; ++k) {
    const Mat4 t = random_symmetric(rng);
    const Eigenpair ep = max_eigenpair(t);
    EXPECT_NEAR(ep.value, largest_root_by_bisection(t), 1e-9) << k;
    double n = 0.0, residual = 0.0;
    for (int a = 0; a < 4; ++a) {
      n += ep.vector[a] * ep.vector[a];
      double tq = 0.0;
      for (int b = 0; b < 4; ++b) tq += t[a][b] * ep.vector[b];
      residual = std::max(residual, std::abs(tq - ep.value * ep.vector[a]));
    }
    EXPECT_NEAR(n, 1.0, 1e-12);
    EXPECT_LT(residual, 1e-8 * std::max(1.0, std::abs(ep.value)));
    const auto first = std::find_if(ep.vector.begin(), ep.vector.end(), [](double c) { return std::abs(c) > 1e-12; });
    ASSERT_NE(first, ep.vector.end());
    EXPECT_GT(*first, 0.0);
    const auto all = jacobi_eigenvalues(t);
    EXPECT_EQ(*std::max_element(all.begin(), all.end()), ep.value);
  }
}

TEST(QuaternionToRotation, Examples) {
  const Mat3 id = quaternion_to_rotation({1, 0, 0, 0});
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) EXPECT_EQ(id[a][b], a == b ? 1.0 : 0.0);
  const double theta = 0.7;
  const Mat3 rx = quaternion_to_rotation({std::cos(theta / 2), std::sin(theta / 2), 0, 0});
  const Mat3 expected{{{1, 0, 0}, {0, std::cos(theta), -std::sin(theta)}, {0, std::sin(theta), std::cos(theta)}}};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) EXPECT_NEAR(rx[a][b], expected[a][b], 1e-15);
  Rng rng(35);
  for (int k = 0; k < 100; ++k) {
    Quaternion q{uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -1, 1)};
    const double n = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
    for (double& c : q) c /= n;
    const Mat3 u = quaternion_to_rotation(q);
    EXPECT_LT(orthonormality(u), 1e-12);
    EXPECT_NEAR(det3(u), 1.0, 1e-12);
  }
  EXPECT_THROW(quaternion_to_rotation({1.1, 0, 0, 0}), DomainError);
}

TEST(Lrmsd, ZeroForIdenticalAndRigidCopies) {
  Rng rng(36);
  for (int k = 0; k < 20; ++k) {
    const auto x = random_points(rng, 3 + k);
    EXPECT_LT(lrmsd(x, x), 1e-7);
    const auto y = apply_rigid(random_rotation(rng), random_point(rng, 50.0), x);
    EXPECT_LT(lrmsd(x, y), 1e-6);
  }
}

TEST(Lrmsd, AlignmentInvariants) {
  Rng rng(37);
  for (int k = 0; k < 50; ++k) {
    const auto x = random_points(rng, 10), y = random_points(rng, 10);
    const Alignment al = align(x, y);
    double n = 0.0;
    for (double c : al.quaternion) n += c * c;
    EXPECT_NEAR(std::sqrt(n), 1.0, 1e-10);
    EXPECT_LT(orthonormality(al.rotation), 1e-9);
    EXPECT_NEAR(det3(al.rotation), 1.0, 1e-9);
    EXPECT_GE(al.lrmsd_value, 0.0);
    EXPECT_EQ(al.n_atoms, 10u);
    // The residual form agrees with the eigenvalue form on well-conditioned input.
    const Centered cx = center(x), cy = center(y);
    double sum = 0.0;
    for (std::size_t i = 0; i < 10; ++i) sum += dot(cx.points[i], cx.points[i]) + dot(cy.points[i], cy.points[i]);
    EXPECT_NEAR(al.lrmsd_value, std::sqrt(std::max(0.0, (sum - 2 * al.lambda_max) / 10)), 1e-9);
  }
}

TEST(Lrmsd, SymmetricAndRigidInvariant) {
  Rng rng(38);
  const auto x = random_points(rng, 25), y = random_points(rng, 25);
  const double base = lrmsd(x, y);
  EXPECT_NEAR(lrmsd(y, x), base, 1e-9);
  for (int k = 0; k < 100; ++k) {
    EXPECT_NEAR(lrmsd(x, apply_rigid(random_rotation(rng), random_point(rng, 100.0), y)), base, 1e-8);
  }
}

TEST(Lrmsd, EqualsBruteForceMinimum) {
  Rng rng(39);
  for (int k = 0; k < 20; ++k) {
    const auto x = random_points(rng, 5, 3.0), y = random_points(rng, 5, 3.0);
    const double fast = lrmsd(x, y);
    const double slow = brute_force_lrmsd(x, y);
    EXPECT_NEAR(fast, slow, 1e-3) << k;
    // No rotation does better than the optimum.
    EXPECT_GE(slow, fast - 1e-6);
  }
}

TEST(Lrmsd, InputErrors) {
  const std::vector<Vec3d> a(3), b(4);
  EXPECT_THROW(lrmsd(a, b), InputError);
  EXPECT_THROW(lrmsd(std::vector<Vec3d>{}, std::vector<Vec3d>{}), InputError);
}

TEST(LrmsdGradient, MatchesFiniteDifferences) {
  Rng rng(40);
  for (int k = 0; k < 20; ++k) {
    const auto x = random_points(rng, 4 + k);
    auto y = x;
    for (auto& p : y) p += random_point(rng, 1.0);
    y = apply_rigid(random_rotation(rng), random_point(rng, 5.0), y);
    const auto grad = lrmsd_gradient(x, y, align(x, y));
    std::vector<double> analytic, at;
    for (std::size_t i = 0; i < x.size(); ++i) {
      analytic.insert(analytic.end(), {grad[i].x, grad[i].y, grad[i].z});
      at.insert(at.end(), {x[i].x, x[i].y, x[i].z});
    }
    const auto numeric = finite_difference_gradient(
        [&](std::span<const double> p) {
          std::vector<Vec3d> xs(x.size());
          for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = {p[3 * i], p[3 * i + 1], p[3 * i + 2]};
          return lrmsd(xs, y);
        },
        at);
    EXPECT_LT(compare_gradients(analytic, numeric).max_relative_error, 1e-5) << k;
  }
}

TEST(LrmsdGradient, TranslationAndRotationInvariance) {
  Rng rng(41);
  for (int k = 0; k < 20; ++k) {
    const auto x = random_points(rng, 30), y = random_points(rng, 30);
    const Alignment al = align(x, y);
    const auto g = lrmsd_gradient(x, y, al);
    Vec3d sum;
    for (const auto& v : g) sum += v;
    EXPECT_LT(norm(sum), 1e-10);
    // Infinitesimal rotation about the centroid: v_i = w x (x_i - c).
    const Vec3d w = random_point(rng, 1.0);
    double directional = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) directional += dot(g[i], cross(w, x[i] - al.centroid_x));
    EXPECT_LT(std::abs(directional), 1e-7);
  }
}

TEST(LrmsdGradient, PreGradientIsProportional) {
  Rng rng(42);
  const auto x = random_points(rng, 12), y = random_points(rng, 12);
  const Alignment al = align(x, y);
  const auto pre = lrmsd_pre_gradient(x, y, al);
  const auto g = lrmsd_gradient(x, y, al);
  Vec3d mean;
  for (const auto& v : pre) mean += v;
  mean = mean / 12.0;
  for (std::size_t i = 0; i < 12; ++i) {
    EXPECT_LT(distance(g[i] * (12.0 * al.lrmsd_value), pre[i] - mean), 1e-10);
  }
}

TEST(LrmsdGradient, DegenerateInputThrows) {
  Rng rng(43);
  const auto x = random_points(rng, 6);
  EXPECT_THROW(lrmsd_gradient(x, x, align(x, x)), DegenerateError);
  const auto y = random_points(rng, 6);
  const Alignment al = align(x, y);
  EXPECT_THROW(lrmsd_gradient(std::span(x).first(5), std::span(y).first(5), al), InputError);
}
