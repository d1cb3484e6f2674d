#include "protkin/lrmsd.hpp"

#include <algorithm>
#include <cmath>

#include "protkin/errors.hpp"

namespace protkin {

Centered center(std::span<const Vec3d> points) {
  if (points.empty()) throw InputError("center: empty point set");
  Centered out;
  for (const auto& p : points) out.centroid += p;
  out.centroid = out.centroid / static_cast<double>(points.size());
  out.points.reserve(points.size());
  for (const auto& p : points) out.points.push_back(p - out.centroid);
  return out;
}

Mat3 correlation(std::span<const Vec3d> x, std::span<const Vec3d> y) {
  if (x.size() != y.size()) {
    throw InputError("correlation: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()) + " points");
  }
  Mat3 r{};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xa[3] = {x[i].x, x[i].y, x[i].z};
    const double yb[3] = {y[i].x, y[i].y, y[i].z};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) r[a][b] += xa[a] * yb[b];
  }
  return r;
}

Mat4 build_t(const Mat3& r) {
  const double r11 = r[0][0], r12 = r[0][1], r13 = r[0][2];
  const double r21 = r[1][0], r22 = r[1][1], r23 = r[1][2];
  const double r31 = r[2][0], r32 = r[2][1], r33 = r[2][2];
  Mat4 t{};
  t[0] = {r11 + r22 + r33, r23 - r32, r31 - r13, r12 - r21};
  t[1] = {r23 - r32, r11 - r22 - r33, r12 + r21, r13 + r31};
  t[2] = {r31 - r13, r12 + r21, -r11 + r22 - r33, r23 + r32};
  t[3] = {r12 - r21, r13 + r31, r23 + r32, -r11 - r22 + r33};
  return t;
}

namespace {

constexpr double kSymmetryTol = 1e-9;

void check_symmetric(const Mat4& t) {
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      if (!(std::abs(t[a][b] - t[b][a]) <= kSymmetryTol)) {
        throw DomainError("max_eigenpair: matrix is not symmetric at (" + std::to_string(a) + "," +
                          std::to_string(b) + ")");
      }
    }
  }
}

// Diagonalizes `a` in place and accumulates the rotations in `v`.
void jacobi(Mat4& a, Mat4& v) {
  v = Mat4{};
  for (int i = 0; i < 4; ++i) v[i][i] = 1.0;
  double frob = 0.0;
  for (const auto& row : a)
    for (double e : row) frob += e * e;
  if (frob == 0.0) return;

  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < 4; ++p)
      for (int q = p + 1; q < 4; ++q) off += a[p][q] * a[p][q];
    if (off <= 1e-34 * frob) return;

    for (int p = 0; p < 4; ++p) {
      for (int q = p + 1; q < 4; ++q) {
        const double apq = a[p][q];
        if (apq == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < 4; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 4; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        a[p][q] = a[q][p] = 0.0;
        for (int k = 0; k < 4; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
}

}  // namespace

std::array<double, 4> jacobi_eigenvalues(const Mat4& t) {
  check_symmetric(t);
  Mat4 a = t, v;
  jacobi(a, v);
  return {a[0][0], a[1][1], a[2][2], a[3][3]};
}

Eigenpair max_eigenpair(const Mat4& t) {
  check_symmetric(t);
  Mat4 a = t, v;
  jacobi(a, v);
  int best = 0;
  for (int i = 1; i < 4; ++i) {
    if (a[i][i] > a[best][best]) best = i;
  }
  Eigenpair out;
  out.value = a[best][best];
  double n = 0.0;
  for (int k = 0; k < 4; ++k) {
    out.vector[k] = v[k][best];
    n += v[k][best] * v[k][best];
  }
  n = std::sqrt(n);
  for (double& c : out.vector) c /= n;
  for (double c : out.vector) {
    if (std::abs(c) > 1e-12) {
      if (c < 0)
        for (double& e : out.vector) e = -e;
      break;
    }
  }
  return out;
}

Mat3 quaternion_to_rotation(const Quaternion& q) {
  const double n2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3];
  if (!(std::abs(std::sqrt(n2) - 1.0) <= 1e-8)) {
    throw DomainError("quaternion_to_rotation: quaternion norm " + std::to_string(std::sqrt(n2)) + " is not 1");
  }
  const double q0 = q[0], q1 = q[1], q2 = q[2], q3 = q[3];
  Mat3 u{};
  u[0] = {q0 * q0 + q1 * q1 - q2 * q2 - q3 * q3, 2 * (q1 * q2 - q0 * q3), 2 * (q1 * q3 + q0 * q2)};
  u[1] = {2 * (q1 * q2 + q0 * q3), q0 * q0 - q1 * q1 + q2 * q2 - q3 * q3, 2 * (q2 * q3 - q0 * q1)};
  u[2] = {2 * (q1 * q3 - q0 * q2), 2 * (q2 * q3 + q0 * q1), q0 * q0 - q1 * q1 - q2 * q2 + q3 * q3};
  return u;
}

Vec3d multiply(const Mat3& m, const Vec3d& v) {
  return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z, m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
          m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
}

Vec3d multiply_transposed(const Mat3& m, const Vec3d& v) {
  return {m[0][0] * v.x + m[1][0] * v.y + m[2][0] * v.z, m[0][1] * v.x + m[1][1] * v.y + m[2][1] * v.z,
          m[0][2] * v.x + m[1][2] * v.y + m[2][2] * v.z};
}

Alignment align(std::span<const Vec3d> x, std::span<const Vec3d> y) {
  if (x.size() != y.size()) {
    throw InputError("lrmsd: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()) + " atoms");
  }
  if (x.empty()) throw InputError("lrmsd: empty input");
  const Centered cx = center(x);
  const Centered cy = center(y);

  Alignment al;
  al.n_atoms = x.size();
  al.centroid_x = cx.centroid;
  al.centroid_y = cy.centroid;
  al.correlation = correlation(cx.points, cy.points);
  al.t_matrix = build_t(al.correlation);
  const Eigenpair ep = max_eigenpair(al.t_matrix);
  al.lambda_max = ep.value;
  al.quaternion = ep.vector;
  al.rotation = quaternion_to_rotation(ep.vector);

  // sqrt((sum |x|^2 + |y|^2 - 2 lambda) / N) subtracts two numbers that grow
  // with the spread of the structures and loses up to three digits for
  // chains of a few hundred atoms. The residual under the optimal rotation is
  // the same quantity without the cancellation.
  double residual = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Vec3d d = multiply(al.rotation, cx.points[i]) - cy.points[i];
    residual += dot(d, d);
  }
  al.lrmsd_value = std::sqrt(residual / static_cast<double>(x.size()));
  return al;
}

double lrmsd(std::span<const Vec3d> x, std::span<const Vec3d> y) { return align(x, y).lrmsd_value; }

std::vector<Vec3d> lrmsd_pre_gradient(std::span<const Vec3d> x, std::span<const Vec3d> y,
                                      const Alignment& alignment) {
  if (x.size() != alignment.n_atoms || y.size() != alignment.n_atoms) {
    throw InputError("lrmsd_gradient: alignment was computed for " + std::to_string(alignment.n_atoms) + " atoms");
  }
  std::vector<Vec3d> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = (x[i] - alignment.centroid_x) - multiply_transposed(alignment.rotation, y[i] - alignment.centroid_y);
  }
  return out;
}

std::vector<Vec3d> lrmsd_gradient(std::span<const Vec3d> x, std::span<const Vec3d> y, const Alignment& alignment) {
  if (!(alignment.lrmsd_value > 0.0)) {
    throw DegenerateError("lrmsd_gradient: LRMSD is zero, the gradient is undefined");
  }
  std::vector<Vec3d> g = lrmsd_pre_gradient(x, y, alignment);
  Vec3d mean;
  for (const auto& v : g) mean += v;
  mean = mean / static_cast<double>(g.size());
  const double scale = 1.0 / (static_cast<double>(g.size()) * alignment.lrmsd_value);
  for (auto& v : g) v = (v - mean) * scale;
  return g;
}

}  // namespace protkin
