#pragma once

// Least root-mean-square deviation between two point sets with positional
// correspondence, via the quaternion eigenvector method.

#include <array>
#include <span>
#include <vector>

#include "protkin/coords.hpp"
#include "protkin/geometry.hpp"

namespace protkin {

using Mat3 = std::array<std::array<double, 3>, 3>;
using Mat4 = std::array<std::array<double, 4>, 4>;
using Quaternion = std::array<double, 4>;  // (q0, q1, q2, q3), q0 scalar part

struct Alignment {
  Vec3d centroid_x;
  Vec3d centroid_y;
  Mat3 correlation{};
  Mat4 t_matrix{};
  double lambda_max = 0.0;
  Quaternion quaternion{1.0, 0.0, 0.0, 0.0};
  Mat3 rotation{};  // maps centered x onto centered y
  std::size_t n_atoms = 0;
  double lrmsd_value = 0.0;
};

struct Centered {
  std::vector<Vec3d> points;
  Vec3d centroid;
};

// Throws InputError for an empty set.
Centered center(std::span<const Vec3d> points);

// R(a,b) = sum_i x_i[a] y_i[b]. Throws InputError on count mismatch.
Mat3 correlation(std::span<const Vec3d> x, std::span<const Vec3d> y);

Mat4 build_t(const Mat3& r);

struct Eigenpair {
  double value = 0.0;
  Quaternion vector{};
};

// Largest eigenvalue of a symmetric 4x4 and a unit eigenvector whose first
// nonzero component is positive. Cyclic Jacobi; ties resolve to the lowest
// index. Throws DomainError if the input is not symmetric within 1e-9.
Eigenpair max_eigenpair(const Mat4& t);

// All four eigenvalues in the order the Jacobi sweep leaves them on the diagonal.
std::array<double, 4> jacobi_eigenvalues(const Mat4& t);

// Throws DomainError unless |q| = 1 within 1e-8.
Mat3 quaternion_to_rotation(const Quaternion& q);

Vec3d multiply(const Mat3& m, const Vec3d& v);
Vec3d multiply_transposed(const Mat3& m, const Vec3d& v);

// Throws InputError on empty input or count mismatch.
Alignment align(std::span<const Vec3d> x, std::span<const Vec3d> y);
double lrmsd(std::span<const Vec3d> x, std::span<const Vec3d> y);
inline double lrmsd(const AtomicCoordinates& x, const AtomicCoordinates& y) {
  return lrmsd(x.positions, y.positions);
}

// dLRMSD/dx_i. Throws DegenerateError when the LRMSD is zero.
std::vector<Vec3d> lrmsd_gradient(std::span<const Vec3d> x, std::span<const Vec3d> y, const Alignment& alignment);

// Unnormalized direction x~_i - U^T y~_i in the centered frame. Proportional to
// the true gradient by 1/(N * LRMSD).
std::vector<Vec3d> lrmsd_pre_gradient(std::span<const Vec3d> x, std::span<const Vec3d> y,
                                      const Alignment& alignment);

}  // namespace protkin
