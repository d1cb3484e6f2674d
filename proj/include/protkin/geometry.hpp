#pragma once

// Homogeneous rigid-transform algebra used by both chain models.
//
// A bond transform places a child atom relative to its parent's local frame:
//
//   R(alpha, theta, d) = Ry(theta) * Tx(d) * Rx(alpha)
//
// The x axis of every local frame points along the bond that created it, so
// alpha is the torsion about that bond and pi - theta is the bond angle at the
// parent atom. All rotations are right-handed.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <numbers>
#include <string>

#include "protkin/errors.hpp"

namespace protkin {

inline constexpr double kPi = std::numbers::pi;

template <std::floating_point T>
struct Vec3 {
  T x{}, y{}, z{};

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(T s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }
  friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend constexpr Vec3 operator*(Vec3 a, T s) { return a *= s; }
  friend constexpr Vec3 operator*(T s, Vec3 a) { return a *= s; }
  friend constexpr Vec3 operator/(const Vec3& a, T s) { return {a.x / s, a.y / s, a.z / s}; }
  friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;

  constexpr T operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

using Vec3d = Vec3<double>;
using Vec3f = Vec3<float>;

template <std::floating_point T>
constexpr T dot(const Vec3<T>& a, const Vec3<T>& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

template <std::floating_point T>
constexpr Vec3<T> cross(const Vec3<T>& a, const Vec3<T>& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

template <std::floating_point T>
T norm(const Vec3<T>& a) {
  return std::sqrt(dot(a, a));
}

template <std::floating_point T>
T distance(const Vec3<T>& a, const Vec3<T>& b) {
  return norm(a - b);
}

// Fixed bond parameters of an edge: polar angle theta (radians) and bond
// length d (angstrom). Neither is differentiated.
struct TransformParams {
  double theta = 0.0;
  double d = 0.0;

  friend bool operator==(const TransformParams&, const TransformParams&) = default;
};

// Throws DomainError unless d > 0 and theta lies in (0, 2*pi).
void validate_params(const TransformParams& params);

// Rigid 4x4 transform. Only the upper 3x4 block is stored; the last row is
// (0, 0, 0, 1) by construction.
template <std::floating_point T>
class Transform {
 public:
  constexpr Transform() : m_{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0} {}
  constexpr explicit Transform(const std::array<T, 12>& rows) : m_(rows) {}

  static constexpr Transform identity() { return Transform(); }

  // Entry (row, col) of the full 4x4 matrix.
  constexpr T operator()(int row, int col) const {
    if (row == 3) return col == 3 ? T(1) : T(0);
    return m_[row * 4 + col];
  }
  constexpr T& at(int row, int col) { return m_[row * 4 + col]; }

  constexpr Vec3<T> translation() const { return {m_[3], m_[7], m_[11]}; }
  constexpr const std::array<T, 12>& data() const { return m_; }

  template <std::floating_point U>
  constexpr Transform<U> cast() const {
    std::array<U, 12> out{};
    for (int i = 0; i < 12; ++i) out[i] = static_cast<U>(m_[i]);
    return Transform<U>(out);
  }

  friend constexpr bool operator==(const Transform&, const Transform&) = default;

 private:
  std::array<T, 12> m_;
};

// Derivative of a rigid transform with respect to a scalar: a 4x4 matrix whose
// last row is identically zero. Applying it to a homogeneous point (w = 1)
// gives a displacement vector.
template <std::floating_point T>
class TangentMatrix {
 public:
  constexpr TangentMatrix() : m_{} {}
  constexpr explicit TangentMatrix(const std::array<T, 12>& rows) : m_(rows) {}

  constexpr T operator()(int row, int col) const {
    if (row == 3) return T(0);
    return m_[row * 4 + col];
  }
  constexpr T& at(int row, int col) { return m_[row * 4 + col]; }
  constexpr const std::array<T, 12>& data() const { return m_; }

 private:
  std::array<T, 12> m_;
};

namespace detail {

template <std::floating_point T>
constexpr std::array<T, 12> multiply(const std::array<T, 12>& a, const std::array<T, 12>& b,
                                     T b_last) {
  // a and b are 3x4 blocks of 4x4 matrices; b's last row is (0, 0, 0, b_last).
  std::array<T, 12> out{};
  for (int r = 0; r < 3; ++r) {
    const T* ar = &a[r * 4];
    for (int c = 0; c < 3; ++c) {
      out[r * 4 + c] = ar[0] * b[c] + ar[1] * b[4 + c] + ar[2] * b[8 + c];
    }
    out[r * 4 + 3] = ar[0] * b[3] + ar[1] * b[7] + ar[2] * b[11] + ar[3] * b_last;
  }
  return out;
}

}  // namespace detail

template <std::floating_point T>
constexpr Transform<T> compose(const Transform<T>& a, const Transform<T>& b) {
  return Transform<T>(detail::multiply(a.data(), b.data(), T(1)));
}

template <std::floating_point T>
constexpr Transform<T> operator*(const Transform<T>& a, const Transform<T>& b) {
  return compose(a, b);
}

template <std::floating_point T>
constexpr TangentMatrix<T> operator*(const Transform<T>& a, const TangentMatrix<T>& b) {
  return TangentMatrix<T>(detail::multiply(a.data(), b.data(), T(0)));
}

template <std::floating_point T>
constexpr TangentMatrix<T> operator*(const TangentMatrix<T>& a, const Transform<T>& b) {
  return TangentMatrix<T>(detail::multiply(a.data(), b.data(), T(1)));
}

// m * (p, 1).
template <std::floating_point T>
constexpr Vec3<T> apply_point(const Transform<T>& m, const Vec3<T>& p) {
  const auto& a = m.data();
  return {a[0] * p.x + a[1] * p.y + a[2] * p.z + a[3],
          a[4] * p.x + a[5] * p.y + a[6] * p.z + a[7],
          a[8] * p.x + a[9] * p.y + a[10] * p.z + a[11]};
}

// Displacement of the homogeneous point (p, 1) under a tangent matrix.
template <std::floating_point T>
constexpr Vec3<T> apply_point(const TangentMatrix<T>& m, const Vec3<T>& p) {
  const auto& a = m.data();
  return {a[0] * p.x + a[1] * p.y + a[2] * p.z + a[3],
          a[4] * p.x + a[5] * p.y + a[6] * p.z + a[7],
          a[8] * p.x + a[9] * p.y + a[10] * p.z + a[11]};
}

template <std::floating_point T>
Transform<T> rotation_x(T angle) {
  const T c = std::cos(angle), s = std::sin(angle);
  return Transform<T>({1, 0, 0, 0, 0, c, -s, 0, 0, s, c, 0});
}

template <std::floating_point T>
Transform<T> rotation_y(T angle) {
  const T c = std::cos(angle), s = std::sin(angle);
  return Transform<T>({c, 0, s, 0, 0, 1, 0, 0, -s, 0, c, 0});
}

template <std::floating_point T>
Transform<T> translation_x(T d) {
  return Transform<T>({1, 0, 0, d, 0, 1, 0, 0, 0, 0, 1, 0});
}

// Closed form of Ry(theta) * Tx(d) * Rx(alpha). Does not validate params; the
// checked entry points are bond_transform / bond_transform_derivative.
template <std::floating_point T>
Transform<T> bond_transform_unchecked(T theta, T d, T alpha) {
  const T ca = std::cos(alpha), sa = std::sin(alpha);
  const T ct = std::cos(theta), st = std::sin(theta);
  return Transform<T>({ct, sa * st, ca * st, d * ct,  //
                       0, ca, -sa, 0,                 //
                       -st, sa * ct, ca * ct, -d * st});
}

template <std::floating_point T>
TangentMatrix<T> bond_transform_derivative_unchecked(T theta, T alpha) {
  const T ca = std::cos(alpha), sa = std::sin(alpha);
  const T ct = std::cos(theta), st = std::sin(theta);
  return TangentMatrix<T>({0, ca * st, -sa * st, 0,  //
                           0, -sa, -ca, 0,           //
                           0, ca * ct, -sa * ct, 0});
}

Transform<double> bond_transform(const TransformParams& params, double alpha);

// d/d(alpha) of bond_transform(params, alpha).
TangentMatrix<double> bond_transform_derivative(const TransformParams& params, double alpha);

// Largest deviation of the rotation block from orthonormality, max |R^T R - I|.
template <std::floating_point T>
T orthonormality_error(const Transform<T>& m) {
  T worst = 0;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      T s = 0;
      for (int k = 0; k < 3; ++k) s += m(k, a) * m(k, b);
      worst = std::max(worst, std::abs(s - (a == b ? T(1) : T(0))));
    }
  }
  return worst;
}

template <std::floating_point T>
T rotation_determinant(const Transform<T>& m) {
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

// Rotation transpose with negated, rotated translation. No orthonormality
// check; see invert_rigid.
template <std::floating_point T>
constexpr Transform<T> invert_rigid_unchecked(const Transform<T>& m) {
  const auto& a = m.data();
  std::array<T, 12> out{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) out[r * 4 + c] = a[c * 4 + r];
    out[r * 4 + 3] = -(a[r] * a[3] + a[4 + r] * a[7] + a[8 + r] * a[11]);
  }
  return Transform<T>(out);
}

// Inverse of a rigid transform. Throws DomainError when the rotation block
// deviates from orthonormality by more than `tolerance`.
template <std::floating_point T>
Transform<T> invert_rigid(const Transform<T>& m, T tolerance = T(1e-6)) {
  const T err = orthonormality_error(m);
  if (!(err <= tolerance)) {
    throw DomainError("invert_rigid: rotation block is not orthonormal (error " +
                      std::to_string(static_cast<double>(err)) + ")");
  }
  return invert_rigid_unchecked(m);
}

}  // namespace protkin
