#pragma once

// Backbone-only chain model: three atoms per residue (N, CA, C) placed by a
// linear chain of bond transforms. Atom 3j is N, 3j+1 is CA and 3j+2 is C of
// residue j; atom i sits at M_i * 0 with M_i = R_0 R_1 ... R_i.

#include <concepts>
#include <span>
#include <vector>

#include "protkin/coords.hpp"
#include "protkin/geometry.hpp"

namespace protkin {

struct BackboneAngles {
  std::vector<double> phi;
  std::vector<double> psi;
  // omega[j] is the peptide bond C(j) -> N(j+1); the last entry is unused.
  std::vector<double> omega;

  // omega filled with pi (trans peptide bonds).
  static BackboneAngles trans(std::vector<double> phi, std::vector<double> psi);

  std::size_t length() const { return phi.size(); }
};

// Rectangular padded storage for a batch of chains of different lengths.
// Entries beyond lengths[b] in row b are ignored.
struct BackboneBatch {
  std::size_t max_length = 0;
  std::vector<std::size_t> lengths;
  std::vector<double> phi;  // size lengths.size() * max_length, row-major
  std::vector<double> psi;
  std::vector<double> omega;

  static BackboneBatch pack(std::span<const BackboneAngles> items);
  std::size_t size() const { return lengths.size(); }
  BackboneAngles item(std::size_t b) const;
};

enum class Precision { kSingle, kDouble };

template <std::floating_point T>
struct BackboneSaved {
  std::vector<Transform<T>> cumulative;  // M_i for i in [0, 3L)
  std::vector<Vec3<T>> coords;
  std::vector<T> phi;
  std::vector<T> psi;
  Precision precision = std::same_as<T, float> ? Precision::kSingle : Precision::kDouble;

  std::size_t length() const { return phi.size(); }
};

template <std::floating_point T>
struct BackboneResult {
  AtomicCoordinates coords;  // always reported in double
  BackboneSaved<T> saved;
};

struct BackboneGradient {
  std::vector<double> phi;
  std::vector<double> psi;
};

// Throws InputError for an empty chain or unequal angle arrays.
BackboneResult<double> bb_forward(const BackboneAngles& angles);

// Same algorithm with every product accumulated in single precision.
BackboneResult<float> bb_forward_f32(const BackboneAngles& angles);

BackboneGradient bb_backward(const BackboneSaved<double>& saved, std::span<const Vec3d> grad_coords);

// d r_atom / d phi_residue (or psi) from the saved cumulative transforms.
Vec3d bb_position_derivative(const BackboneSaved<double>& saved, std::size_t atom, std::size_t residue,
                             bool psi);

std::vector<BackboneResult<double>> bb_forward_batch(const BackboneBatch& batch, unsigned threads = 1);
std::vector<BackboneGradient> bb_backward_batch(std::span<const BackboneResult<double>> forward,
                                                std::span<const std::vector<Vec3d>> grad_coords,
                                                unsigned threads = 1);

}  // namespace protkin
