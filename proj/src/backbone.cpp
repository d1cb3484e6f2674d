#include "protkin/backbone.hpp"

#include "protkin/parallel.hpp"
#include "protkin/topology.hpp"

namespace protkin {

BackboneAngles BackboneAngles::trans(std::vector<double> phi, std::vector<double> psi) {
  BackboneAngles a;
  a.omega.assign(phi.size(), kPi);
  a.phi = std::move(phi);
  a.psi = std::move(psi);
  return a;
}

BackboneBatch BackboneBatch::pack(std::span<const BackboneAngles> items) {
  BackboneBatch b;
  for (const auto& it : items) b.max_length = std::max(b.max_length, it.length());
  const std::size_t cells = items.size() * b.max_length;
  b.phi.assign(cells, 0.0);
  b.psi.assign(cells, 0.0);
  b.omega.assign(cells, kPi);
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    if (it.psi.size() != it.length() || it.omega.size() != it.length()) {
      throw InputError("BackboneBatch::pack: item " + std::to_string(i) + " has unequal angle arrays");
    }
    b.lengths.push_back(it.length());
    std::copy(it.phi.begin(), it.phi.end(), b.phi.begin() + i * b.max_length);
    std::copy(it.psi.begin(), it.psi.end(), b.psi.begin() + i * b.max_length);
    std::copy(it.omega.begin(), it.omega.end(), b.omega.begin() + i * b.max_length);
  }
  return b;
}

BackboneAngles BackboneBatch::item(std::size_t b) const {
  const std::size_t len = lengths.at(b);
  const auto row = static_cast<std::ptrdiff_t>(b * max_length);
  const auto n = static_cast<std::ptrdiff_t>(len);
  BackboneAngles a;
  a.phi.assign(phi.begin() + row, phi.begin() + row + n);
  a.psi.assign(psi.begin() + row, psi.begin() + row + n);
  a.omega.assign(omega.begin() + row, omega.begin() + row + n);
  return a;
}

namespace {

void check_angles(const BackboneAngles& angles) {
  if (angles.length() == 0) throw InputError("bb_forward: chain has zero length");
  if (angles.psi.size() != angles.length() || angles.omega.size() != angles.length()) {
    throw InputError("bb_forward: phi, psi and omega must have equal length");
  }
}

template <std::floating_point T>
BackboneResult<T> forward_impl(const BackboneAngles& angles) {
  check_angles(angles);
  const std::size_t len = angles.length();
  const T theta_cn = static_cast<T>(kPeptideBond.theta), d_cn = static_cast<T>(kPeptideBond.d);
  const T theta_nca = static_cast<T>(kNCaBond.theta), d_nca = static_cast<T>(kNCaBond.d);
  const T theta_cac = static_cast<T>(kCaCBond.theta), d_cac = static_cast<T>(kCaCBond.d);

  BackboneResult<T> out;
  BackboneSaved<T>& saved = out.saved;
  saved.cumulative.resize(3 * len);
  saved.coords.resize(3 * len);
  saved.phi.resize(len);
  saved.psi.resize(len);

  Transform<T> m = Transform<T>::identity();
  for (std::size_t j = 0; j < len; ++j) {
    saved.phi[j] = static_cast<T>(angles.phi[j]);
    saved.psi[j] = static_cast<T>(angles.psi[j]);
    // The transform leading to residue 0 is the identity.
    if (j > 0) m = m * bond_transform_unchecked(theta_cn, d_cn, static_cast<T>(angles.omega[j - 1]));
    saved.cumulative[3 * j] = m;
    m = m * bond_transform_unchecked(theta_nca, d_nca, saved.phi[j]);
    saved.cumulative[3 * j + 1] = m;
    m = m * bond_transform_unchecked(theta_cac, d_cac, saved.psi[j]);
    saved.cumulative[3 * j + 2] = m;
  }

  static constexpr const char* kNames[3] = {"N", "CA", "C"};
  out.coords.positions.reserve(3 * len);
  out.coords.atoms.reserve(3 * len);
  for (std::size_t i = 0; i < 3 * len; ++i) {
    const Vec3<T> r = saved.cumulative[i].translation();
    saved.coords[i] = r;
    out.coords.positions.push_back({static_cast<double>(r.x), static_cast<double>(r.y), static_cast<double>(r.z)});
    out.coords.atoms.push_back({kNames[i % 3], static_cast<int>(i / 3), "UNK"});
  }
  return out;
}

// F = M_before * dR(alpha) * M_after^-1, so that dr_i/dalpha = F r_i for every
// atom i downstream of the rotated bond.
TangentMatrix<double> sandwich(const BackboneSaved<double>& saved, std::size_t residue, bool psi) {
  const std::size_t before = 3 * residue + (psi ? 1 : 0);
  const TransformParams& p = psi ? kCaCBond : kNCaBond;
  const double alpha = psi ? saved.psi[residue] : saved.phi[residue];
  return saved.cumulative[before] * bond_transform_derivative_unchecked(p.theta, alpha) *
         invert_rigid(saved.cumulative[before + 1]);
}

}  // namespace

BackboneResult<double> bb_forward(const BackboneAngles& angles) { return forward_impl<double>(angles); }

BackboneResult<float> bb_forward_f32(const BackboneAngles& angles) { return forward_impl<float>(angles); }

BackboneGradient bb_backward(const BackboneSaved<double>& saved, std::span<const Vec3d> grad_coords) {
  const std::size_t len = saved.length();
  if (grad_coords.size() != 3 * len) {
    throw InputError("bb_backward: expected " + std::to_string(3 * len) + " coordinate gradients, got " +
                     std::to_string(grad_coords.size()));
  }
  BackboneGradient grad;
  grad.phi.assign(len, 0.0);
  grad.psi.assign(len, 0.0);

  auto accumulate = [&](const TangentMatrix<double>& fm, std::size_t first_atom) {
    const auto& f = fm.data();
    double sum = 0.0;
    for (std::size_t i = first_atom; i < 3 * len; ++i) {
      const Vec3d& r = saved.coords[i];
      const Vec3d& g = grad_coords[i];
      sum += g.x * (f[0] * r.x + f[1] * r.y + f[2] * r.z + f[3]) +
             g.y * (f[4] * r.x + f[5] * r.y + f[6] * r.z + f[7]) +
             g.z * (f[8] * r.x + f[9] * r.y + f[10] * r.z + f[11]);
    }
    return sum;
  };

  for (std::size_t j = 0; j < len; ++j) {
    grad.phi[j] = accumulate(sandwich(saved, j, false), 3 * j + 1);
    grad.psi[j] = accumulate(sandwich(saved, j, true), 3 * j + 2);
  }
  return grad;
}

Vec3d bb_position_derivative(const BackboneSaved<double>& saved, std::size_t atom, std::size_t residue, bool psi) {
  if (atom >= saved.coords.size() || residue >= saved.length()) {
    throw InputError("bb_position_derivative: index out of range");
  }
  const std::size_t first = 3 * residue + (psi ? 2 : 1);
  if (atom < first) return {};
  return apply_point(sandwich(saved, residue, psi), saved.coords[atom]);
}

std::vector<BackboneResult<double>> bb_forward_batch(const BackboneBatch& batch, unsigned threads) {
  std::vector<BackboneResult<double>> out(batch.size());
  parallel_for(batch.size(), threads, [&](std::size_t b) { out[b] = bb_forward(batch.item(b)); });
  return out;
}

std::vector<BackboneGradient> bb_backward_batch(std::span<const BackboneResult<double>> forward,
                                                std::span<const std::vector<Vec3d>> grad_coords,
                                                unsigned threads) {
  if (forward.size() != grad_coords.size()) throw InputError("bb_backward_batch: batch sizes differ");
  std::vector<BackboneGradient> out(forward.size());
  parallel_for(forward.size(), threads,
               [&](std::size_t b) { out[b] = bb_backward(forward[b].saved, grad_coords[b]); });
  return out;
}

}  // namespace protkin
