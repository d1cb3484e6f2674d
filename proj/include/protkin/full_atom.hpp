#pragma once

// Full-atom chain model: heavy-atom coordinates from backbone and side-chain
// dihedrals, built by accumulating bond transforms over a tree of rigid
// groups, with the matching reverse pass for angle gradients.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "protkin/coords.hpp"
#include "protkin/geometry.hpp"
#include "protkin/topology.hpp"

namespace protkin {

// Dihedrals of one residue in radians. `chi` holds chi1..chik for exactly the
// k side-chain slots the residue's topology declares. omega belongs to the
// peptide bond from this residue's C to the next residue's N; it is unused for
// the last residue.
struct ResidueAngles {
  double phi = 0.0;
  double psi = 0.0;
  double omega = kPi;
  std::vector<double> chi;

  friend bool operator==(const ResidueAngles&, const ResidueAngles&) = default;
};

using FullAtomAngles = std::vector<ResidueAngles>;

struct ResidueAngleGradient {
  double phi = 0.0;
  double psi = 0.0;
  std::optional<double> omega;  // set only when omega is differentiated
  std::vector<double> chi;
};

using FullAtomGradient = std::vector<ResidueAngleGradient>;

struct FullAtomOptions {
  // By default omega is a constant of the chain (trans peptide, pi unless the
  // caller supplies another value) and gets no gradient.
  bool variable_omega = false;
};

struct GraphNode {
  int parent = -1;         // -1: attached to the identity root frame
  int residue = 0;         // residue owning the rigid group
  int angle_residue = 0;   // residue whose ResidueAngles holds this edge's slot
  TransformParams params;  // unused for the root node
  AngleSlot slot;
  bool sidechain_pre = false;
  std::size_t atom_begin = 0;   // own atoms: [atom_begin, atom_end)
  std::size_t atom_end = 0;
  std::size_t subtree_end = 0;  // own and descendant atoms: [atom_begin, subtree_end)
};

// Transform tree of a whole chain. Nodes are in depth-first preorder, so a
// parent always precedes its children and every subtree owns a contiguous
// atom range.
struct MoleculeGraph {
  std::string sequence;
  std::vector<GraphNode> nodes;
  std::vector<std::vector<int>> children;
  std::vector<Vec3d> standard_positions;  // per atom, in its group's frame
  std::vector<AtomInfo> atoms;
  std::vector<int> chi_counts;  // per residue
  std::vector<std::array<std::size_t, 3>> backbone_atoms;  // N, CA, C per residue
  Transform<double> sidechain_pre;

  std::size_t atom_count() const { return atoms.size(); }
  std::size_t residue_count() const { return sequence.size(); }
};

// Throws InputError for an empty sequence or an unknown residue code.
MoleculeGraph build_graph(std::string_view sequence, const TopologyLibrary& lib = default_topology());

// Values kept by the forward pass for the reverse pass.
struct FullAtomSaved {
  std::vector<GraphNode> nodes;
  std::vector<Transform<double>> cumulative;    // M per node
  std::vector<TangentMatrix<double>> sandwich;  // F = M_parent' dR M^-1, zero if not differentiated
  std::vector<unsigned char> differentiated;    // per node
  std::vector<Vec3d> coords;
  std::vector<int> chi_counts;
  bool variable_omega = false;
};

struct FullAtomResult {
  AtomicCoordinates coords;
  FullAtomSaved saved;
};

// Slot mismatch (wrong residue count or chi count) throws InputError.
FullAtomResult fa_forward(const MoleculeGraph& graph, const FullAtomAngles& angles,
                          const FullAtomOptions& opts = {});

// Gradient of a scalar loss with respect to every differentiated angle, given
// dL/dr for every atom.
FullAtomGradient fa_backward(const FullAtomSaved& saved, std::span<const Vec3d> grad_coords);

// Batched passes; items are independent and run on up to `threads` workers.
std::vector<FullAtomResult> fa_forward_batch(std::span<const MoleculeGraph> graphs,
                                             std::span<const FullAtomAngles> angles,
                                             const FullAtomOptions& opts = {}, unsigned threads = 1);
std::vector<FullAtomGradient> fa_backward_batch(std::span<const FullAtomResult> forward,
                                                std::span<const std::vector<Vec3d>> grad_coords,
                                                unsigned threads = 1);

// Angles with every chi set to zero and the given backbone values.
FullAtomAngles default_angles(const MoleculeGraph& graph, double phi = 0.0, double psi = 0.0);

// Flat views over the differentiated angles, ordered per residue as
// phi, psi, [omega], chi1..chik.
std::vector<double> flatten_angles(const FullAtomAngles& angles, bool include_omega);
FullAtomAngles unflatten_angles(const FullAtomAngles& shape, std::span<const double> flat,
                                bool include_omega);
std::vector<double> flatten_gradient(const FullAtomGradient& grad);

}  // namespace protkin
