#include "protkin/full_atom.hpp"

#include <algorithm>

#include "protkin/parallel.hpp"

namespace protkin {

namespace {

struct PendingGroup {
  int residue;
  int group_id;
  int parent_node;
  const BondEdge* edge;  // nullptr for the chain root
};

}  // namespace

MoleculeGraph build_graph(std::string_view sequence, const TopologyLibrary& lib) {
  if (sequence.empty()) throw InputError("build_graph: empty sequence");

  std::vector<const ResidueTopology*> residues;
  residues.reserve(sequence.size());
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    const auto* res = lib.find(std::string_view(&sequence[i], 1));
    if (!res) {
      throw InputError("build_graph: unknown residue code '" + std::string(1, sequence[i]) +
                       "' at position " + std::to_string(i));
    }
    residues.push_back(res);
  }

  MoleculeGraph g;
  g.sequence = std::string(sequence);
  g.sidechain_pre = lib.sidechain_pre_transform();
  g.backbone_atoms.assign(residues.size(), {0, 0, 0});
  for (const auto* res : residues) g.chi_counts.push_back(res->chi_count());

  std::vector<PendingGroup> stack;
  stack.push_back({0, residues[0]->root_group(), -1, nullptr});
  while (!stack.empty()) {
    const PendingGroup item = stack.back();
    stack.pop_back();
    const ResidueTopology& res = *residues[item.residue];

    GraphNode node;
    node.parent = item.parent_node;
    node.residue = item.residue;
    node.angle_residue = item.residue;
    if (item.edge) {
      node.params = item.edge->params;
      node.slot = item.edge->slot;
      node.sidechain_pre = item.edge->sidechain_pre;
      if (item.edge->child == kNextResidue) node.angle_residue = item.residue - 1;
    }
    node.atom_begin = g.atoms.size();
    const RigidGroup* group = res.find_group(item.group_id);
    for (const auto& atom : group->atoms) {
      const std::size_t index = g.atoms.size();
      if (atom.name == "N") g.backbone_atoms[item.residue][0] = index;
      if (atom.name == "CA") g.backbone_atoms[item.residue][1] = index;
      if (atom.name == "C") g.backbone_atoms[item.residue][2] = index;
      g.atoms.push_back({atom.name, item.residue, res.code3});
      g.standard_positions.push_back(atom.position);
    }
    node.atom_end = g.atoms.size();
    node.subtree_end = node.atom_end;

    const int node_index = static_cast<int>(g.nodes.size());
    g.nodes.push_back(node);
    g.children.emplace_back();
    if (node.parent >= 0) g.children[node.parent].push_back(node_index);

    // Pushed in reverse so children are visited in file order, with the
    // connector to the next residue last.
    const bool has_next = item.residue + 1 < static_cast<int>(residues.size());
    if (has_next && res.connector && res.connector->parent == item.group_id) {
      stack.push_back({item.residue + 1, residues[item.residue + 1]->root_group(), node_index,
                       &*res.connector});
    }
    for (auto it = res.edges.rbegin(); it != res.edges.rend(); ++it) {
      if (it->parent == item.group_id) stack.push_back({item.residue, it->child, node_index, &*it});
    }
  }

  for (std::size_t n = g.nodes.size(); n-- > 1;) {
    auto& parent = g.nodes[g.nodes[n].parent];
    parent.subtree_end = std::max(parent.subtree_end, g.nodes[n].subtree_end);
  }
  return g;
}

namespace {

void check_angles(const MoleculeGraph& graph, const FullAtomAngles& angles) {
  if (angles.size() != graph.residue_count()) {
    throw InputError("fa_forward: " + std::to_string(angles.size()) + " angle records for " +
                     std::to_string(graph.residue_count()) + " residues");
  }
  for (std::size_t r = 0; r < angles.size(); ++r) {
    if (static_cast<int>(angles[r].chi.size()) != graph.chi_counts[r]) {
      throw InputError("fa_forward: residue " + std::to_string(r) + " (" + graph.sequence[r] + ") expects " +
                       std::to_string(graph.chi_counts[r]) + " chi angles, got " +
                       std::to_string(angles[r].chi.size()));
    }
  }
}

double slot_value(const AngleSlot& slot, const ResidueAngles& a) {
  switch (slot.kind) {
    case SlotKind::kPhi:
      return a.phi;
    case SlotKind::kPsi:
      return a.psi;
    case SlotKind::kOmega:
      return a.omega;
    case SlotKind::kChi:
      return a.chi[slot.chi - 1];
    case SlotKind::kFixed:
      break;
  }
  return slot.fixed_value;
}

}  // namespace

FullAtomResult fa_forward(const MoleculeGraph& graph, const FullAtomAngles& angles, const FullAtomOptions& opts) {
  check_angles(graph, angles);

  FullAtomResult out;
  FullAtomSaved& saved = out.saved;
  const std::size_t n_nodes = graph.nodes.size();
  saved.nodes = graph.nodes;
  saved.chi_counts = graph.chi_counts;
  saved.variable_omega = opts.variable_omega;
  saved.cumulative.resize(n_nodes);
  saved.sandwich.resize(n_nodes);
  saved.differentiated.assign(n_nodes, 0);
  saved.coords.resize(graph.atom_count());

  for (std::size_t n = 0; n < n_nodes; ++n) {
    const GraphNode& node = graph.nodes[n];
    if (node.parent >= 0) {
      Transform<double> base = saved.cumulative[node.parent];
      if (node.sidechain_pre) base = base * graph.sidechain_pre;
      const double alpha = slot_value(node.slot, angles[node.angle_residue]);
      const Transform<double> m = base * bond_transform_unchecked(node.params.theta, node.params.d, alpha);
      saved.cumulative[n] = m;
      const bool diff = node.slot.is_variable() && (node.slot.kind != SlotKind::kOmega || opts.variable_omega);
      if (diff) {
        saved.differentiated[n] = 1;
        saved.sandwich[n] =
            base * bond_transform_derivative_unchecked(node.params.theta, alpha) * invert_rigid_unchecked(m);
      }
    }
    for (std::size_t k = node.atom_begin; k < node.atom_end; ++k) {
      saved.coords[k] = apply_point(saved.cumulative[n], graph.standard_positions[k]);
    }
  }

  out.coords.positions = saved.coords;
  out.coords.atoms = graph.atoms;
  return out;
}

FullAtomGradient fa_backward(const FullAtomSaved& saved, std::span<const Vec3d> grad_coords) {
  if (grad_coords.size() != saved.coords.size()) {
    throw InputError("fa_backward: " + std::to_string(grad_coords.size()) + " coordinate gradients for " +
                     std::to_string(saved.coords.size()) + " atoms");
  }
  FullAtomGradient grad(saved.chi_counts.size());
  for (std::size_t r = 0; r < grad.size(); ++r) {
    grad[r].chi.assign(saved.chi_counts[r], 0.0);
    if (saved.variable_omega) grad[r].omega = 0.0;
  }

  // Each differentiated edge collects dL/dr_k . (F r_k) over the atoms of its
  // subtree, which is a contiguous range in depth-first order.
  for (std::size_t n = 0; n < saved.nodes.size(); ++n) {
    if (!saved.differentiated[n]) continue;
    const GraphNode& node = saved.nodes[n];
    const auto& f = saved.sandwich[n].data();
    double sum = 0.0;
    for (std::size_t k = node.atom_begin; k < node.subtree_end; ++k) {
      const Vec3d& r = saved.coords[k];
      const Vec3d& g = grad_coords[k];
      sum += g.x * (f[0] * r.x + f[1] * r.y + f[2] * r.z + f[3]) +
             g.y * (f[4] * r.x + f[5] * r.y + f[6] * r.z + f[7]) +
             g.z * (f[8] * r.x + f[9] * r.y + f[10] * r.z + f[11]);
    }
    ResidueAngleGradient& out = grad[node.angle_residue];
    switch (node.slot.kind) {
      case SlotKind::kPhi:
        out.phi += sum;
        break;
      case SlotKind::kPsi:
        out.psi += sum;
        break;
      case SlotKind::kOmega:
        *out.omega += sum;
        break;
      case SlotKind::kChi:
        out.chi[node.slot.chi - 1] += sum;
        break;
      case SlotKind::kFixed:
        break;
    }
  }
  return grad;
}

std::vector<FullAtomResult> fa_forward_batch(std::span<const MoleculeGraph> graphs,
                                             std::span<const FullAtomAngles> angles, const FullAtomOptions& opts,
                                             unsigned threads) {
  if (graphs.size() != angles.size()) throw InputError("fa_forward_batch: batch sizes differ");
  std::vector<FullAtomResult> out(graphs.size());
  parallel_for(graphs.size(), threads, [&](std::size_t i) { out[i] = fa_forward(graphs[i], angles[i], opts); });
  return out;
}

std::vector<FullAtomGradient> fa_backward_batch(std::span<const FullAtomResult> forward,
                                                std::span<const std::vector<Vec3d>> grad_coords,
                                                unsigned threads) {
  if (forward.size() != grad_coords.size()) throw InputError("fa_backward_batch: batch sizes differ");
  std::vector<FullAtomGradient> out(forward.size());
  parallel_for(forward.size(), threads,
               [&](std::size_t i) { out[i] = fa_backward(forward[i].saved, grad_coords[i]); });
  return out;
}

FullAtomAngles default_angles(const MoleculeGraph& graph, double phi, double psi) {
  FullAtomAngles out(graph.residue_count());
  for (std::size_t r = 0; r < out.size(); ++r) {
    out[r].phi = phi;
    out[r].psi = psi;
    out[r].chi.assign(graph.chi_counts[r], 0.0);
  }
  return out;
}

std::vector<double> flatten_angles(const FullAtomAngles& angles, bool include_omega) {
  std::vector<double> flat;
  for (const auto& a : angles) {
    flat.push_back(a.phi);
    flat.push_back(a.psi);
    if (include_omega) flat.push_back(a.omega);
    flat.insert(flat.end(), a.chi.begin(), a.chi.end());
  }
  return flat;
}

FullAtomAngles unflatten_angles(const FullAtomAngles& shape, std::span<const double> flat, bool include_omega) {
  FullAtomAngles out = shape;
  std::size_t i = 0;
  auto next = [&] {
    if (i >= flat.size()) throw InputError("unflatten_angles: too few values");
    return flat[i++];
  };
  for (auto& a : out) {
    a.phi = next();
    a.psi = next();
    if (include_omega) a.omega = next();
    for (auto& c : a.chi) c = next();
  }
  if (i != flat.size()) throw InputError("unflatten_angles: too many values");
  return out;
}

std::vector<double> flatten_gradient(const FullAtomGradient& grad) {
  std::vector<double> flat;
  for (const auto& g : grad) {
    flat.push_back(g.phi);
    flat.push_back(g.psi);
    if (g.omega) flat.push_back(*g.omega);
    flat.insert(flat.end(), g.chi.begin(), g.chi.end());
  }
  return flat;
}

}  // namespace protkin
