#pragma once

// Per-residue rigid-group trees and the line-oriented topology file format.
//
//   RESIDUE <three-letter> <one-letter>
//   GROUP <id>
//   ATOM <group-id> <atom-name> <x> <y> <z>
//   EDGE <parent-id> <child-id|next> <slot> theta=<radians> d=<angstrom> [pre=sidechain]
//
// <slot> is one of phi, psi, omega, chi1..chi4 or fixed=<radians>. A theta of
// the form `pi-<x>` is evaluated as pi - x. The single `next` edge of a residue
// is the outbound C-N peptide connector to the following residue's root group.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "protkin/errors.hpp"
#include "protkin/geometry.hpp"

namespace protkin {

// Fixed parameters of the three backbone bonds, shared by both chain models.
inline constexpr TransformParams kPeptideBond{kPi - 2.1186, 1.330};  // C-N, carries omega
inline constexpr TransformParams kNCaBond{kPi - 1.9391, 1.460};      // N-CA, carries phi
inline constexpr TransformParams kCaCBond{kPi - 2.0610, 1.525};      // CA-C, carries psi

// Out-of-plane rotation about x applied before the CA->CB edge. Negative in
// the right-handed convention: this is the sign that yields L-amino acids.
inline constexpr double kSidechainRotation = -122.686 * kPi / 180.0;

inline constexpr int kMaxVariableSlots = 7;
inline constexpr int kMaxChi = 4;

enum class SlotKind { kPhi, kPsi, kOmega, kChi, kFixed };

struct AngleSlot {
  SlotKind kind = SlotKind::kFixed;
  int chi = 0;               // 1-based, only for kChi
  double fixed_value = 0.0;  // only for kFixed

  static AngleSlot phi() { return {SlotKind::kPhi}; }
  static AngleSlot psi() { return {SlotKind::kPsi}; }
  static AngleSlot omega() { return {SlotKind::kOmega}; }
  static AngleSlot chi_slot(int k) { return {SlotKind::kChi, k}; }
  static AngleSlot fixed(double value) { return {SlotKind::kFixed, 0, value}; }

  bool is_variable() const { return kind != SlotKind::kFixed; }
  std::string name() const;

  friend bool operator==(const AngleSlot&, const AngleSlot&) = default;
};

struct StandardAtom {
  std::string name;
  Vec3d position;  // standard frame, angstrom

  friend bool operator==(const StandardAtom&, const StandardAtom&) = default;
};

struct RigidGroup {
  int id = 0;
  std::vector<StandardAtom> atoms;

  friend bool operator==(const RigidGroup&, const RigidGroup&) = default;
};

inline constexpr int kNextResidue = -1;

struct BondEdge {
  int parent = 0;
  int child = 0;  // kNextResidue for the outbound connector
  TransformParams params;
  AngleSlot slot;
  bool sidechain_pre = false;  // apply the fixed out-of-plane rotation first

  friend bool operator==(const BondEdge&, const BondEdge&) = default;
};

struct ResidueTopology {
  std::string code3;
  char code1 = '?';
  std::vector<RigidGroup> groups;
  std::vector<BondEdge> edges;  // intra-residue tree
  std::optional<BondEdge> connector;

  const RigidGroup* find_group(int id) const;
  int root_group() const;  // group without an incoming edge, -1 if ambiguous
  int chi_count() const;
  int variable_slot_count() const;
  std::size_t atom_count() const;

  friend bool operator==(const ResidueTopology&, const ResidueTopology&) = default;
};

struct TopologyLibrary {
  std::map<std::string, ResidueTopology> residues;  // keyed by three-letter code
  double sidechain_rotation = kSidechainRotation;

  // Lookup by one- or three-letter code (case-sensitive, upper case).
  const ResidueTopology* find(std::string_view code) const;
  const ResidueTopology& at(std::string_view code) const;

  Transform<double> sidechain_pre_transform() const;

  friend bool operator==(const TopologyLibrary&, const TopologyLibrary&) = default;
};

struct Violation {
  std::string residue;
  int group = -1;  // -1 when the rule is not tied to a group
  std::string rule;
  std::string message;
};

struct TopologyOptions {
  bool require_standard_set = true;  // all 20 standard amino acids present
};

// Empty iff every invariant holds.
std::vector<Violation> validate(const TopologyLibrary& lib, const TopologyOptions& opts = {});

// Raised by parse_topology when the text is syntactically valid but violates
// an invariant.
class TopologyError : public Error {
 public:
  explicit TopologyError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<Violation> violations_;
};

TopologyLibrary parse_topology(std::string_view text, const TopologyOptions& opts = {});
std::string serialize_topology(const TopologyLibrary& lib);

std::string_view default_topology_text();
const TopologyLibrary& default_topology();

// The twenty standard residues in one-letter form, alphabetical.
inline constexpr std::string_view kStandardResidues = "ACDEFGHIKLMNPQRSTVWY";

}  // namespace protkin
