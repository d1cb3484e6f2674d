#pragma once

// Text formats: a fixed-column subset of PDB ATOM records for coordinates,
// and a line-oriented key=value format for dihedral angles in radians.

#include <string>
#include <string_view>
#include <vector>

#include "protkin/coords.hpp"
#include "protkin/full_atom.hpp"

namespace protkin {

struct AtomRecord {
  int serial = 1;
  std::string atom_name;
  std::string residue_code;
  char chain_id = 'A';
  int residue_seq = 1;
  Vec3d position;

  friend bool operator==(const AtomRecord&, const AtomRecord&) = default;
};

// Serials from 1, residues numbered residue_index + 1.
std::vector<AtomRecord> make_records(const AtomicCoordinates& coords, char chain_id = 'A');

// One ATOM line per record followed by TER and END. Throws FormatError when a
// value does not fit its column (|coordinate| >= 10000, long names, ...).
std::string write_pdb(const std::vector<AtomRecord>& records);
std::string write_pdb(const AtomicCoordinates& coords, char chain_id = 'A');

struct PdbData {
  AtomicCoordinates coords;
  std::vector<AtomRecord> records;
};

// Reads ATOM records only. Throws ParseError naming the line for malformed
// fields and InputError when there is no ATOM record at all.
PdbData read_pdb(std::string_view text);

// `<index> phi=<v> psi=<v> omega=<v> [chi1=<v> ...]`, 17 significant digits.
std::string write_angles(const FullAtomAngles& angles);

// Blank lines and `#` comments are ignored. omega defaults to pi. Indices
// must cover 0..n-1 exactly once and chi keys must form a prefix chi1..chik.
FullAtomAngles read_angles(std::string_view text);

}  // namespace protkin
