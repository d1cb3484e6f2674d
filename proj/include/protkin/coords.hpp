#pragma once

#include <span>
#include <string>
#include <vector>

#include "protkin/geometry.hpp"

namespace protkin {

struct AtomInfo {
  std::string name;
  int residue_index = 0;  // 0-based position in the sequence
  std::string residue_code;  // three-letter

  friend bool operator==(const AtomInfo&, const AtomInfo&) = default;
};

// Atom positions in angstrom with per-atom metadata; both vectors have the
// same length.
struct AtomicCoordinates {
  std::vector<Vec3d> positions;
  std::vector<AtomInfo> atoms;

  std::size_t size() const { return positions.size(); }
};

}  // namespace protkin
