#include <gtest/gtest.h>

#include "protkin/backbone.hpp"
#include "protkin/bench.hpp"
#include "protkin/structio.hpp"

using namespace protkin;

namespace {

std::vector<std::string> atom_lines(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t end = text.find('\n', pos);
    const std::string line = text.substr(pos, end - pos);
    if (line.rfind("ATOM  ", 0) == 0) out.push_back(line);
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  return out;
}

}  // namespace

TEST(WritePdb, SingleAtomAtOrigin) {
  AtomicCoordinates c;
  c.positions = {Vec3d{}};
  c.atoms = {{"N", 0, "GLY"}};
  const std::string text = write_pdb(c);
  const auto lines = atom_lines(text);
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_EQ(lines[0], "ATOM      1  N   GLY A   1       0.000   0.000   0.000  1.00  0.00           N");
  EXPECT_EQ(lines[0].size(), 78u);
  EXPECT_NE(text.find("\nTER\nEND\n"), std::string::npos);
}

TEST(WritePdb, BackboneOrdering) {
  const auto out = bb_forward(BackboneAngles::trans({-1.0, -1.2}, {2.0, 0.3}));
  const auto lines = atom_lines(write_pdb(out.coords));
  ASSERT_EQ(lines.size(), 6u);
  const char* names[6] = {" N  ", " CA ", " C  ", " N  ", " CA ", " C  "};
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(lines[i].substr(12, 4), names[i]);
    EXPECT_EQ(std::stoi(lines[i].substr(22, 4)), i / 3 + 1);
    EXPECT_EQ(std::stoi(lines[i].substr(6, 5)), i + 1);
  }
}

TEST(WritePdb, ColumnOverflowAndBadFields) {
  AtomicCoordinates c;
  c.positions = {Vec3d{10000.0, 0, 0}};
  c.atoms = {{"N", 0, "GLY"}};
  EXPECT_THROW(write_pdb(c), FormatError);
  c.positions = {Vec3d{-9999.9996, 0, 0}};
  EXPECT_THROW(write_pdb(c), FormatError);
  c.positions = {Vec3d{9999.99, -999.999, 0}};
  EXPECT_NO_THROW(write_pdb(c));
  c.atoms[0].name = "TOOLONG";
  EXPECT_THROW(write_pdb(c), FormatError);
  c.atoms[0].name = "";
  EXPECT_THROW(write_pdb(c), FormatError);
  auto records = make_records(bb_forward(BackboneAngles::trans({0.1}, {0.2})).coords);
  records[2].serial = 2;
  EXPECT_THROW(write_pdb(records), FormatError);
}

TEST(WritePdb, Deterministic) {
  Rng rng(51);
  const auto out = bb_forward(random_backbone_angles(rng, 30));
  EXPECT_EQ(write_pdb(out.coords), write_pdb(out.coords));
}

TEST(ReadPdb, RoundTrip) {
  Rng rng(52);
  for (int k = 0; k < 100; ++k) {
    const auto out = bb_forward(random_backbone_angles(rng, 1 + k % 20));
    const PdbData back = read_pdb(write_pdb(out.coords, 'B'));
    ASSERT_EQ(back.coords.size(), out.coords.size());
    for (std::size_t i = 0; i < back.coords.size(); ++i) {
      EXPECT_LE(std::abs(back.coords.positions[i].x - out.coords.positions[i].x), 5e-4);
      EXPECT_LE(std::abs(back.coords.positions[i].y - out.coords.positions[i].y), 5e-4);
      EXPECT_LE(std::abs(back.coords.positions[i].z - out.coords.positions[i].z), 5e-4);
      EXPECT_EQ(back.coords.atoms[i].name, out.coords.atoms[i].name);
      EXPECT_EQ(back.coords.atoms[i].residue_index, out.coords.atoms[i].residue_index);
      EXPECT_EQ(back.records[i].chain_id, 'B');
    }
  }
}

TEST(ReadPdb, SkipsOtherRecords) {
  const std::string text =
      "HEADER    TEST\n"
      "HETATM    1  O   HOH A   1       1.000   2.000   3.000  1.00  0.00           O\n"
      "ATOM      2  CA  ALA A   5      -1.500   2.250  10.125  1.00  0.00           C\n"
      "ANISOU    2  CA  ALA A   5    1000   1000   1000      0      0      0       C\n"
      "END\n";
  const PdbData d = read_pdb(text);
  ASSERT_EQ(d.coords.size(), 1u);
  EXPECT_EQ(d.coords.positions[0], (Vec3d{-1.5, 2.25, 10.125}));
  EXPECT_EQ(d.records[0].residue_seq, 5);
  EXPECT_EQ(d.records[0].residue_code, "ALA");
  EXPECT_EQ(d.coords.atoms[0].residue_index, 0);
}

TEST(ReadPdb, Errors) {
  EXPECT_THROW(read_pdb("HETATM    1  O   HOH A   1       1.000   2.000   3.000  1.00  0.00           O\n"),
               InputError);
  EXPECT_THROW(read_pdb(""), InputError);
  const std::string bad =
      "ATOM      1  N   GLY A   1       0.000   0.000   0.000  1.00  0.00           N\n"
      "ATOM      2  CA  GLY A   1       abc.000   0.000   0.000  1.00  0.00           C\n";
  try {
    read_pdb(bad);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(read_pdb("ATOM      1  N   GLY A   1       0.000\n"), ParseError);
}

TEST(Angles, RoundTripIsExact) {
  Rng rng(53);
  for (int k = 0; k < 100; ++k) {
    const MoleculeGraph g = build_graph(random_sequence(rng, 1 + k % 15));
    FullAtomAngles a = random_full_atom_angles(rng, g);
    for (auto& r : a) r.omega = random_angle(rng);
    const FullAtomAngles back = read_angles(write_angles(a));
    ASSERT_EQ(back.size(), a.size());
    for (std::size_t r = 0; r < a.size(); ++r) {
      EXPECT_LE(std::abs(back[r].phi - a[r].phi), 1e-12);
      EXPECT_LE(std::abs(back[r].psi - a[r].psi), 1e-12);
      EXPECT_LE(std::abs(back[r].omega - a[r].omega), 1e-12);
      ASSERT_EQ(back[r].chi.size(), a[r].chi.size());
      for (std::size_t c = 0; c < a[r].chi.size(); ++c) EXPECT_LE(std::abs(back[r].chi[c] - a[r].chi[c]), 1e-12);
    }
  }
}

TEST(Angles, OmegaDefaultsToPi) {
  const FullAtomAngles a = read_angles("0 phi=0 psi=0\n");
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].omega, kPi);
  EXPECT_EQ(a[0].phi, 0.0);
  EXPECT_TRUE(a[0].chi.empty());
}

TEST(Angles, Errors) {
  EXPECT_THROW(read_angles("0 psi=0\n"), ParseError);
  EXPECT_THROW(read_angles("0 phi=0\n"), ParseError);
  EXPECT_THROW(read_angles("0 phi=0 psi=0\n0 phi=1 psi=1\n"), ParseError);
  EXPECT_THROW(read_angles("0 phi=0 psi=0 tau=1\n"), ParseError);
  EXPECT_THROW(read_angles("0 phi=0 psi=x\n"), ParseError);
  EXPECT_THROW(read_angles("0 phi=0 psi=0 phi=1\n"), ParseError);
  EXPECT_THROW(read_angles("0 phi=0 psi=0 chi2=1\n"), ParseError);
  EXPECT_THROW(read_angles("1 phi=0 psi=0\n"), ParseError);
  EXPECT_THROW(read_angles("0 phi=0 psi=nan\n"), ParseError);
  EXPECT_NO_THROW(read_angles("# comment\n\n1 phi=0 psi=0\n0 phi=1 psi=1 chi1=0.5  # trailing\n"));
}
