#include "protkin/topology.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>
#include <sstream>

namespace protkin {

namespace detail {
std::string_view bundled_topology_text();
}  // namespace detail

std::string AngleSlot::name() const {
  switch (kind) {
    case SlotKind::kPhi:
      return "phi";
    case SlotKind::kPsi:
      return "psi";
    case SlotKind::kOmega:
      return "omega";
    case SlotKind::kChi:
      return "chi" + std::to_string(chi);
    case SlotKind::kFixed:
      break;
  }
  return "fixed";
}

const RigidGroup* ResidueTopology::find_group(int id) const {
  for (const auto& g : groups) {
    if (g.id == id) return &g;
  }
  return nullptr;
}

int ResidueTopology::root_group() const {
  int root = -1;
  for (const auto& g : groups) {
    const bool has_parent = std::any_of(edges.begin(), edges.end(),
                                        [&](const BondEdge& e) { return e.child == g.id; });
    if (!has_parent) {
      if (root != -1) return -1;
      root = g.id;
    }
  }
  return root;
}

int ResidueTopology::chi_count() const {
  return static_cast<int>(std::count_if(edges.begin(), edges.end(), [](const BondEdge& e) {
    return e.slot.kind == SlotKind::kChi;
  }));
}

int ResidueTopology::variable_slot_count() const {
  int n = static_cast<int>(std::count_if(edges.begin(), edges.end(),
                                         [](const BondEdge& e) { return e.slot.is_variable(); }));
  if (connector && connector->slot.is_variable()) ++n;
  return n;
}

std::size_t ResidueTopology::atom_count() const {
  std::size_t n = 0;
  for (const auto& g : groups) n += g.atoms.size();
  return n;
}

const ResidueTopology* TopologyLibrary::find(std::string_view code) const {
  if (code.size() == 1) {
    for (const auto& [key, res] : residues) {
      if (res.code1 == code[0]) return &res;
    }
    return nullptr;
  }
  auto it = residues.find(std::string(code));
  return it == residues.end() ? nullptr : &it->second;
}

const ResidueTopology& TopologyLibrary::at(std::string_view code) const {
  if (const auto* r = find(code)) return *r;
  throw InputError("unknown residue code '" + std::string(code) + "'");
}

Transform<double> TopologyLibrary::sidechain_pre_transform() const {
  return rotation_x(sidechain_rotation);
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void check_residue(const ResidueTopology& res, std::vector<Violation>& out) {
  auto add = [&](int group, std::string rule, std::string message) {
    out.push_back({res.code3, group, std::move(rule), std::move(message)});
  };

  const bool code3_ok = res.code3.size() == 3 &&
                        std::all_of(res.code3.begin(), res.code3.end(),
                                    [](char c) { return c >= 'A' && c <= 'Z'; });
  if (!code3_ok || res.code1 < 'A' || res.code1 > 'Z') {
    add(-1, "residue-code", "residue codes must be 3 and 1 upper-case letters");
  }

  std::set<int> ids;
  std::set<std::string> names;
  for (const auto& g : res.groups) {
    if (!ids.insert(g.id).second) {
      add(g.id, "duplicate-group-id", "group id declared twice");
    }
    if (g.atoms.empty()) {
      add(g.id, "group-nonempty", "rigid group has no atoms");
      continue;
    }
    if (norm(g.atoms.front().position) >= 1e-9) {
      add(g.id, "first-atom-origin",
          "first atom '" + g.atoms.front().name + "' is not at the standard-frame origin");
    }
    for (const auto& a : g.atoms) {
      if (a.name.empty() || a.name.size() > 4) {
        add(g.id, "atom-name", "atom names must have 1 to 4 characters");
      }
      if (!names.insert(a.name).second) {
        add(g.id, "duplicate-atom", "atom '" + a.name + "' appears twice in the residue");
      }
    }
  }

  auto check_edge_params = [&](const BondEdge& e) {
    if (!(e.params.d > 0.0)) {
      add(e.child, "positive-bond-length",
          "edge " + std::to_string(e.parent) + "->" + std::to_string(e.child) +
              " has non-positive bond length " + std::to_string(e.params.d));
    }
    if (!(e.params.theta > 0.0 && e.params.theta < 2.0 * kPi)) {
      add(e.child, "theta-range", "edge theta outside (0, 2pi)");
    }
  };

  // Tree structure.
  std::map<int, int> parent_of;
  bool tree_ok = true;
  for (const auto& e : res.edges) {
    check_edge_params(e);
    if (!ids.contains(e.parent) || !ids.contains(e.child)) {
      add(e.child, "edge-unknown-group", "edge references an undeclared group");
      tree_ok = false;
      continue;
    }
    if (e.parent == e.child) {
      add(e.child, "tree", "edge from group " + std::to_string(e.child) + " to itself (cycle)");
      tree_ok = false;
      continue;
    }
    if (!parent_of.emplace(e.child, e.parent).second) {
      add(e.child, "tree", "group has more than one parent edge");
      tree_ok = false;
    }
  }
  if (res.edges.size() + 1 != res.groups.size()) {
    add(-1, "tree", "edge count must be group count minus one");
    tree_ok = false;
  }
  if (tree_ok) {
    std::vector<int> roots;
    for (int id : ids) {
      if (!parent_of.contains(id)) roots.push_back(id);
    }
    if (roots.size() != 1) {
      add(-1, "tree", "rigid groups must have exactly one root");
    } else {
      // Every group must reach the root by walking parents.
      for (int id : ids) {
        int cur = id;
        std::size_t steps = 0;
        while (cur != roots.front() && steps <= ids.size()) {
          cur = parent_of.at(cur);
          ++steps;
        }
        if (cur != roots.front()) {
          add(id, "tree", "group is not reachable from the root (cycle)");
          break;
        }
      }
    }
  }

  if (!res.connector) {
    add(-1, "connector", "residue has no outbound peptide connector");
  } else {
    check_edge_params(*res.connector);
    if (!ids.contains(res.connector->parent)) {
      add(-1, "edge-unknown-group", "connector starts at an undeclared group");
    }
    if (res.connector->slot.kind != SlotKind::kOmega) {
      add(-1, "backbone-slots", "connector must carry the omega slot");
    }
  }

  // Angle slots.
  int n_phi = 0, n_psi = 0, n_omega = 0;
  std::vector<int> chis;
  auto visit_slot = [&](const BondEdge& e, bool is_connector) {
    switch (e.slot.kind) {
      case SlotKind::kPhi:
        ++n_phi;
        if (e.params != kNCaBond) add(e.child, "backbone-constants", "phi edge must use the N-CA constants");
        break;
      case SlotKind::kPsi:
        ++n_psi;
        if (e.params != kCaCBond) add(e.child, "backbone-constants", "psi edge must use the CA-C constants");
        break;
      case SlotKind::kOmega:
        ++n_omega;
        if (!is_connector) add(e.child, "backbone-slots", "omega may only label the connector");
        if (e.params != kPeptideBond) add(-1, "backbone-constants", "omega edge must use the C-N constants");
        break;
      case SlotKind::kChi:
        chis.push_back(e.slot.chi);
        break;
      case SlotKind::kFixed:
        break;
    }
  };
  for (const auto& e : res.edges) visit_slot(e, false);
  if (res.connector) visit_slot(*res.connector, true);
  if (n_phi != 1 || n_psi != 1 || n_omega != 1) {
    add(-1, "backbone-slots", "residue needs exactly one phi, psi and omega slot");
  }
  std::sort(chis.begin(), chis.end());
  for (std::size_t k = 0; k < chis.size(); ++k) {
    if (chis[k] != static_cast<int>(k) + 1) {
      add(-1, "chi-prefix", "chi slots must be chi1..chik without gaps or repeats");
      break;
    }
  }
  if (!chis.empty() && chis.back() > kMaxChi) {
    add(-1, "chi-range", "chi index above " + std::to_string(kMaxChi));
  }
  if ((res.code3 == "GLY" || res.code3 == "ALA") && !chis.empty()) {
    add(-1, "no-chi", res.code3 + " carries no side-chain dihedrals");
  }
  if (res.variable_slot_count() > kMaxVariableSlots) {
    add(-1, "max-variable-slots", "more than " + std::to_string(kMaxVariableSlots) +
                                      " variable dihedral angles (" +
                                      std::to_string(res.variable_slot_count()) + ")");
  }
}

}  // namespace

std::vector<Violation> validate(const TopologyLibrary& lib, const TopologyOptions& opts) {
  std::vector<Violation> out;
  std::set<char> one_letter;
  for (const auto& [key, res] : lib.residues) {
    if (key != res.code3) {
      out.push_back({res.code3, -1, "residue-code", "map key differs from three-letter code"});
    }
    if (!one_letter.insert(res.code1).second) {
      out.push_back({res.code3, -1, "residue-code", "one-letter code is not unique"});
    }
    check_residue(res, out);
  }
  if (opts.require_standard_set) {
    for (char c : kStandardResidues) {
      if (!one_letter.contains(c)) {
        out.push_back({std::string(1, c), -1, "missing-residue",
                       std::string("standard residue '") + c + "' is missing"});
      }
    }
  }
  return out;
}

TopologyError::TopologyError(std::vector<Violation> violations)
    : Error([&] {
        std::string msg = "invalid topology";
        for (const auto& v : violations) {
          msg += "\n  " + v.residue;
          if (v.group >= 0) msg += " group " + std::to_string(v.group);
          msg += " [" + v.rule + "] " + v.message;
        }
        return msg;
      }()),
      violations_(std::move(violations)) {}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Token {
  std::string_view text;
  int column;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

double parse_real(std::string_view s, int line, int column) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || s.empty()) {
    throw ParseError("malformed number '" + std::string(s) + "'", line, column);
  }
  return v;
}

int parse_int(std::string_view s, int line, int column) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError("malformed integer '" + std::string(s) + "'", line, column);
  }
  return v;
}

double parse_theta(std::string_view s, int line, int column) {
  if (s.starts_with("pi-")) return kPi - parse_real(s.substr(3), line, column + 3);
  return parse_real(s, line, column);
}

AngleSlot parse_slot(const Token& tok, int line) {
  const std::string_view s = tok.text;
  if (s == "phi") return AngleSlot::phi();
  if (s == "psi") return AngleSlot::psi();
  if (s == "omega") return AngleSlot::omega();
  if (s.starts_with("chi")) {
    const int k = parse_int(s.substr(3), line, tok.column + 3);
    if (k < 1 || k > kMaxChi) throw ParseError("unknown slot '" + std::string(s) + "'", line, tok.column);
    return AngleSlot::chi_slot(k);
  }
  if (s.starts_with("fixed=")) return AngleSlot::fixed(parse_real(s.substr(6), line, tok.column + 6));
  throw ParseError("unknown slot '" + std::string(s) + "'", line, tok.column);
}

}  // namespace

TopologyLibrary parse_topology(std::string_view text, const TopologyOptions& opts) {
  TopologyLibrary lib;
  ResidueTopology* current = nullptr;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto toks = tokenize(line);
    if (toks.empty()) continue;

    const auto expect_count = [&](std::size_t lo, std::size_t hi) {
      if (toks.size() < lo || toks.size() > hi) {
        throw ParseError("wrong number of fields for " + std::string(toks[0].text), line_no,
                         toks[0].column);
      }
    };
    const auto require_residue = [&] {
      if (!current) throw ParseError("record outside a RESIDUE block", line_no, toks[0].column);
    };

    const std::string_view kw = toks[0].text;
    if (kw == "RESIDUE") {
      expect_count(3, 3);
      if (toks[2].text.size() != 1) {
        throw ParseError("one-letter code must be a single character", line_no, toks[2].column);
      }
      ResidueTopology res;
      res.code3 = std::string(toks[1].text);
      res.code1 = toks[2].text[0];
      auto [it, inserted] = lib.residues.emplace(res.code3, std::move(res));
      if (!inserted) {
        throw ParseError("duplicate residue '" + std::string(toks[1].text) + "'", line_no, toks[1].column);
      }
      current = &it->second;
    } else if (kw == "GROUP") {
      require_residue();
      expect_count(2, 2);
      const int id = parse_int(toks[1].text, line_no, toks[1].column);
      if (current->find_group(id)) {
        throw ParseError("duplicate group id " + std::to_string(id), line_no, toks[1].column);
      }
      current->groups.push_back({id, {}});
    } else if (kw == "ATOM") {
      require_residue();
      expect_count(6, 6);
      const int id = parse_int(toks[1].text, line_no, toks[1].column);
      auto it = std::find_if(current->groups.begin(), current->groups.end(),
                             [&](const RigidGroup& g) { return g.id == id; });
      if (it == current->groups.end()) {
        throw ParseError("atom refers to undeclared group " + std::to_string(id), line_no, toks[1].column);
      }
      it->atoms.push_back({std::string(toks[2].text),
                           {parse_real(toks[3].text, line_no, toks[3].column),
                            parse_real(toks[4].text, line_no, toks[4].column),
                            parse_real(toks[5].text, line_no, toks[5].column)}});
    } else if (kw == "EDGE") {
      require_residue();
      expect_count(6, 7);
      BondEdge e;
      e.parent = parse_int(toks[1].text, line_no, toks[1].column);
      const bool is_connector = toks[2].text == "next";
      e.child = is_connector ? kNextResidue : parse_int(toks[2].text, line_no, toks[2].column);
      e.slot = parse_slot(toks[3], line_no);
      bool have_theta = false, have_d = false;
      for (std::size_t k = 4; k < toks.size(); ++k) {
        const auto& t = toks[k];
        if (t.text.starts_with("theta=")) {
          e.params.theta = parse_theta(t.text.substr(6), line_no, t.column + 6);
          have_theta = true;
        } else if (t.text.starts_with("d=")) {
          e.params.d = parse_real(t.text.substr(2), line_no, t.column + 2);
          have_d = true;
        } else if (t.text == "pre=sidechain") {
          e.sidechain_pre = true;
        } else {
          throw ParseError("unexpected field '" + std::string(t.text) + "'", line_no, t.column);
        }
      }
      if (!have_theta || !have_d) throw ParseError("edge needs theta= and d=", line_no, toks[0].column);
      if (is_connector) {
        if (current->connector) throw ParseError("second connector edge", line_no, toks[2].column);
        current->connector = e;
      } else {
        current->edges.push_back(e);
      }
    } else {
      throw ParseError("unknown record '" + std::string(kw) + "'", line_no, toks[0].column);
    }
  }

  if (auto violations = validate(lib, opts); !violations.empty()) {
    throw TopologyError(std::move(violations));
  }
  return lib;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

// Thetas that were written as pi-x round trip bit-exactly when written the
// same way.
std::string theta_text(double theta) {
  const std::string supplement = fixed6(kPi - theta);
  double x = 0.0;
  std::from_chars(supplement.data(), supplement.data() + supplement.size(), x);
  if (kPi - x == theta) return "pi-" + supplement;
  return fixed6(theta);
}

std::string slot_text(const AngleSlot& s) {
  if (s.kind == SlotKind::kFixed) return "fixed=" + fixed6(s.fixed_value);
  return s.name();
}

void write_edge(std::ostringstream& os, const BondEdge& e) {
  os << "EDGE " << e.parent << ' ' << (e.child == kNextResidue ? std::string("next") : std::to_string(e.child))
     << ' ' << slot_text(e.slot) << " theta=" << theta_text(e.params.theta) << " d=" << fixed6(e.params.d);
  if (e.sidechain_pre) os << " pre=sidechain";
  os << '\n';
}

}  // namespace

std::string serialize_topology(const TopologyLibrary& lib) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [code, res] : lib.residues) {  // std::map keeps codes sorted
    if (!first) os << '\n';
    first = false;
    os << "RESIDUE " << res.code3 << ' ' << res.code1 << '\n';
    for (const auto& g : res.groups) {
      os << "GROUP " << g.id << '\n';
      for (const auto& a : g.atoms) {
        os << "ATOM " << g.id << ' ' << a.name << ' ' << fixed6(a.position.x) << ' ' << fixed6(a.position.y)
           << ' ' << fixed6(a.position.z) << '\n';
      }
    }
    for (const auto& e : res.edges) write_edge(os, e);
    if (res.connector) write_edge(os, *res.connector);
  }
  return os.str();
}

std::string_view default_topology_text() { return detail::bundled_topology_text(); }

const TopologyLibrary& default_topology() {
  static const TopologyLibrary lib = parse_topology(default_topology_text());
  return lib;
}

}  // namespace protkin
