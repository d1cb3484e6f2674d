#include "protkin/structio.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>

#include "protkin/errors.hpp"

namespace protkin {

std::vector<AtomRecord> make_records(const AtomicCoordinates& coords, char chain_id) {
  if (coords.atoms.size() != coords.positions.size()) {
    throw InputError("make_records: " + std::to_string(coords.positions.size()) + " positions but " +
                     std::to_string(coords.atoms.size()) + " atom records");
  }
  std::vector<AtomRecord> out;
  out.reserve(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const AtomInfo& a = coords.atoms[i];
    out.push_back({static_cast<int>(i + 1), a.name, a.residue_code, chain_id, a.residue_index + 1,
                   coords.positions[i]});
  }
  return out;
}

namespace {

std::string coordinate_field(double v, const AtomRecord& rec) {
  char buf[32];
  const int n = std::isfinite(v) && std::abs(v) < 10000.0 ? std::snprintf(buf, sizeof buf, "%8.3f", v) : 99;
  if (n != 8) {
    throw FormatError("write_pdb: coordinate " + std::to_string(v) + " of atom " + std::to_string(rec.serial) +
                      " does not fit the 8-column field");
  }
  return buf;
}

std::string element_of(const std::string& name) {
  for (char c : name) {
    if (std::isalpha(static_cast<unsigned char>(c))) return std::string(1, c);
  }
  return "";
}

}  // namespace

std::string write_pdb(const std::vector<AtomRecord>& records) {
  std::string out;
  out.reserve(records.size() * 81 + 16);
  int previous_serial = 0;
  for (const auto& rec : records) {
    if (rec.atom_name.empty() || rec.atom_name.size() > 4) {
      throw FormatError("write_pdb: atom name '" + rec.atom_name + "' must have 1 to 4 characters");
    }
    if (rec.residue_code.size() > 3) throw FormatError("write_pdb: residue code '" + rec.residue_code + "' too long");
    if (rec.serial <= previous_serial || rec.serial > 99999) {
      throw FormatError("write_pdb: serial " + std::to_string(rec.serial) + " out of order or out of range");
    }
    if (rec.residue_seq < -999 || rec.residue_seq > 9999) {
      throw FormatError("write_pdb: residue number " + std::to_string(rec.residue_seq) + " out of range");
    }
    previous_serial = rec.serial;
    // Names shorter than four characters start in column 14.
    const std::string name = rec.atom_name.size() < 4 ? " " + rec.atom_name : rec.atom_name;
    char head[32];
    std::snprintf(head, sizeof head, "ATOM  %5d %-4s %3s %c%4d    ", rec.serial, name.c_str(),
                  rec.residue_code.c_str(), rec.chain_id, rec.residue_seq);
    char tail[40];
    std::snprintf(tail, sizeof tail, "  1.00  0.00          %2s", element_of(rec.atom_name).c_str());
    out += head;
    out += coordinate_field(rec.position.x, rec);
    out += coordinate_field(rec.position.y, rec);
    out += coordinate_field(rec.position.z, rec);
    out += tail;
    out += '\n';
  }
  out += "TER\nEND\n";
  return out;
}

std::string write_pdb(const AtomicCoordinates& coords, char chain_id) {
  return write_pdb(make_records(coords, chain_id));
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Columns are 1-based and inclusive, as in the format description.
std::string_view columns(std::string_view line, std::size_t first, std::size_t last) {
  if (line.size() < first) return {};
  return line.substr(first - 1, std::min(last, line.size()) - first + 1);
}

template <class T>
T parse_field(std::string_view line, std::size_t first, std::size_t last, const char* what, int line_no) {
  const std::string_view field = trim(columns(line, first, last));
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(std::string("malformed ") + what + " field '" + std::string(field) + "'", line_no,
                     static_cast<int>(first));
  }
  return value;
}

}  // namespace

PdbData read_pdb(std::string_view text) {
  PdbData out;
  int line_no = 0;
  int residue_index = -1;
  std::optional<std::pair<char, int>> current_residue;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.substr(0, 6) != "ATOM  " && !(line.size() == 4 && line == "ATOM")) continue;
    if (line.size() < 54) {
      throw ParseError("ATOM record has " + std::to_string(line.size()) + " columns, need at least 54", line_no);
    }

    AtomRecord rec;
    rec.serial = parse_field<int>(line, 7, 11, "serial", line_no);
    rec.atom_name = std::string(trim(columns(line, 13, 16)));
    if (rec.atom_name.empty()) throw ParseError("empty atom name", line_no, 13);
    rec.residue_code = std::string(trim(columns(line, 18, 20)));
    rec.chain_id = line[21];
    rec.residue_seq = parse_field<int>(line, 23, 26, "residue number", line_no);
    rec.position.x = parse_field<double>(line, 31, 38, "x", line_no);
    rec.position.y = parse_field<double>(line, 39, 46, "y", line_no);
    rec.position.z = parse_field<double>(line, 47, 54, "z", line_no);

    const std::pair<char, int> key{rec.chain_id, rec.residue_seq};
    if (!current_residue || *current_residue != key) {
      ++residue_index;
      current_residue = key;
    }
    out.coords.positions.push_back(rec.position);
    out.coords.atoms.push_back({rec.atom_name, residue_index, rec.residue_code});
    out.records.push_back(std::move(rec));
  }
  if (out.records.empty()) throw InputError("read_pdb: no ATOM records");
  return out;
}

std::string write_angles(const FullAtomAngles& angles) {
  std::string out;
  char buf[64];
  auto field = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, " %s=%.17g", key, v);
    out += buf;
  };
  for (std::size_t r = 0; r < angles.size(); ++r) {
    out += std::to_string(r);
    field("phi", angles[r].phi);
    field("psi", angles[r].psi);
    field("omega", angles[r].omega);
    for (std::size_t k = 0; k < angles[r].chi.size(); ++k) {
      field(("chi" + std::to_string(k + 1)).c_str(), angles[r].chi[k]);
    }
    out += '\n';
  }
  return out;
}

FullAtomAngles read_angles(std::string_view text) {
  std::map<std::size_t, ResidueAngles> by_index;
  std::map<std::size_t, int> line_of;
  int line_no = 0;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    const std::string_view full_line = line;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    std::vector<std::pair<std::string_view, int>> tokens;  // token, 1-based column
    for (std::size_t i = 0; i < line.size();) {
      if (std::isspace(static_cast<unsigned char>(line[i]))) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      tokens.emplace_back(line.substr(i, j - i), static_cast<int>(i + 1));
      i = j;
    }
    if (tokens.empty()) continue;

    std::size_t index = 0;
    {
      const auto [tok, col] = tokens[0];
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), index);
      if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw ParseError("malformed residue index '" + std::string(tok) + "'", line_no, col);
      }
    }
    if (by_index.count(index)) {
      throw ParseError("duplicate residue index " + std::to_string(index) + " (first seen on line " +
                           std::to_string(line_of[index]) + ")",
                       line_no, tokens[0].second);
    }

    ResidueAngles a;
    std::optional<double> phi, psi, omega;
    std::map<int, double> chi;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const auto [tok, col] = tokens[t];
      const std::size_t eq = tok.find('=');
      if (eq == std::string_view::npos) throw ParseError("expected key=value, got '" + std::string(tok) + "'", line_no, col);
      const std::string_view key = tok.substr(0, eq);
      const std::string_view val = tok.substr(eq + 1);
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
      if (val.empty() || ec != std::errc() || ptr != val.data() + val.size() || !std::isfinite(v)) {
        throw ParseError("malformed number '" + std::string(val) + "' for " + std::string(key), line_no,
                         col + static_cast<int>(eq) + 1);
      }
      auto set_once = [&](std::optional<double>& slot) {
        if (slot) throw ParseError("repeated key " + std::string(key), line_no, col);
        slot = v;
      };
      if (key == "phi") {
        set_once(phi);
      } else if (key == "psi") {
        set_once(psi);
      } else if (key == "omega") {
        set_once(omega);
      } else if (key.size() > 3 && key.substr(0, 3) == "chi") {
        int k = 0;
        const auto [kp, kec] = std::from_chars(key.data() + 3, key.data() + key.size(), k);
        if (kec != std::errc() || kp != key.data() + key.size() || k < 1) {
          throw ParseError("unknown key '" + std::string(key) + "'", line_no, col);
        }
        if (!chi.emplace(k, v).second) throw ParseError("repeated key " + std::string(key), line_no, col);
      } else {
        throw ParseError("unknown key '" + std::string(key) + "'", line_no, col);
      }
    }
    if (!phi) throw ParseError("missing phi for residue " + std::to_string(index) + ": '" + std::string(full_line) + "'", line_no);
    if (!psi) throw ParseError("missing psi for residue " + std::to_string(index) + ": '" + std::string(full_line) + "'", line_no);
    a.phi = *phi;
    a.psi = *psi;
    if (omega) a.omega = *omega;
    int expected = 1;
    for (const auto& [k, v] : chi) {
      if (k != expected) throw ParseError("chi" + std::to_string(expected) + " missing before chi" + std::to_string(k), line_no);
      a.chi.push_back(v);
      ++expected;
    }
    by_index.emplace(index, std::move(a));
    line_of[index] = line_no;
  }

  FullAtomAngles out;
  out.reserve(by_index.size());
  for (auto& [index, a] : by_index) {
    if (index != out.size()) {
      throw ParseError("residue index " + std::to_string(out.size()) + " missing", line_of[index]);
    }
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace protkin
