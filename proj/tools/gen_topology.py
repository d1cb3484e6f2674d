#!/usr/bin/env python3
"""Regenerates data/topology.txt from ideal side-chain internal coordinates.

Each residue is assembled with the same bond-transform convention the library
uses, R(alpha, theta, d) = Ry(theta) Tx(d) Rx(alpha), so the rotation on an
edge P->X equals the dihedral G-P-X-Y of the atom Y downstream of X. Atom
positions are then expressed in the local frame of their rigid group.

    python3 tools/gen_topology.py > data/topology.txt
"""
import math
import sys

import numpy as np

PHI = (math.pi - 1.9391, 1.460)
PSI = (math.pi - 2.0610, 1.525)
OMEGA = (math.pi - 2.1186, 1.330)
SIDECHAIN_ROTATION = -math.radians(122.686)
CA_CB = 1.530
N_CA_CB = 110.5
C_O = 1.231
CA_C_O = 120.5


def rx(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[1, 0, 0, 0], [0, c, -s, 0], [0, s, c, 0], [0, 0, 0, 1.0]])


def ry(t):
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, 0, s, 0], [0, 1, 0, 0], [-s, 0, c, 0], [0, 0, 0, 1.0]])


def tx(d):
    m = np.eye(4)
    m[0, 3] = d
    return m


def bond(alpha, theta, d):
    return ry(theta) @ tx(d) @ rx(alpha)


def origin(m):
    return m[:3, 3].copy()


def place(a, b, c, length, angle_deg, dihedral_deg):
    """NeRF: atom bonded to c with angle b-c-x and dihedral a-b-c-x."""
    ang = math.radians(angle_deg)
    tor = math.radians(dihedral_deg)
    bc = c - b
    bc /= np.linalg.norm(bc)
    n = np.cross(b - a, bc)
    n /= np.linalg.norm(n)
    m = np.column_stack([bc, np.cross(n, bc), n])
    d2 = np.array([-length * math.cos(ang),
                   length * math.sin(ang) * math.cos(tor),
                   length * math.sin(ang) * math.sin(tor)])
    return c + m @ d2


def angle(a, b, c):
    u, v = a - b, c - b
    return math.acos(np.dot(u, v) / np.linalg.norm(u) / np.linalg.norm(v))


def dihedral(p0, p1, p2, p3):
    b0, b1, b2 = p0 - p1, p2 - p1, p3 - p2
    b1 = b1 / np.linalg.norm(b1)
    v = b0 - np.dot(b0, b1) * b1
    w = b2 - np.dot(b2, b1) * b1
    return math.atan2(np.dot(np.cross(b1, v), w), np.dot(v, w))


# name -> (one-letter, z-matrix, groups)
# z-matrix rows: (atom, a, b, c, length, angle, dihedral)
# group rows: (origin, members, slot, reference atom for the edge rotation)
RESIDUES = {
    "GLY": ("G", [], []),
    "ALA": ("A", [], [("CB", ["CB"], "fixed", None)]),
    "SER": ("S", [("OG", "N", "CA", "CB", 1.417, 110.773, -63.3)],
            [("CB", ["CB", "OG"], "chi1", "OG")]),
    "CYS": ("C", [("SG", "N", "CA", "CB", 1.808, 113.817, -62.2)],
            [("CB", ["CB", "SG"], "chi1", "SG")]),
    "THR": ("T", [("OG1", "N", "CA", "CB", 1.430, 109.18, 60.0),
                  ("CG2", "N", "CA", "CB", 1.530, 111.13, -60.3)],
            [("CB", ["CB", "OG1", "CG2"], "chi1", "OG1")]),
    "VAL": ("V", [("CG1", "N", "CA", "CB", 1.527, 110.7, 177.2),
                  ("CG2", "N", "CA", "CB", 1.527, 110.4, -63.3)],
            [("CB", ["CB", "CG1", "CG2"], "chi1", "CG1")]),
    "ILE": ("I", [("CG1", "N", "CA", "CB", 1.527, 110.7, 59.7),
                  ("CG2", "N", "CA", "CB", 1.527, 110.4, -61.6),
                  ("CD1", "CA", "CB", "CG1", 1.520, 113.97, 169.8)],
            [("CB", ["CB", "CG2"], "chi1", "CG1"),
             ("CG1", ["CG1", "CD1"], "chi2", "CD1")]),
    "LEU": ("L", [("CG", "N", "CA", "CB", 1.530, 116.10, -60.1),
                  ("CD1", "CA", "CB", "CG", 1.524, 110.27, 174.9),
                  ("CD2", "CA", "CB", "CG", 1.525, 110.58, 66.7)],
            [("CB", ["CB"], "chi1", "CG"),
             ("CG", ["CG", "CD1", "CD2"], "chi2", "CD1")]),
    "ASP": ("D", [("CG", "N", "CA", "CB", 1.520, 113.06, -66.4),
                  ("OD1", "CA", "CB", "CG", 1.250, 119.22, -46.7),
                  ("OD2", "CA", "CB", "CG", 1.250, 118.22, 133.3)],
            [("CB", ["CB"], "chi1", "CG"),
             ("CG", ["CG", "OD1", "OD2"], "chi2", "OD1")]),
    "ASN": ("N", [("CG", "N", "CA", "CB", 1.520, 112.62, -65.5),
                  ("OD1", "CA", "CB", "CG", 1.230, 120.85, -58.3),
                  ("ND2", "CA", "CB", "CG", 1.330, 116.48, 121.7)],
            [("CB", ["CB"], "chi1", "CG"),
             ("CG", ["CG", "OD1", "ND2"], "chi2", "OD1")]),
    "GLU": ("E", [("CG", "N", "CA", "CB", 1.520, 113.82, -63.8),
                  ("CD", "CA", "CB", "CG", 1.520, 113.31, -179.8),
                  ("OE1", "CB", "CG", "CD", 1.250, 119.02, -6.2),
                  ("OE2", "CB", "CG", "CD", 1.250, 118.08, 173.8)],
            [("CB", ["CB"], "chi1", "CG"),
             ("CG", ["CG"], "chi2", "CD"),
             ("CD", ["CD", "OE1", "OE2"], "chi3", "OE1")]),
    "GLN": ("Q", [("CG", "N", "CA", "CB", 1.520, 113.75, -60.2),
                  ("CD", "CA", "CB", "CG", 1.520, 112.78, -69.6),
                  ("OE1", "CB", "CG", "CD", 1.240, 120.86, -50.5),
                  ("NE2", "CB", "CG", "CD", 1.330, 116.50, 129.5)],
            [("CB", ["CB"], "chi1", "CG"),
             ("CG", ["CG"], "chi2", "CD"),
             ("CD", ["CD", "OE1", "NE2"], "chi3", "OE1")]),
    "LYS": ("K", [("CG", "N", "CA", "CB", 1.520, 113.83, -64.5),
                  ("CD", "CA", "CB", "CG", 1.520, 111.79, -178.1),
                  ("CE", "CB", "CG", "CD", 1.520, 111.30, -179.6),
                  ("NZ", "CG", "CD", "CE", 1.489, 111.90, 179.6)],
            [("CB", ["CB"], "chi1", "CG"),
             ("CG", ["CG"], "chi2", "CD"),
             ("CD", ["CD"], "chi3", "CE"),
             ("CE", ["CE", "NZ"], "chi4", "NZ")]),
    "ARG": ("R", [("CG", "N", "CA", "CB", 1.520, 113.83, -65.2),
                  ("CD", "CA", "CB", "CG", 1.520, 111.79, -179.2),
                  ("NE", "CB", "CG", "CD", 1.460, 111.68, -179.3),
                  ("CZ", "CG", "CD", "NE", 1.330, 124.79, -178.7),
                  ("NH1", "CD", "NE", "CZ", 1.330, 120.64, 0.0),
                  ("NH2", "CD", "NE", "CZ", 1.330, 119.63, 180.0)],
            [("CB", ["CB"], "chi1", "CG"),
             ("CG", ["CG"], "chi2", "CD"),
             ("CD", ["CD"], "chi3", "NE"),
             ("NE", ["NE", "CZ", "NH1", "NH2"], "chi4", "CZ")]),
    "MET": ("M", [("CG", "N", "CA", "CB", 1.520, 113.68, -64.4),
                  ("SD", "CA", "CB", "CG", 1.810, 112.69, -179.6),
                  ("CE", "CB", "CG", "SD", 1.790, 100.61, 70.1)],
            [("CB", ["CB"], "chi1", "CG"),
             ("CG", ["CG"], "chi2", "SD"),
             ("SD", ["SD", "CE"], "chi3", "CE")]),
    "HIS": ("H", [("CG", "N", "CA", "CB", 1.490, 113.74, -63.2),
                  ("ND1", "CA", "CB", "CG", 1.380, 122.85, -75.7),
                  ("CD2", "CA", "CB", "CG", 1.360, 130.61, 104.3),
                  ("CE1", "CB", "CG", "ND1", 1.320, 108.5, 180.0),
                  ("NE2", "CB", "CG", "CD2", 1.350, 108.5, 180.0)],
            [("CB", ["CB"], "chi1", "CG"),
             ("CG", ["CG", "ND1", "CD2", "CE1", "NE2"], "chi2", "ND1")]),
    "PHE": ("F", [("CG", "N", "CA", "CB", 1.500, 114.54, -64.7),
                  ("CD1", "CA", "CB", "CG", 1.390, 120.0, 93.3),
                  ("CD2", "CA", "CB", "CG", 1.390, 120.0, -86.7),
                  ("CE1", "CB", "CG", "CD1", 1.390, 120.0, 180.0),
                  ("CE2", "CB", "CG", "CD2", 1.390, 120.0, 180.0),
                  ("CZ", "CG", "CD1", "CE1", 1.390, 120.0, 0.0)],
            [("CB", ["CB"], "chi1", "CG"),
             ("CG", ["CG", "CD1", "CD2", "CE1", "CE2", "CZ"], "chi2", "CD1")]),
    "TYR": ("Y", [("CG", "N", "CA", "CB", 1.510, 114.8, -64.3),
                  ("CD1", "CA", "CB", "CG", 1.390, 120.98, 93.1),
                  ("CD2", "CA", "CB", "CG", 1.390, 120.82, -86.9),
                  ("CE1", "CB", "CG", "CD1", 1.390, 120.0, 180.0),
                  ("CE2", "CB", "CG", "CD2", 1.390, 120.0, 180.0),
                  ("CZ", "CG", "CD1", "CE1", 1.390, 120.0, 0.0),
                  ("OH", "CD1", "CE1", "CZ", 1.390, 120.0, 180.0)],
            [("CB", ["CB"], "chi1", "CG"),
             ("CG", ["CG", "CD1", "CD2", "CE1", "CE2", "CZ", "OH"], "chi2", "CD1")]),
    "TRP": ("W", [("CG", "N", "CA", "CB", 1.500, 114.10, -66.4),
                  ("CD1", "CA", "CB", "CG", 1.370, 127.07, 96.3),
                  ("CD2", "CA", "CB", "CG", 1.430, 126.66, -83.7),
                  ("NE1", "CB", "CG", "CD1", 1.380, 108.5, 180.0),
                  ("CE2", "CB", "CG", "CD2", 1.400, 108.5, 180.0),
                  ("CE3", "CB", "CG", "CD2", 1.400, 133.83, 0.0),
                  ("CZ2", "CG", "CD2", "CE2", 1.400, 120.0, 180.0),
                  ("CZ3", "CG", "CD2", "CE3", 1.400, 120.0, 180.0),
                  ("CH2", "CD2", "CE2", "CZ2", 1.400, 120.0, 0.0)],
            [("CB", ["CB"], "chi1", "CG"),
             ("CG", ["CG", "CD1", "CD2", "NE1", "CE2", "CE3", "CZ2", "CZ3", "CH2"],
              "chi2", "CD1")]),
    "PRO": ("P", [("CG", "N", "CA", "CB", 1.490, 104.21, 29.6),
                  ("CD", "CA", "CB", "CG", 1.500, 105.03, -34.8)],
            [("CB", ["CB", "CG", "CD"], "fixed", "CG")]),
}


def fmt(v):
    s = "%.6f" % v
    return "0.000000" if s == "-0.000000" else s


def theta_text(theta, supplement):
    if supplement is not None:
        return "pi-%.6f" % supplement
    return fmt(theta)


def build(name):
    one, zmat, sc_groups = RESIDUES[name]
    frames = {}
    pos = {}
    frames["N"] = np.eye(4)
    frames["CA"] = frames["N"] @ bond(0.0, *PHI)
    frames["C"] = frames["CA"] @ bond(0.0, *PSI)
    theta_o = math.radians(CA_C_O) + math.pi
    frames["O"] = frames["C"] @ bond(0.0, theta_o, C_O)
    for k in ("N", "CA", "C", "O"):
        pos[k] = origin(frames[k])
    theta_cb = round(math.pi - math.radians(N_CA_CB), 6)
    pre = rx(SIDECHAIN_ROTATION)
    if sc_groups:
        cb_base = frames["CA"] @ pre @ bond(0.0, theta_cb, CA_CB)
        pos["CB"] = origin(cb_base)
    for atom, a, b, c, length, ang, tor in zmat:
        pos[atom] = place(pos[a], pos[b], pos[c], length, ang, tor)

    edges = []
    groups = [("N", ["N"]), ("CA", ["CA"])]
    for i, (orig, members, slot, ref) in enumerate(sc_groups):
        parent = "CA" if i == 0 else sc_groups[i - 1][0]
        grand = "N" if parent == "CA" else ("CA" if i == 1 else sc_groups[i - 2][0])
        d = float(np.linalg.norm(pos[orig] - pos[parent]))
        theta = math.pi - angle(pos[grand], pos[parent], pos[orig])
        alpha = 0.0 if ref is None else dihedral(pos[grand], pos[parent], pos[orig], pos[ref])
        if i == 0:
            d, theta = CA_CB, theta_cb
            base = frames["CA"] @ pre
        else:
            d, theta = round(d, 6), round(theta, 6)
            base = frames[parent]
        alpha = round(alpha, 6)
        frames[orig] = base @ bond(alpha, theta, d)
        if slot == "fixed":
            slot_txt = "fixed=%s" % fmt(alpha)
        else:
            slot_txt = slot
        edges.append((parent, orig, slot_txt, theta_text(theta, None), d, i == 0))
        groups.append((orig, members))
    groups.append(("C", ["C"]))
    groups.append(("O", ["O"]))

    ids = {g[0]: k for k, g in enumerate(groups)}
    lines = ["RESIDUE %s %s" % (name, one)]
    for key, members in groups:
        lines.append("GROUP %d" % ids[key])
        inv = np.linalg.inv(frames[key])
        for atom in members:
            local = (inv @ np.append(pos[atom], 1.0))[:3]
            if atom == key:
                assert np.linalg.norm(local) < 1e-5, (name, atom, local)
                local = np.zeros(3)
            lines.append("ATOM %d %s %s %s %s" % (ids[key], atom, *(fmt(v) for v in local)))
    lines.append("EDGE %d %d phi theta=%s d=%s" % (ids["N"], ids["CA"], theta_text(0, 1.9391), fmt(1.460)))
    for parent, child, slot_txt, theta_txt, d, is_cb in edges:
        lines.append("EDGE %d %d %s theta=%s d=%s%s" % (
            ids[parent], ids[child], slot_txt, theta_txt, fmt(d), " pre=sidechain" if is_cb else ""))
    lines.append("EDGE %d %d psi theta=%s d=%s" % (ids["CA"], ids["C"], theta_text(0, 2.0610), fmt(1.525)))
    lines.append("EDGE %d %d fixed=0.000000 theta=%s d=%s" % (ids["C"], ids["O"], fmt(round(theta_o, 6)), fmt(C_O)))
    lines.append("EDGE %d next omega theta=%s d=%s" % (ids["C"], theta_text(0, 2.1186), fmt(1.330)))

    if "CB" in pos:
        chir = math.degrees(dihedral(pos["N"], pos["C"], pos["CA"], pos["CB"]))
        assert chir > 0, (name, chir)
    return lines


def main():
    out = ["# Rigid-group topology for the 20 standard amino acids (heavy atoms).",
           "# Generated by tools/gen_topology.py; lengths in angstrom, angles in radians.",
           "# Edge transform: Ry(theta) Tx(d) Rx(alpha); pre=sidechain inserts the fixed",
           "# out-of-plane rotation about x that orients L side chains.",
           ""]
    for name in sorted(RESIDUES):
        out.extend(build(name))
        out.append("")
    sys.stdout.write("\n".join(out))


if __name__ == "__main__":
    main()
