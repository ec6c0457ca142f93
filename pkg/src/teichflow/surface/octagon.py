"""Regular hyperbolic octagon with the genus-2 side pairing a b a^-1 b^-1 c d c^-1 d^-1."""
from __future__ import annotations

from itertools import product

import numpy as np

from .. import disk
from .mesh import DegenerateTriangle, HalfedgeMesh, HypMetric

N_SIDES = 8
INTERIOR_ANGLE = np.pi / 4
GENERATORS = "abcd"
# side k+2 is glued onto side k by generator PAIRING[k]
PAIRING = {0: "a", 1: "b", 4: "c", 5: "d"}
# b and d name the inverse gluings, which puts the relator in commutator form
INVERTED = {"b", "d"}


def side_length():
    return 2 * np.arccosh(np.cos(np.pi / N_SIDES) / np.sin(INTERIOR_ANGLE / 2))


def circumradius():
    return np.arccosh(1 / (np.tan(np.pi / N_SIDES) * np.tan(INTERIOR_ANGLE / 2)))


def corners():
    r = np.tanh(circumradius() / 2)
    k = np.arange(N_SIDES)
    return r * np.exp(1j * (np.pi / N_SIDES + 2 * np.pi * k / N_SIDES))


def pairing_matrices():
    """SU(1,1) matrices of the four side pairings, keyed by generator letter."""
    P = corners()
    out = {}
    for k, g in PAIRING.items():
        m = disk.isometry_between(P[(k + 3) % 8], P[(k + 2) % 8], P[k], P[(k + 1) % 8])
        out[g] = disk.inverse(m) if g in INVERTED else m
    return out


def invert_word(w):
    return w[::-1].swapcase()


def reduce_word(w):
    out = []
    for ch in w:
        if out and out[-1] == ch.swapcase():
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def word_matrix(gens, w):
    m = disk.EYE.copy()
    for ch in w:
        g = gens[ch.lower()]
        m = m @ (disk.inverse(g) if ch.isupper() else g)
    return m


def relator_word():
    """The surface relator in the letter convention used here."""
    return "abABcdCD"


def _find_word(gens, src, dst, max_len=6):
    frontier = [("", src)]
    seen = [src]
    if abs(src - dst) < 1e-9:
        return ""
    letters = "abcdABCD"
    for _ in range(max_len):
        nxt = []
        for w, z in frontier:
            for ch in letters:
                w2 = ch + w
                z2 = complex(disk.mobius(word_matrix(gens, ch), z))
                if abs(z2 - dst) < 1e-9:
                    return w2
                if abs(z2) < 1 - 1e-6 and min(abs(z2 - s) for s in seen) > 1e-9:
                    seen.append(z2)
                    nxt.append((w2, z2))
        frontier = nxt
    raise RuntimeError("no group word found")


def _canonical(z, side, gens, P):
    """Canonical representative of a boundary point and the word w with
    w . canonical = z."""
    if side is None:
        return z, ""
    if side == "corner":
        k = int(np.argmin(np.abs(P - z)))
        return P[0], None  # resolved by search
    if side in PAIRING:
        return z, ""
    g = PAIRING[side - 2]
    w = g if g in INVERTED else g.upper()
    return complex(disk.mobius(word_matrix(gens, invert_word(w)), z)), w


def build_genus2_octagon(subdiv_level: int = 0, uniformize_tol: float = 1e-12):
    """Triangulated regular octagon surface and its hyperbolic edge lengths.

    Level 0 cuts the octagon into 16 equilateral triangles with all angles
    pi/4 (a corner triangle on the two half sides at every corner, and a
    centre fan over the inner right-angled octagon); each level splits
    every triangle into four by geodesic midpoints.
    """
    from .uniformize import uniformize

    if subdiv_level < 0 or 16 * 4 ** subdiv_level > 200_000:
        raise ValueError("subdiv_level out of range")
    gens = pairing_matrices()
    P = corners()
    # each triangle: three disk points plus side tag of each of its edges
    # edge k of a triangle joins corner k and corner k+1
    # triangle: (corner points, side tag of edge k (corner k -> k+1),
    #            tag of corner k: "corner", a side index, or None)
    tris = []
    M = np.array([complex(disk.midpoint(P[k], P[(k + 1) % 8])) for k in range(N_SIDES)])
    for k in range(N_SIDES):
        # corner triangle on the two half sides meeting at P_k
        tris.append(((M[k - 1], P[k], M[k]), ((k - 1) % 8, k, None), ((k - 1) % 8, "corner", k)))
        # centre fan over the inner right-angled octagon
        tris.append(((0j, M[k - 1], M[k]), (None, None, None), (None, (k - 1) % 8, k)))
    for (z0, z1, z2), _, _ in tris:
        if ((z1 - z0).conjugate() * (z2 - z0)).imag <= 0:
            raise RuntimeError("base triangle is not counter-clockwise")
    for _ in range(subdiv_level):
        new = []
        for (z0, z1, z2), (s0, s1, s2), (t0, t1, t2) in tris:
            m01 = complex(disk.midpoint(z0, z1))
            m12 = complex(disk.midpoint(z1, z2))
            m20 = complex(disk.midpoint(z2, z0))
            new.append(((z0, m01, m20), (s0, None, s2), (t0, s0, s2)))
            new.append(((m01, z1, m12), (s0, s1, None), (s0, t1, s1)))
            new.append(((m20, m12, z2), (None, s1, s2), (s2, s1, t2)))
            new.append(((m01, m12, m20), (None, None, None), (s0, s1, s2)))
        tris = new

    corner_word = {}
    for k in range(N_SIDES):
        corner_word[k] = _find_word(gens, P[0], P[k])

    vkey = {}
    vlift = []
    faces = []
    face_words = []
    for (zs, ss, ts) in tris:
        ids = []
        words = []
        for c in range(3):
            z = zs[c]
            if ts[c] == "corner":
                k = int(np.argmin(np.abs(P - z)))
                canon, word = P[0], corner_word[k]
            else:
                canon, word = _canonical(z, ts[c], gens, P)
            key = (round(canon.real, 9), round(canon.imag, 9))
            if key not in vkey:
                vkey[key] = len(vlift)
                vlift.append(canon)
            ids.append(vkey[key])
            words.append(word)
        faces.append(ids)
        face_words.append(words)

    ekey = {}
    face_edges = []
    lengths = []
    for (zs, ss, _) in tris:
        row = []
        for c in range(3):
            z0, z1 = zs[c], zs[(c + 1) % 3]
            m = complex(disk.midpoint(z0, z1))
            s = ss[c]
            if s is not None and s not in PAIRING:
                m, _ = _canonical(m, s, gens, P)
            key = (round(m.real, 9), round(m.imag, 9))
            if key not in ekey:
                ekey[key] = len(lengths)
                lengths.append(float(disk.distance(z0, z1)))
            row.append(ekey[key])
        face_edges.append(row)

    loops = _side_loops(tris, faces, P)
    mesh = HalfedgeMesh(np.array(faces), np.array(face_edges), len(vlift), genus=2,
                        generator_loops=loops, corner_words=face_words,
                        vertex_lift=np.array(vlift))
    mesh.check()
    g = HypMetric(np.array(lengths))
    g = uniformize(mesh, g, tol=uniformize_tol)
    return mesh, g


def _side_loops(tris, faces, P):
    """Vertex cycles along octagon sides 0, 1, 4, 5 (one per generator)."""
    loops = []
    for side in PAIRING:
        pts = []
        for (zs, ss, _), ids in zip(tris, faces):
            for c in range(3):
                if ss[c] == side:
                    pts.append((zs[c], ids[c]))
                    pts.append((zs[(c + 1) % 3], ids[(c + 1) % 3]))
        start = P[side]
        uniq = {}
        for z, v in pts:
            uniq[(round(z.real, 12), round(z.imag, 12))] = (z, v)
        ordered = sorted(uniq.values(), key=lambda zv: float(disk.distance(start, zv[0])))
        loops.append([v for _, v in ordered])
    return loops
