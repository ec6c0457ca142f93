"""Hyperbolic surface H^2 / rho, realised by equivariant maps into the disk."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import disk
from ..surface.octagon import invert_word, pairing_matrices, relator_word, word_matrix
from .base import STRICTLY_NEGATIVE, StepTooLarge, Target

# Cayley transform z -> (z - i)/(z + i) from the upper half plane to the disk
CAYLEY = np.array([[1, -1j], [1, 1j]], dtype=complex)
CAYLEY_INV = np.linalg.inv(CAYLEY)
LETTERS = "abcd"
NAMES = ("A1", "B1", "A2", "B2")
DISK_EDGE = 1 - 1e-12


class InvalidRepresentation(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FuchsianRep:
    """Images of the generators a, b, c, d (= A1, B1, A2, B2) in SL(2, R)."""
    A1: np.ndarray
    B1: np.ndarray
    A2: np.ndarray
    B2: np.ndarray

    def __post_init__(self):
        for name in NAMES:
            m = np.array(getattr(self, name), dtype=float)
            if m.shape != (2, 2):
                raise InvalidRepresentation(f"{name} is not 2x2")
            object.__setattr__(self, name, m)
        self.validate()

    def matrices(self):
        return dict(zip(LETTERS, (self.A1, self.B1, self.A2, self.B2)))

    def disk_matrices(self):
        return {k: CAYLEY @ m @ CAYLEY_INV for k, m in self.matrices().items()}

    def validate(self, det_tol=1e-12, rel_tol=1e-8):
        for name in NAMES:
            m = getattr(self, name)
            if abs(np.linalg.det(m) - 1) > det_tol:
                raise InvalidRepresentation(f"det {name} != 1")
            if abs(np.trace(m)) <= 2:
                raise InvalidRepresentation(f"{name} is not hyperbolic")
        r = word_matrix({k: v.astype(complex) for k, v in self.matrices().items()},
                        relator_word()).real
        if min(np.linalg.norm(r - np.eye(2), 2), np.linalg.norm(r + np.eye(2), 2)) > rel_tol:
            raise InvalidRepresentation("relator [A1,B1][A2,B2] != +-I")

    @classmethod
    def from_disk(cls, gens):
        out = []
        for k in LETTERS:
            m = CAYLEY_INV @ np.asarray(gens[k]) @ CAYLEY
            m = m / np.sqrt(np.linalg.det(m))
            if np.abs(m.imag).max() > 1e-10:
                # the square root picked the purely imaginary branch
                m = m * 1j
            out.append(m.real)
        return cls(*out)

    def dumps(self):
        lines = []
        for name in NAMES:
            m = getattr(self, name)
            lines.append(name + " " + " ".join(repr(float(x)) for x in m.reshape(-1)))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text):
        mats = {}
        for line in text.strip().splitlines():
            parts = line.split()
            if len(parts) != 5 or parts[0] not in NAMES:
                raise InvalidRepresentation(f"bad line {line!r}")
            mats[parts[0]] = np.array([float(x) for x in parts[1:]]).reshape(2, 2)
        if set(mats) != set(NAMES):
            raise InvalidRepresentation("missing generator")
        return cls(*(mats[n] for n in NAMES))


def octagon_rep():
    """The Fuchsian group of the regular octagon surface (identity class)."""
    return FuchsianRep.from_disk(pairing_matrices())


def deck_transform(rep, word, p):
    m = word_matrix(rep.disk_matrices(), word)
    return disk.mobius(m, p)


class HyperbolicQuotient(Target):
    curvature_class = STRICTLY_NEGATIVE
    point_ndim = 0

    def __init__(self, rep=None):
        self.rep = octagon_rep() if rep is None else rep
        self._gens = self.rep.disk_matrices()
        self._cache = {}

    def key(self):
        return ("hyperbolic", self.rep.dumps())

    def word_matrices(self, words):
        out = np.empty((len(words), 2, 2), dtype=complex)
        memo = {}
        for n, w in enumerate(words):
            if w not in memo:
                memo[w] = word_matrix(self._gens, w)
            out[n] = memo[w]
        return out

    def _mesh_data(self, mesh):
        k = mesh.digest()
        if k not in self._cache:
            if mesh.corner_words is None:
                raise ValueError("mesh carries no group words for an equivariant map")
            R = self.word_matrices(mesh.edge_words())
            C = self.word_matrices([w for ws in mesh.corner_words for w in ws])
            self._cache[k] = (R, disk.inverse(R), C.reshape(mesh.n_faces, 3, 2, 2))
        return self._cache[k]

    # geometry ------------------------------------------------------------
    def constraint_residual(self, p):
        return np.maximum(np.abs(p) - DISK_EDGE, 0.0)

    def distance(self, p, q):
        return disk.distance(p, q)

    def log_map(self, p, q):
        return disk.log(p, q)

    def retract(self, p, v):
        q = disk.exp(p, v)
        if np.any(np.abs(q) > DISK_EDGE):
            raise StepTooLarge("step left the numerical range of the disk model")
        return q

    exp = retract

    def project_tangent(self, p, v):
        return np.asarray(v, dtype=complex)

    def tangent_coords(self, p, v):
        return np.asarray(v, dtype=complex)

    def from_tangent_coords(self, p, c):
        return np.asarray(c, dtype=complex)

    def transport(self, p, q, v):
        """Parallel transport along the geodesic p -> q (unit frames)."""
        T = disk.to_origin(p)
        X = disk.inverse(T) @ disk.from_origin(disk.mobius(T, q)) @ T
        rot = disk.mobius_deriv(X, p)
        return v * rot / np.abs(rot)

    def face_base(self, pts, iters=3):
        b = pts[..., 0]
        for _ in range(iters):
            T = disk.to_origin(b)
            w = disk.mobius(T[..., None, :, :], pts).mean(axis=-1)
            b = disk.mobius(disk.inverse(T), w)
        return b

    # equivariance --------------------------------------------------------
    def equivariance(self, mesh):
        return (self.rep.dumps(), tuple(mesh.edge_words()))

    def edge_neighbors(self, mesh, u):
        R, _, _ = self._mesh_data(mesh)
        i, j = mesh.edge_vertices[:, 0], mesh.edge_vertices[:, 1]
        return u[i], disk.mobius(R, u[j])

    def edge_neighbors_reverse(self, mesh, u):
        _, Rinv, _ = self._mesh_data(mesh)
        i, j = mesh.edge_vertices[:, 0], mesh.edge_vertices[:, 1]
        return u[j], disk.mobius(Rinv, u[i])

    def face_corners(self, mesh, u):
        _, _, C = self._mesh_data(mesh)
        return disk.mobius(C, u[mesh.faces])

    def edge_phases(self, mesh, u):
        R, _, _ = self._mesh_data(mesh)
        d = disk.mobius_deriv(R, u[mesh.edge_vertices[:, 1]])
        return d / np.abs(d)

    def deck(self, word, p):
        return disk.mobius(word_matrix(self._gens, word), p)

    def inverse_word(self, w):
        return invert_word(w)
