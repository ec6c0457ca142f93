"""Halfedge combinatorics and per-edge hyperbolic metrics.

Halfedge ``3*f + k`` runs from corner ``k`` to corner ``(k+1) % 3`` of face
``f``; the edge opposite corner ``k`` is therefore halfedge ``3*f + (k+1) % 3``.
Loops and parallel edges are allowed (they occur on coarse quotient
meshes), so all adjacency goes through explicit edge ids, never vertex
pairs.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np


class MeshError(ValueError):
    pass


class DegenerateTriangle(MeshError):
    def __init__(self, face, lengths=None):
        self.face = face
        super().__init__(f"degenerate triangle at face {face}: lengths {lengths}")


@dataclass(eq=False)
class HalfedgeMesh:
    faces: np.ndarray            # (F, 3) vertex ids, counter-clockwise
    face_edges: np.ndarray       # (F, 3) edge id of halfedge 3f+k
    n_vertices: int
    genus: int
    generator_loops: list = field(default_factory=list)
    # group word per corner: lift of corner (f, k) = word . lift of vertex
    corner_words: list | None = None
    vertex_lift: np.ndarray | None = None  # canonical disk position (provenance)

    def __post_init__(self):
        self.faces = np.asarray(self.faces, dtype=np.int64)
        self.face_edges = np.asarray(self.face_edges, dtype=np.int64)
        self._build()

    def _build(self):
        F = len(self.faces)
        he_edge = self.face_edges.reshape(-1)
        E = int(he_edge.max()) + 1
        counts = np.bincount(he_edge, minlength=E)
        if np.any(counts != 2):
            bad = int(np.flatnonzero(counts != 2)[0])
            raise MeshError(f"edge {bad} has {counts[bad]} incident halfedges")
        order = np.argsort(he_edge, kind="stable")
        twin = np.empty(3 * F, dtype=np.int64)
        twin[order[0::2]] = order[1::2]
        twin[order[1::2]] = order[0::2]
        self.twin = twin
        self.origin = self.faces.reshape(-1)
        k = np.arange(3 * F) % 3
        self.next = 3 * (np.arange(3 * F) // 3) + (k + 1) % 3
        self.dest = self.origin[self.next]
        if np.any(self.origin[twin] != self.dest):
            raise MeshError("inconsistent orientation across an edge")
        self.he_edge = he_edge
        self.n_edges = E
        # one halfedge per edge, pointing in a fixed direction
        self.edge_he = order[0::2]
        self.edge_vertices = np.stack(
            [self.origin[self.edge_he], self.dest[self.edge_he]], axis=1)

    @property
    def n_faces(self):
        return len(self.faces)

    def euler_characteristic(self):
        return self.n_vertices - self.n_edges + self.n_faces

    def outgoing(self):
        """Outgoing halfedges of every vertex in counter-clockwise fan order."""
        V = self.n_vertices
        start = np.full(V, -1, dtype=np.int64)
        start[self.origin[::-1]] = np.arange(3 * self.n_faces)[::-1]
        prev = self.next[self.next]
        fans = []
        for v in range(V):
            h0 = start[v]
            fan = [h0]
            h = self.twin[prev[h0]]
            while h != h0:
                fan.append(h)
                h = self.twin[prev[h]]
                if len(fan) > 3 * self.n_faces:
                    raise MeshError(f"vertex {v} is not a manifold vertex")
            fans.append(np.array(fan))
        return fans

    def check(self):
        if self.euler_characteristic() != 2 - 2 * self.genus:
            raise MeshError("Euler characteristic does not match genus")
        fans = self.outgoing()
        if sum(len(f) for f in fans) != 3 * self.n_faces:
            raise MeshError("vertex fans do not partition the halfedges")
        for loop in self.generator_loops:
            if loop[0] != loop[-1]:
                raise MeshError("generator loop is not closed")
        return True

    def halfedge_words(self):
        """Relative group word of each halfedge: the lift of its destination
        seen from the lift of its origin is ``word . lift(dest)``."""
        if self.corner_words is None:
            return None
        if getattr(self, "_he_words", None) is None:
            from .octagon import invert_word, reduce_word
            out = []
            for words in self.corner_words:
                for k in range(3):
                    out.append(reduce_word(invert_word(words[k]) + words[(k + 1) % 3]))
            self._he_words = out
        return self._he_words

    def edge_words(self):
        hw = self.halfedge_words()
        if hw is None:
            return None
        return [hw[h] for h in self.edge_he]

    def digest(self):
        h = hashlib.sha256()
        h.update(self.faces.tobytes())
        h.update(self.face_edges.tobytes())
        h.update(str(self.genus).encode())
        return h.hexdigest()[:16]


@dataclass(eq=False)
class HypMetric:
    edge_length: np.ndarray

    def __post_init__(self):
        self.edge_length = np.asarray(self.edge_length, dtype=float)
        if not np.all(np.isfinite(self.edge_length)):
            raise ValueError("non-finite edge length")
        if np.any(self.edge_length <= 0):
            raise ValueError("edge lengths must be positive")

    def face_lengths(self, mesh):
        """(F, 3) array; column k is the length of the edge opposite corner k."""
        fe = mesh.face_edges
        return self.edge_length[fe[:, [1, 2, 0]]]

    def copy(self):
        return HypMetric(self.edge_length.copy())
