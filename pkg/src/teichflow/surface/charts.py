"""Per-face charts: Euclidean layouts with similarity transitions, and the
hyperbolic (Poincare disk) layouts used by the quadratic differential code.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import disk
from .geometry import euclidean_layout, triangle_angles


@dataclass(eq=False)
class FaceChart:
    """Euclidean layout of every face plus per-edge transitions.

    ``layout[f, k]`` is corner k of face f.  For edge e the transition
    ``z2 = a[e] * z1 + b[e]`` maps the chart of ``faces[e, 0]`` to the chart of
    ``faces[e, 1]``; both charts realise the same edge length so |a| = 1.
    """
    layout: np.ndarray
    edge_faces: np.ndarray     # (E, 2)
    a: np.ndarray
    b: np.ndarray

    @property
    def scale(self):
        return np.abs(self.a)

    def edge_vectors(self):
        """(F, 3) complex edge vectors; column k is opposite corner k."""
        Z = self.layout
        return np.stack([Z[:, 2] - Z[:, 1], Z[:, 0] - Z[:, 2], Z[:, 1] - Z[:, 0]], axis=1)


def face_charts(mesh, g):
    L = g.face_lengths(mesh)
    Z = euclidean_layout(L)
    h1 = mesh.edge_he
    h2 = mesh.twin[h1]
    f1, k1 = h1 // 3, h1 % 3
    f2, k2 = h2 // 3, h2 % 3
    # h1 runs p -> q in f1, h2 runs q -> p in f2
    p1, q1 = Z[f1, k1], Z[f1, (k1 + 1) % 3]
    q2, p2 = Z[f2, k2], Z[f2, (k2 + 1) % 3]
    a = (q2 - p2) / (q1 - p1)
    b = p2 - a * p1
    return FaceChart(Z, np.stack([f1, f2], axis=1), a, b)


def face_metric_matrices(mesh, g, ref):
    """Per-face 2x2 matrices of g expressed in the Euclidean chart of ref.

    Solves e^T G e = l^2 on the three edge vectors of each ref layout.
    """
    Lr = ref.face_lengths(mesh)
    Zr = euclidean_layout(Lr)
    E = np.stack([Zr[:, 2] - Zr[:, 1], Zr[:, 0] - Zr[:, 2], Zr[:, 1] - Zr[:, 0]], axis=1)
    x, y = E.real, E.imag
    A = np.stack([x * x, 2 * x * y, y * y], axis=2)
    l2 = g.face_lengths(mesh) ** 2
    s = np.linalg.solve(A, l2[..., None])[..., 0]
    G = np.empty((len(s), 2, 2))
    G[:, 0, 0] = s[:, 0]
    G[:, 0, 1] = G[:, 1, 0] = s[:, 1]
    G[:, 1, 1] = s[:, 2]
    return G


def disk_layout(L, angles=None, iters=3):
    """Per-face corner positions in the Poincare disk, recentred so the mean
    of the corners sits at the origin (to a few iterations)."""
    if angles is None:
        angles = triangle_angles(L)
    Z = np.zeros(L.shape, dtype=complex)
    Z[:, 1] = np.tanh(L[:, 2] / 2)
    Z[:, 2] = np.tanh(L[:, 1] / 2) * np.exp(1j * angles[:, 0])
    for _ in range(iters):
        T = disk.to_origin(Z.mean(axis=1))
        Z = disk.mobius(T[:, None], Z)
    return Z


def halfedge_angles(mesh, angles):
    """Angle of each outgoing halfedge measured counter-clockwise from the
    first halfedge of its vertex fan, accumulated from corner angles."""
    theta = np.zeros(3 * mesh.n_faces)
    flat = angles.reshape(-1)
    for fan in mesh.outgoing():
        acc = np.cumsum(flat[fan])
        theta[fan[1:]] = acc[:-1]
    return theta
