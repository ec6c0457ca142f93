"""Hyperbolic triangle geometry on edge-length metrics."""
import numpy as np

from .mesh import DegenerateTriangle


def _check_triangles(L):
    a, b, c = L[:, 0], L[:, 1], L[:, 2]
    bad = (a >= b + c) | (b >= a + c) | (c >= a + b)
    if np.any(bad):
        f = int(np.flatnonzero(bad)[0])
        raise DegenerateTriangle(f, L[f])


def triangle_angles(L):
    """Corner angles of hyperbolic triangles from (F, 3) opposite lengths."""
    L = np.asarray(L, dtype=float)
    if not np.all(np.isfinite(L)):
        raise ValueError("non-finite edge length")
    _check_triangles(L)
    # half-angle form, stable for short edges where the cosine rule cancels
    s = 0.5 * L.sum(axis=1, keepdims=True)
    shs = np.sinh(s)
    shd = np.sinh(s - L)
    out = np.empty_like(L)
    for k in range(3):
        i, j = (k + 1) % 3, (k + 2) % 3
        out[:, k] = 2 * np.arctan2(np.sqrt(shd[:, i] * shd[:, j]), np.sqrt(shs[:, 0] * shd[:, k]))
    return out


def corner_angles(mesh, g):
    return triangle_angles(g.face_lengths(mesh))


def face_areas(mesh, g, angles=None):
    if angles is None:
        angles = corner_angles(mesh, g)
    return np.pi - angles.sum(axis=1)


def angle_sums(mesh, angles):
    return np.bincount(mesh.faces.reshape(-1), weights=angles.reshape(-1),
                       minlength=mesh.n_vertices)


def vertex_defects(mesh, g, angles=None):
    """2*pi minus the angle sum at each vertex."""
    if angles is None:
        angles = corner_angles(mesh, g)
    return 2 * np.pi - angle_sums(mesh, angles)


def vertex_defect(mesh, g, v):
    return float(vertex_defects(mesh, g)[v])


def total_area(mesh, g):
    return float(face_areas(mesh, g).sum())


def angle_length_jacobian(L, angles):
    """d angle_k / d length_m per face, shape (F, 3, 3).

    Uses the hyperbolic derivative cosine law:
    d alpha/d a = sinh a / (sinh b sinh c sin alpha),
    d alpha/d b = -(d alpha/d a) cos gamma.
    """
    sh = np.sinh(L)
    sa = np.sin(angles)
    ca = np.cos(angles)
    F = len(L)
    J = np.empty((F, 3, 3))
    for k in range(3):
        i, j = (k + 1) % 3, (k + 2) % 3
        dk = sh[:, k] / (sh[:, i] * sh[:, j] * sa[:, k])
        J[:, k, k] = dk
        # length i is opposite corner i; its partner angle in the cosine rule
        # is the angle at corner j
        J[:, k, i] = -dk * ca[:, j]
        J[:, k, j] = -dk * ca[:, i]
    return J


def euclidean_layout(L):
    """Per-face Euclidean corner positions (F, 3) complex realising lengths L.

    Corner 0 at the origin, corner 1 on the positive real axis.
    """
    a, b, c = L[:, 0], L[:, 1], L[:, 2]
    # side c joins corners 0 and 1, side b joins corners 0 and 2
    x = (b ** 2 + c ** 2 - a ** 2) / (2 * c)
    y = np.sqrt(np.maximum(b ** 2 - x ** 2, 0.0))
    Z = np.zeros(L.shape, dtype=complex)
    Z[:, 1] = c
    Z[:, 2] = x + 1j * y
    return Z


def euclidean_cotangents(L):
    """Cotangents of the Euclidean layout angles (F, 3)."""
    a2, b2, c2 = L[:, 0] ** 2, L[:, 1] ** 2, L[:, 2] ** 2
    s = L.sum(axis=1) / 2
    area = np.sqrt(np.maximum(s * (s - L[:, 0]) * (s - L[:, 1]) * (s - L[:, 2]), 0))
    return np.stack([(b2 + c2 - a2), (a2 + c2 - b2), (a2 + b2 - c2)], axis=1) / (4 * area[:, None])
