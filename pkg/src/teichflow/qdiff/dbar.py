"""Edge-compatibility d-bar residual and weak divergence of symmetric tensors."""
from __future__ import annotations

import numpy as np

from ..surface.charts import face_charts, halfedge_angles
from ..surface.geometry import euclidean_layout, triangle_angles
from ..maps.energy import vertex_areas


def edge_mismatch(mesh, g, phi, charts=None):
    """r_e = phi_f1 - a_e^2 phi_f2 with z2 = a_e z1 + b_e the chart transition."""
    if charts is None:
        charts = face_charts(mesh, g)
    f1, f2 = charts.edge_faces[:, 0], charts.edge_faces[:, 1]
    return phi.values[f1] - charts.a ** 2 * phi.values[f2]


def dbar_residual(mesh, g, phi, charts=None):
    r = edge_mismatch(mesh, g, phi, charts)
    return float(np.sqrt(np.sum(g.edge_length * np.abs(r) ** 2)))


def dbar_l1(mesh, g, phi, charts=None):
    r = edge_mismatch(mesh, g, phi, charts)
    return float(np.sum(g.edge_length * np.abs(r)))


def weak_divergence(mesh, g, h):
    """Per-vertex weak divergence of a Sym2Field against piecewise-linear
    vector test fields, as a complex vector in the vertex's frame.

    R_i = sum_{f ni i} int_f H grad(phi_i), with each face term rotated from
    the face chart into the frame of vertex i.
    """
    L = g.face_lengths(mesh)
    ang = triangle_angles(L)
    theta = halfedge_angles(mesh, ang).reshape(-1, 3)
    X = euclidean_layout(L)
    H = h.values
    out = np.zeros(mesh.n_vertices, dtype=complex)
    for k in range(3):
        i, j = (k + 1) % 3, (k + 2) % 3
        e = X[:, j] - X[:, i]                 # edge opposite corner k, ccw
        # area * grad(phi_k) = rot90(e) / 2 (points into the face)
        ag = 0.5 * 1j * e
        v = np.stack([ag.real, ag.imag], axis=1)
        Hv = np.einsum("fij,fj->fi", H, v)
        w = Hv[:, 0] + 1j * Hv[:, 1]
        ref = np.angle(X[:, i] - X[:, k]) - theta[:, k]
        np.add.at(out, mesh.faces[:, k], w * np.exp(-1j * ref))
    return out


def divergence_residual(mesh, g, h):
    """sqrt(sum_i |R_i|^2 / A_i) relative to the L2 norm of h."""
    R = weak_divergence(mesh, g, h)
    A = vertex_areas(mesh, g)
    from ..surface.metrics import metric_l2_norm
    return float(np.sqrt(np.sum(np.abs(R) ** 2 / A)) / metric_l2_norm(mesh, h, g))
