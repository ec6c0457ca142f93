"""Cotangent weights, Dirichlet energy and tension."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..surface.geometry import corner_angles, face_areas
from ..targets.base import bcast


def cotan_weights(mesh, g, angles=None):
    """w_e = (cot alpha + cot beta) / 2 from the hyperbolic corner angles
    opposite each edge."""
    if angles is None:
        angles = corner_angles(mesh, g)
    # halfedge 3f+k is opposite corner (k+2) % 3
    cot = 1.0 / np.tan(angles[:, [2, 0, 1]].reshape(-1))
    return 0.5 * np.bincount(mesh.he_edge, weights=cot, minlength=mesh.n_edges)


def vertex_areas(mesh, g, angles=None):
    area = face_areas(mesh, g, angles)
    return np.bincount(mesh.faces.reshape(-1), weights=np.repeat(area / 3, 3),
                       minlength=mesh.n_vertices)


@dataclass
class EnergyReport:
    E: float
    face_density: np.ndarray
    vertex_area: np.ndarray
    face_area: np.ndarray
    negative_weights: int
    n_weights: int

    @property
    def negative(self):
        return self.E < 0

    @property
    def nonnegative_fraction(self):
        return 1 - self.negative_weights / self.n_weights


def edge_sq_distances(mesh, u, target):
    a, b = target.edge_neighbors(mesh, u.points)
    return target.distance(a, b) ** 2


def dirichlet_energy(mesh, g, u, target, angles=None):
    if angles is None:
        angles = corner_angles(mesh, g)
    w = cotan_weights(mesh, g, angles)
    d2 = edge_sq_distances(mesh, u, target)
    # face contribution: sum over its halfedges of (1/4) cot(opposite) d^2
    cot = 1.0 / np.tan(angles[:, [2, 0, 1]])
    contrib = 0.25 * np.sum(cot * d2[mesh.face_edges], axis=1)
    area = face_areas(mesh, g, angles)
    E = float(np.sum(contrib))
    return EnergyReport(E, contrib / area, vertex_areas(mesh, g, angles), area,
                        int(np.sum(w < 0)), len(w))


def energy(mesh, g, u, target, angles=None):
    if angles is None:
        angles = corner_angles(mesh, g)
    w = cotan_weights(mesh, g, angles)
    return float(0.5 * np.sum(w * edge_sq_distances(mesh, u, target)))


def tension(mesh, g, u, target, angles=None):
    """tau_i = (1/A_i) sum_j w_ij log_{u_i}(u_j); tangent vectors per vertex."""
    if angles is None:
        angles = corner_angles(mesh, g)
    w = cotan_weights(mesh, g, angles)
    A = vertex_areas(mesh, g, angles)
    nd = target.point_ndim
    p, q = target.edge_neighbors(mesh, u.points)
    fwd = bcast(w, target.log_map(p, q), nd)
    p2, q2 = target.edge_neighbors_reverse(mesh, u.points)
    bwd = bcast(w, target.log_map(p2, q2), nd)
    i, j = mesh.edge_vertices[:, 0], mesh.edge_vertices[:, 1]
    out = np.zeros(u.points.shape, dtype=fwd.dtype)
    np.add.at(out, i, fwd)
    np.add.at(out, j, bwd)
    return bcast(1.0 / A, out, nd)


def tension_l2sq(mesh, g, u, target, tau=None, angles=None):
    if tau is None:
        tau = tension(mesh, g, u, target, angles)
    A = vertex_areas(mesh, g, angles)
    n = target.norm(u.points, tau)
    return float(np.sum(A * n ** 2))
