"""Distances between maps and local energy concentration."""
from __future__ import annotations

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import dijkstra

from .energy import dirichlet_energy, vertex_areas


def map_distance_l2(mesh, g, u1, u2, target):
    u1.comparable(u2)
    d = target.distance(u1.points, u2.points)
    return float(np.sqrt(np.sum(vertex_areas(mesh, g) * d ** 2)))


def map_distance_c0(u1, u2, target):
    u1.comparable(u2)
    return float(np.max(target.distance(u1.points, u2.points)))


def _graph(mesh, g):
    i, j = mesh.edge_vertices[:, 0], mesh.edge_vertices[:, 1]
    keep = i != j
    V = mesh.n_vertices
    # duplicate pairs: keep the shortest so the sparse sum does not add them
    W = sparse.coo_matrix((g.edge_length[keep], (i[keep], j[keep])), shape=(V, V)).tocsr()
    W.sum_duplicates()
    M = sparse.lil_matrix((V, V))
    order = np.argsort(-g.edge_length[keep], kind="stable")
    M[i[keep][order], j[keep][order]] = g.edge_length[keep][order]
    return M.tocsr()


def local_energy_concentration(mesh, g, u, target, r, chunk=256):
    """max_v energy of the faces whose corners all lie within graph distance r of v."""
    if not r > 0:
        raise ValueError("radius must be positive")
    rep = dirichlet_energy(mesh, g, u, target)
    contrib = rep.face_density * rep.face_area
    W = _graph(mesh, g)
    V = mesh.n_vertices
    best = 0.0
    for s in range(0, V, chunk):
        dist = dijkstra(W, directed=False, indices=np.arange(s, min(V, s + chunk)), limit=r)
        inside = np.all(dist[:, mesh.faces] <= r, axis=2)
        best = max(best, float((inside @ contrib).max()))
    return best
