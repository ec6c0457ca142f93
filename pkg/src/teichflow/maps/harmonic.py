"""Harmonic maps by preconditioned tension flow."""
from __future__ import annotations

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from ..surface.geometry import corner_angles
from ..targets.base import POSITIVE, CurvatureClassViolation
from .energy import cotan_weights, energy, tension, tension_l2sq, vertex_areas


class MaxIterExceeded(RuntimeError):
    def __init__(self, max_iter, residual, state=None):
        self.max_iter = max_iter
        self.residual = residual
        self.state = state
        super().__init__(f"harmonic_solve: {max_iter} iterations, residual {residual:.3e}")


def connection_laplacian(mesh, g, u, target, shift=1e-3, angles=None):
    """Cotan Laplacian on tangent coordinates, twisted by the frame rotation
    of each edge's deck transformation; plus shift * vertex mass."""
    if angles is None:
        angles = corner_angles(mesh, g)
    w = cotan_weights(mesh, g, angles)
    A = vertex_areas(mesh, g, angles)
    ph = target.edge_phases(mesh, u.points)
    i, j = mesh.edge_vertices[:, 0], mesh.edge_vertices[:, 1]
    V = mesh.n_vertices
    rows = np.r_[i, j, i, j]
    cols = np.r_[i, j, j, i]
    vals = np.r_[w, w, -w * ph, -w * np.conj(ph)]
    K = sparse.csc_matrix((vals.astype(complex), (rows, cols)), shape=(V, V))
    return (K + sparse.diags(shift * A)).tocsc()


def harmonic_solve(mesh, g, u_init, target, tol=1e-8, max_iter=500, step0=1.0,
                   return_info=False):
    """Minimise the Dirichlet energy in the homotopy class of u_init.

    Each iteration moves every vertex along the tension, preconditioned by a
    (connection) Laplacian, with a step that doubles (up to one) after a
    sufficient energy decrease and halves otherwise.  Stops when sqrt(T) <= tol.
    """
    if target.curvature_class == POSITIVE:
        raise CurvatureClassViolation("harmonic_solve needs a nonpositively curved target")
    angles = corner_angles(mesh, g)
    A = vertex_areas(mesh, g, angles)
    lu = splu(connection_laplacian(mesh, g, u_init, target, angles=angles))
    u = u_init
    E = energy(mesh, g, u, target, angles)
    s = step0
    history = [E]
    for it in range(max_iter + 1):
        tau = tension(mesh, g, u, target, angles)
        res = np.sqrt(tension_l2sq(mesh, g, u, target, tau, angles))
        if res <= tol:
            break
        if it == max_iter:
            raise MaxIterExceeded(max_iter, res, u)
        c = target.tangent_coords(u.points, tau)
        dc = lu.solve(A * c)
        d = target.from_tangent_coords(u.points, dc)
        # predicted first-order decrease per unit step; a sufficient-decrease
        # test keeps the doubling from oscillating across a quadratic well
        slope = float(np.sum(A * np.real(np.conj(c) * dc)))
        while True:
            trial = u.with_points(target.retract(u.points, s * d))
            Et = energy(mesh, g, trial, target, angles)
            accept = Et <= E - 1e-4 * s * slope
            rounding = 64 * np.finfo(float).eps * abs(E)
            if not accept and s * slope <= rounding and Et - E <= rounding:
                # energy differences are at rounding level; fall back on the residual
                tt = tension(mesh, g, trial, target, angles)
                accept = tension_l2sq(mesh, g, trial, target, tt, angles) < res * res
            if accept:
                u, E = trial, Et
                history.append(E)
                s = min(2 * s, 1.0)
                break
            s /= 2
            if s < 1e-12:
                # no descent left at machine precision
                if return_info:
                    return u, {"iterations": it, "residual": res, "energy": history}
                raise MaxIterExceeded(it, res, u)
    if return_info:
        return u, {"iterations": it, "residual": res, "energy": history}
    return u
