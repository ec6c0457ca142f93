"""Common interface of target manifolds."""
from __future__ import annotations

import numpy as np


class TargetError(ValueError):
    pass


class StepTooLarge(TargetError):
    pass


class AmbiguousLog(TargetError):
    pass


class CurvatureClassViolation(TargetError):
    pass


STRICTLY_NEGATIVE = "strictly-negative"
NONPOSITIVE = "nonpositive"
POSITIVE = "positive"


def bcast(w, v, point_ndim):
    """Broadcast per-item weights w against vectors v with point_ndim trailing axes."""
    w = np.asarray(w)
    return w.reshape(w.shape + (1,) * point_ndim) * v


class Target:
    """Base class.  Points and tangent vectors are numpy arrays; ``point_ndim``
    trailing axes make up one point (0 for complex disk points, 1 for
    ambient coordinates)."""

    curvature_class = NONPOSITIVE
    point_ndim = 1

    # geometry ------------------------------------------------------------
    def distance(self, p, q):
        raise NotImplementedError

    def log_map(self, p, q):
        raise NotImplementedError

    def retract(self, p, v):
        raise NotImplementedError

    def project_tangent(self, p, v):
        raise NotImplementedError

    def constraint_residual(self, p):
        raise NotImplementedError

    def tangent_coords(self, p, v):
        """Complex coordinate x + iy of v in an orthonormal frame at p."""
        raise NotImplementedError

    def from_tangent_coords(self, p, c):
        raise NotImplementedError

    def norm(self, p, v):
        return np.abs(self.tangent_coords(p, v))

    def face_base(self, pts):
        """Approximate barycentre of the (..., 3) points along axis -1-ndim."""
        raise NotImplementedError

    # equivariance hooks ----------------------------------------------------
    def equivariance(self, mesh):
        """Data that must match for two maps to be comparable."""
        return None

    def edge_neighbors(self, mesh, u):
        """Per edge (i, j): u_i and the lift of u_j adjacent to u_i."""
        i, j = mesh.edge_vertices[:, 0], mesh.edge_vertices[:, 1]
        return u[i], u[j]

    def edge_neighbors_reverse(self, mesh, u):
        i, j = mesh.edge_vertices[:, 0], mesh.edge_vertices[:, 1]
        return u[j], u[i]

    def face_corners(self, mesh, u):
        """(F, 3, ...) corner images in a common lift per face."""
        return u[mesh.faces]

    def edge_phases(self, mesh, u):
        """Frame rotation from the neighbour lift back to u_j (unit complex)."""
        return np.ones(mesh.n_edges, dtype=complex)

    def key(self):
        raise NotImplementedError
