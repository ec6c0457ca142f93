"""Discrete uniformization: conformal vertex scaling to zero angle defect.

Lengths change as sinh(l'/2) = exp((u_i + u_j)/2) sinh(l/2).  Newton's
method on the defect residual; the Jacobian is symmetric positive definite
for this hyperbolic scaling, so a sparse Cholesky-friendly solve suffices.
"""
from __future__ import annotations

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from .geometry import angle_length_jacobian, triangle_angles, vertex_defects
from .mesh import DegenerateTriangle, HypMetric


class NonConvergence(RuntimeError):
    def __init__(self, max_iter, residual):
        self.max_iter = max_iter
        self.residual = residual
        super().__init__(f"uniformize did not converge in {max_iter} steps "
                         f"(max |defect| = {residual:.3e})")


def scale_lengths(mesh, g, u):
    """Apply per-vertex conformal factors u to the metric g."""
    i, j = mesh.edge_vertices[:, 0], mesh.edge_vertices[:, 1]
    s = np.exp((u[i] + u[j]) / 2) * np.sinh(g.edge_length / 2)
    return HypMetric(2 * np.arcsinh(s))


def defect_jacobian(mesh, g, angles=None):
    L = g.face_lengths(mesh)
    if angles is None:
        angles = triangle_angles(L)
    J = angle_length_jacobian(L, angles)
    t = np.tanh(L / 2)
    F = mesh.n_faces
    rows, cols, vals = [], [], []
    for k in range(3):
        vk = mesh.faces[:, k]
        for m in range(3):
            coef = J[:, k, m] * t[:, m]
            for end in ((m + 1) % 3, (m + 2) % 3):
                rows.append(vk)
                cols.append(mesh.faces[:, end])
                vals.append(coef)
    V = mesh.n_vertices
    # defect = 2 pi - sum of angles
    return -sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(V, V))


def uniformize(mesh, g, tol=1e-9, max_iter=50, min_step=2.0 ** -30, return_info=False):
    u = np.zeros(mesh.n_vertices)
    cur = g
    res = vertex_defects(mesh, cur)
    err = np.abs(res).max()
    it = 0
    while err > tol:
        if it >= max_iter:
            raise NonConvergence(max_iter, err)
        Jm = defect_jacobian(mesh, cur)
        step = spsolve(Jm.tocsc(), -res)
        lam = 1.0
        broke = False
        while True:
            try:
                trial = scale_lengths(mesh, g, u + lam * step)
                tres = vertex_defects(mesh, trial)
                terr = np.abs(tres).max()
                if terr < err or terr <= tol:
                    break
            except DegenerateTriangle:
                broke = True
            lam /= 2
            if lam < min_step:
                if not broke:
                    # no triangle broke: the residual sits at its rounding floor
                    raise NonConvergence(it, err)
                raise DegenerateTriangle(-1, "line search floor reached in uniformize")
        u = u + lam * step
        cur, res, err = trial, tres, terr
        it += 1
    if return_info:
        return cur, {"iterations": it, "scales": u, "residual": err}
    return cur
