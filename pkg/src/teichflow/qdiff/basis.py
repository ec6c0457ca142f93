"""Holomorphic quadratic differentials as the near-kernel of a discrete
d-bar energy, and the L2 projection onto them.

Unknowns are complex coefficients of a quadratic Lagrange (P2) field: one
per vertex (in a unit frame fixed by the vertex's first outgoing edge) and
one per edge midpoint (in the unit frame along the edge; quadratic
differentials do not see the edge orientation).  Inside each face the field
is interpolated in a Poincare disk chart of that face, where the hyperbolic
metric is conformal; the quadratic form integrates |d-bar phi|^2 against the
hyperbolic area.  Its lowest eigenvalues separate from the rest like h^4,
and their eigenvectors span the holomorphic quadratic differentials.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import eigsh

from .. import disk
from ..surface.charts import disk_layout, halfedge_angles
from ..surface.geometry import euclidean_layout, face_areas, triangle_angles
from .fields import QuadDiff

# degree-4 symmetric rule on the triangle (barycentric points, weights sum to one)
_A1, _B1, _W1 = 0.445948490915965, 0.108103018168070, 0.223381589678011
_A2, _B2, _W2 = 0.091576213509771, 0.816847572980459, 0.109951743655322
QUAD_POINTS = np.array([[_A1, _A1, _B1], [_A1, _B1, _A1], [_B1, _A1, _A1],
                        [_A2, _A2, _B2], [_A2, _B2, _A2], [_B2, _A2, _A2]])
QUAD_WEIGHTS = np.array([_W1] * 3 + [_W2] * 3)


class SpectralGapTooSmall(RuntimeError):
    def __init__(self, separation, threshold):
        self.separation = separation
        super().__init__(f"d-bar spectral separation {separation:.3g} < {threshold:g}; "
                         "mesh too coarse or metric near-degenerate")


def _mono(w):
    wb = np.conj(w)
    return np.stack([np.ones_like(w), w, wb, w * w, w * wb, wb * wb], axis=-1)


def _dbar_mono(w):
    z = np.zeros_like(w)
    return np.stack([z, z, np.ones_like(w), z, w, 2 * np.conj(w)], axis=-1)


@dataclass(eq=False)
class P2Frame:
    """Geometry of the P2 field on one metric."""
    nodes: np.ndarray      # (F, 6) node ids: 3 vertices then 3 edge midpoints
    scale: np.ndarray      # (F, 6) frame coefficient -> disk chart coefficient
    W: np.ndarray          # (F, 3) corners in the scaled disk chart w = 2z
    Wm: np.ndarray         # (F, 3) midpoints in the same chart
    interp: np.ndarray     # (F, 6, 6) monomial coefficients from node values
    theta: np.ndarray      # (3F,) halfedge angle in its vertex frame
    n_nodes: int


def p2_frame(mesh, g):
    L = g.face_lengths(mesh)
    ang = triangle_angles(L)
    Z = disk_layout(L, ang)
    theta = halfedge_angles(mesh, ang)
    F = mesh.n_faces
    dirs = np.stack([disk.log(Z[:, k], Z[:, (k + 1) % 3]) for k in range(3)], axis=1)
    psi = np.angle(dirs) - theta.reshape(F, 3)
    lam_c = 1.0 / (1.0 - np.abs(Z) ** 2)
    sc = lam_c ** 2 * np.exp(-2j * psi)
    Zm = np.stack([disk.midpoint(Z[:, k], Z[:, (k + 1) % 3]) for k in range(3)], axis=1)
    dm = np.stack([disk.log(Zm[:, k], Z[:, (k + 1) % 3]) for k in range(3)], axis=1)
    lam_m = 1.0 / (1.0 - np.abs(Zm) ** 2)
    sm = lam_m ** 2 * np.exp(-2j * np.angle(dm))
    W, Wm = 2 * Z, 2 * Zm
    nodes = np.concatenate([mesh.faces, mesh.n_vertices + mesh.face_edges], axis=1)
    interp = np.linalg.inv(_mono(np.concatenate([W, Wm], axis=1)))
    return P2Frame(nodes, np.concatenate([sc, sm], axis=1), W, Wm, interp, theta,
                   mesh.n_vertices + mesh.n_edges)


def _assemble(mesh, fr):
    W = fr.W
    qW = np.einsum("qk,fk->fq", QUAD_POINTS, W)
    d1, d2 = W[:, 1] - W[:, 0], W[:, 2] - W[:, 0]
    chart_area = 0.5 * np.abs((np.conj(d1) * d2).imag)
    lam = 1.0 / (1.0 - np.abs(qW) ** 2 / 4)
    B = np.einsum("fqm,fmn->fqn", _mono(qW), fr.interp) * fr.scale[:, None, :]
    D = np.einsum("fqm,fmn->fqn", _dbar_mono(qW), fr.interp) * fr.scale[:, None, :]
    wq = QUAD_WEIGHTS[None, :] * chart_area[:, None]
    # |phi|^2_g dA_g = |phi|^2 lam^-2 dA_w, |dbar phi|^2_g dA_g = |.|^2 lam^-4 dA_w
    Mf = np.einsum("fq,fqk,fql->fkl", wq * lam ** -2, np.conj(B), B)
    Qf = np.einsum("fq,fqk,fql->fkl", wq * lam ** -4, np.conj(D), D)
    n = fr.n_nodes
    r = np.repeat(fr.nodes, 6, axis=1).reshape(-1)
    c = np.tile(fr.nodes, (1, 6)).reshape(-1)
    Q = sparse.csc_matrix((Qf.reshape(-1), (r, c)), shape=(n, n))
    M = sparse.csc_matrix((Mf.reshape(-1), (r, c)), shape=(n, n))
    return Q, M


def face_values(mesh, g, fr, nodal):
    """Per-face Euclidean-chart coefficients of P2 fields (..., n_nodes)."""
    nodal = np.atleast_2d(nodal)
    wc = fr.W.mean(axis=1)
    row = np.einsum("fm,fmn->fn", _mono(wc), fr.interp) * fr.scale
    phi_w = np.einsum("fn,kfn->kf", row, nodal[:, fr.nodes])
    # complex-linear part of the affine map from the Euclidean chart to w
    X = euclidean_layout(g.face_lengths(mesh))
    dX = X[:, 1:] - X[:, :1]
    dW = fr.W[:, 1:] - fr.W[:, :1]
    A = np.stack([dX, np.conj(dX)], axis=2)
    alpha = np.linalg.solve(A, dW[..., None])[:, 0, 0]
    return phi_w * alpha ** 2


@dataclass(eq=False)
class HQDBasis:
    elements: np.ndarray       # (6g-6, F) per-face coefficients, real-orthonormal
    nodal: np.ndarray          # (6g-6, V+E) P2 node values in unit frames
    gram: np.ndarray           # (6g-6, 6g-6) real L2 Gram matrix
    eigenvalues: np.ndarray    # lowest eigenvalues of the complex problem
    lam_ker: float
    lam_gap: float
    edge_length: np.ndarray    # metric the basis was computed on
    theta: np.ndarray
    info: dict = field(default_factory=dict)

    @property
    def count(self):
        return len(self.elements)

    @property
    def separation(self):
        return self.lam_gap / max(self.lam_ker, np.finfo(float).eps)

    def element(self, k):
        return QuadDiff(self.elements[k])

    def kernel_dim(self, ratio=10.0):
        """Number of (real) eigenvalues below lam_gap / ratio."""
        ev = np.repeat(self.eigenvalues.real, 2)
        return int(np.sum(ev < self.lam_gap / ratio))


def hqd_basis(mesh, g, min_separation=100.0, n_extra=5):
    """Real basis of the 6g-6 dimensional space of holomorphic quadratic differentials."""
    nc = 3 * mesh.genus - 3
    fr = p2_frame(mesh, g)
    Q, M = _assemble(mesh, fr)
    n = fr.n_nodes
    k = nc + n_extra
    scale = Q.diagonal().real.mean() / M.diagonal().real.mean()
    ev, vec = eigsh(Q, k=k, M=M, sigma=-1e-3 * scale, which="LM", v0=np.ones(n, complex))
    order = np.argsort(ev)
    ev, vec = ev[order], vec[:, order]
    lam_ker, lam_gap = float(ev[nc - 1]), float(ev[nc])
    sep = lam_gap / max(lam_ker, np.finfo(float).eps)
    if sep < min_separation:
        raise SpectralGapTooSmall(sep, min_separation)
    area = face_areas(mesh, g)
    nodal = vec[:, :nc].T
    vals = face_values(mesh, g, fr, nodal)
    # Gram-Schmidt in the per-face inner product, phase fixed by the largest entry
    for i in range(nc):
        for _ in range(2):
            for j in range(i):
                c = np.sum(area * vals[i] * np.conj(vals[j]))
                vals[i] -= c * vals[j]
                nodal[i] -= c * nodal[j]
        nrm = np.sqrt(np.sum(area * np.abs(vals[i]) ** 2))
        ph = vals[i][np.argmax(np.abs(vals[i]))]
        rot = np.conj(ph) / abs(ph) / nrm
        vals[i] *= rot
        nodal[i] *= rot
    elements = np.empty((2 * nc, mesh.n_faces), dtype=complex)
    nod = np.empty((2 * nc, n), dtype=complex)
    elements[0::2], elements[1::2] = vals, 1j * vals
    nod[0::2], nod[1::2] = nodal, 1j * nodal
    gram = real_gram(elements, area)
    return HQDBasis(elements, nod, gram, ev, lam_ker, lam_gap, g.edge_length.copy(),
                    fr.theta, {"n_nodes": n, "spectrum": ev})


def real_gram(elements, area):
    G = np.real(np.einsum("f,kf,lf->kl", area, elements, np.conj(elements)))
    return 0.5 * (G + G.T)


def project_coefficients(mesh, g, phi, basis):
    area = face_areas(mesh, g)
    G = real_gram(basis.elements, area)
    rhs = np.real(np.einsum("f,f,kf->k", area, phi.values, np.conj(basis.elements)))
    return np.linalg.solve(G, rhs)


def project(mesh, g, phi, basis, return_coefficients=False):
    """L2-orthogonal projection of phi onto span(basis)."""
    c = project_coefficients(mesh, g, phi, basis)
    out = QuadDiff(c @ basis.elements)
    return (out, c) if return_coefficients else out


def edge_tangential(mesh, basis, c):
    """Mean over each edge of h(T, T) for h = Re(sum_k c_k psi_k), T the unit
    tangent; Simpson's rule on the P2 node values."""
    nod = c @ basis.nodal
    V = mesh.n_vertices
    h1 = mesh.edge_he
    h2 = mesh.twin[h1]
    i, j = mesh.edge_vertices[:, 0], mesh.edge_vertices[:, 1]
    a = nod[i] * np.exp(2j * basis.theta[h1])
    b = nod[j] * np.exp(2j * basis.theta[h2])
    m = nod[V + np.arange(mesh.n_edges)]
    return np.real(a + 4 * m + b) / 6


def export_csv(basis, path):
    """Per-face coefficients of every element plus the eigenvalue report."""
    with open(path, "w") as fh:
        fh.write("# lam_ker,{!r}\n# lam_gap,{!r}\n".format(basis.lam_ker, basis.lam_gap))
        fh.write("# eigenvalues," + ",".join(repr(float(x)) for x in basis.eigenvalues) + "\n")
        cols = []
        for k in range(basis.count):
            cols += [f"re{k}", f"im{k}"]
        fh.write("face," + ",".join(cols) + "\n")
        for f in range(basis.elements.shape[1]):
            vals = []
            for k in range(basis.count):
                z = basis.elements[k, f]
                vals += [repr(float(z.real)), repr(float(z.imag))]
            fh.write(f"{f}," + ",".join(vals) + "\n")
