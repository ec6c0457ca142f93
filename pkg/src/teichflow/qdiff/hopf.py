"""Pullback metric and Hopf differential of a discrete map."""
from __future__ import annotations

import numpy as np

from ..surface.geometry import euclidean_layout
from .fields import QuadDiff, Sym2Field


def face_differentials(mesh, g, u, target):
    """Per-face du (2x2 real) from the Euclidean face chart to orthonormal
    coordinates of the tangent plane at the face's image barycentre."""
    X = euclidean_layout(g.face_lengths(mesh))
    U = target.face_corners(mesh, u.points)
    nd = target.point_ndim
    axis = -1 - nd
    b = target.face_base(U)
    bb = np.expand_dims(b, axis)
    bb = np.broadcast_to(bb, U.shape)
    y = target.tangent_coords(bb, target.log_map(bb, U))      # (F, 3) complex
    dy = y[:, 1:] - y[:, :1]
    dx = X[:, 1:] - X[:, :1]
    Y = np.stack([dy.real, dy.imag], axis=1)                  # columns are edges
    Xm = np.stack([dx.real, dx.imag], axis=1)
    return Y @ np.linalg.inv(Xm)


def pullback_metric(mesh, g, u, target):
    du = face_differentials(mesh, g, u, target)
    return Sym2Field(np.swapaxes(du, 1, 2) @ du)


def hopf(mesh, g, u, target, pullback=None):
    """phi = (P11 - P22) - 2i P12 per face, P the pullback metric."""
    P = (pullback if pullback is not None else pullback_metric(mesh, g, u, target)).values
    return QuadDiff((P[:, 0, 0] - P[:, 1, 1]) - 2j * P[:, 0, 1])


def energy_density(P):
    v = P.values if hasattr(P, "values") else P
    return 0.5 * (v[:, 0, 0] + v[:, 1, 1])
