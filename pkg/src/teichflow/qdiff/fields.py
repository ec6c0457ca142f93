"""Per-face quadratic differentials and symmetric 2-tensors."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..surface.geometry import face_areas


@dataclass(eq=False)
class QuadDiff:
    """phi_f dz^2 in the Euclidean chart of face f (unit charts)."""
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("non-finite quadratic differential")

    def __add__(self, other):
        return QuadDiff(self.values + other.values)

    def __sub__(self, other):
        return QuadDiff(self.values - other.values)

    def __mul__(self, c):
        return QuadDiff(self.values * c)

    __rmul__ = __mul__

    def real_part(self):
        """Re(phi dz^2) as a Sym2Field: [[Re, -Im], [-Im, -Re]]."""
        v = self.values
        H = np.empty((len(v), 2, 2))
        H[:, 0, 0] = v.real
        H[:, 1, 1] = -v.real
        H[:, 0, 1] = H[:, 1, 0] = -v.imag
        return Sym2Field(H)


@dataclass(eq=False)
class Sym2Field:
    """Per-face symmetric 2x2 matrix in the Euclidean face chart."""
    values: np.ndarray

    def __post_init__(self):
        H = np.asarray(self.values, dtype=float)
        self.values = 0.5 * (H + np.swapaxes(H, -1, -2))

    def trace(self):
        return self.values[:, 0, 0] + self.values[:, 1, 1]

    def __sub__(self, other):
        return Sym2Field(self.values - other.values)

    def __mul__(self, c):
        return Sym2Field(self.values * c)

    __rmul__ = __mul__


def inner(mesh, g, phi, psi, area=None):
    """Complex L2 inner product sum_f area_f phi_f conj(psi_f)."""
    if area is None:
        area = face_areas(mesh, g)
    return np.sum(area * phi.values * np.conj(psi.values))


def qd_norms(mesh, g, phi):
    """(L1, L2, Linf) with face areas as weights."""
    a = np.abs(phi.values)
    area = face_areas(mesh, g)
    return float(np.sum(area * a)), float(np.sqrt(np.sum(area * a ** 2))), float(a.max())
