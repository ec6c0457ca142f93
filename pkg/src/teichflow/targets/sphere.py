"""Round sphere of radius R in R^3 (positive-curvature control target)."""
from __future__ import annotations

import numpy as np

from .base import POSITIVE, AmbiguousLog, StepTooLarge, Target


class RoundSphere(Target):
    curvature_class = POSITIVE
    point_ndim = 1

    def __init__(self, radius=1.0):
        if not radius > 0:
            raise ValueError("sphere radius must be positive")
        self.radius = float(radius)

    def key(self):
        return ("sphere", self.radius)

    def constraint_residual(self, p):
        return np.abs(np.linalg.norm(p, axis=-1) - self.radius)

    def _unit(self, p):
        return p / np.linalg.norm(p, axis=-1, keepdims=True)

    def distance(self, p, q):
        c = np.sum(self._unit(p) * self._unit(q), -1)
        s = np.linalg.norm(np.cross(self._unit(p), self._unit(q)), axis=-1)
        return self.radius * np.arctan2(s, c)

    def log_map(self, p, q):
        n = self._unit(p)
        th = self.distance(p, q) / self.radius
        if np.any(th > np.pi - 1e-9):
            raise AmbiguousLog("log map requested at an antipodal pair")
        w = q - np.sum(q * n, -1, keepdims=True) * n
        wn = np.linalg.norm(w, axis=-1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            d = np.where(wn > 0, w / np.where(wn > 0, wn, 1.0), 0.0)
        return (self.radius * th)[..., None] * d

    def exp(self, p, v):
        n = self._unit(p)
        t = np.linalg.norm(v, axis=-1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            d = np.where(t > 0, v / np.where(t > 0, t, 1.0), 0.0)
        a = t / self.radius
        return self.radius * (np.cos(a) * n + np.sin(a) * d)

    def project_tangent(self, p, v):
        n = self._unit(p)
        return v - np.sum(v * n, -1, keepdims=True) * n

    def retract(self, p, v):
        q = np.asarray(p) + self.project_tangent(p, v)
        nq = np.linalg.norm(q, axis=-1, keepdims=True)
        if np.any(nq < 1e-12 * self.radius):
            raise StepTooLarge("sphere step collapsed to the centre")
        return self.radius * q / nq

    def transport(self, p, q, v):
        w = self.project_tangent(q, v)
        n0 = np.linalg.norm(v, axis=-1, keepdims=True)
        n1 = np.linalg.norm(w, axis=-1, keepdims=True)
        return np.where(n1 > 0, w * n0 / np.where(n1 > 0, n1, 1.0), 0.0)

    def _frame(self, p):
        n = self._unit(p)
        axis = np.zeros_like(n)
        k = np.argmin(np.abs(n), axis=-1)
        np.put_along_axis(axis, k[..., None], 1.0, axis=-1)
        e1 = self._unit(axis - np.sum(axis * n, -1, keepdims=True) * n)
        e2 = np.cross(n, e1)
        return e1, e2

    def tangent_coords(self, p, v):
        e1, e2 = self._frame(p)
        return np.sum(v * e1, -1) + 1j * np.sum(v * e2, -1)

    def from_tangent_coords(self, p, c):
        e1, e2 = self._frame(p)
        return c.real[..., None] * e1 + c.imag[..., None] * e2

    def face_base(self, pts):
        return self.radius * self._unit(pts.mean(axis=-2))
