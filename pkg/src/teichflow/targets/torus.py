"""Flat torus S^1(r1) x S^1(r2) embedded in R^4."""
from __future__ import annotations

import numpy as np

from .base import NONPOSITIVE, StepTooLarge, Target


def _wrap(a):
    return (a + np.pi) % (2 * np.pi) - np.pi


class FlatTorus(Target):
    curvature_class = NONPOSITIVE
    point_ndim = 1

    def __init__(self, r1=1.0, r2=1.0):
        if not (r1 > 0 and r2 > 0):
            raise ValueError("torus radii must be positive")
        self.r1 = float(r1)
        self.r2 = float(r2)

    def key(self):
        return ("torus", self.r1, self.r2)

    def point(self, th1, th2):
        th1, th2 = np.broadcast_arrays(np.asarray(th1, float), np.asarray(th2, float))
        return np.stack([self.r1 * np.cos(th1), self.r1 * np.sin(th1),
                         self.r2 * np.cos(th2), self.r2 * np.sin(th2)], axis=-1)

    def angles(self, p):
        return np.arctan2(p[..., 1], p[..., 0]), np.arctan2(p[..., 3], p[..., 2])

    def _frame(self, p):
        a1, a2 = self.angles(p)
        z = np.zeros_like(a1)
        t1 = np.stack([-np.sin(a1), np.cos(a1), z, z], axis=-1)
        t2 = np.stack([z, z, -np.sin(a2), np.cos(a2)], axis=-1)
        return t1, t2

    def constraint_residual(self, p):
        return np.maximum(np.abs(np.hypot(p[..., 0], p[..., 1]) - self.r1),
                          np.abs(np.hypot(p[..., 2], p[..., 3]) - self.r2))

    def angle_steps(self, p, q):
        a1, a2 = self.angles(p)
        b1, b2 = self.angles(q)
        return _wrap(b1 - a1), _wrap(b2 - a2)

    def distance(self, p, q):
        d1, d2 = self.angle_steps(p, q)
        return np.hypot(self.r1 * d1, self.r2 * d2)

    def log_map(self, p, q):
        d1, d2 = self.angle_steps(p, q)
        t1, t2 = self._frame(p)
        return (self.r1 * d1)[..., None] * t1 + (self.r2 * d2)[..., None] * t2

    def exp(self, p, v):
        t1, t2 = self._frame(p)
        a1, a2 = self.angles(p)
        return self.point(a1 + np.sum(v * t1, -1) / self.r1, a2 + np.sum(v * t2, -1) / self.r2)

    def project_tangent(self, p, v):
        t1, t2 = self._frame(p)
        return np.sum(v * t1, -1)[..., None] * t1 + np.sum(v * t2, -1)[..., None] * t2

    def retract(self, p, v):
        q = np.asarray(p) + self.project_tangent(p, v)
        n1 = np.hypot(q[..., 0], q[..., 1])
        n2 = np.hypot(q[..., 2], q[..., 3])
        if np.any(n1 < 1e-12 * self.r1) or np.any(n2 < 1e-12 * self.r2):
            raise StepTooLarge("torus step reached a circle centre")
        out = q.copy()
        out[..., :2] *= (self.r1 / n1)[..., None]
        out[..., 2:] *= (self.r2 / n2)[..., None]
        return out

    def transport(self, p, q, v):
        """Projection transport, renormalised on each circle factor."""
        t1p, t2p = self._frame(p)
        t1q, t2q = self._frame(q)
        c1 = np.sum(v * t1p, -1)
        c2 = np.sum(v * t2p, -1)
        w1 = np.sum((c1[..., None] * t1p) * t1q, -1)
        w2 = np.sum((c2[..., None] * t2p) * t2q, -1)
        w1 = np.abs(c1) * np.sign(w1)
        w2 = np.abs(c2) * np.sign(w2)
        return w1[..., None] * t1q + w2[..., None] * t2q

    def tangent_coords(self, p, v):
        t1, t2 = self._frame(p)
        return np.sum(v * t1, -1) + 1j * np.sum(v * t2, -1)

    def from_tangent_coords(self, p, c):
        t1, t2 = self._frame(p)
        return c.real[..., None] * t1 + c.imag[..., None] * t2

    def face_base(self, pts):
        p0 = pts[..., 0, :]
        d1, d2 = self.angle_steps(p0[..., None, :], pts)
        a1, a2 = self.angles(p0)
        return self.point(a1 + d1.mean(-1), a2 + d2.mean(-1))
