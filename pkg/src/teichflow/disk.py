"""Poincare disk primitives shared by the surface builder and the targets.

Points are complex numbers with |z| < 1.  Isometries are 2x2 complex
matrices acting by Mobius transformation; everything broadcasts over
leading axes so per-halfedge / per-vertex work stays vectorised.

Tangent vectors are stored in the *unit frame*: the Euclidean coordinate
vector multiplied by the conformal factor 2/(1-|z|^2).  Their Euclidean
norm is then the hyperbolic norm.
"""
import numpy as np

EYE = np.eye(2, dtype=complex)


def conformal_factor(z):
    return 2.0 / (1.0 - np.abs(z) ** 2)


def mobius(m, z):
    m = np.asarray(m)
    return (m[..., 0, 0] * z + m[..., 0, 1]) / (m[..., 1, 0] * z + m[..., 1, 1])


def mobius_deriv(m, z):
    m = np.asarray(m)
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    return det / (m[..., 1, 0] * z + m[..., 1, 1]) ** 2


def to_origin(p):
    """Isometry sending p to 0 (and 0 to -p)."""
    p = np.asarray(p, dtype=complex)
    m = np.empty(p.shape + (2, 2), dtype=complex)
    m[..., 0, 0] = 1.0
    m[..., 0, 1] = -p
    m[..., 1, 0] = -np.conj(p)
    m[..., 1, 1] = 1.0
    return m


def from_origin(p):
    p = np.asarray(p, dtype=complex)
    m = np.empty(p.shape + (2, 2), dtype=complex)
    m[..., 0, 0] = 1.0
    m[..., 0, 1] = p
    m[..., 1, 0] = np.conj(p)
    m[..., 1, 1] = 1.0
    return m


def inverse(m):
    m = np.asarray(m)
    out = np.empty_like(m)
    out[..., 0, 0] = m[..., 1, 1]
    out[..., 1, 1] = m[..., 0, 0]
    out[..., 0, 1] = -m[..., 0, 1]
    out[..., 1, 0] = -m[..., 1, 0]
    return out


def normalize(m):
    """Scale to determinant one."""
    m = np.asarray(m, dtype=complex)
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    return m / np.sqrt(det)[..., None, None]


def distance(p, q):
    p = np.asarray(p)
    q = np.asarray(q)
    # equals arccosh(1 + 2|p-q|^2 / ((1-|p|^2)(1-|q|^2))) without its cancellation
    r = np.abs(p - q) / np.abs(1.0 - np.conj(p) * q)
    return 2.0 * np.arctanh(np.minimum(r, 1.0))


def log(p, q):
    """Unit-frame tangent vector at p pointing to q with length d(p, q).

    Returned as a complex number (x + iy components).
    """
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    w = (q - p) / (1.0 - np.conj(p) * q)
    r = np.abs(w)
    d = 2.0 * np.arctanh(np.minimum(r, 1.0 - 1e-16))
    with np.errstate(invalid="ignore", divide="ignore"):
        direction = np.where(r > 0, w / np.where(r > 0, r, 1.0), 0.0)
    # push-forward of the direction from 0 back to p is the identity map on
    # unit-frame directions for the hyperbolic translation along p
    return d * direction


def exp(p, v):
    """Exponential map from p along the unit-frame vector v (complex)."""
    p = np.asarray(p, dtype=complex)
    v = np.asarray(v, dtype=complex)
    t = np.abs(v)
    small = t < 1e-8
    with np.errstate(invalid="ignore", divide="ignore"):
        factor = np.where(small, 0.5, np.tanh(t / 2.0) / np.where(small, 1.0, t))
    w = factor * v
    return (w + p) / (1.0 + np.conj(p) * w)


def midpoint(p, q):
    w = (q - p) / (1.0 - np.conj(p) * q)
    r = np.abs(w)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(r > 0, np.tanh(np.arctanh(r) / 2.0) / np.where(r > 0, r, 1.0), 0.0)
    w = w * s
    return (w + p) / (1.0 + np.conj(p) * w)


def isometry_between(p1, p2, q1, q2):
    """Orientation-preserving isometry with p1 -> q1, p2 -> q2.

    Requires d(p1, p2) == d(q1, q2).
    """
    a = to_origin(p1)
    b = to_origin(q1)
    wp = mobius(a, p2)
    wq = mobius(b, q2)
    rot = wq / wp
    rot = rot / abs(rot)
    r = np.array([[np.sqrt(rot), 0], [0, 1 / np.sqrt(rot)]], dtype=complex)
    return normalize(inverse(b) @ r @ a)
