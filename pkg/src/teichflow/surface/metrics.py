"""Metric-space diagnostics: C0 distance between metrics, L2 norms of
symmetric 2-tensors."""
import numpy as np

from .charts import face_metric_matrices
from .geometry import face_areas


def _inv_sqrt_spd(G):
    w, V = np.linalg.eigh(G)
    if np.any(w <= 0):
        f = int(np.flatnonzero((w <= 0).any(axis=1))[0])
        raise ValueError(f"metric matrix of face {f} is not positive definite")
    return np.einsum("fij,fj,fkj->fik", V, w ** -0.5, V)


def metric_distance_C0(mesh, g1, g2, ref):
    """max over faces of |G_ref^{-1/2} (G1 - G2) G_ref^{-1/2}|_op in ref charts."""
    G1 = face_metric_matrices(mesh, g1, ref)
    G2 = face_metric_matrices(mesh, g2, ref)
    Gr = face_metric_matrices(mesh, ref, ref)
    for G in (G1, G2):
        if np.any(np.linalg.eigvalsh(G)[:, 0] <= 0):
            raise ValueError("metric matrix is not positive definite")
    S = _inv_sqrt_spd(Gr)
    D = S @ (G1 - G2) @ S
    return float(np.abs(np.linalg.eigvalsh(D)).max())


def metric_l2_norm(mesh, h, g):
    """sqrt(sum_f area_f tr(G^-1 H G^-1 H)); h is a Sym2Field in g's charts
    (where G is the identity)."""
    H = h.values if hasattr(h, "values") else np.asarray(h)
    area = face_areas(mesh, g)
    return float(np.sqrt(np.sum(area * np.einsum("fij,fji->f", H, H))))
