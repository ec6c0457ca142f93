"""Initial data for flow experiments."""
from __future__ import annotations

import numpy as np

from ..maps.harmonic import harmonic_solve
from ..maps.state import identity_map
from ..qdiff.basis import hqd_basis
from ..targets.hyperbolic import HyperbolicQuotient
from .core import FlowState, metric_step


def perturbed_metric(mesh, g, s, element=0, basis=None, tol=1e-11):
    """uniformize(g + s Re psi_k) for the k-th real HQD basis element of g."""
    basis = basis if basis is not None else hqd_basis(mesh, g)
    c = np.zeros(basis.count)
    c[element] = 1.0
    return metric_step(mesh, g, basis, c, s, tol)


def standard_initial_data(mesh, g, s=0.5, element=0, harmonic=True, target=None, tol=1e-10):
    """Domain metric moved off the octagon structure along Re psi_k, target
    the octagon surface, map in the identity class (harmonic if requested).

    s = 0 gives the matched structures, where the identity is conformal.
    """
    target = target if target is not None else HyperbolicQuotient()
    g1 = perturbed_metric(mesh, g, s, element) if s != 0 else g
    u = identity_map(mesh, target)
    if harmonic:
        u = harmonic_solve(mesh, g1, u, target, tol=tol)
    return FlowState(0.0, u, g1), target
