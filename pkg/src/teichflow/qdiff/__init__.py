from .basis import (HQDBasis, SpectralGapTooSmall, edge_tangential, export_csv, hqd_basis,
                    project, project_coefficients)
from .dbar import dbar_l1, dbar_residual, divergence_residual, edge_mismatch, weak_divergence
from .fields import QuadDiff, Sym2Field, inner, qd_norms
from .hopf import energy_density, hopf, pullback_metric

__all__ = [
    "HQDBasis", "SpectralGapTooSmall", "edge_tangential", "export_csv", "hqd_basis", "project",
    "project_coefficients", "dbar_l1", "dbar_residual", "divergence_residual", "edge_mismatch",
    "weak_divergence", "QuadDiff", "Sym2Field", "inner", "qd_norms", "energy_density", "hopf",
    "pullback_metric",
]
