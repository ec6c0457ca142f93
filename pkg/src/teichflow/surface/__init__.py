from .charts import FaceChart, face_charts, face_metric_matrices
from .geometry import (corner_angles, face_areas, total_area, triangle_angles,
                       vertex_defect, vertex_defects)
from .io import dumps, load, loads, save
from .mesh import DegenerateTriangle, HalfedgeMesh, HypMetric, MeshError
from .metrics import metric_distance_C0, metric_l2_norm
from .octagon import build_genus2_octagon
from .systole import systole_upper
from .uniformize import NonConvergence, scale_lengths, uniformize

__all__ = [
    "FaceChart", "face_charts", "face_metric_matrices", "corner_angles", "face_areas",
    "total_area", "triangle_angles", "vertex_defect", "vertex_defects", "dumps", "load",
    "loads", "save", "DegenerateTriangle", "HalfedgeMesh", "HypMetric", "MeshError",
    "metric_distance_C0", "metric_l2_norm", "build_genus2_octagon", "systole_upper",
    "NonConvergence", "scale_lengths", "uniformize",
]
