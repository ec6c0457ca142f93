"""Discrete maps from the mesh into a target."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


class Incomparable(ValueError):
    pass


@dataclass(eq=False)
class MapState:
    """Per-vertex target points.

    For the hyperbolic quotient the point of vertex v is the lift of the
    octagon-canonical copy of v; the lifts of other corners follow from the
    mesh's group words and the target representation, so equivariance holds
    by construction.
    """
    points: np.ndarray
    mesh_digest: str
    equivariance: object = None

    def copy(self):
        return MapState(self.points.copy(), self.mesh_digest, self.equivariance)

    def with_points(self, points):
        return MapState(points, self.mesh_digest, self.equivariance)

    def comparable(self, other):
        if self.mesh_digest != other.mesh_digest:
            raise Incomparable("maps live on different meshes")
        if self.equivariance != other.equivariance:
            raise Incomparable("maps carry different equivariance data")
        if self.points.shape != other.points.shape:
            raise Incomparable("maps live in different targets")

    def dumps(self):
        pts = self.points
        if np.iscomplexobj(pts):
            rows = [[repr(float(z.real)), repr(float(z.imag))] for z in pts]
        else:
            rows = [[repr(float(x)) for x in row] for row in pts]
        eq = self.equivariance
        return json.dumps({"format": "teichflow-map", "version": 1,
                           "mesh": self.mesh_digest, "complex": bool(np.iscomplexobj(pts)),
                           "equivariance": list(eq) if eq is not None else None,
                           "points": rows}, indent=0)

    @classmethod
    def loads(cls, text):
        d = json.loads(text)
        if d.get("format") != "teichflow-map" or d.get("version") != 1:
            raise ValueError("not a teichflow map file")
        arr = np.array([[float(x) for x in row] for row in d["points"]])
        pts = arr[:, 0] + 1j * arr[:, 1] if d["complex"] else arr
        eq = d["equivariance"]
        if eq is not None:
            eq = (eq[0], tuple(eq[1]))
        return cls(pts, d["mesh"], eq)


def make_map(mesh, target, points):
    return MapState(np.asarray(points), mesh.digest(), target.equivariance(mesh))


def identity_map(mesh, target):
    """The octagon identity map (hyperbolic target with the octagon group)."""
    if mesh.vertex_lift is None:
        raise ValueError("mesh has no canonical vertex lifts")
    return make_map(mesh, target, mesh.vertex_lift.copy())


def constant_map(mesh, target, p):
    p = np.asarray(p)
    return make_map(mesh, target, np.broadcast_to(p, (mesh.n_vertices,) + p.shape).copy())
