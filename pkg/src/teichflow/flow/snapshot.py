"""Binary flow snapshots for abort recovery and resume."""
from __future__ import annotations

import json

import numpy as np

from ..maps.state import MapState
from ..qdiff.basis import hqd_basis
from ..surface.mesh import HypMetric
from .core import CSV_COLUMNS, DiagnosticsRow, FlowState, Trajectory

FORMAT = "teichflow-snapshot"
VERSION = 1


class SnapshotError(ValueError):
    pass


def save_snapshot(path, state, trajectory=None, g_ref=None, config_hash="", params_digest=""):
    """Write state (and the rows recorded so far) to an .npz file."""
    rows = trajectory.rows if trajectory is not None else []
    meta = {"format": FORMAT, "version": VERSION, "config_hash": config_hash,
            "params": params_digest, "t": repr(float(state.t)), "step": state.step,
            "L2len": repr(float(state.L2len)), "mesh": state.u.mesh_digest,
            "equivariance": state.u.equivariance,
            "info": {k: v for k, v in (trajectory.info.items() if trajectory else [])
                     if k in ("systole0",)}}
    arrays = {"points": state.u.points, "g": state.g.edge_length,
              "rows": np.array([r.values() for r in rows], dtype=float).reshape(-1, len(CSV_COLUMNS))}
    if state.basis is not None:
        arrays["basis_g"] = state.basis.edge_length
    if g_ref is not None:
        arrays["g_ref"] = g_ref.edge_length
    with open(path, "wb") as fh:
        np.savez(fh, meta=np.array(json.dumps(meta, default=float)), **arrays)


def load_snapshot(path, mesh, config_hash=None, min_separation=100.0):
    """Returns (state, trajectory, g_ref); g_ref is None when not stored."""
    with np.load(path, allow_pickle=False) as z:
        meta = json.loads(str(z["meta"]))
        if meta.get("format") != FORMAT or meta.get("version") != VERSION:
            raise SnapshotError(f"{path}: not a version {VERSION} snapshot")
        if config_hash is not None and meta["config_hash"] != config_hash:
            raise SnapshotError(f"{path}: snapshot belongs to config {meta['config_hash']}")
        if meta["mesh"] != mesh.digest():
            raise SnapshotError(f"{path}: snapshot was taken on another mesh")
        eq = meta["equivariance"]
        if eq is not None:
            eq = (eq[0], tuple(eq[1]))
        u = MapState(z["points"].copy(), meta["mesh"], eq)
        g = HypMetric(z["g"].copy())
        basis = None
        if "basis_g" in z:
            basis = hqd_basis(mesh, HypMetric(z["basis_g"].copy()), min_separation=min_separation)
        g_ref = HypMetric(z["g_ref"].copy()) if "g_ref" in z else None
        rows = [DiagnosticsRow(*map(float, r)) for r in z["rows"]]
    state = FlowState(float(meta["t"]), u, g, basis, int(meta["step"]), float(meta["L2len"]))
    traj = Trajectory(rows=rows, info=dict(meta["info"]))
    return state, traj, g_ref
