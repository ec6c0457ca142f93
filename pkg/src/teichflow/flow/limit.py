"""The limit flow: metrics moving by the Hopf differential of the harmonic
map they determine."""
from __future__ import annotations

import dataclasses

import numpy as np

from ..maps.harmonic import harmonic_solve
from ..qdiff.fields import qd_norms
from ..qdiff.hopf import hopf
from ..surface.charts import face_metric_matrices
from ..surface.geometry import euclidean_layout, face_areas
from ..surface.metrics import metric_distance_C0, metric_l2_norm
from ..surface.systole import systole_upper
from ..surface.uniformize import NonConvergence
from ..qdiff.basis import SpectralGapTooSmall
from ..surface.mesh import DegenerateTriangle
from ..targets.base import STRICTLY_NEGATIVE, CurvatureClassViolation
from .core import (DegenerationAlarm, DiagnosticsRow, FlowAbort, FlowState, Trajectory,
                   _monitor, evaluate, metric_step)


def run_limit_flow(mesh, g0, u0, params, target, keep_states=None, monitor=True):
    """Alternate u_n = harmonic(g_n, u_{n-1}) and g_{n+1} = uniformize(g_n + dt Re P Phi).

    params.b_metric is ignored (the limit flow moves the metric at unit speed);
    params.a_map only enters the residual bookkeeping and is set to zero.
    trajectory.info["nonhol_l1"] holds ||Phi - P Phi||_L1 per row.
    """
    if target.curvature_class != STRICTLY_NEGATIVE:
        raise CurvatureClassViolation("the limit flow needs a strictly negatively curved target")
    p = dataclasses.replace(params, a_map=0.0, b_metric=1.0)
    keep = set(keep_states or ())
    traj = Trajectory(info={"params": dataclasses.asdict(p), "nonhol_l1": []})
    u = harmonic_solve(mesh, g0, u0, target, tol=p.harmonic_tol)
    state = FlowState(0.0, u, g0)
    sys0 = systole_upper(mesh, g0) if monitor else np.nan
    traj.info["systole0"] = sys0
    sys_cur, conc_cur = sys0, np.nan
    prev = None
    n_total = p.n_steps
    while True:
        try:
            ev = evaluate(mesh, state, p, target)
        except SpectralGapTooSmall as exc:
            raise FlowAbort(exc, state) from exc
        n = state.step
        if monitor and (n % p.monitor_every == 0 or n == n_total):
            sys_cur, conc_cur = _monitor(mesh, state, target, p)
            if sys_cur < 0.5 * sys0:
                raise DegenerationAlarm(state.t, sys_cur, sys0)
        if prev is not None:
            pev, prow = prev
            prow.eires = abs((ev.E - pev.E) / p.dt + pev.pphi_l2 ** 2 / 4)
        if n in keep:
            traj.snapshots[n] = (state.t, state.u.copy(), state.g.copy())
        row = DiagnosticsRow(state.t, ev.E, ev.T2, ev.pphi_l2, state.L2len, sys_cur,
                             metric_distance_C0(mesh, state.g, g0, g0), np.nan,
                             ev.dbar_l1, conc_cur)
        traj.append(row)
        traj.info["nonhol_l1"].append(qd_norms(mesh, state.g, ev.phi - ev.pphi)[0])
        if n == n_total:
            row.eires = traj.rows[-2].eires if len(traj.rows) > 1 else 0.0
            break
        try:
            g = metric_step(mesh, state.g, state.basis, ev.coeffs, p.dt, p.uniformize_tol)
            u = harmonic_solve(mesh, g, state.u, target, tol=p.harmonic_tol)
        except (DegenerateTriangle, NonConvergence) as exc:
            raise FlowAbort(exc, state) from exc
        prev = (ev, row)
        state = FlowState(state.t + p.dt, u, g, state.basis, n + 1,
                          state.L2len + p.dt * ev.pphi_l2)
    traj.final = state
    return traj


def edge_strain(mesh, g, h):
    """h(T, T) along every edge for unit T, averaged over the two faces of
    the edge; h is a per-face tensor in g's Euclidean face charts."""
    Z = euclidean_layout(g.face_lengths(mesh))
    out = np.zeros(mesh.n_edges)
    for he in (mesh.edge_he, mesh.twin[mesh.edge_he]):
        f, k = he // 3, he % 3
        e = Z[f, (k + 1) % 3] - Z[f, k]
        e = np.stack([e.real, e.imag], axis=1) / np.abs(e)[:, None]
        out += 0.5 * np.einsum("ei,eij,ej->e", e, h[f], e)
    return out


def metric_velocity_error(mesh, traj, target, steps=None, mode="edge"):
    """Relative L2 error between the central difference of g in t and Re Phi(u, g).

    mode="edge" compares log-strain rates d(log l^2)/dt of the edges with the
    edge strain of Re Phi, weighted by the edge's share of area; this is the
    comparison in the metric's own degrees of freedom.  mode="face" compares
    per-face chart tensors fitted to the edge lengths, which carry an extra
    first-order oscillation (three edge samples of a varying field cannot be
    matched by one constant tensor).
    Needs snapshots at n-1, n, n+1 for every checked n.  Returns the max over
    the checked steps and the per-step values.
    """
    snaps = traj.snapshots
    if steps is None:
        steps = [n for n in sorted(snaps) if n - 1 in snaps and n + 1 in snaps]
    errs = []
    for n in steps:
        t0, _, gm = snaps[n - 1]
        _, u, g = snaps[n]
        t2, _, gp = snaps[n + 1]
        R = hopf(mesh, g, u, target).real_part().values
        if mode == "face":
            H = (face_metric_matrices(mesh, gp, g) - face_metric_matrices(mesh, gm, g)) / (t2 - t0)
            errs.append(metric_l2_norm(mesh, H - R, g) / metric_l2_norm(mesh, R, g))
            continue
        l2 = g.edge_length ** 2
        rate = (gp.edge_length ** 2 - gm.edge_length ** 2) / ((t2 - t0) * l2)
        ref = edge_strain(mesh, g, R)
        A = face_areas(mesh, g)
        w = (A[mesh.edge_he // 3] + A[mesh.twin[mesh.edge_he] // 3]) / 3
        errs.append(np.sqrt(np.sum(w * (rate - ref) ** 2) / np.sum(w * ref ** 2)))
    errs = np.array(errs)
    return (float(errs.max()) if errs.size else np.nan), errs
