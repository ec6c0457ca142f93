"""Computations behind the acceptance suite.

Every function returns a plain dict of measured values plus a "digest" of
its numerical outputs, so that two executions can be compared bit for bit.
Results are cached per process; run this file as a script to print all
digests (``--json``) from a fresh interpreter.
"""
from __future__ import annotations

import argparse
import functools
import hashlib
import json
import sys
import time

import numpy as np

from teichflow.flow import (FlowParams, cfl_dt, eta_sweep, kappa_sweep, metric_velocity_error,
                            run, run_limit_flow, standard_initial_data, tension_growth_check)
from teichflow.maps import harmonic_solve, identity_map, map_distance_c0
from teichflow.qdiff import divergence_residual, hqd_basis, project
from teichflow.qdiff.fields import QuadDiff, inner
from teichflow.surface import HypMetric, build_genus2_octagon, total_area, uniformize
from teichflow.surface.metrics import metric_distance_C0
from teichflow.targets import HyperbolicQuotient

LEVEL = 3
ETAS = [0.4, 0.2, 0.1, 0.05]
KAPPAS = [4, 8, 16, 32]
KAPPA_T = 0.2
ETA_T = 1.0


class Digest:
    def __init__(self):
        self._h = hashlib.sha256()

    def add(self, *arrays):
        for a in arrays:
            a = np.ascontiguousarray(np.asarray(a))
            self._h.update(str(a.dtype).encode() + str(a.shape).encode())
            self._h.update(a.tobytes())
        return self

    def hexdigest(self):
        return self._h.hexdigest()


def _add_traj(d, traj):
    d.add(np.array([r.values() for r in traj.rows], float))
    for n in sorted(traj.snapshots):
        _, u, g = traj.snapshots[n]
        d.add(u.points, g.edge_length)


@functools.lru_cache(maxsize=None)
def octagon(level):
    return build_genus2_octagon(level)


@functools.lru_cache(maxsize=None)
def initial_data(level=LEVEL, harmonic=True):
    mesh, g = octagon(level)
    init, _ = standard_initial_data(mesh, g, s=0.5, harmonic=harmonic)
    return init


def _timed(fn):
    @functools.wraps(fn)
    def wrapper():
        t0 = time.perf_counter()
        out = fn()
        out["seconds"] = time.perf_counter() - t0
        return out
    return functools.lru_cache(maxsize=None)(wrapper)


@_timed
def structure():
    out, d = {}, Digest()
    rng = np.random.default_rng(1)
    for level in (3, 4):
        mesh, g = octagon(level)
        g1 = uniformize(mesh, HypMetric(g.edge_length * (1 + 0.05 * rng.random(mesh.n_edges))),
                        tol=1e-12)
        g2, info = uniformize(mesh, g1, tol=1e-12, return_info=True)
        out[f"euler_{level}"] = mesh.euler_characteristic()
        out[f"area_error_{level}"] = abs(total_area(mesh, g1) - 4 * np.pi)
        out[f"idempotence_{level}"] = float(np.abs(g2.edge_length - g1.edge_length).max())
        out[f"idempotence_iterations_{level}"] = info["iterations"]
        d.add(g1.edge_length, g2.edge_length)
    mesh, _ = octagon(LEVEL)
    init = initial_data(LEVEL, harmonic=False)
    target = HyperbolicQuotient()
    tol = 1e-8
    a = harmonic_solve(mesh, init.g, identity_map(mesh, target), target, tol=tol)
    v = 0.3 * (rng.standard_normal(mesh.n_vertices) + 1j * rng.standard_normal(mesh.n_vertices))
    start = identity_map(mesh, target)
    b = harmonic_solve(mesh, init.g, start.with_points(target.retract(start.points, v)), target,
                       tol=tol)
    out["harmonic_tol"] = tol
    out["harmonic_c0"] = map_distance_c0(a, b, target)
    d.add(a.points, b.points)
    out["digest"] = d.hexdigest()
    return out


@_timed
def hqd():
    out, d = {}, Digest()
    mesh, g = octagon(LEVEL)
    B = hqd_basis(mesh, g)
    out["kernel_dim"] = B.kernel_dim()
    out["count"] = B.count
    out["separation"] = B.separation
    rng = np.random.default_rng(5)
    idem = orth = contr = 0.0
    for _ in range(20):
        phi = QuadDiff(rng.standard_normal(mesh.n_faces) + 1j * rng.standard_normal(mesh.n_faces))
        p = project(mesh, g, phi, B)
        pp = project(mesh, g, p, B)
        scale = np.sqrt(inner(mesh, g, phi, phi).real)
        idem = max(idem, np.abs(pp.values - p.values).max() / np.abs(p.values).max())
        orth = max(orth, max(abs(inner(mesh, g, phi - p, B.element(k)).real) for k in range(B.count))
                   / scale)
        contr = max(contr, np.sqrt(inner(mesh, g, p, p).real) / scale - 1)
        d.add(p.values)
    out["idempotence"] = float(idem)
    out["orthogonality"] = float(orth)
    out["contraction_excess"] = float(contr)
    out["trace"] = max(float(np.abs(B.element(k).real_part().trace()).max())
                       for k in range(B.count))
    res = {}
    for level in (3, 4):
        m, gl = octagon(level)
        Bl = B if level == LEVEL else hqd_basis(m, gl)
        res[level] = max(divergence_residual(m, gl, Bl.element(k).real_part())
                         for k in range(Bl.count))
        d.add(Bl.elements, Bl.gram)
    out["divergence"] = [res[3], res[4]]
    out["divergence_ratio_new_over_old"] = res[4] / res[3]
    out["digest"] = d.hexdigest()
    return out


@_timed
def energy_identity():
    """eta = 0.1 runs from a non-harmonic start at dt0, dt0/2, dt0/4."""
    mesh, _ = octagon(LEVEL)
    init = initial_data(LEVEL, harmonic=False)
    target = HyperbolicQuotient()
    dt0 = cfl_dt(init.g, 1.0, ETA_T)
    d = Digest()
    res, lengths = [], []
    for k in range(3):
        p = FlowParams.eta_flow(0.1, dt=dt0 / 2 ** k, T=ETA_T)
        tr = run(mesh, init, p, target)
        res.append(float(tr.column("eires").max()))
        lengths.append(_length_record(tr, 0.1, ETA_T))
        _add_traj(d, tr)
    return {"dt0": dt0, "max_residual": res,
            "ratios": [res[0] / res[1], res[1] / res[2]],
            "lengths": lengths, "digest": d.hexdigest()}


def _length_record(traj, eta, T):
    E0 = float(traj.rows[0].E)
    return {"eta": eta, "L2len": float(traj.rows[-1].L2len),
            "bound": eta * np.sqrt(T * E0) * 1.05}


@_timed
def eta_suite():
    mesh, _ = octagon(LEVEL)
    init = initial_data(LEVEL, harmonic=True)
    target = HyperbolicQuotient()
    rep = eta_sweep(mesh, init, ETAS, ETA_T, target)
    d = Digest()
    _add_traj(d, rep.reference)
    growth, lengths = [], []
    for eta in ETAS:
        tr = rep.trajectories[eta]
        _add_traj(d, tr)
        growth.append(tension_growth_check(tr).max_growth)
        lengths.append(_length_record(tr, eta, ETA_T))
    out = rep.summary()
    out["tension_growth"] = growth
    out["tension_ratios"] = [a / b for a, b in zip(growth[:-1], growth[1:])]
    out["lengths"] = lengths
    out["digest"] = d.hexdigest()
    return out


@_timed
def kappa_suite():
    mesh, _ = octagon(LEVEL)
    init = initial_data(LEVEL, harmonic=True)
    target = HyperbolicQuotient()
    rep = kappa_sweep(mesh, init, KAPPAS, KAPPA_T, 0.1 * KAPPA_T, target, n_compare=20)
    d = Digest()
    for k in KAPPAS:
        _add_traj(d, rep.trajectories[k])
    _add_traj(d, rep.limit)
    out = rep.summary()
    out["digest"] = d.hexdigest()
    return out


@_timed
def limit_velocity():
    """Central-difference metric velocity of a short limit run on level 4."""
    mesh, _ = octagon(4)
    init = initial_data(4, harmonic=False)
    target = HyperbolicQuotient()
    p = FlowParams(dt=0.005, T=0.02, harmonic_tol=1e-9)
    tr = run_limit_flow(mesh, init.g, init.u, p, target, keep_states=range(5))
    worst, errs = metric_velocity_error(mesh, tr, target)
    d = Digest()
    _add_traj(d, tr)
    return {"max_error": float(worst), "errors": [float(e) for e in errs],
            "digest": d.hexdigest()}


@_timed
def uniqueness():
    mesh, _ = octagon(LEVEL)
    init = initial_data(LEVEL, harmonic=False)
    target = HyperbolicQuotient()
    T, n, tol = 0.2, 20, 1e-7
    trs = [run_limit_flow(mesh, init.g, init.u, FlowParams(dt=T / n, T=T, harmonic_tol=t),
                          target, keep_states=range(n + 1)) for t in (tol, tol / 10)]
    dist = max(metric_distance_C0(mesh, trs[0].snapshots[j][2], trs[1].snapshots[j][2],
                                  trs[1].snapshots[j][2]) for j in range(n + 1))
    d = Digest()
    for tr in trs:
        _add_traj(d, tr)
    return {"distance": float(dist), "bound": 10 * tol * T, "digest": d.hexdigest()}


SUITES = {"structure": structure, "hqd": hqd, "energy_identity": energy_identity,
          "eta": eta_suite, "kappa": kappa_suite, "limit_velocity": limit_velocity,
          "uniqueness": uniqueness}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("suites", nargs="*", default=list(SUITES))
    ap.add_argument("--json", action="store_true", help="print digests as JSON")
    args = ap.parse_args(argv)
    result = {}
    for name in args.suites:
        out = SUITES[name]()
        result[name] = out["digest"] if args.json else out
    if args.json:
        json.dump(result, sys.stdout, sort_keys=True)
        print()
    else:
        for name, out in result.items():
            print(name, json.dumps(out, default=float, indent=1))
    return 0


if __name__ == "__main__":
    sys.exit(main())
