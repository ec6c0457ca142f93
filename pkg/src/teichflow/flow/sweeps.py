"""Parameter sweeps over the coupling constant and tension-growth bookkeeping."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from ..maps.diagnostics import map_distance_c0, map_distance_l2
from ..surface.metrics import metric_distance_C0
from .core import FlowParams, FlowState, cfl_dt, run
from .limit import run_limit_flow


class ConcentrationAlarm(RuntimeError):
    pass


def _call(job):
    fn, args, kwargs = job
    return fn(*args, **kwargs)


def run_jobs(jobs, calls):
    """Evaluate independent (fn, args, kwargs) calls, in worker processes
    when jobs > 1; results come back in call order."""
    if jobs <= 1 or len(calls) <= 1:
        return [_call(c) for c in calls]
    from concurrent.futures import ProcessPoolExecutor
    with ProcessPoolExecutor(max_workers=min(jobs, len(calls))) as ex:
        return list(ex.map(_call, calls))


def loglog_slope(x, y):
    """Least-squares slope of log y against log x (nonpositive entries dropped)."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    ok = (x > 0) & (y > 0)
    if ok.sum() < 2:
        return np.nan
    return float(np.polyfit(np.log(x[ok]), np.log(y[ok]), 1)[0])


def concentration_growing(traj, rel=1e-3):
    """True when the sampled energy concentration grows monotonically."""
    vals = [r.conc for r in traj.rows if not np.isnan(r.conc)]
    # consecutive duplicates are carried samples, not new measurements
    samples = [v for k, v in enumerate(vals) if k == 0 or v != vals[k - 1]]
    if len(samples) < 3:
        return False
    s = np.array(samples)
    return bool(np.all(np.diff(s) >= 0) and s[-1] > s[0] * (1 + rel))


@dataclass
class EtaSweepReport:
    etas: list
    sup_dC0: list
    sup_map_l2: list
    slope_dC0: float
    monotone_map_l2: bool
    trajectories: dict = field(default_factory=dict, repr=False)
    reference: object = field(default=None, repr=False)

    def summary(self):
        return {"etas": list(self.etas), "sup_dC0": list(self.sup_dC0),
                "sup_map_l2": list(self.sup_map_l2), "slope": self.slope_dC0,
                "monotone_map_l2": self.monotone_map_l2}


def eta_sweep(mesh, init, etas, T, target, dt=None, jobs=1, **kw):
    """Runs at a = 1, b = eta^2/4 against the b = 0 reference from one init.

    Map distances are taken at every step on the initial metric.  The map
    distance is expected to be nonincreasing along etas listed in
    decreasing order.
    """
    dt = dt if dt is not None else cfl_dt(init.g, 1.0, T, kw.get("cfl", 0.2))
    steps = range(int(round(T / dt)) + 1)
    ref = run(mesh, init, FlowParams(a_map=1.0, b_metric=0.0, dt=dt, T=T, **kw), target,
              keep_states=steps)
    if concentration_growing(ref):
        raise ConcentrationAlarm("energy concentration grows along the reference run")
    g0 = init.g
    todo = [e for e in etas if e != 0]
    done = run_jobs(jobs, [(run, (mesh, init, FlowParams.eta_flow(e, dt=dt, T=T, **kw), target),
                            {"g_ref": g0, "keep_states": steps}) for e in todo])
    trajs = dict(zip(todo, done))
    sup_d, sup_m = [], []
    for eta in etas:
        tr = trajs.setdefault(eta, ref)
        sup_d.append(float(tr.column("dC0").max()))
        sup_m.append(max(map_distance_l2(mesh, g0, tr.snapshots[n][1], ref.snapshots[n][1], target)
                         for n in steps))
    order = np.argsort(etas)[::-1]
    m = np.array(sup_m)[order]
    return EtaSweepReport(list(etas), sup_d, sup_m, loglog_slope(etas, sup_d),
                          bool(np.all(np.diff(m) <= 0)), trajs, ref)


@dataclass
class KappaSweepReport:
    kappas: list
    T: float
    eps: float
    max_tension: list
    pair_dC0: list
    limit_dC0: list
    limit_map_c0: list
    slope_tension: float
    trajectories: dict = field(default_factory=dict, repr=False)
    limit: object = field(default=None, repr=False)

    @property
    def pair_decreasing(self):
        return bool(np.all(np.diff(self.pair_dC0) < 0))

    @property
    def limit_decreasing(self):
        return bool(np.all(np.diff(self.limit_dC0) < 0))

    def summary(self):
        return {"kappas": list(self.kappas), "T": self.T, "eps": self.eps,
                "max_tension": list(self.max_tension), "slope": self.slope_tension,
                "pair_dC0": list(self.pair_dC0), "pair_decreasing": self.pair_decreasing,
                "limit_dC0": list(self.limit_dC0), "limit_decreasing": self.limit_decreasing,
                "limit_map_c0": list(self.limit_map_c0)}


def kappa_sweep(mesh, init, kappas, T, eps, target, n_compare=20, harmonic_tol=1e-8,
                limit=None, jobs=1, **kw):
    """Rescaled runs (a = kappa, b = 1) compared with each other and with the limit flow.

    Every run, the limit run included, uses the CFL step of the largest kappa,
    so that the metric update carries the same time-discretization error in
    all of them and their differences isolate the kappa dependence.  Runs are
    compared on the grid t_j = j T / n_compare.  A precomputed limit
    trajectory with snapshots on that grid may be passed in.
    """
    cfl = kw.get("cfl", 0.2)
    H = T / n_compare
    m = int(round(H / cfl_dt(init.g, max(kappas), H, cfl)))
    dt = H / m
    grid = range(0, n_compare * m + 1, m)
    calls = [(run, (mesh, init, FlowParams.rescaled_flow(k, dt=dt, T=T, **kw), target),
              {"keep_states": grid}) for k in kappas]
    if limit is None:
        calls.append((run_limit_flow, (mesh, init.g, init.u,
                                       FlowParams(dt=dt, T=T, harmonic_tol=harmonic_tol, **kw),
                                       target), {"keep_states": grid}))
    done = run_jobs(jobs, calls)
    if limit is None:
        limit = done.pop()
    lim = [limit.snapshots[n] for n in grid]
    trajs = dict(zip(kappas, done))
    grids = {k: [trajs[k].snapshots[n] for n in grid] for k in kappas}
    late = [j for j in range(n_compare + 1) if j * H >= eps * (1 - 1e-12)]
    max_T, lim_d, lim_m = [], [], []
    for k in kappas:
        tr = trajs[k]
        t, T2 = tr.column("t"), tr.column("T2")
        max_T.append(float(T2[t >= eps * (1 - 1e-12)].max()))
        lim_d.append(max(metric_distance_C0(mesh, grids[k][j][2], lim[j][2], lim[j][2]) for j in late))
        lim_m.append(max(map_distance_c0(grids[k][j][1], lim[j][1], target)
                         for j in late))
    pair = []
    for a, b in zip(kappas[:-1], kappas[1:]):
        pair.append(max(metric_distance_C0(mesh, grids[a][j][2], grids[b][j][2], grids[b][j][2])
                        for j in range(n_compare + 1)))
    return KappaSweepReport(list(kappas), T, eps, max_T, pair, lim_d, lim_m,
                            loglog_slope(kappas, max_T), trajs, limit)


@dataclass
class TensionGrowthReport:
    max_growth: float
    E0: float
    delta: float
    eta: float
    implied_C: float
    max_increment: float


def tension_growth_check(traj, eta=None, delta=None):
    """Max positive part of (T_{n+1} - T_n)/dt and the constant it implies
    against E0^3 delta^-2 eta^4 (delta: half the smallest recorded systole)."""
    t, T2 = traj.column("t"), traj.column("T2")
    inc = np.diff(T2)
    growth = np.maximum(inc / np.diff(t), 0.0)
    mg = float(growth.max()) if growth.size else 0.0
    E0 = float(traj.rows[0].E)
    if delta is None:
        s = traj.column("systole")
        delta = 0.5 * float(np.nanmin(s)) if np.any(~np.isnan(s)) else np.nan
    if eta is None:
        b = traj.info.get("params", {}).get("b_metric", np.nan)
        eta = 2 * np.sqrt(b)
    scale = E0 ** 3 * delta ** -2 * eta ** 4
    C = mg / scale if scale > 0 else np.nan
    return TensionGrowthReport(mg, E0, delta, float(eta), float(C),
                               float(inc.max()) if inc.size else 0.0)
