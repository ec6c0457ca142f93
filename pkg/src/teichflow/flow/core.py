"""Time stepping of the coupled map/metric flow.

Both updates are computed from the state at time t (Jacobi style):
    u <- retract(u, dt * a * tau)
    g <- uniformize(g + dt * b * Re(P_g Phi))
The metric increment acts on edge lengths through the tangential component
of Re(P_g Phi) averaged along each edge.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from ..maps.diagnostics import local_energy_concentration
from ..maps.energy import energy, tension, tension_l2sq
from ..qdiff.basis import HQDBasis, SpectralGapTooSmall, edge_tangential, hqd_basis, project
from ..qdiff.dbar import dbar_l1
from ..qdiff.fields import qd_norms
from ..qdiff.hopf import hopf
from ..surface.geometry import corner_angles
from ..surface.mesh import DegenerateTriangle, HypMetric
from ..surface.metrics import metric_distance_C0
from ..surface.systole import systole_upper
from ..surface.uniformize import NonConvergence, uniformize
from ..targets.base import StepTooLarge

CSV_COLUMNS = ("t", "E", "T2", "PPhi_l2", "L2len", "systole", "dC0", "eires", "dbar_l1", "conc")


class CFLViolation(ValueError):
    pass


class DegenerationAlarm(RuntimeError):
    def __init__(self, t, systole, initial):
        self.t, self.systole, self.initial = t, systole, initial
        super().__init__(f"systole {systole:.4g} fell below half its initial value "
                         f"{initial:.4g} at t = {t:.4g}")


class FlowAbort(RuntimeError):
    """Numerical failure inside a step; carries the last good state."""

    def __init__(self, cause, state):
        self.cause = cause
        self.state = state
        super().__init__(f"flow aborted at t = {state.t:.6g}: {cause!r}")


@dataclass(frozen=True)
class FlowParams:
    a_map: float = 1.0
    b_metric: float = 0.0
    dt: float = 1e-3
    T: float = 1.0
    uniformize_tol: float = 1e-11
    basis_refresh_threshold: float = 1e-3
    harmonic_tol: float = 1e-8
    cfl: float = 0.2
    monitor_every: int = 50
    r_probe: float = 0.5
    min_separation: float = 100.0
    snapshot_every: int = 0

    def __post_init__(self):
        if self.a_map < 0 or self.b_metric < 0:
            raise ValueError("flow speeds must be nonnegative")
        if not (self.dt > 0 and self.T > 0):
            raise ValueError("dt and T must be positive")
        n = self.T / self.dt
        if abs(n - round(n)) > 1e-9 * max(1.0, n):
            raise ValueError("T/dt must be an integer")

    @property
    def n_steps(self):
        return int(round(self.T / self.dt))

    @classmethod
    def eta_flow(cls, eta, **kw):
        return cls(a_map=1.0, b_metric=eta ** 2 / 4, **kw)

    @classmethod
    def rescaled_flow(cls, kappa, **kw):
        return cls(a_map=float(kappa), b_metric=1.0, **kw)

    def check_cfl(self, g):
        h = float(np.min(g.edge_length))
        if self.dt * self.a_map > self.cfl * h ** 2 * (1 + 1e-12):
            raise CFLViolation(f"dt * a_map = {self.dt * self.a_map:.3g} exceeds "
                               f"{self.cfl} * h_min^2 = {self.cfl * h * h:.3g}")

    def digest(self):
        blob = json.dumps(dataclasses.asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def cfl_dt(g, a_map, T, cfl=0.2):
    """Largest dt with dt * a_map <= cfl * h_min^2 and T/dt an integer."""
    h = float(np.min(g.edge_length))
    if a_map == 0:
        return T
    n = int(np.ceil(T * a_map / (cfl * h * h)))
    return T / n


@dataclass(eq=False)
class FlowState:
    t: float
    u: object
    g: HypMetric
    basis: HQDBasis | None = None
    step: int = 0
    L2len: float = 0.0


@dataclass
class DiagnosticsRow:
    t: float
    E: float
    T2: float
    PPhi_l2: float
    L2len: float
    systole: float
    dC0: float
    eires: float
    dbar_l1: float
    conc: float

    def values(self):
        return [getattr(self, c) for c in CSV_COLUMNS]


@dataclass
class Trajectory:
    rows: list = field(default_factory=list)
    snapshots: dict = field(default_factory=dict)
    final: FlowState | None = None
    info: dict = field(default_factory=dict)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows])

    def append(self, row):
        if self.rows and not row.t > self.rows[-1].t:
            raise ValueError("trajectory times must increase")
        self.rows.append(row)

    def to_csv(self, path):
        with open(path, "w") as fh:
            fh.write(",".join(CSV_COLUMNS) + "\n")
            for r in self.rows:
                fh.write(",".join(repr(float(x)) for x in r.values()) + "\n")

    def digest(self):
        h = hashlib.sha256()
        for r in self.rows:
            h.update(np.array(r.values(), dtype=float).tobytes())
        return h.hexdigest()


def ensure_basis(mesh, state, params):
    b = state.basis
    if b is not None:
        ref = HypMetric(b.edge_length)
        if metric_distance_C0(mesh, state.g, ref, ref) <= params.basis_refresh_threshold:
            return b
    state.basis = hqd_basis(mesh, state.g, min_separation=params.min_separation)
    return state.basis


@dataclass
class Evaluation:
    E: float
    tau: np.ndarray
    T2: float
    phi: object
    pphi: object
    coeffs: np.ndarray
    pphi_l2: float
    dbar_l1: float


def evaluate(mesh, state, params, target):
    ang = corner_angles(mesh, state.g)
    E = energy(mesh, state.g, state.u, target, ang)
    tau = tension(mesh, state.g, state.u, target, ang)
    T2 = tension_l2sq(mesh, state.g, state.u, target, tau, ang)
    phi = hopf(mesh, state.g, state.u, target)
    if params.b_metric > 0:
        basis = ensure_basis(mesh, state, params)
        pphi, c = project(mesh, state.g, phi, basis, return_coefficients=True)
        # |Re psi|_g^2 = 2 |psi|^2 pointwise
        pl2 = np.sqrt(2.0) * qd_norms(mesh, state.g, pphi)[1]
    else:
        pphi, c, pl2 = None, None, 0.0
    return Evaluation(E, tau, T2, phi, pphi, c, pl2, dbar_l1(mesh, state.g, phi))


def metric_step(mesh, g, basis, coeffs, scale, tol):
    """uniformize(g + scale * Re(sum_k coeffs_k psi_k)) on edge lengths."""
    ht = edge_tangential(mesh, basis, coeffs)
    stretch = 1.0 + scale * ht
    if np.any(stretch <= 0):
        raise DegenerateTriangle(-1, "metric step collapsed an edge")
    return uniformize(mesh, HypMetric(g.edge_length * np.sqrt(stretch)), tol=tol)


def advance(mesh, state, ev, params, target):
    dt = params.dt
    u, g = state.u, state.g
    if params.a_map > 0:
        u = u.with_points(target.retract(u.points, dt * params.a_map * ev.tau))
    if params.b_metric > 0:
        g = metric_step(mesh, g, state.basis, ev.coeffs, dt * params.b_metric,
                        params.uniformize_tol)
    return FlowState(state.t + dt, u, g, state.basis, state.step + 1,
                     state.L2len + dt * params.b_metric * ev.pphi_l2)


def step(mesh, state, params, target):
    """One flow step from state; returns the new state."""
    ev = evaluate(mesh, state, params, target)
    try:
        return advance(mesh, state, ev, params, target)
    except (StepTooLarge, DegenerateTriangle, NonConvergence) as exc:
        raise FlowAbort(exc, state) from exc


def energy_identity_residual(E0, E1, ev, params):
    return abs((E1 - E0) / params.dt + params.a_map * ev.T2
               + params.b_metric / 4 * ev.pphi_l2 ** 2)


def _monitor(mesh, state, target, params):
    return (systole_upper(mesh, state.g),
            local_energy_concentration(mesh, state.g, state.u, target, params.r_probe))


def run(mesh, init, params, target, g_ref=None, snapshot_hook=None, keep_states=None,
        check_cfl=True, monitor=True, resume=None):
    """Iterate step to time T, recording one DiagnosticsRow per time level.

    keep_states: iterable of step indices whose (t, u, g) are kept in
    trajectory.snapshots.  snapshot_hook(state, trajectory) is called every
    params.snapshot_every steps.  resume: the trajectory stored with a
    snapshot; init is then the snapshot state and the run continues as if
    it had never stopped (g_ref must be the original initial metric).
    """
    if check_cfl:
        params.check_cfl(init.g)
    g0 = init.g if g_ref is None else g_ref
    keep = set(keep_states or ())
    traj = Trajectory(info={"params": dataclasses.asdict(params)})
    state = init
    if resume is not None:
        traj.rows = list(resume.rows)
        sys0 = resume.info.get("systole0", np.nan)
        last = traj.rows[-1] if traj.rows else None
        sys_cur, conc_cur = (last.systole, last.conc) if last else (sys0, np.nan)
    else:
        sys0 = systole_upper(mesh, init.g) if monitor else np.nan
        sys_cur, conc_cur = (sys0, np.nan)
    traj.info["systole0"] = sys0
    try:
        ev = evaluate(mesh, state, params, target)
    except SpectralGapTooSmall as exc:
        raise FlowAbort(exc, state) from exc
    n_total = params.n_steps
    while True:
        n = state.step
        if monitor and (n % params.monitor_every == 0 or n == n_total):
            sys_cur, conc_cur = _monitor(mesh, state, target, params)
            if sys_cur < 0.5 * sys0:
                raise DegenerationAlarm(state.t, sys_cur, sys0)
        if n in keep:
            traj.snapshots[n] = (state.t, state.u.copy(), state.g.copy())
        dC0 = metric_distance_C0(mesh, state.g, g0, g0)
        if n == n_total:
            # backward-difference residual for the last level
            res = 0.0
            if traj.rows:
                res = energy_identity_residual(traj.rows[-1].E, ev.E, ev, params)
            traj.append(DiagnosticsRow(state.t, ev.E, ev.T2, ev.pphi_l2, state.L2len, sys_cur,
                                       dC0, res, ev.dbar_l1, conc_cur))
            break
        try:
            nxt = advance(mesh, state, ev, params, target)
            nev = evaluate(mesh, nxt, params, target)
        except (StepTooLarge, DegenerateTriangle, NonConvergence, SpectralGapTooSmall) as exc:
            raise FlowAbort(exc, state) from exc
        traj.append(DiagnosticsRow(state.t, ev.E, ev.T2, ev.pphi_l2, state.L2len, sys_cur, dC0,
                                   energy_identity_residual(ev.E, nev.E, ev, params),
                                   ev.dbar_l1, conc_cur))
        if snapshot_hook is not None and params.snapshot_every and \
                nxt.step % params.snapshot_every == 0:
            snapshot_hook(nxt, traj)
        state, ev = nxt, nev
    traj.final = state
    return traj
