"""Command implementations.  Each returns (exit_code, summary dict)."""
from __future__ import annotations

import dataclasses
import glob
import json
import math
import os

import numpy as np

from ..flow import (FlowAbort, FlowParams, FlowState, cfl_dt, eta_sweep, kappa_sweep,
                    load_snapshot, metric_velocity_error, run, run_limit_flow, save_snapshot,
                    standard_initial_data, tension_growth_check)
from ..maps.harmonic import harmonic_solve
from ..maps.state import constant_map, identity_map, make_map
from ..qdiff.basis import export_csv, hqd_basis, real_gram
from ..surface import build_genus2_octagon, io as mesh_io
from ..surface.geometry import face_areas, total_area, vertex_defects
from ..surface.metrics import metric_distance_C0
from ..targets import FlatTorus, HyperbolicQuotient, RoundSphere
from . import config as C
from .runio import (RunDir, atomic_write, sweep_plot_script, trajectory_plot_script, write_dat,
                    write_json)

EXIT_OK, EXIT_CONFIG, EXIT_ABORT, EXIT_CHECK = 0, 2, 3, 4


# builders ------------------------------------------------------------------

def build_mesh(cfg, level=None):
    m = cfg["mesh"]
    if m["file"] is not None and level is None:
        return mesh_io.load(m["file"])
    return build_genus2_octagon(m["level"] if level is None else level)


def build_target(cfg):
    t = cfg["target"]
    if t["kind"] == "octagon":
        return HyperbolicQuotient()
    if t["kind"] == "torus":
        return FlatTorus(t["r1"], t["r2"])
    return RoundSphere(t["radius"])


def _base_point(target):
    if isinstance(target, HyperbolicQuotient):
        return np.complex128(0)
    if isinstance(target, FlatTorus):
        return target.point(0.0, 0.0)
    return np.array([0.0, 0.0, target.radius])


def build_init(cfg, mesh, g, target):
    i = cfg["init"]
    if i["map"] == "identity":
        state, _ = standard_initial_data(mesh, g, s=i["perturbation"], element=i["element"],
                                         harmonic=i["harmonic"], target=target,
                                         tol=i["harmonic_tol"])
        return state
    if i["perturbation"] != 0:
        from ..flow import perturbed_metric
        g = perturbed_metric(mesh, g, i["perturbation"], i["element"])
    if i["map"] == "constant":
        u = constant_map(mesh, target, _base_point(target))
    else:
        rng = np.random.default_rng(cfg["seed"])
        if isinstance(target, HyperbolicQuotient):
            base = mesh.vertex_lift
        else:
            base = np.broadcast_to(_base_point(target), (mesh.n_vertices,) + target_shape(target))
        c = i["noise"] * (rng.standard_normal(mesh.n_vertices)
                          + 1j * rng.standard_normal(mesh.n_vertices))
        pts = target.retract(base, target.from_tangent_coords(base, c))
        u = make_map(mesh, target, pts)
    if i["harmonic"]:
        u = harmonic_solve(mesh, g, u, target, tol=i["harmonic_tol"])
    return FlowState(0.0, u, g)


def target_shape(target):
    return np.shape(_base_point(target))


def flow_params(cfg, g, T=None):
    f = cfg["flow"]
    T = f["T"] if T is None else T
    if f["eta"] is not None:
        a, b = 1.0, f["eta"] ** 2 / 4
    elif f["kappa"] is not None:
        a, b = float(f["kappa"]), 1.0
    else:
        a = 1.0 if f["a_map"] is None else float(f["a_map"])
        b = 0.0 if f["b_metric"] is None else float(f["b_metric"])
    dt = f["dt"] if f["dt"] is not None else cfl_dt(g, a, T, f["cfl"])
    try:
        return FlowParams(a_map=a, b_metric=b, dt=dt, T=T, **common_params(cfg))
    except ValueError as exc:
        raise C.ConfigError(str(exc)) from exc


def common_params(cfg):
    f = cfg["flow"]
    return {k: f[k] for k in ("uniformize_tol", "basis_refresh_threshold", "harmonic_tol", "cfl",
                              "monitor_every", "r_probe", "snapshot_every")} | {
        "min_separation": cfg["tolerances"]["min_separation"]}


def _write_traj(rd, name, traj):
    traj.to_csv(rd.file(name + ".csv"))
    cols = [traj.column(c) for c in ("t", "E", "T2", "PPhi_l2", "L2len", "systole", "dC0", "eires")]
    write_dat(rd.file(name + ".dat"), ["t", "E", "T2", "PPhi_l2", "L2len", "systole", "dC0",
                                       "eires"], cols)
    atomic_write(rd.file(name + ".gp"), trajectory_plot_script(name + ".dat"))


def _finish(rd, cfg, summary, checks):
    requested = {k: bool(v) for k, v in checks.items() if k in cfg["checks"]}
    summary["checks"] = requested
    write_json(rd.file("summary.json"), summary)
    ok = all(requested.values())
    rd.manifest(requested, "pass" if ok else "fail")
    return (EXIT_OK if ok else EXIT_CHECK), summary


def _echo_config(rd, cfg):
    atomic_write(rd.file("config.json"), C.canonical(cfg) + "\n")


def _energy_ok(traj, slack):
    E, res = traj.column("E"), traj.column("eires")
    dt = np.diff(traj.column("t"))
    if E.size < 2:
        return True, 0.0
    inc = np.diff(E)
    return bool(np.all(inc <= slack * res.max() * dt + 1e-14 * abs(E[0]))), float(inc.max())


# commands ------------------------------------------------------------------

def cmd_mesh_gen(cfg, out, log=print):
    C.check_requested(cfg, "mesh gen")
    rd = RunDir(out, "mesh gen", C.config_hash(cfg, "mesh gen"))
    _echo_config(rd, cfg)
    mesh, g = build_mesh(cfg)
    chi = mesh.n_vertices - mesh.n_edges + mesh.n_faces
    area = total_area(mesh, g)
    defect = float(np.abs(vertex_defects(mesh, g)).max())
    mesh_io.save(rd.file("mesh.txt"), mesh, g)
    log(f"V - E + F = {mesh.n_vertices} - {mesh.n_edges} + {mesh.n_faces} = {chi}")
    log(f"total area = {area!r} (4 pi = {4 * math.pi!r}, difference {area - 4 * math.pi:.3e})")
    log(f"max |vertex defect| = {defect:.3e}")
    summary = {"V": mesh.n_vertices, "E": mesh.n_edges, "F": mesh.n_faces, "euler": chi,
               "total_area": area, "area_error": area - 4 * math.pi, "max_defect": defect,
               "genus": mesh.genus}
    ok = chi == 2 - 2 * mesh.genus and abs(area - 4 * math.pi * (mesh.genus - 1)) <= 1e-8
    write_json(rd.file("summary.json"), summary)
    rd.manifest({"euler": chi == -2, "gauss_bonnet": bool(ok)}, "pass" if ok else "fail")
    return (EXIT_OK if ok else EXIT_CONFIG), summary


def cmd_flow_run(cfg, out, resume=None, log=print):
    C.check_requested(cfg, "flow run")
    h = C.config_hash(cfg, "flow run")
    rd = RunDir(out, "flow run", h)
    _echo_config(rd, cfg)
    mesh, g = build_mesh(cfg)
    target = build_target(cfg)
    init = build_init(cfg, mesh, g, target)
    params = flow_params(cfg, init.g)
    snap = rd.file("snapshot.npz") if params.snapshot_every else None
    g_ref, prior = init.g, None
    if resume is not None:
        state, prior, g_saved = load_snapshot(resume, mesh, config_hash=h,
                                              min_separation=params.min_separation)
        g_ref = g_saved if g_saved is not None else g_ref
        init = state

    def hook(state, traj):
        save_snapshot(snap, state, traj, g_ref, h, params.digest())

    try:
        traj = run(mesh, init, params, target, g_ref=g_ref, snapshot_hook=hook if snap else None,
                   resume=prior, check_cfl=resume is None)
    except FlowAbort as exc:
        path = rd.file("abort_snapshot.npz")
        save_snapshot(path, exc.state, None, g_ref, h, params.digest())
        rd.manifest({}, "abort", str(exc))
        log(f"numerical abort: {exc}; snapshot written to {path}")
        return EXIT_ABORT, {"abort": str(exc)}
    _write_traj(rd, "trajectory", traj)
    E = traj.column("E")
    E0 = E[0]
    tol = cfg["tolerances"]
    drift = float(np.abs(E - E0).max())
    stationary = drift <= tol["stationary_rel"] * abs(E0) and \
        float(traj.column("dC0").max()) <= tol["stationary_rel"]
    eta = 2 * math.sqrt(params.b_metric / params.a_map) if params.a_map > 0 else math.inf
    Lam = traj.rows[-1].L2len
    bound = eta * math.sqrt(params.T * E0) * (1 + tol["length_bound_slack"])
    e_ok, max_inc = _energy_ok(traj, tol["energy_slack"])
    summary = {"config_hash": h, "steps": params.n_steps, "dt": params.dt, "a_map": params.a_map,
               "b_metric": params.b_metric, "E0": E0, "E_final": float(E[-1]),
               "energy_drift": drift, "stationary": bool(stationary),
               "max_energy_identity_residual": float(traj.column("eires").max()),
               "L2_length": Lam, "length_bound": bound, "max_energy_increment": max_inc,
               "max_dC0": float(traj.column("dC0").max()), "trajectory_digest": traj.digest()}
    checks = {"stationary": stationary, "length_bound": params.a_map == 1.0 and Lam <= bound,
              "energy_monotone": e_ok}
    log(f"flow run: {params.n_steps} steps, E {E0:.10g} -> {E[-1]:.10g}, "
        f"stationary: {str(stationary).lower()}")
    return _finish(rd, cfg, summary, checks)


def _initial(cfg):
    mesh, g = build_mesh(cfg)
    target = build_target(cfg)
    return mesh, target, build_init(cfg, mesh, g, target)


def cmd_sweep_eta(cfg, out, jobs=1, log=print):
    C.check_requested(cfg, "sweep eta")
    h = C.config_hash(cfg, "sweep eta")
    rd = RunDir(out, "sweep eta", h)
    _echo_config(rd, cfg)
    mesh, target, init = _initial(cfg)
    T = cfg["flow"]["T"]
    etas = cfg["sweep"]["etas"]
    dt = cfg["flow"]["dt"]
    try:
        rep = eta_sweep(mesh, init, etas, T, target, dt=dt, jobs=jobs, **common_params(cfg))
    except FlowAbort as exc:
        rd.manifest({}, "abort", str(exc))
        return EXIT_ABORT, {"abort": str(exc)}
    tol = cfg["tolerances"]
    growth, lengths = [], []
    for eta in etas:
        tr = rep.trajectories[eta]
        _write_traj(rd, f"eta_{eta!r}", tr)
        growth.append(tension_growth_check(tr, eta=eta).max_growth if eta > 0 else 0.0)
        E0 = tr.rows[0].E
        lengths.append((tr.rows[-1].L2len, eta * math.sqrt(T * E0) * (1 + tol["length_bound_slack"])))
    _write_traj(rd, "reference", rep.reference)
    ratios = [growth[k] / growth[k + 1] for k in range(len(etas) - 1)
              if etas[k + 1] > 0 and math.isclose(etas[k], 2 * etas[k + 1]) and growth[k + 1] > 0]
    lo, hi = tol["growth_factor"]
    summary = rep.summary() | {"config_hash": h, "T": T, "tension_growth": growth,
                               "growth_ratios": ratios,
                               "L2_length": [a for a, _ in lengths],
                               "length_bound": [b for _, b in lengths]}
    write_dat(rd.file("sweep_eta.dat"), ["eta", "sup_dC0", "sup_map_l2", "tension_growth"],
              [etas, rep.sup_dC0, rep.sup_map_l2, growth])
    atomic_write(rd.file("sweep_eta.gp"), sweep_plot_script(
        "sweep_eta.dat", "eta", "sup over t", [(2, "dC0"), (3, "map L2"), (4, "tension growth")]))
    checks = {"eta_slope": rep.slope_dC0 >= tol["eta_slope_min"],
              "eta_monotone": rep.monotone_map_l2,
              "length_bound": all(a <= b for a, b in lengths),
              "tension_growth": bool(ratios) and all(lo <= r <= hi for r in ratios)}
    log(f"sweep eta: slope {rep.slope_dC0:.4f}, monotone {rep.monotone_map_l2}")
    return _finish(rd, cfg, summary, checks)


def cmd_sweep_kappa(cfg, out, jobs=1, log=print):
    C.check_requested(cfg, "sweep kappa")
    h = C.config_hash(cfg, "sweep kappa")
    rd = RunDir(out, "sweep kappa", h)
    _echo_config(rd, cfg)
    mesh, target, init = _initial(cfg)
    T = cfg["flow"]["T"]
    s = cfg["sweep"]
    kw = common_params(cfg)
    htol = kw.pop("harmonic_tol")
    try:
        rep = kappa_sweep(mesh, init, s["kappas"], T, s["eps_fraction"] * T, target,
                          n_compare=s["n_compare"], harmonic_tol=htol, jobs=jobs, **kw)
    except FlowAbort as exc:
        rd.manifest({}, "abort", str(exc))
        return EXIT_ABORT, {"abort": str(exc)}
    for k in s["kappas"]:
        _write_traj(rd, f"kappa_{k!r}", rep.trajectories[k])
    _write_traj(rd, "limit", rep.limit)
    tol = cfg["tolerances"]
    write_dat(rd.file("sweep_kappa.dat"), ["kappa", "max_tension", "limit_dC0", "limit_map_c0"],
              [s["kappas"], rep.max_tension, rep.limit_dC0, rep.limit_map_c0])
    atomic_write(rd.file("sweep_kappa.gp"), sweep_plot_script(
        "sweep_kappa.dat", "kappa", "", [(2, "max tension, t >= eps"), (3, "dC0 to limit"),
                                         (4, "map C0 to limit")]))
    summary = rep.summary() | {"config_hash": h}
    checks = {"kappa_slope": rep.slope_tension <= tol["kappa_slope_max"],
              "kappa_pairs_decreasing": rep.pair_decreasing,
              "kappa_limit_decreasing": rep.limit_decreasing}
    log(f"sweep kappa: slope {rep.slope_tension:.4f}")
    return _finish(rd, cfg, summary, checks)


def cmd_limit_run(cfg, out, log=print):
    C.check_requested(cfg, "limit run")
    h = C.config_hash(cfg, "limit run")
    rd = RunDir(out, "limit run", h)
    _echo_config(rd, cfg)
    mesh, target, init = _initial(cfg)
    f = cfg["flow"]
    T = f["T"]
    dt = f["dt"] if f["dt"] is not None else T / cfg["sweep"]["n_compare"]
    kw = common_params(cfg)
    try:
        params = FlowParams(dt=dt, T=T, **kw)
        traj = run_limit_flow(mesh, init.g, init.u, params, target,
                              keep_states=range(params.n_steps + 1))
    except ValueError as exc:
        raise C.ConfigError(str(exc)) from exc
    except FlowAbort as exc:
        rd.manifest({}, "abort", str(exc))
        return EXIT_ABORT, {"abort": str(exc)}
    _write_traj(rd, "limit", traj)
    vel, per_step = metric_velocity_error(mesh, traj, target)
    tol = cfg["tolerances"]
    summary = {"config_hash": h, "steps": params.n_steps, "dt": dt,
               "max_nonholomorphic_l1": float(np.max(traj.info["nonhol_l1"])),
               "velocity_rel_error": vel, "E0": traj.rows[0].E, "E_final": traj.rows[-1].E}
    checks = {"velocity": vel <= tol["velocity_rel"],
              "energy_monotone": _energy_ok(traj, tol["energy_slack"])[0]}
    if cfg["limit"]["velocity_level"] is not None:
        vel2 = _velocity_at_level(cfg, cfg["limit"]["velocity_level"], target, dt, T, kw)
        summary["velocity_rel_error_fine"] = vel2
        checks["velocity"] = vel2 <= tol["velocity_rel"]
    if "uniqueness" in cfg["checks"]:
        fac = cfg["limit"]["uniqueness_factor"]
        p2 = dataclasses.replace(params, harmonic_tol=params.harmonic_tol / fac)
        tr2 = run_limit_flow(mesh, init.g, init.u, p2, target, keep_states=range(p2.n_steps + 1))
        d = max(metric_distance_C0(mesh, traj.snapshots[n][2], tr2.snapshots[n][2],
                                   tr2.snapshots[n][2]) for n in traj.snapshots)
        bound = fac * params.harmonic_tol * T
        summary |= {"uniqueness_distance": d, "uniqueness_bound": bound}
        checks["uniqueness"] = d <= bound
    log(f"limit run: {params.n_steps} steps, velocity error {vel:.3e}")
    return _finish(rd, cfg, summary, checks)


def _velocity_at_level(cfg, level, target, dt, T, kw):
    """Finite-difference velocity check on a short limit run on a finer mesh."""
    mesh, g = build_mesh(cfg, level)
    init = build_init(cfg, mesh, g, target)
    n = 4
    params = FlowParams(dt=dt, T=n * dt, **kw)
    traj = run_limit_flow(mesh, init.g, init.u, params, target, keep_states=range(n + 1),
                          monitor=False)
    return metric_velocity_error(mesh, traj, target)[0]


def cmd_diag_hqd(cfg, out, log=print):
    C.check_requested(cfg, "diag hqd")
    h = C.config_hash(cfg, "diag hqd")
    rd = RunDir(out, "diag hqd", h)
    _echo_config(rd, cfg)
    mesh, g = build_mesh(cfg)
    B = hqd_basis(mesh, g, min_separation=0.0)
    export_csv(B, rd.file("hqd_basis.csv"))
    gram = real_gram(B.elements, face_areas(mesh, g))
    expected = 6 * mesh.genus - 6
    summary = {"config_hash": h, "kernel_dim": B.kernel_dim(), "expected": expected,
               "separation": B.separation, "lam_ker": B.lam_ker, "lam_gap": B.lam_gap,
               "eigenvalues": [float(x) for x in B.eigenvalues],
               "gram_error": float(np.abs(gram - np.eye(B.count)).max())}
    checks = {"kernel_dim": summary["kernel_dim"] == expected,
              "separation": B.separation >= cfg["tolerances"]["min_separation"]}
    log(f"diag hqd: kernel_dim = {summary['kernel_dim']}, separation {B.separation:.4g}")
    return _finish(rd, cfg, summary, checks)


def cmd_report(directory, out=None, log=print):
    """Aggregate every manifest.json below directory into report.txt."""
    paths = sorted(glob.glob(os.path.join(directory, "**", "manifest.json"), recursive=True))
    lines = ["teichflow report", "================", ""]
    warnings = []
    if not paths:
        warnings.append(f"no manifests found under {directory}")
    for p in paths:
        rel = os.path.relpath(os.path.dirname(p), directory)
        try:
            with open(p) as fh:
                m = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            warnings.append(f"unreadable manifest {rel}: {exc}")
            continue
        lines.append(f"[{m.get('status', '?').upper()}] {rel}: {m.get('command', '?')} "
                     f"(config {m.get('config_hash', '?')}, version {m.get('code_version', '?')})")
        for name, ok in sorted(m.get("checks", {}).items()):
            lines.append(f"    {'pass' if ok else 'FAIL'}  {name}")
        if m.get("message"):
            lines.append(f"    note: {m['message']}")
    for d in sorted(glob.glob(os.path.join(directory, "*", ""))):
        if not glob.glob(os.path.join(d, "**", "manifest.json"), recursive=True):
            warnings.append(f"missing manifest: {os.path.relpath(d, directory)}")
    if warnings:
        lines += ["", "warnings:"] + [f"  - {w}" for w in warnings]
    text = "\n".join(lines) + "\n"
    target = out if out is not None else os.path.join(directory, "report.txt")
    os.makedirs(os.path.dirname(os.path.abspath(target)), exist_ok=True)
    atomic_write(target, text)
    for w in warnings:
        log(f"warning: {w}")
    return EXIT_OK, {"runs": len(paths), "warnings": warnings, "report": target}
