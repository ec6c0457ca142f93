"""Experiment configuration: a versioned JSON key-value tree."""
from __future__ import annotations

import copy
import hashlib
import json
import math
import os

SCHEMA_VERSION = 1

DEFAULTS = {
    "schema_version": SCHEMA_VERSION,
    "mesh": {"level": 3, "file": None},
    "target": {"kind": "octagon", "r1": 1.0, "r2": 1.0, "radius": 1.0},
    "init": {"map": "identity", "perturbation": 0.5, "element": 0, "harmonic": True,
             "harmonic_tol": 1e-10, "noise": 0.05},
    "flow": {"eta": None, "kappa": None, "a_map": None, "b_metric": None, "dt": None,
             "T": 1.0, "cfl": 0.2, "uniformize_tol": 1e-11, "basis_refresh_threshold": 1e-3,
             "harmonic_tol": 1e-8, "monitor_every": 50, "r_probe": 0.5, "snapshot_every": 0},
    "sweep": {"etas": [0.4, 0.2, 0.1, 0.05], "kappas": [4, 8, 16, 32], "eps_fraction": 0.1,
              "n_compare": 20},
    "limit": {"uniqueness_factor": 10.0, "velocity_level": None},
    "checks": [],
    "seed": 0,
    "out": None,
    "tolerances": {"stationary_rel": 1e-6, "length_bound_slack": 0.05, "eta_slope_min": 0.8,
                   "kappa_slope_max": -0.8, "velocity_rel": 1e-2, "growth_factor": [5.0, 50.0],
                   "min_separation": 100.0, "energy_slack": 10.0},
}

KNOWN_CHECKS = {
    "flow run": {"stationary", "length_bound", "energy_monotone"},
    "sweep eta": {"eta_slope", "eta_monotone", "length_bound", "tension_growth"},
    "sweep kappa": {"kappa_slope", "kappa_pairs_decreasing", "kappa_limit_decreasing"},
    "limit run": {"velocity", "uniqueness", "energy_monotone"},
    "diag hqd": {"kernel_dim", "separation"},
    "mesh gen": set(),
}

_TARGETS = ("octagon", "torus", "sphere")
_MAPS = ("identity", "constant", "random")


class ConfigError(ValueError):
    pass


def _is_num(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _merge(base, over, path=""):
    out = copy.deepcopy(base)
    for k, v in over.items():
        where = f"{path}{k}"
        if k not in base:
            raise ConfigError(f"unknown key '{where}'")
        if isinstance(base[k], dict):
            if not isinstance(v, dict):
                raise ConfigError(f"'{where}' must be a table")
            out[k] = _merge(base[k], v, where + ".")
        else:
            out[k] = v
    return out


def _need(cond, msg):
    if not cond:
        raise ConfigError(msg)


def validate(cfg):
    _need(cfg["schema_version"] == SCHEMA_VERSION,
          f"schema_version must be {SCHEMA_VERSION}, got {cfg['schema_version']!r}")
    m = cfg["mesh"]
    _need(m["file"] is None or isinstance(m["file"], str), "mesh.file must be a path")
    _need(isinstance(m["level"], int) and not isinstance(m["level"], bool)
          and 0 <= m["level"] <= 5, "mesh.level must be an integer in [0, 5]")
    if m["file"] is not None:
        _need(os.path.isfile(m["file"]), f"mesh.file {m['file']!r} does not exist")
    t = cfg["target"]
    _need(t["kind"] in _TARGETS, f"target.kind must be one of {_TARGETS}")
    for k in ("r1", "r2", "radius"):
        _need(_is_num(t[k]) and t[k] > 0, f"target.{k} must be a positive number")
    i = cfg["init"]
    _need(i["map"] in _MAPS, f"init.map must be one of {_MAPS}")
    _need(_is_num(i["perturbation"]), "init.perturbation must be a number")
    _need(isinstance(i["element"], int) and 0 <= i["element"] < 6, "init.element must be in 0..5")
    _need(isinstance(i["harmonic"], bool), "init.harmonic must be true or false")
    _need(_is_num(i["noise"]) and i["noise"] >= 0, "init.noise must be nonnegative")
    if t["kind"] != "octagon":
        _need(i["map"] != "identity", "the identity map needs the octagon target")
    f = cfg["flow"]
    _need(f["eta"] is None or f["kappa"] is None, "set at most one of flow.eta, flow.kappa")
    for k in ("eta", "kappa", "a_map", "b_metric", "dt"):
        _need(f[k] is None or (_is_num(f[k]) and f[k] >= 0), f"flow.{k} must be >= 0 or null")
    for k in ("T", "cfl", "uniformize_tol", "basis_refresh_threshold", "harmonic_tol", "r_probe"):
        _need(_is_num(f[k]) and f[k] > 0, f"flow.{k} must be positive")
    for k in ("monitor_every", "snapshot_every"):
        _need(isinstance(f[k], int) and f[k] >= 0, f"flow.{k} must be a nonnegative integer")
    _need(f["monitor_every"] > 0, "flow.monitor_every must be positive")
    s = cfg["sweep"]
    for k in ("etas", "kappas"):
        _need(isinstance(s[k], list) and s[k] and all(_is_num(x) and x >= 0 for x in s[k]),
              f"sweep.{k} must be a nonempty list of nonnegative numbers")
    _need(all(x > 0 for x in s["kappas"]), "sweep.kappas must be positive")
    _need(_is_num(s["eps_fraction"]) and 0 <= s["eps_fraction"] < 1,
          "sweep.eps_fraction must be in [0, 1)")
    _need(isinstance(s["n_compare"], int) and s["n_compare"] > 0, "sweep.n_compare must be > 0")
    lim = cfg["limit"]
    _need(_is_num(lim["uniqueness_factor"]) and lim["uniqueness_factor"] > 1,
          "limit.uniqueness_factor must exceed 1")
    _need(lim["velocity_level"] is None or (isinstance(lim["velocity_level"], int)
                                            and 0 <= lim["velocity_level"] <= 5),
          "limit.velocity_level must be an integer in [0, 5] or null")
    _need(isinstance(cfg["checks"], list) and all(isinstance(c, str) for c in cfg["checks"]),
          "checks must be a list of names")
    _need(isinstance(cfg["seed"], int), "seed must be an integer")
    _need(cfg["out"] is None or isinstance(cfg["out"], str), "out must be a path")
    tol = cfg["tolerances"]
    for k, v in tol.items():
        if k == "growth_factor":
            _need(isinstance(v, list) and len(v) == 2 and all(_is_num(x) for x in v) and v[0] < v[1],
                  "tolerances.growth_factor must be [low, high]")
        else:
            _need(_is_num(v), f"tolerances.{k} must be a number")
    return cfg


def resolve(user=None):
    """Merge a user tree over the defaults and validate it."""
    user = {} if user is None else user
    _need(isinstance(user, dict), "config must be a table")
    if "schema_version" not in user:
        raise ConfigError("config lacks schema_version")
    return validate(_merge(DEFAULTS, user))


def load(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return resolve(data)


def check_requested(cfg, command):
    bad = [c for c in cfg["checks"] if c not in KNOWN_CHECKS[command]]
    _need(not bad, f"checks {bad} are not available for '{command}'")


def canonical(cfg):
    return json.dumps(cfg, sort_keys=True, indent=1)


def config_hash(cfg, command=""):
    """Hash of everything that determines the outputs (the output path does not)."""
    body = {k: v for k, v in cfg.items() if k != "out"}
    blob = json.dumps({"command": command, "config": body}, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]
