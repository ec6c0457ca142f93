"""Acceptance criteria on the genus-2 octagon.

Each test appends one PASS/FAIL line to the terminal summary before
asserting, so the full table is printed even when a criterion fails.
Run alone with ``pytest tests/test_acceptance.py -v``.
"""
import json
import math
import os
import subprocess
import sys

import pytest

import acceptance_runs as runs
from conftest import ACCEPTANCE_LINES

pytestmark = pytest.mark.slow

MINUTE = 60.0


def _record(n, ok, detail):
    ACCEPTANCE_LINES.append(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def test_criterion_01_structure():
    r = runs.structure()
    ok = (r["euler_3"] == r["euler_4"] == -2
          and max(r["area_error_3"], r["area_error_4"]) <= 1e-8
          and r["idempotence_3"] == r["idempotence_4"] == 0.0
          and r["harmonic_c0"] <= 10 * r["harmonic_tol"]
          and r["seconds"] <= 2 * MINUTE)
    _record(1, ok, f"chi=-2, area err {max(r['area_error_3'], r['area_error_4']):.1e}, "
                   f"harmonic C0 {r['harmonic_c0']:.1e} <= {10 * r['harmonic_tol']:.0e}, "
                   f"{r['seconds']:.0f}s")


def test_criterion_02_hqd():
    r = runs.hqd()
    q = r["divergence_ratio_new_over_old"]
    ok = (r["kernel_dim"] == r["count"] == 6 and r["separation"] >= 1e2
          and max(r["idempotence"], r["orthogonality"], r["contraction_excess"]) <= 1e-10
          and r["trace"] <= 1e-12
          and 0.5 * 0.7 <= q <= 0.5 * 1.3
          and r["seconds"] <= 5 * MINUTE)
    _record(2, ok, f"dim {r['kernel_dim']}, separation {r['separation']:.2e}, "
                   f"divergence new/old {q:.3f}, {r['seconds']:.0f}s")


def test_criterion_03_energy_identity():
    r = runs.energy_identity()
    ok = all(1.6 <= x <= 2.6 for x in r["ratios"]) and r["seconds"] <= 3 * MINUTE
    _record(3, ok, "dt-halving ratios " + ", ".join(f"{x:.3f}" for x in r["ratios"])
            + f", {r['seconds']:.0f}s")


def test_criterion_04_length_bound():
    recs = runs.energy_identity()["lengths"] + runs.eta_suite()["lengths"]
    worst = max(x["L2len"] / x["bound"] for x in recs)
    _record(4, worst <= 1.0, f"{len(recs)} runs, max Lambda/bound {worst:.3f}")


def test_criterion_05_eta_rate():
    r = runs.eta_suite()
    ok = r["slope"] >= 0.8 and r["monotone_map_l2"] and r["seconds"] <= 8 * MINUTE
    _record(5, ok, f"slope {r['slope']:.3f}, map L2 monotone {r['monotone_map_l2']}, "
                   f"{r['seconds']:.0f}s")


def test_criterion_06_kappa_decay():
    r = runs.kappa_suite()
    assert math.isclose(r["eps"], 0.1 * r["T"])
    ok = r["slope"] <= -0.8 and r["seconds"] <= 8 * MINUTE
    _record(6, ok, f"slope {r['slope']:.3f}, {r['seconds']:.0f}s")


def test_criterion_07_limit():
    r = runs.kappa_suite()
    v = runs.limit_velocity()
    ok = (r["pair_decreasing"] and r["limit_decreasing"] and v["max_error"] <= 1e-2
          and v["seconds"] <= 5 * MINUTE)
    _record(7, ok, f"pairs decreasing {r['pair_decreasing']}, limit decreasing "
                   f"{r['limit_decreasing']}, velocity rel err {v['max_error']:.2e}, "
                   f"{v['seconds']:.0f}s beyond the sweep")


def test_criterion_08_uniqueness():
    r = runs.uniqueness()
    _record(8, r["distance"] <= r["bound"], f"sup C0 {r['distance']:.1e} <= {r['bound']:.0e}")


def test_criterion_09_tension_growth():
    r = runs.eta_suite()
    ok = all(5 <= x <= 50 for x in r["tension_ratios"])
    _record(9, ok, "halving ratios " + ", ".join(f"{x:.2f}" for x in r["tension_ratios"]))


def test_criterion_10_determinism():
    here = {name: fn()["digest"] for name, fn in runs.SUITES.items()}
    env = dict(os.environ, PYTHONHASHSEED="0")
    proc = subprocess.run([sys.executable, runs.__file__, "--json"], capture_output=True,
                          text=True, env=env, timeout=40 * MINUTE)
    assert proc.returncode == 0, proc.stderr
    there = json.loads(proc.stdout.strip().splitlines()[-1])
    diff = sorted(k for k in here if here[k] != there.get(k))
    _record(10, not diff, "all digests identical" if not diff else f"differ: {diff}")
