"""teichflow command line.

    teichflow mesh gen   [--config C] [--out D] [--level N]
    teichflow flow run   [--config C] [--out D] [--resume SNAPSHOT]
    teichflow sweep eta  [--config C] [--out D] [--jobs N]
    teichflow sweep kappa [--config C] [--out D] [--jobs N]
    teichflow limit run  [--config C] [--out D]
    teichflow diag hqd   [--config C] [--out D]
    teichflow report     DIR [--out FILE]

Exit codes: 0 success, 2 configuration error, 3 numerical abort (a snapshot
is written where possible), 4 a requested check failed.
"""
from __future__ import annotations

import argparse
import os
import sys

from ..flow import DegenerationAlarm, FlowAbort
from ..flow.snapshot import SnapshotError
from ..maps.harmonic import MaxIterExceeded
from ..qdiff.basis import SpectralGapTooSmall
from ..surface.mesh import MeshError
from ..surface.uniformize import NonConvergence
from ..targets.base import TargetError
from . import commands as K
from . import config as C

VERBS = {
    ("mesh", "gen"): "build and save the genus-2 octagon mesh",
    ("flow", "run"): "run the coupled flow",
    ("sweep", "eta"): "sweep the coupling constant eta",
    ("sweep", "kappa"): "sweep the rescaled constant kappa against the limit flow",
    ("limit", "run"): "run the limit flow through harmonic maps",
    ("diag", "hqd"): "holomorphic quadratic differential basis diagnostics",
}


def build_parser():
    p = argparse.ArgumentParser(prog="teichflow", description="Teichmueller harmonic map flow "
                                "experiments on a genus-2 surface.")
    groups = p.add_subparsers(dest="group", required=True)
    subs = {}
    for (g, v), help_ in VERBS.items():
        if g not in subs:
            subs[g] = groups.add_parser(g).add_subparsers(dest="verb", required=True)
        q = subs[g].add_parser(v, help=help_)
        q.add_argument("--config", help="JSON configuration file")
        q.add_argument("--out", help="output directory")
        q.add_argument("--jobs", type=int, default=1, help="parallel runs in sweeps")
        if (g, v) == ("flow", "run"):
            q.add_argument("--resume", help="continue from a snapshot file")
        if (g, v) == ("mesh", "gen"):
            q.add_argument("--level", type=int, help="subdivision level (overrides config)")
    r = groups.add_parser("report", help="aggregate run manifests into one report")
    r.add_argument("dir")
    r.add_argument("--out", help="report file (default DIR/report.txt)")
    return p


def output_dir(args, cfg, command):
    if args.out:
        return args.out
    if cfg["out"]:
        return cfg["out"]
    root = os.environ.get("TEICHFLOW_OUT", "teichflow-out")
    return os.path.join(root, command.replace(" ", "-") + "-" + C.config_hash(cfg, command))


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.group == "report":
        code, _ = K.cmd_report(args.dir, args.out)
        return code
    command = f"{args.group} {args.verb}"
    try:
        cfg = C.load(args.config) if args.config else C.resolve({"schema_version": 1})
        if getattr(args, "level", None) is not None:
            cfg = C.resolve({**cfg, "mesh": {**cfg["mesh"], "level": args.level, "file": None}})
        if args.jobs < 1:
            raise C.ConfigError("--jobs must be positive")
        out = output_dir(args, cfg, command)
        if command == "mesh gen":
            code, _ = K.cmd_mesh_gen(cfg, out)
        elif command == "flow run":
            code, _ = K.cmd_flow_run(cfg, out, resume=args.resume)
        elif command == "sweep eta":
            code, _ = K.cmd_sweep_eta(cfg, out, jobs=args.jobs)
        elif command == "sweep kappa":
            code, _ = K.cmd_sweep_kappa(cfg, out, jobs=args.jobs)
        elif command == "limit run":
            code, _ = K.cmd_limit_run(cfg, out)
        else:
            code, _ = K.cmd_diag_hqd(cfg, out)
    except (C.ConfigError, SnapshotError, MeshError) as exc:
        print(f"teichflow: configuration error: {exc}", file=sys.stderr)
        return K.EXIT_CONFIG
    except (FlowAbort, DegenerationAlarm, NonConvergence, MaxIterExceeded, SpectralGapTooSmall,
            TargetError) as exc:
        print(f"teichflow: numerical abort: {exc}", file=sys.stderr)
        return K.EXIT_ABORT
    if code == K.EXIT_CHECK:
        print("teichflow: a requested check failed (see summary.json)", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
