#!/usr/bin/env python3
"""Run every example config in scripts/configs through the CLI and write a report.

Outputs go to OUT/<config name>; the report lands in OUT/report.txt.
"""
import argparse
import pathlib
import sys

from teichflow.expcli.cli import main as cli

HERE = pathlib.Path(__file__).resolve().parent
COMMANDS = {
    "flow_eta01": ["flow", "run"],
    "sweep_eta": ["sweep", "eta"],
    "sweep_kappa": ["sweep", "kappa"],
    "limit_run": ["limit", "run"],
    "diag_hqd": ["diag", "hqd"],
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="runs")
    ap.add_argument("--only", nargs="*", choices=sorted(COMMANDS))
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    worst = 0
    for name in args.only or COMMANDS:
        cfg = HERE / "configs" / f"{name}.json"
        code = cli(COMMANDS[name] + ["--config", str(cfg), "--out", str(out / name)])
        print(f"{name}: exit {code}")
        worst = max(worst, code)
    cli(["report", str(out)])
    return worst


if __name__ == "__main__":
    sys.exit(main())
