"""Output files: manifests, JSON summaries, CSV and gnuplot data."""
from __future__ import annotations

import datetime
import json
import os
import tempfile

import numpy as np

from .. import __version__


def atomic_write(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if np.isfinite(x) else repr(x)
    return x


def write_json(path, obj):
    atomic_write(path, json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n")


def now():
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


class RunDir:
    """One run's output directory; remembers what it produced."""

    def __init__(self, path, command, cfg_hash):
        self.path = path
        self.command = command
        self.cfg_hash = cfg_hash
        self.files = []
        self.started = now()
        os.makedirs(path, exist_ok=True)

    def file(self, name):
        if name not in self.files:
            self.files.append(name)
        return os.path.join(self.path, name)

    def manifest(self, checks, status, message=""):
        write_json(os.path.join(self.path, "manifest.json"), {
            "command": self.command, "config_hash": self.cfg_hash,
            "code_version": __version__, "started": self.started, "finished": now(),
            "files": sorted(self.files), "checks": checks, "status": status,
            "message": message})


def write_dat(path, header, columns):
    """Whitespace-separated columns for gnuplot with a commented header."""
    cols = [np.asarray(c, dtype=float) for c in columns]
    lines = ["# " + " ".join(header)]
    for row in zip(*cols):
        lines.append(" ".join(repr(float(v)) for v in row))
    atomic_write(path, "\n".join(lines) + "\n")


def trajectory_plot_script(dat):
    return f"""# gnuplot script for {dat}
set terminal pngcairo size 1000,700
set output '{dat[:-4]}.png'
set multiplot layout 2,2
set xlabel 't'
set logscale y
plot '{dat}' using 1:2 with lines title 'E'
plot '{dat}' using 1:3 with lines title 'tension'
unset logscale y
plot '{dat}' using 1:5 with lines title 'L2 length'
plot '{dat}' using 1:7 with lines title 'dC0'
unset multiplot
"""


def sweep_plot_script(dat, xlabel, ylabel, columns):
    plots = ", ".join(f"'{dat}' using 1:{c} with linespoints title '{t}'" for c, t in columns)
    return f"""# gnuplot script for {dat}
set terminal pngcairo size 800,600
set output '{dat[:-4]}.png'
set logscale xy
set xlabel '{xlabel}'
set ylabel '{ylabel}'
plot {plots}
"""
