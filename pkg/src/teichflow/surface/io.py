"""Versioned text format for a mesh plus metric.

Floats are written with ``repr`` so the round trip is bit-exact.
"""
from __future__ import annotations

import numpy as np

from .mesh import HalfedgeMesh, HypMetric, MeshError

MAGIC = "teichflow-mesh"
VERSION = 1


def _fmt(x):
    return repr(float(x))


def dumps(mesh, g):
    out = [f"{MAGIC} {VERSION}",
           f"genus {mesh.genus}",
           f"counts {mesh.n_vertices} {mesh.n_edges} {mesh.n_faces}",
           "faces"]
    for f in range(mesh.n_faces):
        out.append(" ".join(str(int(x)) for x in (*mesh.faces[f], *mesh.face_edges[f])))
    out.append("edge_length")
    out.extend(_fmt(x) for x in g.edge_length)
    out.append(f"generator_loops {len(mesh.generator_loops)}")
    for loop in mesh.generator_loops:
        out.append(" ".join(str(int(v)) for v in loop))
    if mesh.corner_words is not None:
        out.append("corner_words")
        for words in mesh.corner_words:
            out.append(" ".join(w if w else "." for w in words))
    if mesh.vertex_lift is not None:
        out.append("vertex_lift")
        out.extend(f"{_fmt(z.real)} {_fmt(z.imag)}" for z in mesh.vertex_lift)
    out.append("end")
    return "\n".join(out) + "\n"


def loads(text):
    lines = text.splitlines()
    pos = 0

    def take():
        nonlocal pos
        if pos >= len(lines):
            raise MeshError("unexpected end of mesh file")
        pos += 1
        return lines[pos - 1]

    head = take().split()
    if len(head) != 2 or head[0] != MAGIC:
        raise MeshError("not a teichflow mesh file")
    if int(head[1]) != VERSION:
        raise MeshError(f"unsupported mesh format version {head[1]}")
    genus = int(take().split()[1])
    _, V, E, F = take().split()
    V, E, F = int(V), int(E), int(F)
    if take() != "faces":
        raise MeshError("expected faces table")
    tab = np.array([[int(x) for x in take().split()] for _ in range(F)], dtype=np.int64)
    if take() != "edge_length":
        raise MeshError("expected edge_length table")
    lengths = np.array([float(take()) for _ in range(E)])
    tag, n = take().split()
    loops = [[int(v) for v in take().split()] for _ in range(int(n))]
    words = None
    lift = None
    while True:
        tag = take()
        if tag == "end":
            break
        if tag == "corner_words":
            words = [[("" if w == "." else w) for w in take().split()] for _ in range(F)]
        elif tag == "vertex_lift":
            xy = np.array([[float(x) for x in take().split()] for _ in range(V)])
            lift = xy[:, 0] + 1j * xy[:, 1]
        else:
            raise MeshError(f"unknown section {tag!r}")
    mesh = HalfedgeMesh(tab[:, :3], tab[:, 3:], V, genus, generator_loops=loops,
                        corner_words=words, vertex_lift=lift)
    if mesh.n_edges != E:
        raise MeshError("edge count does not match header")
    mesh.check()
    return mesh, HypMetric(lengths)


def save(path, mesh, g):
    with open(path, "w") as fh:
        fh.write(dumps(mesh, g))


def load(path):
    with open(path) as fh:
        return loads(fh.read())
