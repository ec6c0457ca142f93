"""Shortest homologically non-trivial edge loop (an upper bound on the systole).

Homology classes are detected with a tree-cotree cohomology basis: each
closed edge walk gets an integer vector of intersection numbers with the
2g dual loops, and the walk is non-contractible whenever that vector is
non-zero.  Candidate loops are shortest-path trees from a set of sources
closed up by a single edge.
"""
from __future__ import annotations

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import breadth_first_order, dijkstra, minimum_spanning_tree


def _spanning_tree_edges(n, u, v, w):
    """Edge ids of a spanning tree (lexicographic (w, id) tie-break)."""
    order = np.lexsort((np.arange(len(w)), w))
    parent = np.arange(n)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    keep = []
    for e in order:
        a, b = find(u[e]), find(v[e])
        if a != b:
            parent[a] = b
            keep.append(e)
    return np.array(keep, dtype=np.int64)


def homology_cocycles(mesh):
    """(E, 2g) integer intersection numbers of each edge (in the direction of
    ``edge_vertices``) with a basis of dual loops."""
    E = mesh.n_edges
    i, j = mesh.edge_vertices[:, 0], mesh.edge_vertices[:, 1]
    tree = np.zeros(E, dtype=bool)
    tree[_spanning_tree_edges(mesh.n_vertices, i, j, np.zeros(E))] = True
    # dual graph on faces, restricted to non-tree edges
    fa = mesh.edge_he // 3
    fb = mesh.twin[mesh.edge_he] // 3
    cand = np.flatnonzero(~tree)
    ct = cand[_spanning_tree_edges(mesh.n_faces, fa[cand], fb[cand], np.zeros(len(cand)))]
    cotree = np.zeros(E, dtype=bool)
    cotree[ct] = True
    gens = np.flatnonzero(~tree & ~cotree)
    if len(gens) != 2 * mesh.genus:
        raise ValueError("tree-cotree decomposition does not match the genus")
    # root the cotree at face 0; parent pointers and crossing edges
    F = mesh.n_faces
    adj = sparse.csr_matrix((np.ones(2 * len(ct)),
                             (np.r_[fa[ct], fb[ct]], np.r_[fb[ct], fa[ct]])), shape=(F, F))
    order, pred = breadth_first_order(adj, 0, directed=False, return_predecessors=True)
    edge_of = {}
    for e in ct:
        edge_of[(fa[e], fb[e])] = e
        edge_of[(fb[e], fa[e])] = e

    def path_to_root(f):
        out = []
        while pred[f] >= 0:
            p = pred[f]
            e = edge_of[(f, p)]
            # crossing from f into p: +1 when f is the left face of the edge
            out.append((e, 1 if fa[e] == f else -1))
            f = p
        return out

    chi = np.zeros((E, len(gens)), dtype=np.int64)
    for k, e in enumerate(gens):
        # dual loop: fb(e) -> ... -> root -> ... -> fa(e) -> (cross e) -> fb(e)
        chi[e, k] += 1
        for c, s in path_to_root(fb[e]):
            chi[c, k] += s
        for c, s in path_to_root(fa[e]):
            chi[c, k] -= s
    return chi


def _pair_min_edges(mesh, lengths):
    i, j = mesh.edge_vertices[:, 0], mesh.edge_vertices[:, 1]
    E = mesh.n_edges
    a = np.minimum(i, j)
    b = np.maximum(i, j)
    nonloop = np.flatnonzero(a != b)
    order = nonloop[np.lexsort((nonloop, lengths[nonloop], b[nonloop], a[nonloop]))]
    first = np.ones(len(order), dtype=bool)
    first[1:] = (a[order][1:] != a[order][:-1]) | (b[order][1:] != b[order][:-1])
    return order[first]


def systole_upper(mesh, g, sources=None, chunk=256):
    """Length of the shortest homologically non-trivial closed edge walk."""
    lengths = g.edge_length
    chi = homology_cocycles(mesh)
    V = mesh.n_vertices
    best_e = _pair_min_edges(mesh, lengths)
    i, j = mesh.edge_vertices[best_e, 0], mesh.edge_vertices[best_e, 1]
    W = sparse.csr_matrix((np.r_[lengths[best_e], lengths[best_e]], (np.r_[i, j], np.r_[j, i])),
                          shape=(V, V))
    # directed edge lookup for tree steps: pair -> (edge, sign)
    key = np.r_[i * V + j, j * V + i]
    val_e = np.r_[best_e, best_e]
    val_s = np.r_[np.ones(len(best_e)), -np.ones(len(best_e))].astype(np.int64)
    ko = np.argsort(key)
    key, val_e, val_s = key[ko], val_e[ko], val_s[ko]

    if sources is None:
        if mesh.generator_loops:
            sources = np.unique(np.concatenate([np.asarray(l) for l in mesh.generator_loops]))
        else:
            sources = np.arange(V)
    sources = np.asarray(sources, dtype=np.int64)
    ei, ej = mesh.edge_vertices[:, 0], mesh.edge_vertices[:, 1]
    best = np.inf
    for start in range(0, len(sources), chunk):
        src = sources[start:start + chunk]
        dist, pred = dijkstra(W, directed=False, indices=src, return_predecessors=True)
        S = len(src)
        rows = np.arange(S)[:, None]
        anc = pred.copy()
        root = anc < 0
        anc[root] = np.broadcast_to(np.arange(V), (S, V))[root]
        # character of the step anc -> v
        k = np.searchsorted(key, anc * V + np.arange(V)[None, :])
        k = np.minimum(k, len(key) - 1)
        acc = chi[val_e[k]] * val_s[k][..., None]
        acc[root] = 0
        # pointer jumping accumulates the character along the tree path
        while True:
            nxt = anc[rows, anc]
            done = np.all(nxt == anc)
            acc = acc + np.where((anc == np.arange(V)[None, :])[..., None], 0, acc[rows, anc])
            anc = nxt
            if done:
                break
        cyc = dist[:, ei] + lengths[None, :] + dist[:, ej]
        nontriv = np.any(acc[:, ei] + chi[None] - acc[:, ej] != 0, axis=2)
        cyc = np.where(nontriv, cyc, np.inf)
        best = min(best, float(cyc.min()))
    return best
