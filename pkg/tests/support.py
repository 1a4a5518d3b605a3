"""Shared graph builders and reference implementations for the test suite."""

from __future__ import annotations

import math

import numpy as np

from dirdense.graph import DirectedGraph, VertexSetPair


def gnp_directed(n: int, p: float, seed: int) -> DirectedGraph:
    """Random directed graph: each ordered pair (u, v), u != v, independently with prob p."""
    rng = np.random.default_rng(seed)
    mask = rng.random((n, n)) < p
    np.fill_diagonal(mask, False)
    src, dst = np.nonzero(mask)
    return DirectedGraph.from_arrays(n, src.astype(np.int64), dst.astype(np.int64))


def star_plus_triangle() -> DirectedGraph:
    """10 vertices: center 0 -> leaves 1..6, plus a bidirected triangle 7,8,9.

    The best pair is ({0}, leaves) with density 6/sqrt(6); the triangle only
    reaches 6/3 = 2.
    """
    edges = [(0, leaf) for leaf in range(1, 7)]
    for a, b in ((7, 8), (8, 9), (7, 9)):
        edges.append((a, b))
        edges.append((b, a))
    return DirectedGraph(10, edges)


def star_with_fragment(n: int = 200, leaves: int = 120, fragment: int = 40,
                       width: int = 4) -> DirectedGraph:
    """Star center->leaves plus a denser-looking but losing bidirected fragment.

    The fragment is a circulant with `width` successors per vertex in both
    directions, so its self-pair density is 2*width (8 by default), below the
    star's sqrt(leaves) (~10.95 by default). Remaining vertices are isolated.
    """
    assert 1 + leaves + fragment <= n
    edges = [(0, i) for i in range(1, leaves + 1)]
    base = leaves + 1
    for i in range(fragment):
        for off in range(1, width + 1):
            a = base + i
            b = base + (i + off) % fragment
            edges.append((a, b))
            edges.append((b, a))
    return DirectedGraph(n, edges)


def relabeled(g: DirectedGraph, perm) -> DirectedGraph:
    """Copy of g with vertex v renamed to perm[v]."""
    perm = np.asarray(perm, dtype=np.int64)
    return DirectedGraph.from_arrays(g.n, perm[g.src], perm[g.dst])


def naive_best_pair(g: DirectedGraph):
    """Reference oracle: literal maximum over all 4^n - ish (S, T) pairs.

    Uses a subset-sum table per S so it stays usable up to n ~ 8. Kept
    deliberately independent of the library's search.
    """
    n = g.n
    edges = list(zip(g.src.tolist(), g.dst.tolist()))
    sizes = [bin(mask).count("1") for mask in range(1 << n)]
    inv_gm = [[0.0] * (n + 1) for _ in range(n + 1)]
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            inv_gm[a][b] = 1.0 / math.sqrt(a * b)
    best_rho = -1.0
    best = None
    for s_mask in range(1, 1 << n):
        cnt = [0] * n
        for u, v in edges:
            if s_mask >> u & 1:
                cnt[v] += 1
        cross = [0] * (1 << n)
        for t_mask in range(1, 1 << n):
            low = t_mask & -t_mask
            cross[t_mask] = cross[t_mask ^ low] + cnt[low.bit_length() - 1]
            rho = cross[t_mask] * inv_gm[sizes[s_mask]][sizes[t_mask]]
            if rho > best_rho:
                best_rho = rho
                best = (s_mask, t_mask)
    s_mask, t_mask = best
    pair = VertexSetPair(
        frozenset(i for i in range(n) if s_mask >> i & 1),
        frozenset(i for i in range(n) if t_mask >> i & 1),
    )
    return pair, best_rho
