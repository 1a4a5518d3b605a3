"""Immutable directed multigraph storage and the cross-edge density objective."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

__all__ = [
    "DirectedGraph",
    "EdgeBatch",
    "VertexSetPair",
    "count_cross_edges",
    "density",
    "member_mask",
    "restricted_degrees",
]


def _as_edge_arrays(n, edges):
    if isinstance(edges, tuple) and len(edges) == 2 and not isinstance(edges[0], int):
        src = np.ascontiguousarray(edges[0], dtype=np.int64)
        dst = np.ascontiguousarray(edges[1], dtype=np.int64)
    else:
        pairs = list(edges)
        if pairs:
            arr = np.asarray(pairs, dtype=np.int64)
            if arr.ndim != 2 or arr.shape[1] != 2:
                raise ValueError("edges must be (u, v) pairs")
            src = arr[:, 0].copy()
            dst = arr[:, 1].copy()
        else:
            src = np.empty(0, dtype=np.int64)
            dst = np.empty(0, dtype=np.int64)
    if src.shape != dst.shape:
        raise ValueError("source/target arrays must have equal length")
    if src.size:
        lo = min(int(src.min()), int(dst.min()))
        hi = max(int(src.max()), int(dst.max()))
        if lo < 0 or hi >= n:
            raise ValueError(f"edge endpoint out of range [0, {n})")
    return src, dst


class DirectedGraph:
    """Directed multigraph over vertices ``0..n-1``, frozen after construction.

    ``src[i] -> dst[i]`` is the i-th edge. Parallel edges and self-loops are
    kept with multiplicity. The backing arrays are read-only, so instances
    are safe to share across threads.
    """

    __slots__ = ("n", "src", "dst", "_out_adj", "_in_adj")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        src, dst = _as_edge_arrays(n, edges)
        src.setflags(write=False)
        dst.setflags(write=False)
        self.n = int(n)
        self.src = src
        self.dst = dst
        self._out_adj = None
        self._in_adj = None

    @classmethod
    def from_arrays(cls, n: int, src, dst) -> "DirectedGraph":
        return cls(n, (np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64)))

    @property
    def m(self) -> int:
        """Number of edges, counting multiplicity."""
        return int(self.src.size)

    def edges(self) -> list[tuple[int, int]]:
        return list(zip(self.src.tolist(), self.dst.tolist()))

    def out_degrees(self) -> np.ndarray:
        return np.bincount(self.src, minlength=self.n)

    def in_degrees(self) -> np.ndarray:
        return np.bincount(self.dst, minlength=self.n)

    @property
    def out_adj(self) -> tuple[np.ndarray, ...]:
        """Per-vertex edge-index lists keyed by source endpoint (lazy)."""
        if self._out_adj is None:
            self._out_adj = _adjacency(self.src, self.n)
        return self._out_adj

    @property
    def in_adj(self) -> tuple[np.ndarray, ...]:
        """Per-vertex edge-index lists keyed by target endpoint (lazy)."""
        if self._in_adj is None:
            self._in_adj = _adjacency(self.dst, self.n)
        return self._in_adj

    def __repr__(self):
        return f"DirectedGraph(n={self.n}, m={self.m})"


def _adjacency(keys, n):
    order = np.argsort(keys, kind="stable")
    bounds = np.searchsorted(keys[order], np.arange(n + 1))
    return tuple(order[bounds[i] : bounds[i + 1]] for i in range(n))


@dataclass(frozen=True, eq=False)
class EdgeBatch:
    """A bag of directed edges sharing some graph's vertex universe."""

    n: int
    src: np.ndarray
    dst: np.ndarray

    @property
    def m(self) -> int:
        return int(self.src.size)

    @classmethod
    def from_pairs(cls, n: int, pairs) -> "EdgeBatch":
        src, dst = _as_edge_arrays(n, pairs)
        return cls(n, src, dst)


@dataclass(frozen=True)
class VertexSetPair:
    """Candidate (S, T) pair: S holds tail endpoints, T head endpoints.

    The sets may overlap (the undirected special case is S == T). The
    ``cross_edges`` cache, when present, must equal a fresh recount.
    """

    S: frozenset
    T: frozenset
    cross_edges: int | None = None

    @classmethod
    def of(cls, S, T, cross_edges=None) -> "VertexSetPair":
        return cls(frozenset(int(v) for v in S), frozenset(int(v) for v in T), cross_edges)

    def sizes(self) -> tuple[int, int]:
        return len(self.S), len(self.T)


def member_mask(vertices, n: int) -> np.ndarray:
    """Boolean membership mask over 0..n-1; raises on out-of-range ids."""
    mask = np.zeros(n, dtype=bool)
    if vertices:
        idx = np.fromiter((int(v) for v in vertices), dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise ValueError(f"vertex id out of range [0, {n})")
        mask[idx] = True
    return mask


def count_cross_edges(g, pair: VertexSetPair) -> int:
    """Number of edges from S into T, counting parallel edges with multiplicity."""
    s_mask = member_mask(pair.S, g.n)
    t_mask = member_mask(pair.T, g.n)
    return int(np.count_nonzero(s_mask[g.src] & t_mask[g.dst]))


def density(g, pair: VertexSetPair) -> float:
    """Cross-edge count over the geometric mean of set sizes; 0 on empty sets."""
    if not pair.S or not pair.T:
        return 0.0
    return count_cross_edges(g, pair) / math.sqrt(len(pair.S) * len(pair.T))


def restricted_degrees(g, pair: VertexSetPair) -> tuple[dict, dict]:
    """Per-vertex cross-degrees: edges v->T for v in S, and S->v for v in T."""
    s_mask = member_mask(pair.S, g.n)
    t_mask = member_mask(pair.T, g.n)
    qualifying = s_mask[g.src] & t_mask[g.dst]
    out_counts = np.bincount(g.src[qualifying], minlength=g.n)
    in_counts = np.bincount(g.dst[qualifying], minlength=g.n)
    out_map = {int(v): int(out_counts[v]) for v in sorted(pair.S)}
    in_map = {int(v): int(in_counts[v]) for v in sorted(pair.T)}
    return out_map, in_map
