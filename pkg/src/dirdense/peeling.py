"""Degree-threshold peeling and an exhaustive densest-pair search for small graphs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .graph import DirectedGraph, VertexSetPair, member_mask

__all__ = [
    "PeelParams",
    "PeelStep",
    "PeelTrace",
    "baseline_peel",
    "exact_oracle",
    "iteration_cap",
    "vsets_update",
]


@dataclass(frozen=True)
class PeelParams:
    """Peeling knobs: the target |S|/|T| ratio guess and the slack factor."""

    c: Fraction
    epsilon: float

    def __post_init__(self):
        object.__setattr__(self, "c", Fraction(self.c))
        if self.c <= 0:
            raise ValueError("ratio guess c must be positive")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")


class PeelStep(NamedTuple):
    iteration: int
    side: str  # "S" or "T"
    removed: int
    density_after: float


@dataclass
class PeelTrace:
    steps: list[PeelStep] = field(default_factory=list)

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)


def iteration_cap(n: int, epsilon: float) -> int:
    """Worst-case peel count before one side must be empty."""
    if n <= 1:
        return 0
    return math.ceil(2.0 * math.log(n) / math.log(1.0 + epsilon))


def _ratio_prefers_sources(s_count: int, t_count: int, c: Fraction) -> bool:
    # exact rational test of |S|/|T| >= c
    return s_count * c.denominator >= t_count * c.numerator


def _threshold_drop(deg, side_mask, cross, side_count, epsilon):
    """Vertices of the side at or below (1+eps) times the average cross-degree.

    On full-information views this set is never empty (some member sits at or
    below the average). Noisy sampled degrees cannot produce an empty set
    either for the same pigeonhole reason, but if float rounding ever does,
    we still evict one minimum-degree vertex so every call makes progress.
    """
    threshold = (1.0 + epsilon) * cross / side_count
    drop = side_mask & (deg <= threshold)
    if not drop.any():
        members = np.flatnonzero(side_mask)
        drop = np.zeros(side_mask.size, dtype=bool)
        drop[members[int(np.argmin(deg[members]))]] = True
    return drop


def _peel_once(src, dst, n, c, epsilon, s_mask, t_mask):
    """One threshold peel over the given edge bag, restricted to (S, T).

    Returns (side, removed, new_s_mask, new_t_mask, cross_after); the
    untouched side's mask is returned as-is. ``cross_after`` is the view's
    exact cross-edge count for the surviving pair, derived from the degree
    tally rather than a rescan.
    """
    qualifying = s_mask[src] & t_mask[dst]
    cross = int(np.count_nonzero(qualifying))
    s_count = int(np.count_nonzero(s_mask))
    t_count = int(np.count_nonzero(t_mask))
    if _ratio_prefers_sources(s_count, t_count, c):
        deg = np.bincount(src[qualifying], minlength=n)
        drop = _threshold_drop(deg, s_mask, cross, s_count, epsilon)
        new_s = s_mask & ~drop
        return "S", int(np.count_nonzero(drop)), new_s, t_mask, int(deg[new_s].sum())
    deg = np.bincount(dst[qualifying], minlength=n)
    drop = _threshold_drop(deg, t_mask, cross, t_count, epsilon)
    new_t = t_mask & ~drop
    return "T", int(np.count_nonzero(drop)), s_mask, new_t, int(deg[new_t].sum())


def vsets_update(g_view, params: PeelParams, pair: VertexSetPair) -> VertexSetPair:
    """Peel the over-ratio side of (S, T) once, using g_view's edges for degrees.

    ``g_view`` may be the full graph or any sampled edge bag over the pair.
    """
    if not pair.S or not pair.T:
        raise ValueError("vsets_update requires nonempty S and T")
    n = g_view.n
    s_mask = member_mask(pair.S, n)
    t_mask = member_mask(pair.T, n)
    _, _, new_s, new_t, _ = _peel_once(g_view.src, g_view.dst, n, params.c, params.epsilon, s_mask, t_mask)
    return VertexSetPair(
        frozenset(np.flatnonzero(new_s).tolist()),
        frozenset(np.flatnonzero(new_t).tolist()),
    )


def _peel_best(src, dst, n, c, epsilon, *, compact, trace=None, start=None):
    """Peel to exhaustion, tracking the best exact-density pair seen.

    Starts from (V, V), or from ``start`` masks when the edge bag is already
    known to lie entirely inside that pair. With ``compact=True`` the bag is
    refiltered to the surviving pair whenever a step shrank it, so later
    iterations scan only still-relevant edges; the visited pair sequence is
    identical either way.
    """
    if start is None:
        s_mask = np.ones(n, dtype=bool)
        t_mask = np.ones(n, dtype=bool)
    else:
        s_mask, t_mask = start[0].copy(), start[1].copy()
    best_s = s_mask.copy()
    best_t = t_mask.copy()
    best_cross = int(src.size)
    s_count = int(np.count_nonzero(s_mask))
    t_count = int(np.count_nonzero(t_mask))
    best_rho = best_cross / math.sqrt(s_count * t_count) if s_count and t_count else 0.0
    cur_src, cur_dst = src, dst
    iterations = 0
    while s_count and t_count:
        iterations += 1
        side, removed, s_mask, t_mask, cross = _peel_once(
            cur_src, cur_dst, n, c, epsilon, s_mask, t_mask
        )
        s_count = int(np.count_nonzero(s_mask))
        t_count = int(np.count_nonzero(t_mask))
        # amortized halving: refilter only when it halves the bag and more
        # iterations are coming, so total compaction work stays linear
        if compact and s_count and t_count and 2 * cross < cur_src.size:
            keep = s_mask[cur_src] & t_mask[cur_dst]
            cur_src = cur_src[keep]
            cur_dst = cur_dst[keep]
        rho = cross / math.sqrt(s_count * t_count) if s_count and t_count else 0.0
        if trace is not None:
            trace.append(PeelStep(iterations, side, removed, rho))
        if rho > best_rho:
            best_s = s_mask.copy()
            best_t = t_mask.copy()
            best_rho = rho
            best_cross = cross
    return best_s, best_t, best_rho, best_cross, iterations


def baseline_peel(g: DirectedGraph, params: PeelParams):
    """Full-information peel from (V, V); returns (best pair, its density, trace).

    Restricted degrees are recomputed from the whole edge set on every
    iteration, matching a pass-per-iteration streaming execution: nothing is
    cached or compacted between iterations.
    """
    if g.n == 0:
        raise ValueError("graph has no vertices")
    if g.n == 1:
        # single-vertex graph: only candidate is ({0}, {0}); edges are self-loops
        pair = VertexSetPair(frozenset({0}), frozenset({0}), g.m)
        return pair, float(g.m), PeelTrace()
    steps: list[PeelStep] = []
    best_s, best_t, rho, cross, _ = _peel_best(
        g.src, g.dst, g.n, params.c, params.epsilon, compact=False, trace=steps
    )
    pair = VertexSetPair(
        frozenset(np.flatnonzero(best_s).tolist()),
        frozenset(np.flatnonzero(best_t).tolist()),
        cross,
    )
    return pair, rho, PeelTrace(steps)


_ORACLE_CHUNK = 1 << 14


def exact_oracle(g: DirectedGraph, max_vertices: int = 20):
    """Exhaustive densest-pair search, feasible only for small graphs.

    Enumerates every nonempty S. For a fixed S the best T is a prefix of the
    vertices ordered by in-count from S: swapping any chosen head vertex for
    an outsider with more incoming edges never lowers the density, so only n
    prefixes per S need scoring.
    """
    n = g.n
    if n == 0:
        raise ValueError("graph has no vertices")
    if n > max_vertices:
        raise ValueError(f"exhaustive search capped at {max_vertices} vertices (got n={n})")
    counts = np.zeros((n, n), dtype=np.int64)
    np.add.at(counts, (g.src, g.dst), 1)
    bits = np.arange(n)
    sqrt_t = np.sqrt(np.arange(1, n + 1, dtype=np.float64))
    best_rho = -1.0
    best_subset = 0
    best_prefix = None
    best_cross = 0
    for lo in range(1, 1 << n, _ORACLE_CHUNK):
        ids = np.arange(lo, min(lo + _ORACLE_CHUNK, 1 << n), dtype=np.int64)
        subset = ((ids[:, None] >> bits) & 1).astype(np.int64)
        sizes = subset.sum(axis=1).astype(np.float64)
        in_counts = subset @ counts
        order = np.argsort(-in_counts, axis=1, kind="stable")
        prefix_cross = np.take_along_axis(in_counts, order, axis=1).cumsum(axis=1)
        rho = prefix_cross / (np.sqrt(sizes)[:, None] * sqrt_t[None, :])
        flat = int(np.argmax(rho))
        row, t_idx = divmod(flat, n)
        if rho[row, t_idx] > best_rho:
            best_rho = float(rho[row, t_idx])
            best_subset = int(ids[row])
            best_prefix = order[row, : t_idx + 1].copy()
            best_cross = int(prefix_cross[row, t_idx])
    pair = VertexSetPair(
        frozenset(i for i in range(n) if best_subset >> i & 1),
        frozenset(best_prefix.tolist()),
        best_cross,
    )
    return pair, best_rho
