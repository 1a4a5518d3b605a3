"""Round-accounted simulator of memory-bounded phased execution.

A coordinator machine runs the single-pass engine; the rest of the cluster
only stores the pool of still-relevant edges and serves machine-sized
uniform samples of it. The cost model charges ``sort_round_cost`` rounds per
global primitive (relevance filtering, removal of a drawn batch, uniform
sampling, and the exact degree tally used by the near-linear mode), one
round for the final fetch, and nothing for coordinator-local work: round
counts, not wall time, are the quantity under study.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .graph import DirectedGraph, density
from .peeling import _ratio_prefers_sources, _threshold_drop
from .streaming import SampleParams, SinglePassEngine, sample_params

__all__ = [
    "MpcConfig",
    "PhaseRecord",
    "RelevantEdgeSet",
    "RoundLedger",
    "mpc_nearlinear_run",
    "mpc_superlinear_run",
]

_EMPTY = np.empty(0, dtype=np.int64)


@dataclass(frozen=True)
class MpcConfig:
    """Machine-memory regime and round-cost knobs.

    superlinear: per-machine word budget n**(1+mu), mu in (0, 1).
    nearlinear: budget n * polylog_budget; the default budget is
    ln(n)^2 / epsilon^3 words per vertex.
    """

    regime: str
    mu: float | None = None
    polylog_budget: float | None = None
    sort_round_cost: int = 1

    def __post_init__(self):
        if self.regime not in ("superlinear", "nearlinear"):
            raise ValueError(f"unknown regime {self.regime!r}")
        if self.regime == "superlinear" and (self.mu is None or not 0.0 < self.mu < 1.0):
            raise ValueError("superlinear regime needs mu in (0, 1)")
        if self.sort_round_cost < 1:
            raise ValueError("sort_round_cost must be at least 1")

    def machine_memory(self, n: int, epsilon: float) -> int:
        if self.regime == "superlinear":
            mem = int(n ** (1.0 + self.mu))
        else:
            budget = self.polylog_budget
            if budget is None:
                budget = math.log(max(n, 2)) ** 2 / epsilon**3
            mem = int(n * budget)
        return max(mem, n)


@dataclass
class PhaseRecord:
    index: int
    edges_fetched: int
    e_rel_before: int
    e_rel_after: int
    s_size: int
    t_size: int
    local_finish: bool
    flip_peels: int = 0


@dataclass
class RoundLedger:
    rounds: int = 0
    phases: int = 0
    peak_edges: int = 0
    log: list[PhaseRecord] = field(default_factory=list)

    def charge(self, k: int = 1):
        self.rounds += int(k)


class RelevantEdgeSet:
    """Edge ids still available to feed the coordinator; shrinks monotonically."""

    def __init__(self, g: DirectedGraph):
        self._g = g
        self.ids = np.arange(g.m, dtype=np.int64)

    @property
    def size(self) -> int:
        return int(self.ids.size)

    def intersect_pair(self, s_mask, t_mask):
        ids = self.ids
        keep = s_mask[self._g.src[ids]] & t_mask[self._g.dst[ids]]
        self.ids = ids[keep]

    def draw(self, k, rng):
        """Remove and return k uniformly chosen edges, in uniform order."""
        k = max(0, min(int(k), self.ids.size))
        perm = rng.permutation(self.ids.size)
        taken = self.ids[perm[:k]]
        self.ids = self.ids[perm[k:]]
        return self._g.src[taken], self._g.dst[taken]


class _PhaseController:
    """Owns the relevant-edge pool and the per-phase bookkeeping."""

    def __init__(self, g, cfg, params, epsilon, c, engine, rng, ledger, nearlinear):
        self.g = g
        self.cfg = cfg
        self.params = params
        self.epsilon = epsilon
        self.c = Fraction(c)
        self.engine = engine
        self.rng = rng
        self.ledger = ledger
        self.nearlinear = nearlinear
        self.rel = RelevantEdgeSet(g)
        self.mem = cfg.machine_memory(g.n, epsilon)
        self.done_fetching = False

    def can_fetch(self) -> bool:
        return not self.done_fetching and self.rel.size > 0

    def fetch_phase(self):
        engine, ledger = self.engine, self.ledger
        ledger.phases += 1
        flip_peels = 0
        if self.nearlinear and engine.s_count and engine.t_count:
            flip_peels = self._flip_peel()
        before = self.rel.size
        self.rel.intersect_pair(engine.s_mask, engine.t_mask)
        ledger.charge(self.cfg.sort_round_cost)
        after = self.rel.size
        local_finish = after <= self.mem
        if local_finish:
            want = after
            self.done_fetching = True
            ledger.charge(1)  # final fetch onto the coordinator
        else:
            if self.nearlinear:
                want = min((engine.s_count + engine.t_count) * self.params.xi, self.mem)
            else:
                want = self.mem
            ledger.charge(2 * self.cfg.sort_round_cost)  # sampling + removal
        drawn_src, drawn_dst = self.rel.draw(want, self.rng)
        ledger.log.append(
            PhaseRecord(ledger.phases, int(drawn_src.size), before, after,
                        engine.s_count, engine.t_count, local_finish, flip_peels)
        )
        return drawn_src, drawn_dst

    def _flip_peel(self) -> int:
        """Peel the over-ratio side with exact degrees until the ratio test flips.

        One charged tally supplies every degree needed: while only one side
        shrinks, the other side's cross-degrees stay valid, so repeated peels
        of that side need no new data.
        """
        g, engine = self.g, self.engine
        self.ledger.charge(self.cfg.sort_round_cost)
        s_mask = engine.s_mask.copy()
        t_mask = engine.t_mask.copy()
        qualifying = s_mask[g.src] & t_mask[g.dst]
        out_deg = np.bincount(g.src[qualifying], minlength=g.n)
        in_deg = np.bincount(g.dst[qualifying], minlength=g.n)
        cross = int(np.count_nonzero(qualifying))
        s_count = engine.s_count
        t_count = engine.t_count
        eps = self.epsilon
        peel_sources = _ratio_prefers_sources(s_count, t_count, self.c)
        peels = 0
        while s_count and t_count and _ratio_prefers_sources(s_count, t_count, self.c) == peel_sources:
            if peel_sources:
                drop = _threshold_drop(out_deg, s_mask, cross, s_count, eps)
                s_mask = s_mask & ~drop
                s_count = int(np.count_nonzero(s_mask))
                cross = int(out_deg[s_mask].sum())
            else:
                drop = _threshold_drop(in_deg, t_mask, cross, t_count, eps)
                t_mask = t_mask & ~drop
                t_count = int(np.count_nonzero(t_mask))
                cross = int(in_deg[t_mask].sum())
            peels += 1
            if s_count and t_count:
                engine.offer_best(s_mask, t_mask, cross / math.sqrt(s_count * t_count))
        engine.set_pair(s_mask, t_mask)
        return peels


class _PhasedStream:
    """Stream facade over machine-sized fetches from the relevant-edge pool."""

    def __init__(self, controller: _PhaseController):
        self._ctl = controller
        self.n = controller.g.n
        self._src = _EMPTY
        self._dst = _EMPTY
        self._cursor = 0
        self.edges_read = 0

    @property
    def _left(self) -> int:
        return int(self._src.size - self._cursor)

    @property
    def remaining(self) -> int:
        return self._left + self._ctl.rel.size

    def _refill(self):
        drawn_src, drawn_dst = self._ctl.fetch_phase()
        self._src = np.concatenate([self._src[self._cursor :], drawn_src])
        self._dst = np.concatenate([self._dst[self._cursor :], drawn_dst])
        self._cursor = 0

    def take(self, k):
        k = int(k)
        while self._left < k and self._ctl.can_fetch():
            self._refill()
        k = max(0, min(k, self._left))
        lo = self._cursor
        self._cursor += k
        self.edges_read += k
        return self._src[lo : self._cursor], self._dst[lo : self._cursor]

    def take_all(self):
        while self._ctl.can_fetch():
            self._refill()
        return self.take(self._left)

    def take_qualifying(self, want, s_mask, t_mask):
        want = int(want)
        if want <= 0:
            return _EMPTY, _EMPTY, False
        out_src, out_dst = [], []
        got = 0
        while got < want:
            if self._left == 0:
                if not self._ctl.can_fetch():
                    break
                self._refill()
                continue
            vs = self._src[self._cursor :]
            vd = self._dst[self._cursor :]
            hits = np.flatnonzero(s_mask[vs] & t_mask[vd])
            if got + hits.size >= want:
                need = want - got
                consumed = int(hits[need - 1]) + 1
                out_src.append(vs[hits[:need]])
                out_dst.append(vd[hits[:need]])
                got = want
                self._cursor += consumed
                self.edges_read += consumed
            else:
                out_src.append(vs[hits])
                out_dst.append(vd[hits])
                got += int(hits.size)
                self.edges_read += vs.size
                self._cursor += vs.size
        src = np.concatenate(out_src) if out_src else _EMPTY
        dst = np.concatenate(out_dst) if out_dst else _EMPTY
        return src, dst, got < want


def _mpc_run(g, c, epsilon, cfg, params, rng, nearlinear):
    if params is None:
        params = sample_params(g.n, epsilon)
    if rng is None:
        rng = np.random.default_rng(0)
    seeds = rng.integers(0, (1 << 63) - 1, size=2)
    engine_rng = np.random.default_rng(int(seeds[0]))
    draw_rng = np.random.default_rng(int(seeds[1]))
    ledger = RoundLedger()
    batch_fn = None
    if nearlinear:
        xi = params.xi
        batch_fn = lambda s_count, t_count: (s_count + t_count) * xi  # noqa: E731
    engine = SinglePassEngine(g.n, c, params, engine_rng, batch_size_fn=batch_fn)
    controller = _PhaseController(g, cfg, params, epsilon, c, engine, draw_rng, ledger, nearlinear)
    engine.run(_PhasedStream(controller))
    ledger.peak_edges = engine.peak_edges
    pair = engine.best_pair()
    return pair, density(g, pair), ledger


def mpc_superlinear_run(g: DirectedGraph, c, epsilon: float, cfg: MpcConfig | None = None,
                        params: SampleParams | None = None, *, rng=None):
    """Phased run with machine memory n**(1+mu); returns (pair, density, ledger).

    Each phase refilters the relevant pool to the engine's current pair,
    draws a machine-load uniformly, and feeds it to the engine as the next
    stream installment; once the pool fits one machine it is fetched whole
    and the engine finishes locally. The reported density is recomputed
    exactly on the input graph.
    """
    cfg = cfg or MpcConfig("superlinear", mu=0.3)
    if cfg.regime != "superlinear":
        raise ValueError("config regime must be 'superlinear'")
    return _mpc_run(g, c, epsilon, cfg, params, rng, nearlinear=False)


def mpc_nearlinear_run(g: DirectedGraph, c, epsilon: float, cfg: MpcConfig | None = None,
                       params: SampleParams | None = None, *, rng=None):
    """Phased run with machine memory n * polylog_budget.

    On top of the superlinear phase body, each phase first tallies exact
    cross-degrees and peels the over-ratio side until the ratio test flips
    (no fresh data needed while only one side shrinks), and fetched samples
    scale with (|S| + |T|) * xi instead of the full machine budget.
    """
    cfg = cfg or MpcConfig("nearlinear")
    if cfg.regime != "nearlinear":
        raise ValueError("config regime must be 'nearlinear'")
    return _mpc_run(g, c, epsilon, cfg, params, rng, nearlinear=True)
