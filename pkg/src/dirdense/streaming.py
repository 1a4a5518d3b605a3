"""Edge streams plus the sampled peeling runners.

Two consumption styles share one stream type. The multi-pass runner resets
and rescans once per sampling step and once per exact recount. The
single-pass engine reads every edge at most once and keeps only a bounded
working set: the retained cross-edge buffer for the current pair, thinned
samples of it, and one batch in flight. When the stream dries up, the engine
finishes with an exact compacted peel of whatever it retained.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graph import EdgeBatch, VertexSetPair, member_mask
from .peeling import _peel_best, _peel_once

__all__ = [
    "EdgeStream",
    "SampleParams",
    "SeenSet",
    "SinglePassEngine",
    "estimate_cross_edges",
    "make_stream",
    "multi_pass_run",
    "sample_params",
    "sampled_density_estimate",
    "set_sample",
    "single_pass_run",
]

_EMPTY = np.empty(0, dtype=np.int64)
_EMPTY.setflags(write=False)


@dataclass(frozen=True)
class SampleParams:
    """Sampling knobs: slack epsilon, per-vertex degree threshold xi, scale f.

    f = 1 gives the analysis threshold xi = 60 ln(n) / epsilon^2; experiments
    shrink it by orders of magnitude to trade accuracy for speed.
    """

    epsilon: float
    xi: int
    f: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.xi < 1:
            raise ValueError("xi must be at least 1")
        if self.f <= 0:
            raise ValueError("xi scale f must be positive")


def sample_params(n: int, epsilon: float, f: float = 1.0) -> SampleParams:
    """Build params with xi = ceil(f * 60 * ln(n) / epsilon^2), at least 1."""
    if n < 1:
        raise ValueError("n must be positive")
    xi = max(1, math.ceil(f * 60.0 * math.log(n) / epsilon**2))
    return SampleParams(epsilon=epsilon, xi=xi, f=f)


class EdgeStream:
    """Replayable edge sequence with a consumption cursor.

    A stream is single-consumer. ``reset`` restarts a pass for multi-pass
    use; single-pass consumers never call it, which the ``resets`` and
    ``edges_read`` counters let tests assert.
    """

    __slots__ = ("n", "order", "_src", "_dst", "_cursor", "edges_read", "resets")

    def __init__(self, n, src, dst, order="given"):
        self.n = int(n)
        self._src = src
        self._dst = dst
        self._cursor = 0
        self.edges_read = 0
        self.resets = 0
        self.order = order

    @property
    def m(self) -> int:
        return int(self._src.size)

    @property
    def remaining(self) -> int:
        return int(self._src.size - self._cursor)

    def reset(self):
        """Restart a pass (multi-pass consumers only)."""
        self.resets += 1
        self._cursor = 0

    def take(self, k):
        """Consume and return the next k edges (fewer if the stream ends)."""
        k = max(0, min(int(k), self.remaining))
        lo = self._cursor
        self._cursor += k
        self.edges_read += k
        return self._src[lo : self._cursor], self._dst[lo : self._cursor]

    def take_all(self):
        return self.take(self.remaining)

    def take_qualifying(self, want, s_mask, t_mask, block=65536):
        """Advance until `want` edges inside (S, T) were collected.

        Edges read along the way that fall outside the pair are consumed and
        dropped. Returns (src, dst, exhausted) where exhausted means the
        stream ended before `want` qualifying edges appeared.
        """
        want = int(want)
        if want <= 0:
            return _EMPTY, _EMPTY, False
        out_src, out_dst = [], []
        got = 0
        while got < want and self.remaining:
            view = min(max(block, 4 * (want - got)), self.remaining)
            lo = self._cursor
            vs = self._src[lo : lo + view]
            vd = self._dst[lo : lo + view]
            hits = np.flatnonzero(s_mask[vs] & t_mask[vd])
            if got + hits.size >= want:
                need = want - got
                consumed = int(hits[need - 1]) + 1
                out_src.append(vs[hits[:need]])
                out_dst.append(vd[hits[:need]])
                got = want
                self._cursor = lo + consumed
                self.edges_read += consumed
            else:
                out_src.append(vs[hits])
                out_dst.append(vd[hits])
                got += int(hits.size)
                self._cursor = lo + view
                self.edges_read += view
        src = np.concatenate(out_src) if out_src else _EMPTY
        dst = np.concatenate(out_dst) if out_dst else _EMPTY
        return src, dst, got < want


def make_stream(g, order: str = "shuffled", seed: int = 0) -> EdgeStream:
    """Stream over g's edges: "given" keeps input order, "shuffled" applies a
    seed-deterministic uniform permutation."""
    if order in ("given", "as-given"):
        return EdgeStream(g.n, g.src, g.dst, order="given")
    if order == "shuffled":
        perm = np.random.default_rng(seed).permutation(g.m)
        return EdgeStream(g.n, g.src[perm], g.dst[perm], order="shuffled")
    raise ValueError(f"unknown stream order {order!r}")


class SeenSet:
    """Retained cross-edges for the current pair, with a high-water mark.

    ``peak_size`` additionally counts batches noted as in flight via
    ``note_extra``, so it reflects the most edges simultaneously held.
    """

    __slots__ = ("n", "_src", "_dst", "size", "peak_size")

    def __init__(self, n, capacity=1024):
        self.n = int(n)
        self._src = np.empty(max(1, capacity), dtype=np.int64)
        self._dst = np.empty(max(1, capacity), dtype=np.int64)
        self.size = 0
        self.peak_size = 0

    def _grow(self, need):
        if need > self._src.size:
            cap = max(2 * self._src.size, need)
            for name in ("_src", "_dst"):
                old = getattr(self, name)
                new = np.empty(cap, dtype=np.int64)
                new[: self.size] = old[: self.size]
                setattr(self, name, new)

    def add(self, src, dst):
        k = int(src.size)
        if k:
            self._grow(self.size + k)
            self._src[self.size : self.size + k] = src
            self._dst[self.size : self.size + k] = dst
            self.size += k
            if self.size > self.peak_size:
                self.peak_size = self.size

    def note_extra(self, k):
        if self.size + k > self.peak_size:
            self.peak_size = self.size + int(k)

    def refilter(self, s_mask, t_mask):
        """Drop retained edges outside the (shrunken) current pair, in place."""
        src = self._src[: self.size]
        dst = self._dst[: self.size]
        keep = s_mask[src] & t_mask[dst]
        kept = int(np.count_nonzero(keep))
        if kept != self.size:
            self._src[:kept] = src[keep]
            self._dst[:kept] = dst[keep]
            self.size = kept

    def arrays(self):
        return self._src[: self.size], self._dst[: self.size]


def _set_sample(seen: SeenSet, s_mask, t_mask, p, size_estimate, stream, rng):
    """Shared implementation; returns (src, dst, exhausted, fresh_pair)."""
    if not 0.0 < p <= 1.0:
        raise ValueError("p must lie in (0, 1]")
    size_estimate = int(size_estimate)
    if size_estimate < seen.size:
        raise ValueError("size estimate below retained edge count; clamp before sampling")
    kept_src, kept_dst = seen.arrays()
    if p < 1.0:
        keep = rng.random(seen.size) < p
        kept_src = kept_src[keep]
        kept_dst = kept_dst[keep]
    extra = size_estimate - seen.size
    draws = int(rng.binomial(extra, p)) if extra > 0 else 0
    fresh_src, fresh_dst, exhausted = stream.take_qualifying(draws, s_mask, t_mask)
    # concatenate always copies, so the result never aliases the seen buffer
    src = np.concatenate([kept_src, fresh_src])
    dst = np.concatenate([kept_dst, fresh_dst])
    return src, dst, exhausted, (fresh_src, fresh_dst)


def set_sample(seen: SeenSet, pair: VertexSetPair, p: float, size_estimate: int, stream, *, rng):
    """Sample the current cross-edge population without a second pass.

    Already-retained edges are thinned independently at rate p; a binomially
    sized count of fresh qualifying edges is then pulled off the stream
    (skipping and discarding non-qualifying ones). Returns the sampled batch
    and a flag set when the stream ran out before the draw was filled.
    """
    s_mask = member_mask(pair.S, seen.n)
    t_mask = member_mask(pair.T, seen.n)
    src, dst, exhausted, _ = _set_sample(seen, s_mask, t_mask, p, size_estimate, stream, rng)
    return EdgeBatch(seen.n, src, dst), exhausted


def _estimate_from_counts(batch_size, batch_matching, stream_remaining, n_xi, seen_size, epsilon):
    raw = (1.0 - epsilon) * (batch_matching / batch_size) * (stream_remaining + n_xi) + seen_size
    return max(int(math.floor(raw)), seen_size + batch_matching)


def estimate_cross_edges(batch: EdgeBatch, pair: VertexSetPair, stream_remaining: int,
                         n_xi: int, seen_size: int, epsilon: float) -> int:
    """Scale the batch's qualifying fraction up to the unseen population.

    Floored, then clamped so the estimate never drops below the evidence
    already in hand (retained edges plus the batch's qualifying edges).
    """
    if batch.m == 0:
        raise ValueError("estimate needs a nonempty batch")
    s_mask = member_mask(pair.S, batch.n)
    t_mask = member_mask(pair.T, batch.n)
    matching = int(np.count_nonzero(s_mask[batch.src] & t_mask[batch.dst]))
    return _estimate_from_counts(batch.m, matching, stream_remaining, n_xi, seen_size, epsilon)


def sampled_density_estimate(sample, pair: VertexSetPair, p: float) -> float:
    """Density of the pair in a rate-p sample, scaled back by 1/p."""
    if p <= 0:
        raise ValueError("p must be positive")
    if not pair.S or not pair.T:
        return 0.0
    s_mask = member_mask(pair.S, sample.n)
    t_mask = member_mask(pair.T, sample.n)
    cross = int(np.count_nonzero(s_mask[sample.src] & t_mask[sample.dst]))
    return cross / (p * math.sqrt(len(pair.S) * len(pair.T)))


def multi_pass_run(stream: EdgeStream, n: int, c, params: SampleParams, *, rng=None):
    """Sampled peeling with one sampling pass and one exact recount pass per step.

    Each step samples the current cross-edges independently at
    p = min(n*xi / ((1-eps) |E(S,T)|), 1), peels once on the sample, then
    recounts the surviving pair exactly. Returns
    (best pair, best exact density, passes, peak sampled edges).
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    c = Fraction(c)
    eps = params.epsilon
    n_xi = n * params.xi
    s_mask = np.ones(n, dtype=bool)
    t_mask = np.ones(n, dtype=bool)

    def recount(sm, tm):
        stream.reset()
        es, ed = stream.take_all()
        return int(np.count_nonzero(sm[es] & tm[ed]))

    cross = recount(s_mask, t_mask)
    passes = 1
    best_s = s_mask.copy()
    best_t = t_mask.copy()
    best_cross = cross
    best_rho = cross / n
    peak = 0
    while s_mask.any() and t_mask.any():
        p = min(n_xi / ((1.0 - eps) * cross), 1.0) if cross else 1.0
        stream.reset()
        es, ed = stream.take_all()
        passes += 1
        pick = np.flatnonzero(s_mask[es] & t_mask[ed])
        if p < 1.0:
            pick = pick[rng.random(pick.size) < p]
        sample_src = es[pick]
        sample_dst = ed[pick]
        peak = max(peak, int(pick.size))
        _, _, s_mask, t_mask, _ = _peel_once(sample_src, sample_dst, n, c, eps, s_mask, t_mask)
        if not s_mask.any() or not t_mask.any():
            break
        cross = recount(s_mask, t_mask)
        passes += 1
        rho = cross / math.sqrt(int(np.count_nonzero(s_mask)) * int(np.count_nonzero(t_mask)))
        if rho > best_rho:
            best_s = s_mask.copy()
            best_t = t_mask.copy()
            best_rho = rho
            best_cross = cross
    pair = VertexSetPair(
        frozenset(np.flatnonzero(best_s).tolist()),
        frozenset(np.flatnonzero(best_t).tolist()),
        best_cross,
    )
    return pair, best_rho, passes, peak


class SinglePassEngine:
    """Incremental single-pass peeler over an injected stream.

    The stream may be delivered in installments (the phased simulator feeds
    machine-sized loads); ``run`` consumes until the stream reports empty,
    then finishes with an exact compacted peel of the retained buffer. The
    running best is ranked by sampled-density estimates during streaming and
    by exact in-buffer densities at the finish.
    """

    def __init__(self, n, c, params: SampleParams, rng, batch_size_fn=None):
        self.n = int(n)
        self.c = Fraction(c)
        self.params = params
        self.rng = rng
        self._batch_size = batch_size_fn or (lambda s_count, t_count: n * params.xi)
        self.s_mask = np.ones(n, dtype=bool)
        self.t_mask = np.ones(n, dtype=bool)
        self.s_count = n
        self.t_count = n
        self.seen = SeenSet(n)
        self.best_s = self.s_mask.copy()
        self.best_t = self.t_mask.copy()
        self.best_value = 0.0
        self.finished = False

    # -- hooks used by the phased simulator ---------------------------------
    def set_pair(self, s_mask, t_mask):
        self.s_mask = s_mask
        self.t_mask = t_mask
        self.s_count = int(np.count_nonzero(s_mask))
        self.t_count = int(np.count_nonzero(t_mask))
        self.seen.refilter(s_mask, t_mask)

    def offer_best(self, s_mask, t_mask, value):
        if value > self.best_value:
            self.best_s = s_mask.copy()
            self.best_t = t_mask.copy()
            self.best_value = value

    def best_pair(self) -> VertexSetPair:
        return VertexSetPair(
            frozenset(np.flatnonzero(self.best_s).tolist()),
            frozenset(np.flatnonzero(self.best_t).tolist()),
        )

    @property
    def peak_edges(self) -> int:
        return self.seen.peak_size

    # ------------------------------------------------------------------------
    def run(self, stream):
        eps = self.params.epsilon
        xi = self.params.xi
        while True:
            if stream.remaining == 0:
                self._finish(stream)
                return
            batch = max(1, int(self._batch_size(self.s_count, self.t_count)))
            bs, bd = stream.take(batch)
            self.seen.note_extra(bs.size)
            if self.s_count == self.n and self.t_count == self.n:
                qualifying = None  # nothing has been peeled: every edge matches
                matching = int(bs.size)
            else:
                qualifying = self.s_mask[bs] & self.t_mask[bd]
                matching = int(np.count_nonzero(qualifying))
            if matching < 2 * xi or stream.remaining == 0:
                # too sparse to estimate, or the stream just ended: keep every
                # remaining cross edge and finish with full information
                if qualifying is None and self.seen.size == 0 and stream.remaining == 0:
                    # nothing was retained or peeled yet: peel the batch in place
                    self._local_peel(bs, bd)
                    self.finished = True
                    return
                if qualifying is None:
                    self.seen.add(bs, bd)
                else:
                    self.seen.add(bs[qualifying], bd[qualifying])
                self._finish(stream)
                return
            size_estimate = _estimate_from_counts(
                int(bs.size), matching, stream.remaining, batch, self.seen.size, eps
            )
            if qualifying is None:
                self.seen.add(bs, bd)
            else:
                self.seen.add(bs[qualifying], bd[qualifying])
            p = batch / ((1.0 - eps) * size_estimate)
            if p > 1.0:
                # the whole remaining population fits the sample budget
                rs, rd = stream.take_all()
                self.seen.note_extra(rs.size)
                rq = self.s_mask[rs] & self.t_mask[rd]
                self.seen.add(rs[rq], rd[rq])
                h_src, h_dst = self.seen.arrays()
                p_eff = 1.0
                fresh = None
            else:
                h_src, h_dst, _, fresh = _set_sample(
                    self.seen, self.s_mask, self.t_mask, p, size_estimate, stream, self.rng
                )
                self.seen.note_extra(h_src.size)
                p_eff = p
            # score the pre-peel pair too: the sample is entirely inside
            # (S, T), so |H| / p estimates its cross count
            current = h_src.size / (p_eff * math.sqrt(self.s_count * self.t_count))
            self.offer_best(self.s_mask, self.t_mask, current)
            _, _, new_s, new_t, sample_cross = _peel_once(
                h_src, h_dst, self.n, self.c, eps, self.s_mask, self.t_mask
            )
            self.s_mask = new_s
            self.t_mask = new_t
            self.s_count = int(np.count_nonzero(new_s))
            self.t_count = int(np.count_nonzero(new_t))
            if self.s_count and self.t_count:
                estimate = sample_cross / (p_eff * math.sqrt(self.s_count * self.t_count))
                self.offer_best(new_s, new_t, estimate)
            if fresh is not None:
                self.seen.add(fresh[0], fresh[1])
            self.seen.refilter(new_s, new_t)
            # if the pair just died, the next batch matches nothing and the
            # sparse branch above drains the stream and wraps up

    def _local_peel(self, edge_src, edge_dst):
        """Exact compacted peel of the in-memory cross-edge bag.

        Continues from the current pair (the bag lies entirely inside it), so
        the finishing peel is the full-information continuation of the
        streamed one.
        """
        if edge_src.size == 0:
            return
        bs, bt, rho, _, _ = _peel_best(
            edge_src, edge_dst, self.n, self.c, self.params.epsilon,
            compact=True, start=(self.s_mask, self.t_mask),
        )
        self.offer_best(bs, bt, rho)

    def _finish(self, stream):
        if stream.remaining:
            rs, rd = stream.take_all()
            self.seen.note_extra(rs.size)
            if self.s_count == self.n and self.t_count == self.n:
                self.seen.add(rs, rd)
            else:
                rq = self.s_mask[rs] & self.t_mask[rd]
                self.seen.add(rs[rq], rd[rq])
        # _peel_best only reads the buffer views; nothing mutates the seen
        # set once the stream is drained
        self._local_peel(*self.seen.arrays())
        self.finished = True


def single_pass_run(stream: EdgeStream, n: int, c, params: SampleParams, *, rng=None):
    """One-pass sampled peeling over a (preferably shuffled) stream.

    Returns (best pair, its density estimate, peak retained edges). The
    estimate is exact whenever the final in-buffer peel produced the best.
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    engine = SinglePassEngine(n, c, params, rng)
    engine.run(stream)
    return engine.best_pair(), engine.best_value, engine.peak_edges
