"""Geometric sweep over the side-ratio guess c.

The optimal |S|/|T| is unknown, so runners are executed once per grid value
delta^i / n from 1/n up to the first value >= n. Every run of one sweep sees
the same stream permutation; sampling randomness is split per grid cell, so
per-c results are seed-deterministic regardless of scheduling.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .graph import DirectedGraph, VertexSetPair
from .mpc import MpcConfig, mpc_nearlinear_run, mpc_superlinear_run
from .peeling import PeelParams, baseline_peel
from .streaming import make_stream, multi_pass_run, sample_params, single_pass_run

__all__ = ["SweepGrid", "SweepResult", "SweepRow", "build_grid", "sweep"]

RUNNERS = ("baseline", "multi-pass", "single-pass", "mpc-super", "mpc-near")

_LABEL_IDS = {"stream": 1, "multi": 2, "single": 3, "mpc": 4}
_SEED_MASK = (1 << 63) - 1


def _derived_rng(seed: int, label: str, index: int = 0) -> np.random.Generator:
    entropy = (int(seed) & _SEED_MASK, _LABEL_IDS[label], int(index))
    return np.random.default_rng(np.random.SeedSequence(entropy))


@dataclass(frozen=True)
class SweepGrid:
    """Ascending ratio guesses delta^i / n; first is 1/n, last is >= n."""

    delta: float
    values: tuple[Fraction, ...]

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


def build_grid(n: int, delta: float) -> SweepGrid:
    if n < 1:
        raise ValueError("n must be positive")
    if delta <= 1:
        raise ValueError("grid factor delta must exceed 1")
    step = Fraction(delta)
    values = [Fraction(1, n)]
    while values[-1] < n:
        values.append(values[-1] * step)
    return SweepGrid(delta=float(delta), values=tuple(values))


@dataclass
class SweepRow:
    c: Fraction
    pair: VertexSetPair | None
    density: float | None
    s_size: int | None
    t_size: int | None
    peak_edges: int | None
    passes_or_rounds: int | None
    wall_ms: float
    error: str | None = None


@dataclass
class SweepResult:
    best_c: Fraction | None
    best_pair: VertexSetPair | None
    best_density: float
    rows: list[SweepRow]


def sweep(algo: str, g: DirectedGraph, grid, *, epsilon: float, f: float = 1.0,
          seed: int = 0, stream_order: str = "shuffled",
          mpc_config: MpcConfig | None = None, workers: int = 1) -> SweepResult:
    """Run one algorithm per grid c and report every row plus the argmax.

    Per-c failures become error rows; the sweep itself never aborts. Ties
    across c resolve toward the smaller c.
    """
    if algo not in RUNNERS:
        raise ValueError(f"unknown runner {algo!r}; expected one of {RUNNERS}")
    values: Sequence[Fraction] = grid.values if isinstance(grid, SweepGrid) else tuple(grid)
    params = sample_params(g.n, epsilon, f)
    stream_seed = int(_derived_rng(seed, "stream").integers(0, _SEED_MASK))

    def run_cell(index: int) -> SweepRow:
        c = values[index]
        try:
            if algo == "baseline":
                started = time.perf_counter()
                pair, rho, trace = baseline_peel(g, PeelParams(c, epsilon))
                wall = (time.perf_counter() - started) * 1000.0
                peak, rounds = g.m, len(trace)
            elif algo == "multi-pass":
                stream = make_stream(g, stream_order, stream_seed)
                rng = _derived_rng(seed, "multi", index)
                started = time.perf_counter()
                pair, rho, passes, peak = multi_pass_run(stream, g.n, c, params, rng=rng)
                wall = (time.perf_counter() - started) * 1000.0
                rounds = passes
            elif algo == "single-pass":
                stream = make_stream(g, stream_order, stream_seed)
                rng = _derived_rng(seed, "single", index)
                started = time.perf_counter()
                pair, rho, peak = single_pass_run(stream, g.n, c, params, rng=rng)
                wall = (time.perf_counter() - started) * 1000.0
                rounds = 1
            else:
                cfg = mpc_config
                if cfg is None:
                    cfg = MpcConfig("superlinear", mu=0.3) if algo == "mpc-super" else MpcConfig("nearlinear")
                run = mpc_superlinear_run if algo == "mpc-super" else mpc_nearlinear_run
                rng = _derived_rng(seed, "mpc", index)
                started = time.perf_counter()
                pair, rho, ledger = run(g, c, epsilon, cfg, params, rng=rng)
                wall = (time.perf_counter() - started) * 1000.0
                peak, rounds = ledger.peak_edges, ledger.rounds
            return SweepRow(c, pair, rho, len(pair.S), len(pair.T), peak, rounds, wall)
        except Exception as exc:  # noqa: BLE001 - row-level isolation is the contract
            return SweepRow(c, None, None, None, None, None, None, 0.0, error=str(exc))

    indices = range(len(values))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_cell, indices))
    else:
        rows = [run_cell(i) for i in indices]

    best_row = None
    for row in rows:
        if row.error is None and (best_row is None or row.density > best_row.density):
            best_row = row
    if best_row is None:
        return SweepResult(None, None, 0.0, rows)
    return SweepResult(best_row.c, best_row.pair, best_row.density, rows)
