"""Dataset loading, synthetic graph generation, and the experiment driver."""

from __future__ import annotations

import csv
import io
import math
import sys
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable

import numpy as np

from .graph import DirectedGraph
from .mpc import MpcConfig
from .peeling import exact_oracle
from .csweep import build_grid, sweep

__all__ = [
    "CSV_HEADER",
    "ComparisonSummary",
    "ReportRow",
    "RunConfig",
    "RunReport",
    "compare_reports",
    "gen_pref_attach",
    "parse_snap_edgelist",
    "read_report_csv",
    "report_csv_text",
    "run_experiment",
    "write_report_csv",
]

CSV_HEADER = "dataset,algo,c,density,s_size,t_size,peak_edges,passes_or_rounds,wall_ms,seed"


def parse_snap_edgelist(text) -> tuple[DirectedGraph, list[int]]:
    """Parse whitespace-separated "u v" lines ('#' starts a comment line).

    Vertex ids are remapped densely in first-appearance order; the returned
    label list maps new id -> original id. Malformed lines raise ValueError
    carrying the 1-based line number.
    """
    if isinstance(text, str):
        lines: Iterable[str] = text.splitlines()
    else:
        lines = text
    remap: dict[int, int] = {}
    labels: list[int] = []
    src: list[int] = []
    dst: list[int] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected two vertex ids, got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer vertex id in {line!r}") from None
        for orig in (u, v):
            if orig not in remap:
                remap[orig] = len(labels)
                labels.append(orig)
        src.append(remap[u])
        dst.append(remap[v])
    g = DirectedGraph.from_arrays(len(labels), np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64))
    return g, labels


def gen_pref_attach(n: int, edges_per_node: int, seed: int) -> DirectedGraph:
    """Seeded growth graph: each arriving vertex sends `edges_per_node` edges
    to existing vertices drawn proportionally to in-degree + 1.

    Exactly edges_per_node * (n - 1) edges are produced (the first vertex
    sends none). Parallel edges can and do occur.
    """
    if n < 2:
        raise ValueError("need at least 2 vertices")
    if edges_per_node < 1:
        raise ValueError("edges_per_node must be at least 1")
    rng = np.random.default_rng(seed)
    k = edges_per_node
    m = k * (n - 1)
    # the pool holds one entry per existing vertex plus one per received edge,
    # so a uniform pool draw realizes the in-degree + 1 weighting
    pool = np.empty(n + m, dtype=np.int64)
    pool[0] = 0
    pool_len = 1
    src = np.empty(m, dtype=np.int64)
    dst = np.empty(m, dtype=np.int64)
    at = 0
    for v in range(1, n):
        targets = pool[rng.integers(0, pool_len, size=k)]
        src[at : at + k] = v
        dst[at : at + k] = targets
        at += k
        pool[pool_len : pool_len + k] = targets
        pool_len += k
        pool[pool_len] = v
        pool_len += 1
    return DirectedGraph.from_arrays(n, src, dst)


@dataclass(frozen=True)
class RunConfig:
    """Everything one experiment needs: input, algorithm, knobs, output."""

    algo: str
    input_path: str | None = None
    gen: str | None = None
    epsilon: float = 0.2
    delta: float = 2.0
    f: float = 1.0
    c: Fraction | None = None
    seed: int = 0
    stream_order: str = "shuffled"
    mpc_mu: float = 0.3
    mpc_budget: float | None = None
    out: str | None = None
    workers: int = 1
    dataset: str | None = None

    def __post_init__(self):
        if (self.input_path is None) == (self.gen is None):
            raise ValueError("exactly one of input_path / gen must be set")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.delta <= 1:
            raise ValueError("delta must exceed 1")
        if self.f <= 0:
            raise ValueError("f must be positive")


@dataclass
class ReportRow:
    dataset: str
    algo: str
    c: Fraction
    density: float | None
    s_size: int | None
    t_size: int | None
    peak_edges: int | None
    passes_or_rounds: int | None
    wall_ms: float
    seed: int
    error: str | None = None


@dataclass
class RunReport:
    rows: list[ReportRow] = field(default_factory=list)

    def max_density(self) -> float:
        vals = [r.density for r in self.rows if r.density is not None]
        return max(vals) if vals else 0.0

    def total_wall_ms(self) -> float:
        return sum(r.wall_ms for r in self.rows)


def _parse_gen_spec(spec: str) -> dict:
    kind, _, args = spec.partition(":")
    if kind != "pref":
        raise ValueError(f"unknown generator {kind!r}; expected 'pref:n=..,k=..'")
    out = {}
    for item in filter(None, args.split(",")):
        key, _, value = item.partition("=")
        out[key.strip()] = int(value)
    if "n" not in out or "k" not in out:
        raise ValueError("pref generator needs n=.. and k=..")
    return out


def _load_graph(cfg: RunConfig) -> tuple[DirectedGraph, str]:
    if cfg.input_path is not None:
        with open(cfg.input_path, "r", encoding="utf-8") as fh:
            try:
                g, _labels = parse_snap_edgelist(fh)
            except ValueError as exc:
                raise ValueError(f"{cfg.input_path}: {exc}") from exc
        label = cfg.dataset or cfg.input_path.rsplit("/", 1)[-1]
        return g, label
    spec = _parse_gen_spec(cfg.gen)
    g = gen_pref_attach(spec["n"], spec["k"], cfg.seed)
    return g, cfg.dataset or f"pref_n{spec['n']}_k{spec['k']}"


def run_experiment(cfg: RunConfig) -> RunReport:
    """Build or load the graph, sweep c (unless pinned), and emit a report.

    Per-c algorithm failures become error rows; the run keeps going. A CSV
    is written when cfg.out is set. Rerunning the same config reproduces
    every column except wall_ms.
    """
    g, label = _load_graph(cfg)
    rows: list[ReportRow] = []
    if cfg.algo == "exact":
        started = time.perf_counter()
        pair, rho = exact_oracle(g)
        wall = (time.perf_counter() - started) * 1000.0
        rows.append(ReportRow(label, "exact", Fraction(len(pair.S), len(pair.T)), rho,
                              len(pair.S), len(pair.T), g.m, 1, wall, cfg.seed))
    else:
        grid = (cfg.c,) if cfg.c is not None else build_grid(g.n, cfg.delta).values
        mpc_config = None
        if cfg.algo == "mpc-super":
            mpc_config = MpcConfig("superlinear", mu=cfg.mpc_mu)
        elif cfg.algo == "mpc-near":
            mpc_config = MpcConfig("nearlinear", polylog_budget=cfg.mpc_budget)
        result = sweep(cfg.algo, g, grid, epsilon=cfg.epsilon, f=cfg.f, seed=cfg.seed,
                       stream_order=cfg.stream_order, mpc_config=mpc_config, workers=cfg.workers)
        for row in result.rows:
            if row.error is not None:
                print(f"warning: c={row.c}: {row.error}", file=sys.stderr)
            rows.append(ReportRow(label, cfg.algo, row.c, row.density, row.s_size, row.t_size,
                                  row.peak_edges, row.passes_or_rounds, row.wall_ms, cfg.seed,
                                  row.error))
    report = RunReport(rows)
    if cfg.out:
        write_report_csv(report, cfg.out)
    return report


def _format_density(value: float | None) -> str:
    return "" if value is None else format(value, ".6g")


def _write_report(report: RunReport, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for r in report.rows:
        writer.writerow([
            r.dataset,
            r.algo,
            str(r.c),
            _format_density(r.density),
            "" if r.s_size is None else r.s_size,
            "" if r.t_size is None else r.t_size,
            "" if r.peak_edges is None else r.peak_edges,
            "" if r.passes_or_rounds is None else r.passes_or_rounds,
            format(r.wall_ms, ".3f"),
            r.seed,
        ])


def write_report_csv(report: RunReport, path: str):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        _write_report(report, fh)


def report_csv_text(report: RunReport) -> str:
    buf = io.StringIO()
    _write_report(report, buf)
    return buf.getvalue()


def read_report_csv(text_or_path: str) -> RunReport:
    """Parse a report CSV back (error details are not serialized)."""
    if "\n" in text_or_path or "," in text_or_path:
        content = text_or_path
    else:
        with open(text_or_path, "r", encoding="utf-8") as fh:
            content = fh.read()
    reader = csv.reader(io.StringIO(content))
    header = next(reader)
    if header != CSV_HEADER.split(","):
        raise ValueError("unexpected CSV header")
    rows = []
    for rec in reader:
        dataset, algo, c, dens, s_size, t_size, peak, rounds, wall, seed = rec
        rows.append(ReportRow(
            dataset, algo, Fraction(c),
            float(dens) if dens else None,
            int(s_size) if s_size else None,
            int(t_size) if t_size else None,
            int(peak) if peak else None,
            int(rounds) if rounds else None,
            float(wall), int(seed),
        ))
    return RunReport(rows)


@dataclass
class ComparisonRow:
    c: Fraction
    density_a: float | None
    density_b: float | None
    ratio: float


@dataclass
class ComparisonSummary:
    rows: list[ComparisonRow]
    max_density_ratio: float
    speedup: float


def _ratio(numer: float, denom: float) -> float:
    if denom > 0:
        return numer / denom
    return 1.0 if numer == 0 else math.inf


def compare_reports(a: RunReport, b: RunReport) -> ComparisonSummary:
    """Per-c density ratios b/a, the max-density ratio, and wall-time speedup.

    speedup is a's total wall time over b's (values above 1 mean b is
    faster). Reports must cover the same c grid in the same order.
    """
    if [r.c for r in a.rows] != [r.c for r in b.rows]:
        raise ValueError("reports cover different c grids")
    rows = []
    for ra, rb in zip(a.rows, b.rows):
        da = ra.density if ra.density is not None else 0.0
        db = rb.density if rb.density is not None else 0.0
        rows.append(ComparisonRow(ra.c, ra.density, rb.density, _ratio(db, da)))
    summary = ComparisonSummary(
        rows=rows,
        max_density_ratio=_ratio(b.max_density(), a.max_density()),
        speedup=_ratio(a.total_wall_ms(), b.total_wall_ms()),
    )
    return summary
