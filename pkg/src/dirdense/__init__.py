"""Directed densest-subgraph toolkit.

Peeling with a ratio guess, sampled multi-pass and single-pass streaming
runners, a geometric sweep over the guess, a round-accounted simulator of
memory-bounded phased execution, and a small exact oracle for validation.
"""

from .bench import (
    RunConfig,
    RunReport,
    compare_reports,
    gen_pref_attach,
    parse_snap_edgelist,
    read_report_csv,
    run_experiment,
    write_report_csv,
)
from .graph import (
    DirectedGraph,
    EdgeBatch,
    VertexSetPair,
    count_cross_edges,
    density,
    restricted_degrees,
)
from .mpc import MpcConfig, RoundLedger, mpc_nearlinear_run, mpc_superlinear_run
from .peeling import (
    PeelParams,
    PeelTrace,
    baseline_peel,
    exact_oracle,
    iteration_cap,
    vsets_update,
)
from .streaming import (
    EdgeStream,
    SampleParams,
    SeenSet,
    estimate_cross_edges,
    make_stream,
    multi_pass_run,
    sample_params,
    sampled_density_estimate,
    set_sample,
    single_pass_run,
)
from .csweep import SweepGrid, build_grid, sweep

__all__ = [
    "DirectedGraph",
    "EdgeBatch",
    "EdgeStream",
    "MpcConfig",
    "PeelParams",
    "PeelTrace",
    "RoundLedger",
    "RunConfig",
    "RunReport",
    "SampleParams",
    "SeenSet",
    "SweepGrid",
    "VertexSetPair",
    "baseline_peel",
    "build_grid",
    "compare_reports",
    "count_cross_edges",
    "density",
    "estimate_cross_edges",
    "exact_oracle",
    "gen_pref_attach",
    "iteration_cap",
    "make_stream",
    "mpc_nearlinear_run",
    "mpc_superlinear_run",
    "multi_pass_run",
    "parse_snap_edgelist",
    "read_report_csv",
    "restricted_degrees",
    "run_experiment",
    "sample_params",
    "sampled_density_estimate",
    "set_sample",
    "single_pass_run",
    "sweep",
    "vsets_update",
    "write_report_csv",
]

__version__ = "0.1.0"
