import math
from fractions import Fraction

import pytest

from dirdense.graph import DirectedGraph
from dirdense.peeling import exact_oracle
from dirdense.csweep import build_grid, sweep
from tests.support import gnp_directed


class TestBuildGrid:
    def test_powers_of_two_n8(self):
        grid = build_grid(8, 2)
        assert list(grid.values) == [Fraction(1, 8), Fraction(1, 4), Fraction(1, 2),
                                     Fraction(1), Fraction(2), Fraction(4), Fraction(8)]

    def test_single_vertex(self):
        assert list(build_grid(1, 2).values) == [Fraction(1)]

    def test_n100_endpoints_and_count(self):
        grid = build_grid(100, 2)
        assert len(grid) == 15
        assert grid.values[0] == Fraction(1, 100)
        assert grid.values[-1] == Fraction(2**14, 100)
        assert grid.values[-1] >= 100
        assert grid.values[-2] < 100

    def test_consecutive_ratio_is_delta(self):
        grid = build_grid(30, 1.5)
        for lo, hi in zip(grid.values, grid.values[1:]):
            assert hi / lo == Fraction(1.5)

    def test_rejects_bad_delta(self):
        with pytest.raises(ValueError):
            build_grid(10, 1.0)

    @pytest.mark.parametrize("n", [2, 7, 16, 33, 50])
    def test_covers_every_rational_ratio(self, n):
        # every candidate optimum a/b with 1 <= a, b <= n has a grid value
        # within a multiplicative delta on either side
        delta = Fraction(2)
        grid = build_grid(n, 2).values
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                target = Fraction(a, b)
                assert any(target / delta <= c <= target * delta for c in grid)


class TestSweep:
    def test_single_edge_any_runner(self):
        g = DirectedGraph(2, [(0, 1)])
        grid = build_grid(2, 2)
        for algo in ("baseline", "multi-pass", "single-pass"):
            res = sweep(algo, g, grid, epsilon=0.2, seed=1)
            assert res.best_density == 1.0
            assert len(res.rows) == len(grid)

    def test_emits_one_row_per_grid_value(self):
        g = DirectedGraph(3, [(0, 1), (0, 2)])
        grid = build_grid(3, 2)
        res = sweep("baseline", g, grid, epsilon=0.2)
        assert [row.c for row in res.rows] == list(grid.values)

    def test_best_matches_rowwise_maximum(self):
        g = gnp_directed(12, 0.4, seed=2)
        res = sweep("baseline", g, build_grid(12, 2), epsilon=0.2)
        top = max(row.density for row in res.rows)
        assert res.best_density == top
        assert res.best_c == next(r.c for r in res.rows if r.density == top)

    def test_ties_resolve_to_smaller_c(self):
        g = DirectedGraph(2, [(0, 1)])
        res = sweep("baseline", g, build_grid(2, 2), epsilon=0.2)
        winners = [r.c for r in res.rows if r.density == res.best_density]
        assert res.best_c == min(winners)

    def test_unknown_runner_rejected(self):
        with pytest.raises(ValueError):
            sweep("magic", DirectedGraph(2, [(0, 1)]), build_grid(2, 2), epsilon=0.2)

    def test_per_cell_errors_recorded_not_raised(self, monkeypatch):
        import dirdense.csweep as sweep_mod

        real = sweep_mod.baseline_peel
        calls = {"count": 0}

        def flaky(g, params):
            calls["count"] += 1
            if calls["count"] == 2:
                raise RuntimeError("boom")
            return real(g, params)

        monkeypatch.setattr(sweep_mod, "baseline_peel", flaky)
        g = DirectedGraph(2, [(0, 1)])
        res = sweep("baseline", g, build_grid(2, 2), epsilon=0.2)
        errors = [r for r in res.rows if r.error is not None]
        assert len(errors) == 1
        assert "boom" in errors[0].error
        assert len(res.rows) == 3
        assert res.best_density == 1.0

    def test_worker_count_does_not_change_results(self):
        g = gnp_directed(13, 0.4, seed=5)
        grid = build_grid(13, 2)
        serial = sweep("single-pass", g, grid, epsilon=0.2, seed=7, workers=1)
        threaded = sweep("single-pass", g, grid, epsilon=0.2, seed=7, workers=4)
        assert [(r.c, r.density) for r in serial.rows] == \
               [(r.c, r.density) for r in threaded.rows]

    def test_baseline_sweep_meets_oracle_bound(self):
        eps, delta = 0.2, 2
        bound_factor = 2 * (1 + eps) ** 3 * math.sqrt(delta)
        for seed in range(20):
            n = 4 + seed % 11
            g = gnp_directed(n, (0.1, 0.3, 0.6)[seed % 3], seed)
            _, oracle_rho = exact_oracle(g)
            res = sweep("baseline", g, build_grid(n, delta), epsilon=eps)
            assert res.best_density >= oracle_rho / bound_factor - 1e-12
