import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hcmdesign.drive import evaluate_design
from hcmdesign.errors import ValidationError
from hcmdesign.model import EulerStrip, Geometry
from hcmdesign.search import (
    DesignContext,
    Grid,
    SearchConfig,
    SweepSpec,
    candidates,
    grid_values,
    is_feasible,
    rows_to_csv,
    search,
    sweep,
)

from search_oracle import naive_search, random_config

CF_GRID = {"l": [137.0], "D": [10.0], "h": [10.0], "r": [2.1]}


class TestGrid:
    def test_decimal_points(self):
        assert Grid(0.25, 1.0, 0.25).values() == (0.25, 0.5, 0.75, 1.0)
        assert Grid(0.1, 0.3, 0.1).values() == (0.1, 0.2, 0.3)
        assert Grid(5, 20, 5).values() == (5.0, 10.0, 15.0, 20.0)
        assert Grid(5, 19, 5).values() == (5.0, 10.0, 15.0)

    def test_parse(self):
        assert Grid.parse("5:20:5") == Grid(5, 20, 5)
        assert Grid.parse("2.1").values() == (2.1,)
        with pytest.raises(ValidationError):
            Grid.parse("1:2")

    @pytest.mark.parametrize("args", [(1, 2, 0), (1, 2, -1), (3, 2, 1), (1, math.inf, 1)])
    def test_invalid(self, args):
        with pytest.raises(ValidationError):
            Grid(*args)

    def test_empty_explicit(self):
        with pytest.raises(ValidationError):
            grid_values([], "D")


class TestIsFeasible:
    def test_coral(self, coral):
        e = evaluate_design(*coral)
        assert is_feasible(e, alpha_min=1.0, f_target=4.0)
        assert not is_feasible(e, alpha_min=1.0, f_target=10.0)

    def test_coral_reference_factor(self, coral):
        # with the critical load chosen so the torque equals the 188.7 mm*N reference
        g, mat, s = coral
        base = evaluate_design(g, mat, s)
        from hcmdesign.model import DirectLoad

        e = evaluate_design(g, mat, s, pcr=DirectLoad(base.P_cr * 188.7 / base.T_act))
        assert e.T_act == pytest.approx(188.7)
        assert e.alpha == pytest.approx(1.3, abs=0.01)
        assert is_feasible(e, 1.0, 4.0)

    def test_alpha_too_high(self, catalog):
        for p in catalog.presets.values():
            e = evaluate_design(p.geometry, catalog.material(p.material), catalog.servo(p.servo))
            assert not is_feasible(e, alpha_min=1e3, f_target=0.0)


def _context(carbonfish, **kw):
    g, mat, s = carbonfish
    return DesignContext(g, mat, s, **kw)


class TestSweep:
    def test_D_proportional_with_fixed_shape(self, carbonfish):
        rows = sweep(SweepSpec(vary={"D": Grid(5, 20, 5)}, fix_shape=True), _context(carbonfish))
        assert [r["D"] for r in rows] == [5.0, 10.0, 15.0, 20.0]
        base = rows[0]["T_act"] / 5.0
        for r in rows:
            assert r["T_act"] / r["D"] == pytest.approx(base, rel=1e-12)
            assert r["closure"] == "fixed_shape"

    def test_t_cubic(self, carbonfish):
        rows = sweep(SweepSpec(vary={"t": [0.25, 0.5, 1.0]}), _context(carbonfish, pcr=EulerStrip()))
        T = [r["T_act"] for r in rows]
        assert T[1] / T[0] == 8.0 and T[2] / T[0] == 64.0
        assert [r["extrapolated"] for r in rows] == [True, False, True]

    def test_l_frequency_ratio(self, carbonfish):
        rows = sweep(SweepSpec(vary={"l": [87.0, 137.0]}), _context(carbonfish))
        assert rows[1]["f_m_hcm"] / rows[0]["f_m_hcm"] == pytest.approx((137 / 87) ** -2, rel=1e-14)
        assert rows[1]["f_m_hcm"] / rows[0]["f_m_hcm"] == pytest.approx(0.403, abs=5e-4)

    def test_two_parameters_lexicographic(self, carbonfish):
        spec = SweepSpec(vary={"t": Grid(0.25, 1.0, 0.25), "h": Grid(5, 15, 5)})
        rows = sweep(spec, _context(carbonfish))
        assert [(r["t"], r["h"]) for r in rows] == [(t, h) for t in (0.25, 0.5, 0.75, 1.0) for h in (5.0, 10.0, 15.0)]

    def test_error_rows(self, carbonfish):
        rows = sweep(SweepSpec(vary={"D": [5.0, 200.0]}), _context(carbonfish))
        assert rows[0]["error"] == ""
        assert rows[1]["error"].startswith("ValidationError")
        assert "T_act" not in rows[1]

    def test_point_isolation(self, carbonfish):
        full = sweep(SweepSpec(vary={"D": Grid(5, 20, 5), "r": [1.0, 2.1]}, fix_shape=True), _context(carbonfish))
        single = sweep(SweepSpec(vary={"D": [15.0], "r": [2.1]}, fix_shape=True), _context(carbonfish))
        assert single[0] == full[5]

    def test_fixed_overrides(self, carbonfish):
        rows = sweep(SweepSpec(vary={"D": [5.0]}, fixed={"h": 20.0}), _context(carbonfish))
        assert rows[0]["h"] == 20.0

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(vary={}),
            dict(vary={"D": [1.0], "t": [1.0], "h": [1.0]}),
            dict(vary={"D": [1.0]}, fixed={"D": 2.0}),
            dict(vary={"E": [1.0]}),
            dict(vary={"D": []}),
            dict(vary={"D": [1.0]}, columns=["nope"]),
        ],
    )
    def test_invalid_specs(self, kwargs):
        with pytest.raises(ValidationError):
            SweepSpec(**kwargs)

    def test_csv(self, carbonfish):
        spec = SweepSpec(vary={"D": Grid(5, 10, 5)}, columns=["T_act", "f_design", "limiting"])
        rows = sweep(spec, _context(carbonfish))
        text = rows_to_csv(rows, spec.header())
        lines = text.split("\n")
        assert lines[0] == "D,T_act,f_design,limiting"
        assert lines[1].startswith("5.0,") and lines[1].endswith(",13.6,servo")
        assert text.endswith("\n") and "\r" not in text
        assert float(lines[1].split(",")[1]) == rows[0]["T_act"]

    def test_csv_default_header(self, carbonfish):
        spec = SweepSpec(vary={"h": [5.0]})
        header = spec.header()
        assert header[0] == "h" and header.count("h") == 1
        assert header[1:6] == ["l", "D", "t", "r", "material"]
        assert header[-2:] == ["extrapolated", "error"]

    @settings(max_examples=15, deadline=None)
    @given(st.sampled_from(["D", "t", "h"]), st.lists(st.floats(0.1, 9.0), min_size=2, max_size=5, unique=True))
    def test_monotone_torque(self, carbonfish, name, values):
        rows = sweep(SweepSpec(vary={name: sorted(values)}, fix_shape=True), _context(carbonfish))
        T = [r["T_act"] for r in rows]
        assert all(b >= a for a, b in zip(T, T[1:]))

    def test_monotone_frequency(self, carbonfish):
        by_l = sweep(SweepSpec(vary={"l": Grid(60, 200, 20)}, fix_shape=True), _context(carbonfish))
        f = [r["f_m_hcm"] for r in by_l]
        assert all(b <= a for a, b in zip(f, f[1:]))
        by_t = sweep(SweepSpec(vary={"t": Grid(0.1, 1.0, 0.1)}, fix_shape=True), _context(carbonfish))
        f = [r["f_m_hcm"] for r in by_t]
        assert all(b >= a for a, b in zip(f, f[1:]))


class TestSearch:
    def test_carbonfish_found(self, catalog):
        cfg = SearchConfig(grids=CF_GRID, materials=["CFRP"], servos=["A66BHLW"], f_target=10, alpha_min=1.0)
        results = search(cfg, catalog)
        assert len(results) == 2  # both catalog thicknesses of CFRP
        hit = [e for e in results if e.t == 0.5]
        assert len(hit) == 1 and hit[0].f_design == 13.6

    def test_single_thickness_grid(self, catalog):
        cfg = SearchConfig(
            grids=dict(CF_GRID, t=[0.5]), materials=["CFRP"], servos=["A66BHLW"], f_target=10, continuous_t=True
        )
        results = search(cfg, catalog)
        assert len(results) == 1 and results[0].f_design == 13.6

    def test_slow_servo_excluded(self, catalog):
        cfg = SearchConfig(grids=CF_GRID, materials=["CFRP"], servos=["DS3230MG"], f_target=10)
        assert search(cfg, catalog) == []

    def test_all_feasible_and_sorted(self, catalog):
        cfg = SearchConfig(grids={"l": Grid(80, 140, 20), "D": [8.0, 12.0], "h": [10.0], "r": [2.0]}, f_target=4.0)
        results = search(cfg, catalog)
        assert results
        assert all(is_feasible(e, cfg.alpha_min, cfg.f_target) for e in results)
        f = [e.f_design for e in results]
        assert f == sorted(f, reverse=True)

    def test_invalid_geometry_skipped(self, catalog):
        cfg = SearchConfig(grids={"l": [10.0], "D": [5.0, 20.0], "h": [10.0], "r": [2.0]}, materials=["CFRP"], servos=["MG90S"])
        assert {g.D for g, _, _ in candidates(cfg, catalog)} == {5.0}

    def test_parallel_and_order_invariance(self, catalog):
        grids = {"l": Grid(80, 140, 30), "D": [12.0, 8.0], "h": [10.0], "r": [2.0, 1.0]}
        serial = search(SearchConfig(grids=grids), catalog)
        parallel = search(SearchConfig(grids=grids, n_jobs=4), catalog)
        shuffled = search(
            SearchConfig(grids={**grids, "D": [8.0, 12.0], "r": [1.0, 2.0]}, materials=["steel", "PETG", "CFRP"]),
            catalog,
        )
        assert serial == parallel == shuffled

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_naive_oracle(self, catalog, seed):
        cfg = random_config(seed, catalog)
        assert search(cfg, catalog) == naive_search(cfg, catalog)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(grids={"l": [1.0], "D": [1.0], "h": [1.0]}),
            dict(grids={**CF_GRID, "D": []}),
            dict(grids={**CF_GRID, "t": [0.5]}),
            dict(grids={**CF_GRID, "q": [0.5]}),
            dict(grids=CF_GRID, alpha_min=0),
            dict(grids=CF_GRID, f_target=-1),
            dict(grids=CF_GRID, objective="cheapest"),
            dict(grids=CF_GRID, n_jobs=0),
        ],
    )
    def test_invalid_config(self, kwargs):
        with pytest.raises(ValidationError):
            SearchConfig(**kwargs)

    def test_unknown_filter(self, catalog):
        with pytest.raises(ValidationError):
            search(SearchConfig(grids=CF_GRID, servos=["Z9"]), catalog)
