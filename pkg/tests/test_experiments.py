import math

import pytest
from scipy import stats

from lozenge_lab.lab.config import ExperimentConfig
from lozenge_lab.lab.experiments import RUNNERS, Report, run_experiment


def _config(kind, **changes):
    return ExperimentConfig(kind=kind, seed=11, **changes)


def test_every_kind_has_a_runner():
    from lozenge_lab.lab.config import KINDS

    assert set(RUNNERS) == set(KINDS)


def test_sample_report():
    report = run_experiment(_config("sample", hexagon=2, samples=5))
    assert report.kind == "sample"
    assert len(report.rows) == 5
    assert report.ok
    assert sum(report.extra["densities"].values()) == pytest.approx(1.0)
    assert all(len(edges) == 12 for edges in report.extra["tilings"])
    assert all(row["a"] + row["b"] + row["c"] == 12 for row in report.rows)


def test_sample_report_on_an_irregular_hexagon():
    report = run_experiment(_config("sample", domain="hex:3,1,2", samples=4))
    assert report.ok
    assert all(row["a"] + row["b"] + row["c"] == 3 * 1 + 1 * 2 + 2 * 3 for row in report.rows)


def test_robustness_report():
    cfg = _config("robustness", sizes=(2, 3), perturbation="translation",
                  samples=6, bootstrap=50, window_radius=1.0)
    report = run_experiment(cfg)
    assert [row["N"] for row in report.rows] == [2, 3]
    assert report.invariants == {"off_path_agreement": True}
    assert set(report.trends) == {"hit", "window_mismatch"}
    for row in report.rows:
        assert 0.0 <= row["hit"] <= 1.0
        assert row["tv_low"] <= row["tv"] <= row["tv_high"]
        assert row["p_a"] + row["p_b"] + row["p_c"] == pytest.approx(1.0)


def test_spread_out_report():
    cfg = _config("spreadout", hexagon=3, radii=(1.0, 2.0), samples=3, inner_samples=5)
    report = run_experiment(cfg)
    assert [row["R"] for row in report.rows] == [1.0, 2.0]
    assert report.ok
    assert "window_max" in report.trends
    z = stats.norm.ppf(0.975)
    inner_widths = [z * math.sqrt(k / 5 * (1 - k / 5) / 5) for k in range(1, 6)]
    for row in report.rows:
        assert list(row)[:4] == ["R", "x_window", "prob", "ci_halfwidth"]
        assert 0.0 < row["prob"] <= 1.0
        assert row["x_window"] * 2 == int(row["x_window"] * 2)
        assert any(row["ci_halfwidth"] == pytest.approx(w) for w in inner_widths)


def test_winding_report():
    cfg = _config("winding", meshes=(2.0 ** -4, 2.0 ** -5), samples=4)
    report = run_experiment(cfg)
    assert [row["scales"] for row in report.rows] == [1, 2]
    assert report.invariants == {"trace_radii": True}
    assert set(report.trends) == {"window_max", "variance_slope", "isolated_slope"}
    for row in report.rows:
        assert 0.0 < row["window_max"] <= 1.0
        assert row["isolated"] <= row["even"] <= row["pre_isolated"]


def test_decoupling_report():
    cfg = _config("decoupling", meshes=(0.125,), decoupling_radii=(2.0, 4.0), samples=4)
    report = run_experiment(cfg)
    assert [(row["delta"], row["R"]) for row in report.rows] == [(0.125, 2.0), (0.125, 4.0)]
    assert list(report.trends) == ["delta=0.125"]
    assert report.ok


def test_crossing_report():
    cfg = _config("crossing-estimate", crossing_scales=(3,), crossing_trials=30)
    report = run_experiment(cfg)
    row, = report.rows
    assert row["n"] == 3 and row["trials"] == 30
    assert row["low"] <= row["alpha"] <= row["high"]
    assert len(report.extra["cells"]["3"]) == 36
    assert report.extra["ratio"] == 1.0 or math.isinf(report.extra["ratio"])
    assert "positive" in report.invariants


@pytest.mark.parametrize("kind, changes", [
    ("sample", {"hexagon": 2, "samples": 6}),
    ("decoupling", {"meshes": (0.125,), "decoupling_radii": (2.0, 4.0), "samples": 6}),
])
def test_report_does_not_depend_on_workers(kind, changes):
    serial = run_experiment(_config(kind, workers=1, **changes))
    parallel = run_experiment(_config(kind, workers=2, **changes))
    assert serial.canonical() == parallel.canonical()
    assert serial.config["workers"] != parallel.config["workers"]


def test_report_json():
    report = Report("sample", 3, {"workers": 4, "progress": True, "samples": 2},
                    invariants={"a": True, "b": False}, wall_clock=1.5)
    assert not report.ok
    assert report.canonical()["config"] == {"samples": 2}
    data = report.to_json()
    assert data["config"]["workers"] == 4
    assert data["wall_clock"] == 1.5 and data["ok"] is False
