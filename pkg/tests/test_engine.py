"""Tests for plan files, the experiment runner, and its tolerance bands."""

import math

import numpy as np
import pytest

from cbcnoise import (
    CbcConfig,
    ExperimentPlan,
    RngStream,
    load_plan,
    run_plan,
    simulate_cbc,
)
from cbcnoise.combining import predict_output


def write_plan(tmp_path, text):
    path = tmp_path / "plan.txt"
    path.write_text(text)
    return path


def test_load_plan_parses_grid_and_defaults(tmp_path):
    path = write_plan(tmp_path, """
# comment line
experiment = cbc
trials = 5000
grid.N = 2, 4
grid.n = 100   # trailing comment
grid.xi = 1
""")
    plan = load_plan(path)
    assert plan.experiment == "cbc"
    assert plan.trials == 5000
    assert plan.master_seed == 0
    assert plan.tolerance_k == 5.0
    # cross product in axis order, first axis slowest
    assert plan.grid == (
        {"N": 2, "n": 100, "xi": 1},
        {"N": 4, "n": 100, "xi": 1},
    )


def test_load_plan_rejects_malformed_input(tmp_path):
    with pytest.raises(ValueError):
        load_plan(write_plan(tmp_path, "experiment = cbc\njust some words\n"))
    with pytest.raises(ValueError):
        load_plan(write_plan(tmp_path, "grid.N = 2\n"))  # no experiment
    with pytest.raises(ValueError):
        load_plan(write_plan(tmp_path, "experiment = cbc\ntrials = 100\n"))  # no grid
    with pytest.raises(ValueError, match="unknown key"):
        load_plan(write_plan(tmp_path, "experiment = cbc\ntrails = 99\ngrid.N = 2\n"))
    with pytest.raises(OSError):
        load_plan(tmp_path / "missing.txt")


def test_plan_validation():
    with pytest.raises(ValueError):
        ExperimentPlan("teleportation", ({"N": 2},), 1000, 0)
    with pytest.raises(ValueError):
        ExperimentPlan("cbc", ({"N": 2},), 1, 0)
    with pytest.raises(ValueError):
        ExperimentPlan("cbc", (), 1000, 0)


def test_run_plan_cbc_point():
    plan = ExperimentPlan("cbc", ({"N": 4, "n": 1000, "xi": 1.0},), 40_000, 11)
    result = run_plan(plan)
    point = result.points[0]
    assert result.all_passed
    assert set(point.z) == {"mean_x", "var_x", "var_p"}
    pred = predict_output(CbcConfig(n_beams=4, photons=1000, xi=1.0))
    assert point.predicted["var_p"] == pytest.approx(pred.var_p, rel=1e-12)
    assert point.measured["var_p"] == pytest.approx(pred.var_p, rel=0.05)


def test_run_plan_matches_direct_simulation():
    # the runner must reproduce simulate_cbc bit for bit when fed the same
    # stream: point index 0, chunks merged in order
    record = {"N": 2, "n": 1000.0, "xi": 1.0}
    plan = ExperimentPlan("cbc", (record,), 30_000, 5)
    result = run_plan(plan)
    direct = simulate_cbc(CbcConfig(n_beams=2, photons=1000, xi=1.0), 30_000,
                          RngStream(5).substream(0))
    assert result.points[0].stats == direct


@pytest.mark.parametrize("experiment,record", [
    ("amp", {"G": 4.0, "kind": "quantum_limited"}),
    ("amp", {"G": 4.0, "kind": "measure_prepare"}),
    ("amp", {"G": 4.0, "kind": "phase_sensitive"}),
    ("cascade", {"G": 4.0, "stages": 2}),
    ("gamma", {"N": 10, "phase_var": 0.01}),
])
def test_run_plan_other_experiments_pass(experiment, record):
    plan = ExperimentPlan(experiment, (record,), 60_000, 29)
    assert run_plan(plan).all_passed


def test_run_plan_lock_experiments():
    drift_free = {"N": 2, "n": 10_000.0, "intervals": 60, "init_spread": 0.05}
    sql = 1.0 / 10_000
    drifting = {"N": 4, "n": 10_000.0, "intervals": 300, "drift_var": sql / 10}
    # trials is unused by the lock runner but must still be a sane count
    plan = ExperimentPlan("lock", (drift_free, drifting), 100, 8)
    result = run_plan(plan)
    assert result.all_passed
    free_point, drift_point = result.points
    assert free_point.measured["final_var"] <= 10 * sql
    assert drift_point.measured["steady_ratio"] >= 1.0


@pytest.mark.parametrize("workers", [2, 4])
def test_worker_count_does_not_change_results(workers):
    grid = (
        {"N": 2, "n": 1000, "xi": 1.0},
        {"N": 4, "n": 100, "xi": 2.0},
    )
    plan = ExperimentPlan("cbc", grid, 150_000, 13)
    serial = run_plan(plan, workers=1)
    parallel = run_plan(plan, workers=workers)
    for a, b in zip(serial.points, parallel.points):
        assert a.measured == b.measured  # exact float equality, no tolerance
        assert a.z == b.z


def test_biased_point_fails_the_band():
    # at N=2, n=100, xi=5 the quadratic prediction underestimates how much
    # the exact moments bend over, so the z gate must reject it
    plan = ExperimentPlan("cbc", ({"N": 2, "n": 100, "xi": 5.0},), 100_000, 31)
    result = run_plan(plan)
    assert not result.all_passed
    assert result.points[0].z["var_p"] < -5.0


def test_tolerance_calibration_over_seeds():
    """About 99 of 100 reruns should land inside the 5 SE band on every score."""
    config = CbcConfig(n_beams=4, photons=1000, xi=1.0)
    pred = predict_output(config)
    within = {"mean_x": 0, "var_x": 0, "var_p": 0}
    z_sum = {"mean_x": 0.0, "var_x": 0.0, "var_p": 0.0}
    seeds = 100
    for seed in range(seeds):
        stats = simulate_cbc(config, 20_000, RngStream(900 + seed))
        scores = {
            "mean_x": (stats.mean_x - pred.mean_amplitude) / stats.se_mean_x,
            "var_x": (stats.var_x - pred.var_x) / stats.se_var_x,
            "var_p": (stats.var_p - pred.var_p) / stats.se_var_p,
        }
        for name, z in scores.items():
            z_sum[name] += z
            within[name] += abs(z) <= 5.0
    for name in within:
        assert within[name] >= 99, f"{name}: only {within[name]} of {seeds} inside the band"
        # mean z stays near zero when the standard errors are honest
        assert abs(z_sum[name] / seeds) <= 0.5, f"{name}: biased z"
