"""Tests of the sweep harness: ranges, grids, journals, derived quantities."""

import os

import numpy as np
import pytest

from xyqaoa.experiments import (
    ExperimentRecord,
    GridSpec,
    _cell_seed,
    fidelity_envelope,
    landscape_slice,
    min_tf_for_fidelity,
    oscillation_score,
    parse_range,
    read_records,
    run_grid,
    suppressed_time,
)
from xyqaoa.optimize import OptimizerConfig, optimize_fixed_tf, optimize_free
from xyqaoa.subspace import Schedule


# ---------------------------------------------------------------------------
# range grammar
# ---------------------------------------------------------------------------


def test_parse_range_forms():
    assert parse_range("5").tolist() == [5.0]
    assert parse_range("1:4").tolist() == [1.0, 2.0, 3.0, 4.0]
    assert parse_range("0.2:0.2:0.8").tolist() == pytest.approx([0.2, 0.4, 0.6, 0.8])
    # end point included when the step lands on it within rounding
    assert parse_range("0:0.1:0.3").size == 4


def test_parse_range_decreasing():
    assert parse_range("5:-1:1").tolist() == [5.0, 4.0, 3.0, 2.0, 1.0]
    assert parse_range("3:1").size == 0  # empty, not an error


def test_parse_range_errors():
    for bad in ("", "1:2:3:4", "abc", "1:0:5", "1:-1:5"):
        with pytest.raises(ValueError):
            parse_range(bad)


# ---------------------------------------------------------------------------
# grid specs
# ---------------------------------------------------------------------------


def test_grid_spec_cells_and_json():
    doc = {
        "label": "demo",
        "n_values": [2, 3],
        "p_ranges": {"2": "1:2", "3": "2"},
        "tf_ranges": {"2": "0.5:0.5:1.0"},
        "restarts": {"2": 7, "3": 9},
    }
    spec = GridSpec.from_json(doc)
    cells = spec.cells()
    # N=2: 2 depths x 2 times; N=3: one depth, free time
    assert (2, 1, 0.5) in cells and (2, 2, 1.0) in cells
    assert (3, 2, None) in cells
    assert len(cells) == 5
    assert spec.restarts_for(2) == 7
    assert spec.restarts_for(3) == 9


def test_grid_spec_requires_depths_for_every_size():
    with pytest.raises(ValueError):
        GridSpec(label="x", n_values=(2, 4), p_ranges={2: (1,)})


def test_cell_seeds_are_distinct_and_stable():
    seeds = {
        _cell_seed(0, n, p, tf)
        for n in (2, 3)
        for p in (1, 2)
        for tf in (None, 0.5, 1.0)
    }
    assert len(seeds) == 12
    assert _cell_seed(0, 2, 1, 0.5) == _cell_seed(0, 2, 1, 0.5)
    assert _cell_seed(0, 2, 1, 0.5) != _cell_seed(1, 2, 1, 0.5)


# ---------------------------------------------------------------------------
# journaling
# ---------------------------------------------------------------------------


def roundtrip(rec):
    return ExperimentRecord.from_csv_row(rec.csv_row())


def test_record_round_trip_is_lossless():
    rec = ExperimentRecord(
        label="trip",
        n_sites=5,
        depth=3,
        t_f=2.0 / 3.0,
        best_fidelity=0.12345678901234566,
        restarts=40,
        converged_count=39,
        seed=123456789012345,
        best_schedule=(0.1, 0.2, 1e-17, 0.6666666666666666),
    )
    again = roundtrip(rec)
    assert again == rec
    free = roundtrip(
        ExperimentRecord("trip", 2, 1, None, 1.0, 5, 5, 7, (0.785, 0.0))
    )
    assert free.t_f is None


def test_run_grid_is_deterministic_and_resumable(tmp_path):
    spec = GridSpec(
        label="tiny",
        n_values=(2,),
        p_ranges={2: (1, 2)},
        tf_ranges={2: (0.4, 0.8)},
        restarts_rule={2: 4},
    )
    a, b = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    run_grid(spec, a, global_seed=3, workers=1)
    run_grid(spec, b, global_seed=3, workers=1)
    assert open(a, "rb").read() == open(b, "rb").read()

    # interrupt after 2 of 4 cells, resume, finish: same bytes again
    c = str(tmp_path / "c.csv")
    run_grid(spec, c, global_seed=3, workers=1, max_cells=2)
    partial = read_records(c)
    assert len(partial) == 2
    run_grid(spec, c, global_seed=3, workers=1)
    assert open(c, "rb").read() == open(a, "rb").read()

    # a completed journal is not rewritten on a further resume call
    stamp = os.stat(a).st_mtime_ns
    run_grid(spec, a, global_seed=3, workers=1)
    assert os.stat(a).st_mtime_ns == stamp
    assert len(read_records(a)) == 4


def test_run_grid_seed_changes_results(tmp_path):
    spec = GridSpec(
        label="tiny",
        n_values=(3,),
        p_ranges={3: (2,)},
        tf_ranges={3: (1.5,)},
        restarts_rule={3: 3},
    )
    a, b = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    run_grid(spec, a, global_seed=0, workers=1)
    run_grid(spec, b, global_seed=99, workers=1)
    ra, rb = read_records(a)[0], read_records(b)[0]
    assert ra.seed != rb.seed


# ---------------------------------------------------------------------------
# derived quantities
# ---------------------------------------------------------------------------


def test_min_tf_two_site_closed_form():
    """At two sites the fixed-time envelope is sin^2(2 tf), so the 0.99
    threshold sits at asin(sqrt(0.99))/2 ~ 0.7353."""
    got = min_tf_for_fidelity(2, 0.99, config=OptimizerConfig(restarts=8, rng_seed=1))
    want = np.arcsin(np.sqrt(0.99)) / 2
    assert got == pytest.approx(want, abs=8 * 2.0 / 2**12 + 1e-3)
    assert got >= want - 1e-9  # bisection returns an attaining time


def test_suppressed_time_two_site():
    got = suppressed_time(2, 0.01, config=OptimizerConfig(restarts=6, rng_seed=1))
    want = np.arcsin(np.sqrt(0.01)) / 2
    assert got == pytest.approx(want, abs=8 * 2.0 / 2**12 + 1e-3)


def test_threshold_validation():
    with pytest.raises(ValueError):
        min_tf_for_fidelity(3, 1.5)
    assert min_tf_for_fidelity(3, 0.0) == 0.0


def test_fidelity_envelope_two_site():
    """Warm-started sweep reproduces sin^2(2 tf) below the quarter period
    and saturates at 1 beyond it, never dipping between cells."""
    cfg = OptimizerConfig(restarts=6, rng_seed=3)
    tfs = [0.2, 0.4, 0.6, 0.9]
    env = fidelity_envelope(2, 1, tfs, config=cfg)
    assert np.all(np.diff(env) >= -1e-12)
    for tf, f in zip(tfs[:3], env[:3]):
        assert f == pytest.approx(np.sin(2 * tf) ** 2, abs=1e-9)
    assert env[3] == pytest.approx(1.0, abs=1e-9)  # tf 0.9 > pi/4: hop + idle phase
    # never worse than the cold multi-start at the same cell
    cold = optimize_fixed_tf(2, 1, 0.9, config=cfg).best_fidelity
    assert env[3] >= cold - 1e-12


def test_fidelity_envelope_validation():
    with pytest.raises(ValueError):
        fidelity_envelope(2, 1, [0.4, 0.4])
    with pytest.raises(ValueError):
        fidelity_envelope(2, 1, [0.6, 0.2])


def test_landscape_slice_through_an_optimum():
    config = OptimizerConfig(restarts=16, rng_seed=4)
    result = optimize_free(3, 2, config=config)
    base = result.best_schedule
    d = np.asarray(base.durations)
    axis_i = np.sort(np.unique(np.concatenate([[d[0]], np.linspace(0, d[0] * 1.5 + 0.5, 7)])))
    axis_j = np.sort(np.unique(np.concatenate([[d[2]], np.linspace(0, d[2] * 1.5 + 0.5, 7)])))
    grid = landscape_slice(3, base, (0, 2), (axis_i, axis_j))
    assert grid.shape == (axis_i.size, axis_j.size)
    # the slice contains the base point, so its maximum attains the optimum
    assert grid.max() == pytest.approx(result.best_fidelity, abs=1e-12)
    assert np.all(grid >= -1e-15) and np.all(grid <= 1 + 1e-12)


def test_landscape_slice_inert_axis():
    """Varying the trailing phase duration never changes the fidelity."""
    base = Schedule.from_durations([0.6, 0.1])
    grid = landscape_slice(2, base, (0, 1), (np.array([0.3, 0.6]), np.linspace(0, 3, 5)))
    assert np.ptp(grid, axis=1) == pytest.approx([0.0, 0.0], abs=1e-12)


def test_landscape_slice_index_validation():
    base = Schedule.from_durations([0.6, 0.1])
    with pytest.raises(ValueError):
        landscape_slice(2, base, (0, 0), (np.array([0.1]), np.array([0.2])))
    with pytest.raises(ValueError):
        landscape_slice(2, base, (0, 5), (np.array([0.1]), np.array([0.2])))


def test_oscillation_score():
    assert oscillation_score([0.0, 0.1, 0.2, 0.3]) == 0
    assert oscillation_score([0.0, 0.2, 0.1, 0.3]) == 2
    assert oscillation_score([0.5, 0.5, 0.5]) == 0
    assert oscillation_score([0.0, 1.0, 0.0, 1.0, 0.0]) == 3
