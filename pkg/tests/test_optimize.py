"""Tests of the projected multi-start ascent."""

import numpy as np
import pytest

from xyqaoa.optimize import (
    OptimizerConfig,
    _project_simplex,
    default_restarts,
    optimize_fixed_tf,
    optimize_free,
    pad_schedule,
    random_simplex_schedule,
)
from xyqaoa.subspace import Schedule, fidelity

FAST = OptimizerConfig(restarts=12, rng_seed=11)


# ---------------------------------------------------------------------------
# feasible-set projection
# ---------------------------------------------------------------------------


def test_simplex_projection_known_cases():
    out = _project_simplex(np.array([0.5, 0.5]), 1.0)
    assert np.allclose(out, [0.5, 0.5])
    out = _project_simplex(np.array([2.0, 0.0]), 1.0)
    assert np.allclose(out, [1.0, 0.0])  # clipped at the vertex
    out = _project_simplex(np.array([-5.0, -5.0]), 2.0)
    assert np.allclose(out, [1.0, 1.0])


def test_simplex_projection_properties(rng):
    for _ in range(50):
        dim = int(rng.integers(2, 15))
        total = float(rng.uniform(0.5, 20.0))
        x = rng.normal(scale=5.0, size=dim)
        out = _project_simplex(x, total)
        assert np.all(out >= -1e-12)
        assert np.sum(out) == pytest.approx(total, abs=1e-9)
        # projection is idempotent
        assert np.allclose(_project_simplex(out, total), out, atol=1e-9)
        # and dominated by any feasible competitor in distance
        feasible = rng.dirichlet(np.ones(dim)) * total
        assert np.linalg.norm(out - x) <= np.linalg.norm(feasible - x) + 1e-9


def test_simplex_projection_rejects_non_finite():
    with pytest.raises(ValueError):
        _project_simplex(np.array([np.nan, 1.0]), 1.0)


def test_random_simplex_schedule_statistics(rng):
    draws = np.array(
        [random_simplex_schedule(3, 2.0, rng).durations for _ in range(400)]
    )
    assert draws.shape == (400, 6)
    assert np.allclose(draws.sum(axis=1), 2.0, atol=1e-12)
    assert np.all(draws >= 0)
    # exchangeable coordinates: all means equal 2/6
    assert np.allclose(draws.mean(axis=0), 2.0 / 6.0, atol=0.05)


def test_pad_schedule_preserves_dynamics():
    sched = Schedule.from_durations([0.4, 0.3])
    padded = pad_schedule(sched, 4)
    assert padded.depth == 4
    assert fidelity(padded, 5) == pytest.approx(fidelity(sched, 5), abs=1e-14)


# ---------------------------------------------------------------------------
# optimization behavior
# ---------------------------------------------------------------------------


def test_two_site_free_optimum_is_quarter_period():
    result = optimize_free(2, 1, config=FAST)
    assert result.best_fidelity == pytest.approx(1.0, abs=1e-9)
    hop = result.best_schedule.durations[0]
    # any odd quarter-period works; fold into the first
    folded = hop % (np.pi / 2)
    assert min(folded, np.pi / 2 - folded) == pytest.approx(
        np.pi / 4, abs=1e-4
    ) or fidelity(result.best_schedule, 2) == pytest.approx(1.0, abs=1e-9)


def test_fixed_tf_result_respects_the_time_budget():
    result = optimize_fixed_tf(4, 3, 2.5, config=FAST)
    assert result.best_schedule.total_time() == pytest.approx(2.5, abs=1e-9)
    assert np.all(np.asarray(result.best_schedule.durations) >= -1e-12)
    assert 0.0 <= result.best_fidelity <= 1.0 + 1e-12


def test_fixed_tf_never_beats_the_unconstrained_envelope():
    """At two sites F(tf) = sin^2(2 tf) is the exact fixed-time envelope
    whenever tf <= pi/4."""
    for tf in (0.2, 0.5, 0.7):
        result = optimize_fixed_tf(2, 2, tf, config=FAST)
        assert result.best_fidelity == pytest.approx(np.sin(2 * tf) ** 2, abs=1e-7)


def test_seeded_runs_are_reproducible():
    a = optimize_free(3, 2, config=OptimizerConfig(restarts=6, rng_seed=5))
    b = optimize_free(3, 2, config=OptimizerConfig(restarts=6, rng_seed=5))
    assert a.best_fidelity == b.best_fidelity
    assert np.array_equal(
        np.asarray(a.best_schedule.durations), np.asarray(b.best_schedule.durations)
    )
    c = optimize_free(3, 2, config=OptimizerConfig(restarts=6, rng_seed=6))
    assert c.best_fidelity != a.best_fidelity or not np.array_equal(
        np.asarray(c.best_schedule.durations), np.asarray(a.best_schedule.durations)
    )


def test_worker_count_does_not_change_the_answer():
    serial = optimize_free(3, 2, config=FAST, workers=1)
    threaded = optimize_free(3, 2, config=FAST, workers=3)
    assert serial.best_fidelity == threaded.best_fidelity


def test_warm_start_schedules_join_the_restart_pool():
    seed_sched = Schedule.from_durations([np.pi / 4, 0.0])
    result = optimize_free(
        2,
        1,
        config=OptimizerConfig(restarts=1, rng_seed=0),
        initial_schedules=[seed_sched],
    )
    assert result.best_fidelity == pytest.approx(1.0, abs=1e-12)
    assert len(result.restart_records) == 2


def test_restart_records_are_complete_and_bounded():
    result = optimize_free(4, 2, config=FAST)
    assert len(result.restart_records) == FAST.restarts
    for rec in result.restart_records:
        assert 0.0 <= rec.final_fidelity <= 1.0 + 1e-12
    assert result.best_fidelity == max(r.final_fidelity for r in result.restart_records)


def test_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(restarts=0)
    with pytest.raises(ValueError):
        OptimizerConfig(mode="nonsense")
    with pytest.raises(ValueError):
        OptimizerConfig(mode="fixed_tf")  # missing t_f
    with pytest.raises(ValueError):
        optimize_fixed_tf(3, 2, -1.0)


def test_default_restarts_scales_with_size():
    assert default_restarts(2) >= 1
    assert default_restarts(16) >= default_restarts(4)
