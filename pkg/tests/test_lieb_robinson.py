"""Tests of the light-cone bound evaluator."""

import numpy as np
import pytest

from xyqaoa.lieb_robinson import (
    CONE_EDGE_EPSILON,
    SUPPRESSED_EPSILON,
    LRParameters,
    classify_region,
    commutator_series_bound,
    lr_epsilon,
    lr_success_bound,
    lr_success_bound_raw,
    lr_velocity,
    transfer_time_estimate,
)


def test_velocity_closed_form():
    # v = 2 e J (4D - 1): one dimension, unit coupling -> 6e
    assert lr_velocity(1.0, 1) == pytest.approx(6 * np.e, rel=1e-12)
    assert lr_velocity(2.0, 1) == pytest.approx(12 * np.e, rel=1e-12)
    assert lr_velocity(2.0, 1) == pytest.approx(32.6194, abs=5e-4)
    assert lr_velocity(1.0, 2) == pytest.approx(14 * np.e, rel=1e-12)


def test_velocity_validation():
    assert lr_velocity(0.0, 1) == 0.0  # uncoupled chain carries nothing
    with pytest.raises(ValueError):
        lr_velocity(-1.0, 1)
    with pytest.raises(ValueError):
        lr_velocity(1.0, 0)


def test_epsilon_and_raw_bound():
    assert lr_epsilon(0.0, 5.0, 10.0) == pytest.approx(2 * np.exp(-5.0))
    # probability ceiling eps - eps^2/4 peaks at exactly 1 when eps = 2
    assert lr_success_bound_raw(0.0, 0.0, 1.0) == pytest.approx(1.0, abs=1e-15)
    # raw form decreases past the peak; clamped form saturates at 1
    t_past = 0.5
    assert lr_success_bound_raw(t_past, 0.0, 1.0) < 1.0
    assert lr_success_bound(t_past, 0.0, 1.0) <= 1.0


def test_clamped_bound_stays_in_unit_interval():
    for t in np.linspace(0, 3, 40):
        b = lr_success_bound(t, 8.0, 32.0)
        assert 0.0 <= b <= 1.0


def test_series_bound_dominated_by_exponential_closure(rng):
    """Finite commutator series <= its closure 2 exp(vt - L) for J=1, D=1."""
    v = lr_velocity(1.0, 1)
    for _ in range(200):
        t = float(rng.uniform(0.0, 2.0))
        distance = int(rng.integers(0, 40))
        series = commutator_series_bound(t, distance, 1.0, 1)
        closure = 2.0 * np.exp(v * t - distance)
        assert series <= closure * (1 + 1e-12) + 1e-300


def test_series_bound_small_cases():
    # distance 0: series closes to 2 e^{x}; at t=0 only the k=0 term remains
    assert commutator_series_bound(0.0, 0, 1.0, 1) == pytest.approx(2.0)
    assert commutator_series_bound(0.0, 3, 1.0, 1) == 0.0
    # one bond, tiny time: leading term 2 x /1! with x = 2*3*J*t
    t = 1e-8
    expected = 2.0 * (6.0 * t)
    assert commutator_series_bound(t, 1, 1.0, 1) == pytest.approx(expected, rel=1e-6)


def test_region_classification_boundaries():
    v, L = 10.0, 20.0
    # thresholds in t: eps(t) = 2 exp(vt - L)
    t_sup = (L + np.log(SUPPRESSED_EPSILON / 2)) / v
    t_edge = (L + np.log(CONE_EDGE_EPSILON / 2)) / v
    assert classify_region(t_sup - 1e-6, L, v) == "suppressed"
    assert classify_region(t_sup + 1e-6, L, v) == "exponential_growth"
    assert classify_region(t_edge - 1e-6, L, v) == "exponential_growth"
    assert classify_region(t_edge + 1e-6, L, v) == "steady_growth"


def test_transfer_time_estimate():
    assert transfer_time_estimate(19.0, 32.6) == pytest.approx(19.0 / 32.6)
    with pytest.raises(ValueError):
        transfer_time_estimate(5.0, 0.0)


def test_parameter_bundle():
    params = LRParameters(coupling_norm=2.0, distance=9)
    assert params.velocity == pytest.approx(lr_velocity(2.0, 1))
    with pytest.raises(ValueError):
        LRParameters(coupling_norm=2.0, distance=-1)
