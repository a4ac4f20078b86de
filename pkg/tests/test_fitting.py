"""Tests of the model-fitting helpers."""

import numpy as np
import pytest

from xyqaoa.fitting import fit_inverted_exponential, fit_linear, fit_quadratic


def test_quadratic_exact_recovery():
    xs = np.linspace(-2, 3, 9)
    pts = [(x, 1.5 * x**2 - 0.7 * x + 0.2) for x in xs]
    fit = fit_quadratic(pts)
    assert fit.parameters == pytest.approx([1.5, -0.7, 0.2], abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.model == "quadratic"


def test_quadratic_needs_three_distinct_points():
    with pytest.raises(ValueError):
        fit_quadratic([(1.0, 2.0), (1.0, 2.5), (1.0, 3.0)])


def test_linear_exact_recovery():
    pts = [(x, 2.44 * x - 1.0) for x in (2, 4, 6, 8, 10)]
    fit = fit_linear(pts)
    slope, intercept = fit.parameters
    assert slope == pytest.approx(2.44, abs=1e-12)
    assert intercept == pytest.approx(-1.0, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0)


def test_linear_under_noise(rng):
    xs = np.arange(4, 13, dtype=float)
    ys = 0.246 * xs - 0.5 + rng.normal(scale=0.01, size=xs.size)
    fit = fit_linear(list(zip(xs, ys)))
    assert fit.parameters[0] == pytest.approx(0.246, abs=0.02)
    assert fit.r_squared > 0.98


def test_linear_needs_two_distinct_abscissae():
    with pytest.raises(ValueError):
        fit_linear([(3.0, 1.0), (3.0, 2.0)])


def test_inverted_exponential_exact_recovery():
    a, b = 0.8, 1.7
    xs = np.linspace(2, 12, 15)
    pts = [(x, 1.0 - np.exp(-a * (x - b))) for x in xs]
    fit = fit_inverted_exponential(pts)
    assert fit.parameters == pytest.approx([a, b], abs=1e-9)
    assert fit.r_squared == pytest.approx(1.0)


def test_inverted_exponential_excludes_saturated_points():
    a, b = 0.5, 0.0
    pts = [(x, 1.0 - np.exp(-a * (x - b))) for x in np.linspace(1, 8, 10)]
    pts += [(9.0, 1.0), (10.0, 1.2)]  # y >= 1 has no log-residual
    with pytest.warns(UserWarning):
        fit = fit_inverted_exponential(pts)
    assert fit.parameters == pytest.approx([a, b], abs=1e-8)
    assert fit.residuals.size == 10


def test_inverted_exponential_noisy_monte_carlo(rng):
    hits = 0
    for _ in range(30):
        a = float(rng.uniform(0.2, 1.5))
        b = float(rng.uniform(-1.0, 1.0))
        xs = np.linspace(b + 0.5, b + 9, 20)
        ys = 1.0 - np.exp(-a * (xs - b)) + rng.normal(scale=1e-3, size=xs.size)
        pts = [(x, y) for x, y in zip(xs, ys) if y < 0.9999]
        fit = fit_inverted_exponential(pts)
        if abs(fit.parameters[0] - a) < 0.05 * a + 1e-3:
            hits += 1
    assert hits >= 27


def test_fit_result_serialization():
    fit = fit_linear([(0.0, 1.0), (1.0, 3.0)])
    doc = fit.to_json_dict()
    assert doc["model"] == "linear"
    assert doc["params"] == pytest.approx([2.0, 1.0])
    assert doc["n_points"] == 2
    assert set(doc) == {"model", "params", "r2", "n_points"}
