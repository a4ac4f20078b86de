"""Least-squares fits used by the scaling studies.

Three small models cover everything the batch experiments report: a
quadratic in the circuit depth, a saturating "inverted exponential"
``1 - exp(-a*(p - b))``, and a straight line for the time-versus-size
scalings.  Each fit returns the same result record with the coefficient
of determination and the residual vector, so callers can serialize them
uniformly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "FitResult",
    "fit_quadratic",
    "fit_inverted_exponential",
    "fit_linear",
]


@dataclass(frozen=True)
class FitResult:
    """Outcome of one least-squares fit.

    ``parameters`` is model-specific: (a, b, c) for the quadratic
    a*p**2 + b*p + c, (a, b) for 1 - exp(-a*(p - b)), and
    (slope, intercept) for the line.
    """

    model: str
    parameters: np.ndarray
    r_squared: float
    residuals: np.ndarray

    def to_json_dict(self) -> dict:
        return {
            "model": self.model,
            "params": [float(v) for v in self.parameters],
            "r2": float(self.r_squared),
            "n_points": int(self.residuals.size),
        }


def _split_points(points: Iterable[Sequence[float]]):
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be (x, y) pairs")
    return pts[:, 0], pts[:, 1]


def _r_squared(y: np.ndarray, residuals: np.ndarray) -> float:
    ss_res = float(residuals @ residuals)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        return 1.0 if ss_res < 1e-24 else 0.0
    return 1.0 - ss_res / ss_tot


def fit_quadratic(points: Iterable[Sequence[float]]) -> FitResult:
    """Least-squares a*x**2 + b*x + c through >= 3 points."""
    x, y = _split_points(points)
    if x.size < 3:
        raise ValueError("quadratic fit needs at least 3 points")
    design = np.column_stack([x**2, x, np.ones_like(x)])
    if np.linalg.matrix_rank(design) < 3:
        raise ValueError("design is rank-deficient (need 3 distinct x values)")
    coeffs, *_ = np.linalg.lstsq(design, y, rcond=None)
    residuals = design @ coeffs - y
    return FitResult("quadratic", coeffs, _r_squared(y, residuals), residuals)


def fit_linear(points: Iterable[Sequence[float]]) -> FitResult:
    """Ordinary least squares line; parameters are (slope, intercept)."""
    x, y = _split_points(points)
    if np.unique(x).size < 2:
        raise ValueError("linear fit needs at least 2 distinct x values")
    design = np.column_stack([x, np.ones_like(x)])
    coeffs, *_ = np.linalg.lstsq(design, y, rcond=None)
    residuals = design @ coeffs - y
    return FitResult("linear", coeffs, _r_squared(y, residuals), residuals)


def fit_inverted_exponential(
    points: Iterable[Sequence[float]], max_refinements: int = 60
) -> FitResult:
    """Fit y = 1 - exp(-a*(x - b)).

    Points with y >= 1 make log(1 - y) undefined; they are excluded with a
    warning.  The log-linearized solution seeds a damped Gauss-Newton
    refinement on the untransformed residuals.
    """
    x, y = _split_points(points)
    usable = y < 1.0
    if not np.all(usable):
        warnings.warn(
            f"excluding {np.count_nonzero(~usable)} point(s) with y >= 1 "
            "from the inverted-exponential fit",
            stacklevel=2,
        )
        x, y = x[usable], y[usable]
    if x.size < 2 or np.unique(x).size < 2:
        raise ValueError("inverted-exponential fit needs 2 usable distinct points")

    # log(1 - y) = -a*x + a*b: linear in x
    z = np.log(1.0 - y)
    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(design, z, rcond=None)
    a = -slope
    b = intercept / a if a != 0 else 0.0

    def model_residuals(a_, b_):
        return 1.0 - np.exp(-a_ * (x - b_)) - y

    params = np.array([a, b])
    res = model_residuals(*params)
    ssr = res @ res
    # overspeculative trial steps can overflow exp(); the halving loop
    # rejects them (inf SSR never improves), so silence the warnings
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(max_refinements):
            e = np.exp(-params[0] * (x - params[1]))
            jac = np.column_stack([(x - params[1]) * e, -params[0] * e])
            step, *_ = np.linalg.lstsq(jac, -res, rcond=None)
            scale = 1.0
            improved = False
            while scale > 1e-12:
                trial = params + scale * step
                trial_res = model_residuals(*trial)
                trial_ssr = trial_res @ trial_res
                if trial_ssr < ssr:
                    params, res, ssr = trial, trial_res, trial_ssr
                    improved = True
                    break
                scale *= 0.5
            if not improved or np.max(np.abs(scale * step)) < 1e-14:
                break
    return FitResult("inverted_exponential", params, _r_squared(y, res), res)
