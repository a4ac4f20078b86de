"""Spectral analysis of the hopping dynamics and the fixed-angle oracle ansatz.

Exact transition amplitudes of the hopping Hamiltonian, the Grover-style
ansatz (fixed hop duration, oracle phase pi on the target site), an exact
composition-sum expansion of its success amplitude, and literal evaluations of
two printed closed-form scaling coefficients that are kept quarantined here:
the transfer-rate expression is analytically singular as printed (one cosecant
argument reduces to exactly pi), so everything acceptance-grade runs on exact
simulation and the closed forms are only *recorded*, never trusted.  See
``discrepancy_report``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .subspace import build_hb, diagonalize_hb, _check_n_sites

__all__ = [
    "ScalingCoefficients",
    "TransitionAmplitudes",
    "closed_form_coefficients",
    "discrepancy_report",
    "first_peak_depth",
    "fitted_transfer_slope",
    "folded_sine_residual",
    "grover_ansatz_fidelity",
    "grover_step_estimate",
    "low_depth_prediction",
    "open_sine_residual",
    "partition_sum_fidelity",
    "transition_amplitudes",
]

MAX_PARTITION_DEPTH = 16  # composition count doubles per unit of depth


@dataclass(frozen=True)
class TransitionAmplitudes:
    """Edge amplitudes of exp(-i H_B delta).

    ``transfer``  — amplitude to hop from site 1 to site N.
    ``retention`` — amplitude to stay on site N.
    """

    transfer: complex
    retention: complex
    delta: float


@dataclass(frozen=True)
class ScalingCoefficients:
    """Literal values of the printed small-delta rate coefficients.

    ``transfer_rate`` multiplies delta in the printed linear model of the
    site-1 -> site-N amplitude; ``retention_rate`` plays the same role for the
    stay-at-site-N amplitude.  Evaluated verbatim; see module docstring for
    why these are diagnostic-only.
    """

    transfer_rate: float
    retention_rate: float
    n_sites: int


def transition_amplitudes(n_sites: int, delta: float) -> TransitionAmplitudes:
    """Exact edge amplitudes via the spectral decomposition (no truncation)."""
    spect = diagonalize_hb(_check_n_sites(n_sites))
    v = spect.eigenvectors
    phases = np.exp(-1j * float(delta) * spect.eigenvalues)
    transfer = complex(np.sum(v[-1] * v[0] * phases))
    retention = complex(np.sum(v[-1] * v[-1] * phases))
    return TransitionAmplitudes(transfer, retention, float(delta))


# ---------------------------------------------------------------------------
# closed-form eigenpair ansatz diagnostics
# ---------------------------------------------------------------------------


def _residual(n_sites: int, vector: np.ndarray, value: float) -> float:
    h = build_hb(n_sites)
    return float(np.linalg.norm(h @ vector - value * vector))


def folded_sine_residual(n_sites: int, k: int) -> float:
    """Residual of the half-range interleaved sine ansatz for eigenpair k.

    The ansatz sums over half the sites, assigning one sine family to the
    even sublattice and a half-step-shifted family to the odd sublattice,
    with candidate eigenvalue 2 cos(k pi / (N/2 + 1)).  It does not solve the
    open-chain eigenproblem; the residual quantifies by how much.  Requires
    even N and 1 <= k <= N/2.
    """
    n_sites = _check_n_sites(n_sites)
    if n_sites % 2:
        raise ValueError("folded ansatz needs an even number of sites")
    if not 1 <= k <= n_sites // 2:
        raise ValueError(f"k must lie in 1..{n_sites // 2}, got {k}")
    vec = np.zeros(n_sites)
    half = n_sites // 2
    denom = n_sites / 4 + 1
    for n in range(1, half + 1):
        vec[2 * n - 1] = math.sin(k * n * math.pi / denom)        # site 2n
        vec[2 * n - 2] = math.sin(k * (n + 0.5) * math.pi / denom)  # site 2n-1
    vec /= math.sqrt(half)
    value = 2.0 * math.cos(k * math.pi / (n_sites / 2 + 1))
    return _residual(n_sites, vec, value)


def open_sine_residual(n_sites: int, k: int) -> float:
    """Residual of the standard open-chain eigenpair: components
    proportional to sin(n k pi/(N+1)), eigenvalue 4 cos(k pi/(N+1)).

    Should vanish to rounding for every valid k.
    """
    n_sites = _check_n_sites(n_sites)
    if not 1 <= k <= n_sites:
        raise ValueError(f"k must lie in 1..{n_sites}, got {k}")
    sites = np.arange(1, n_sites + 1)
    vec = np.sin(sites * k * np.pi / (n_sites + 1))
    vec /= np.linalg.norm(vec)
    value = 4.0 * math.cos(k * math.pi / (n_sites + 1))
    return _residual(n_sites, vec, value)


# ---------------------------------------------------------------------------
# printed closed-form coefficients (quarantined literal evaluation)
# ---------------------------------------------------------------------------


def closed_form_coefficients(n_sites: int) -> ScalingCoefficients:
    """Evaluate the printed closed-form rate coefficients verbatim.

    Warning: the transfer-rate expression contains csc of
    (pi N/2 + 2 pi) / (2 (N/4 + 1)), and that argument is identically pi —
    the printed formula is singular for every N.  Floating-point evaluation
    therefore returns values dominated by rounding of sin(pi).  The numbers
    are reproducible for a given platform but carry no physics; they are kept
    because downstream formulas reference them and the discrepancy report
    documents the failure.  The retention rate is well-conditioned.
    """
    n = float(_check_n_sites(n_sites))
    pi = math.pi

    # transfer rate
    cos_a = math.cos((2 * pi * (n / 2) ** 2 + 4 * pi * (n / 2) + pi) / (2 * (n / 4 + 1)))
    cos_b = math.cos(pi / (2 * (n / 4 + 1)))
    csc_c = 1.0 / math.sin((pi * n / 2 + 2 * pi) / (2 * (n / 4 + 1)))
    transfer_rate = (cos_a * csc_c + cos_b * csc_c) / (2 * math.sqrt(n + 1))

    # retention rate
    csc_n = 1.0 / math.sin(pi * n / (n + 1))
    block1 = 0.5 * (
        -math.cos((4 * pi * n**2 + pi * n - pi) / (2 * (n + 1))) * csc_n
        + 2 * n
        + math.cos(pi * (n - 1) / (2 * (n + 1))) * csc_n
    )
    csc_half = 1.0 / math.sin(pi / (2 * (n + 1)))
    block2 = (
        math.cos(pi * n / (2 * (n + 1))) * csc_half
        + math.cos(pi * (n + 2) / (2 * (n + 1))) * csc_half
    )
    block3 = (
        math.cos(3 * pi * n / (2 * (n + 1))) / math.sin((pi - 2 * pi) / (2 * (n + 1)))
        - math.cos((-4 * pi * n**2 - pi * n) / (2 * (n + 1)))
        / math.sin((pi - 2 * pi * n) / (2 * (n + 1)))
    )
    block4 = (
        math.cos(pi * n / (2 * (n + 1))) / math.sin((2 * pi * n + pi) / (2 * (n + 1)))
        - math.cos((4 * pi * n**2 + 3 * pi * n) / (2 * (n + 1)))
        / math.sin((2 * pi * n + pi) / (2 * (n + 1)))
    )
    retention_rate = -(block1 * block2 - block3 - block4) / (2 * math.sqrt(n + 1))

    return ScalingCoefficients(transfer_rate, retention_rate, int(n_sites))


def fitted_transfer_slope(n_sites: int, delta: float = 1e-4) -> float:
    """Finite-difference estimate of |transfer amplitude| / delta near zero.

    This is the honest counterpart of the printed transfer rate: for N > 2
    the amplitude's true leading order is delta^(N-1) (the excitation must
    hop N-1 bonds), so the fitted slope collapses towards zero with N.
    """
    amp = transition_amplitudes(n_sites, delta)
    return abs(amp.transfer) / delta


# ---------------------------------------------------------------------------
# fixed-angle oracle ansatz
# ---------------------------------------------------------------------------


def grover_ansatz_fidelity(n_sites: int, depth: int, delta: float) -> float:
    """Success probability of p iterations of (pi phase flip) o (hop for delta).

    Direct simulation from the site-1 basis state; the oracle step multiplies
    the target amplitude by e^{-i pi} = -1.
    """
    n_sites = _check_n_sites(n_sites)
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    spect = diagonalize_hb(n_sites)
    v = spect.eigenvectors
    phases = np.exp(-1j * float(delta) * spect.eigenvalues)
    psi = np.zeros(n_sites, dtype=complex)
    psi[0] = 1.0
    for _ in range(depth):
        psi = v @ (phases * (v.T @ psi))
        psi[-1] = -psi[-1]
    return float(abs(psi[-1]) ** 2)


def first_peak_depth(
    n_sites: int, delta: float = 0.1, floor: float = 1e-4, max_depth: int = 4000
) -> int:
    """Smallest depth at which the oracle-ansatz fidelity has a strict local
    maximum above ``floor``.

    The floor screens out rounding-level wiggles that appear while the
    excitation has not yet crossed the chain.  Raises if no peak is found
    within ``max_depth``.
    """
    prev2 = prev = -1.0
    for p in range(1, max_depth + 1):
        cur = grover_ansatz_fidelity(n_sites, p, delta)
        if prev > floor and prev > prev2 and prev > cur:
            return p - 1
        prev2, prev = prev, cur
    raise RuntimeError(f"no fidelity peak above {floor} within depth {max_depth}")


def partition_sum_fidelity(n_sites: int, depth: int, delta: float) -> float:
    """Oracle-ansatz success probability via the exact composition expansion.

    Expanding each oracle as (identity - 2 |N><N|) splits the amplitude into
    a signed sum over ordered compositions (v_1, ..., v_j) of the depth: the
    excitation hops freely for v_1 steps, then is re-emitted from the target
    j-1 times with weight (-2) each, staying v_2, ..., v_j steps between
    oracle firings:

        amplitude = sum_j (-2)^(j-1) sum_compositions
                    transfer(v_1 delta) * prod_m retention(v_m delta)

    Exactness is guaranteed by equivalence with grover_ansatz_fidelity
    (enforced in the test suite), not by any printed combinatorics.
    """
    n_sites = _check_n_sites(n_sites)
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    if depth > MAX_PARTITION_DEPTH:
        raise ValueError(
            f"composition count 2^(p-1) too large for depth {depth} "
            f"(limit {MAX_PARTITION_DEPTH})"
        )
    if depth == 0:
        return 0.0

    spect = diagonalize_hb(n_sites)
    v = spect.eigenvectors
    edge = v[-1] * v[0]
    corner = v[-1] * v[-1]
    # free-evolution amplitudes for all multiples m*delta, m = 1..depth
    steps = np.exp(
        -1j * float(delta) * np.outer(np.arange(1, depth + 1), spect.eigenvalues)
    )
    transfer = steps @ edge
    retention = steps @ corner

    amplitude = 0.0 + 0.0j
    for j in range(1, depth + 1):
        sign = (-2.0) ** (j - 1)
        for cuts in combinations(range(1, depth), j - 1):
            parts = np.diff((0, *cuts, depth))
            term = transfer[parts[0] - 1]
            for m in parts[1:]:
                term *= retention[m - 1]
            amplitude += sign * term
    return float(abs(amplitude) ** 2)


# ---------------------------------------------------------------------------
# printed depth-scaling predictions (built on the quarantined coefficients)
# ---------------------------------------------------------------------------


def low_depth_prediction(
    n_sites: int,
    depth: int,
    delta: float,
    coefficients: ScalingCoefficients | None = None,
) -> float:
    """Literal evaluation of the printed two-term low-depth success model:

        (p+1)^2 Ft^2 d^2 + Ft^2 Fr^2 p^6 d^4 [(Fr p^2 d)^p - 1]^2
                                              / [(Fr p^2 d)^2 - 1]^2

    with Ft/Fr the transfer/retention rates.  By default the rates come from
    ``closed_form_coefficients`` (and inherit that formula's singularity);
    pass explicit ``coefficients`` to study the model's structure with finite
    rates.
    """
    if coefficients is None:
        coefficients = closed_form_coefficients(n_sites)
    ft = coefficients.transfer_rate
    fr = coefficients.retention_rate
    p = float(depth)
    d = float(delta)
    first = (p + 1) ** 2 * ft**2 * d**2
    growth = fr * p**2 * d
    second = (
        ft**2 * fr**2 * p**6 * d**4 * (growth**p - 1.0) ** 2 / (growth**2 - 1.0) ** 2
    )
    return first + second


def grover_step_estimate(
    n_sites: int, delta: float, coefficients: ScalingCoefficients | None = None
) -> float:
    """The printed step-count estimate 1/(delta * transfer_rate).

    Inherits the transfer rate's pathology; kept for the record.  Raises for
    a vanishing rate.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if coefficients is None:
        coefficients = closed_form_coefficients(n_sites)
    if coefficients.transfer_rate == 0.0:
        raise ZeroDivisionError("transfer rate is zero; estimate undefined")
    return 1.0 / (delta * coefficients.transfer_rate)


# ---------------------------------------------------------------------------
# discrepancy report
# ---------------------------------------------------------------------------


def discrepancy_report(n_values=range(4, 21, 2)) -> dict:
    """Quantify how the printed closed forms deviate from exact results.

    Returns a dict (JSON-friendly) with, per N:
      * residual of the half-range interleaved sine eigenpair ansatz (k=1)
        next to the machine-zero residual of the standard open-chain form;
      * the verbatim transfer/retention rates next to the finite-difference
        slope of the true transfer amplitude at delta=1e-4.

    Nothing here is asserted anywhere; the report exists so the deviations
    are recorded rather than silently papered over.
    """
    report: dict = {
        "notes": [
            "transfer-rate closed form is singular as printed: its cosecant "
            "argument (pi N/2 + 2 pi)/(2 (N/4 + 1)) reduces to pi exactly, "
            "so floating-point values are rounding artifacts",
            "true small-delta transfer amplitude scales as delta^(N-1); a "
            "linear-in-delta model cannot hold for N > 2",
            "half-range interleaved sine ansatz does not satisfy the "
            "open-chain eigenproblem; numerical diagonalization is used "
            "everywhere",
        ],
        "entries": [],
    }
    for n in n_values:
        n = int(n)
        coef = closed_form_coefficients(n)
        entry = {
            "n_sites": n,
            "transfer_rate_verbatim": coef.transfer_rate,
            "retention_rate_verbatim": coef.retention_rate,
            "fitted_transfer_slope": fitted_transfer_slope(n),
            "open_sine_residual_k1": open_sine_residual(n, 1),
        }
        if n % 2 == 0:
            entry["folded_sine_residual_k1"] = folded_sine_residual(n, 1)
        report["entries"].append(entry)
    return report
