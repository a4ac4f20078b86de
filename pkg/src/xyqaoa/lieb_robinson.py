"""Information-propagation speed limits for nearest-neighbour chains.

For a chain evolving under bounded nearest-neighbour couplings, the norm of
the commutator between operators a distance ``L`` apart is controlled by an
exponential light cone.  Exponentiating the series bound gives an effective
velocity ``v``; outside the cone (``v*t < L``) any transfer probability is
exponentially small.  This module evaluates the series tail, the cone
leakage ``eps = 2*exp(v*t - L)``, the resulting ceiling on the transfer
success probability, and a coarse classification of the three temporal
regimes (deep inside the cone, near the cone edge, past it).

Everything here is closed-form and stateless; nothing depends on the
simulator modules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "LRParameters",
    "lr_velocity",
    "commutator_series_bound",
    "lr_epsilon",
    "lr_success_bound",
    "lr_success_bound_raw",
    "transfer_time_estimate",
    "classify_region",
]

#: eps below this value counts as "no signal yet"; chosen so that the
#: suppressed region ends roughly where the transfer probability (~eps for
#: small eps) reaches the percent level.
SUPPRESSED_EPSILON = 0.02

#: eps at the cone edge (t = L/v); beyond it the quadratic term in the
#: probability ceiling starts to bite and growth flattens out.
CONE_EDGE_EPSILON = 1.0


@dataclass(frozen=True)
class LRParameters:
    """Inputs of the light-cone bound for one chain geometry.

    ``coupling_norm`` is the largest operator norm among the two-site
    coupling terms (2.0 for the hopping chain used elsewhere in this
    package), ``dimension`` the lattice dimension, and ``distance`` the
    number of bonds separating the two operators (sites 1 and N sit
    ``N - 1`` bonds apart).
    """

    coupling_norm: float
    distance: float
    dimension: int = 1

    def __post_init__(self) -> None:
        if self.coupling_norm < 0:
            raise ValueError("coupling norm must be nonnegative")
        if self.distance < 0:
            raise ValueError("distance must be nonnegative")
        if self.dimension < 1:
            raise ValueError("lattice dimension must be a positive integer")

    @property
    def velocity(self) -> float:
        return lr_velocity(self.coupling_norm, self.dimension)


def lr_velocity(coupling_norm: float, dimension: int = 1) -> float:
    """Effective light-cone velocity for bounded local couplings.

    Exponentiating the commutator series gives ``2*e*J*(4*D - 1)``; in one
    dimension this is the familiar ``6*e*J`` (about 32.62 for ``J = 2``).
    """
    if coupling_norm < 0:
        raise ValueError("coupling norm must be nonnegative")
    if dimension < 1:
        raise ValueError("lattice dimension must be a positive integer")
    return 2.0 * math.e * coupling_norm * (4.0 * dimension - 1.0)


def commutator_series_bound(
    t: float, distance: int, coupling_norm: float, dimension: int = 1
) -> float:
    """Tail of the commutator-norm series, for unit operator norms.

    Evaluates ``2 * sum_{k >= distance} x**k / k!`` with
    ``x = 2*J*t*(4*D - 1)``, accumulating terms until the next one falls
    below 1e-16 of the running sum.  The sum is carried in log space so
    large arguments do not overflow.  ``distance = 0`` recovers the full
    exponential series, i.e. ``2*exp(x)``.
    """
    if t < 0:
        raise ValueError("time must be nonnegative")
    if distance < 0:
        raise ValueError("distance must be nonnegative")
    x = 2.0 * coupling_norm * t * (4.0 * dimension - 1.0)
    if x == 0.0:
        return 2.0 if distance == 0 else 0.0

    log_x = math.log(x)
    # first term x**k / k! at k = distance, in log space
    log_term = distance * log_x - math.lgamma(distance + 1.0)
    log_sum = log_term
    k = distance
    while True:
        k += 1
        log_term += log_x - math.log(k)
        if log_term < log_sum + math.log(1e-16):
            break
        log_sum = log_sum + math.log1p(math.exp(log_term - log_sum))
    return 2.0 * math.exp(log_sum)


def lr_epsilon(t: float, distance: float, velocity: float) -> float:
    """Cone-leakage parameter ``2*exp(v*t - L)``."""
    if t < 0:
        raise ValueError("time must be nonnegative")
    return 2.0 * math.exp(velocity * t - distance)


def lr_success_bound_raw(t: float, distance: float, velocity: float) -> float:
    """Unclamped ceiling ``eps - eps**2/4``; vacuous (can exceed 1, and
    eventually turn around) once the cone has passed."""
    eps = lr_epsilon(t, distance, velocity)
    return eps - 0.25 * eps * eps


def lr_success_bound(t: float, distance: float, velocity: float) -> float:
    """Ceiling on the transfer success probability, clamped to [0, 1].

    Reaches exactly 1 when ``eps = 2``, i.e. at ``t = L/v``.
    """
    return min(max(lr_success_bound_raw(t, distance, velocity), 0.0), 1.0)


def transfer_time_estimate(distance: float, velocity: float) -> float:
    """Rough earliest time for high-fidelity transfer: ``L / v``."""
    if velocity <= 0:
        raise ValueError("velocity must be positive")
    return distance / velocity


def classify_region(t: float, distance: float, velocity: float) -> str:
    """Coarse temporal regime at time ``t``.

    Returns ``"suppressed"`` while eps < 0.02 (deep inside the cone, no
    appreciable signal), ``"exponential_growth"`` for 0.02 <= eps < 1, and
    ``"steady_growth"`` once eps >= 1.  The two thresholds are reporting
    conventions, not physics.
    """
    eps = lr_epsilon(t, distance, velocity)
    if eps < SUPPRESSED_EPSILON:
        return "suppressed"
    if eps < CONE_EDGE_EPSILON:
        return "exponential_growth"
    return "steady_growth"
