"""First-order optimality checks for bang-bang transfer protocols.

A protocol alternating between the hopping generator and the target-site
phase generator is a bang-bang control: a switch signal s(t) in {0, 1}
selects which of the two Hamiltonians is active.  For a candidate protocol
this module integrates the state forward, integrates the adjoint (costate)
vector backward from the transfer-overlap cost, and evaluates the switching
function

    phi(t) = 2 * Re[ p(t)^T (-i) (H_phase - H_hop) c(t) ],

whose sign dictates which generator an optimal control must apply at time
t, and which must vanish at the switch times of a locally optimal
protocol.

Convention note: amplitudes are complex, so the real-valued control
Hamiltonian is taken as twice the real part of the costate/velocity
pairing.  With the terminal costate set to minus the conjugated final
target amplitude (at the target site, zero elsewhere) and the costate
propagated backward through the *same* evolution operators as the state,
the transpose pairing above reproduces, at any time t, the derivative of
the transfer fidelity with respect to inserting an infinitesimal slice of
either generator at t.  That identification is what the consistency checks
below rely on; an equivalent dagger-pairing form exists with the costate
conjugated throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .subspace import Schedule, diagonalize_hb, _check_n_sites

__all__ = [
    "PiecewiseControl",
    "Trajectory",
    "PontryaginReport",
    "schedule_to_control",
    "integrate_state",
    "integrate_costate",
    "switching_function",
    "verify_pontryagin",
]

#: default switching-function tolerance (units of the control Hamiltonian)
DEFAULT_TOLERANCE = 1e-3

#: final-overlap magnitudes below this leave the costate identically zero,
#: making every first-order condition trivially satisfied
_VACUOUS_OVERLAP = 1e-12

_SAMPLES_PER_SEGMENT = 64


@dataclass(frozen=True)
class PiecewiseControl:
    """Bang-bang switch signal: ordered (s, duration) segments.

    ``s = 0`` applies the hopping generator, ``s = 1`` the target-site
    phase.  Durations are strictly positive and adjacent segments carry
    different s (equal neighbours should have been merged).  An empty
    control (zero total time) is allowed.
    """

    segments: tuple[tuple[int, float], ...]

    def __post_init__(self) -> None:
        prev = None
        for s, duration in self.segments:
            if s not in (0, 1):
                raise ValueError("control values must be 0 or 1")
            if not duration > 0:
                raise ValueError("segment durations must be positive")
            if prev is not None and s == prev:
                raise ValueError("adjacent segments must alternate")
            prev = s

    @property
    def total_time(self) -> float:
        return float(sum(d for _, d in self.segments))

    @property
    def switch_times(self) -> np.ndarray:
        """Times of the interior switches (between consecutive segments)."""
        ends = np.cumsum([d for _, d in self.segments])
        return ends[:-1]


@dataclass(frozen=True)
class Trajectory:
    """Checkpointed path of a complex vector: times[i] -> vectors[i]."""

    times: np.ndarray
    vectors: np.ndarray

    def at_final(self) -> np.ndarray:
        return self.vectors[-1]


@dataclass(frozen=True)
class PontryaginReport:
    """Outcome of the first-order optimality check.

    ``switching_values`` holds phi at each interior switch time.
    ``segment_sign_violations`` holds, per segment, the fraction of sampled
    points where the sign condition fails (s=0 needs phi >= -tol, s=1
    needs phi <= tol).  ``verdict`` is "consistent" when every switch
    value is below tolerance in magnitude and every violation fraction is
    below 1e-3; "vacuous" when the final overlap (and hence the costate)
    is zero and the conditions hold trivially; "violated" otherwise.
    """

    switching_values: tuple[float, ...]
    segment_sign_violations: tuple[tuple[int, float], ...]
    verdict: str
    tolerance: float
    final_fidelity: float


def schedule_to_control(schedule: Schedule) -> PiecewiseControl:
    """Flatten a protocol into an alternating switch signal.

    Each (hop, phase) pair contributes an s=0 then an s=1 segment;
    zero-duration entries are dropped and adjacent equal-s runs merged, so
    the total time is preserved.
    """
    merged: list[tuple[int, float]] = []
    for hop, phase in schedule.pairs:
        for s, duration in ((0, float(hop)), (1, float(phase))):
            if duration == 0.0:
                continue
            if merged and merged[-1][0] == s:
                merged[-1] = (s, merged[-1][1] + duration)
            else:
                merged.append((s, duration))
    return PiecewiseControl(tuple(merged))


def _segment_times(control: PiecewiseControl, samples: int) -> list[np.ndarray]:
    """Per-segment absolute sample times (segment start excluded, end
    included), so concatenating with a leading 0 covers [0, t_f]."""
    grids = []
    start = 0.0
    for _, duration in control.segments:
        grids.append(start + np.linspace(0.0, duration, samples + 1)[1:])
        start += duration
    return grids


def _hop_evolver(n_sites: int):
    spect = diagonalize_hb(n_sites)

    def step(vec: np.ndarray, dt: float) -> np.ndarray:
        phases = np.exp(-1j * spect.eigenvalues * dt)
        return spect.eigenvectors @ (phases * (spect.eigenvectors.T @ vec))

    return step


def _phase_step(vec: np.ndarray, dt: float) -> np.ndarray:
    out = vec.copy()
    out[-1] *= np.exp(-1j * dt)
    return out


def integrate_state(
    control: PiecewiseControl,
    n_sites: int,
    samples_per_segment: int = _SAMPLES_PER_SEGMENT,
) -> Trajectory:
    """Propagate the site-1 excitation through the control, piecewise
    exactly, recording a uniform grid of checkpoints per segment (switch
    times included)."""
    _check_n_sites(n_sites)
    hop = _hop_evolver(n_sites)
    psi = np.zeros(n_sites, dtype=complex)
    psi[0] = 1.0
    times = [0.0]
    vectors = [psi]
    start = 0.0
    for s, duration in control.segments:
        dt = duration / samples_per_segment
        for k in range(1, samples_per_segment + 1):
            psi = _phase_step(psi, dt) if s == 1 else hop(psi, dt)
            times.append(start + k * dt)
            vectors.append(psi)
        start += duration
    return Trajectory(np.array(times), np.array(vectors))


def integrate_costate(
    control: PiecewiseControl,
    final_state: np.ndarray,
    n_sites: int,
    samples_per_segment: int = _SAMPLES_PER_SEGMENT,
) -> Trajectory:
    """Propagate the adjoint vector backward from the transfer cost.

    The terminal costate is ``-conj(c_N(t_f))`` at the target site and
    zero elsewhere.  Backward propagation reuses the forward evolution
    operators (for these real symmetric generators that realizes the
    adjoint dynamics; see the module docstring), and checkpoints land on
    the same grid as :func:`integrate_state`.
    """
    _check_n_sites(n_sites)
    hop = _hop_evolver(n_sites)
    p = np.zeros(n_sites, dtype=complex)
    p[-1] = -np.conj(final_state[-1])
    rev_times = [sum(d for _, d in control.segments)]
    rev_vectors = [p]
    end = rev_times[0]
    for s, duration in reversed(control.segments):
        dt = duration / samples_per_segment
        for k in range(1, samples_per_segment + 1):
            p = _phase_step(p, dt) if s == 1 else hop(p, dt)
            rev_times.append(end - k * dt)
            rev_vectors.append(p)
        end -= duration
    return Trajectory(np.array(rev_times[::-1]), np.array(rev_vectors[::-1]))


def _generator_difference(vec: np.ndarray) -> np.ndarray:
    """(-i) (H_phase - H_hop) applied to vec."""
    out = np.zeros_like(vec)
    out[-1] = vec[-1]                      # projector onto the target site
    out[1:] -= 2.0 * vec[:-1]              # minus the hopping action
    out[:-1] -= 2.0 * vec[1:]
    return -1j * out


def switching_function(
    state_path: Trajectory, costate_path: Trajectory
) -> np.ndarray:
    """phi(t) on the shared checkpoint grid (transpose pairing; see the
    module docstring)."""
    if state_path.times.shape != costate_path.times.shape:
        raise ValueError("state and costate grids differ")
    values = np.empty(state_path.times.size)
    for i, (c, p) in enumerate(zip(state_path.vectors, costate_path.vectors)):
        values[i] = 2.0 * np.real(p @ _generator_difference(c))
    return values


def verify_pontryagin(
    schedule: Schedule,
    n_sites: int,
    tolerance: float = DEFAULT_TOLERANCE,
    samples_per_segment: int = _SAMPLES_PER_SEGMENT,
) -> PontryaginReport:
    """Check a protocol against the bang-bang first-order conditions.

    At every interior switch time the switching function must vanish
    (within ``tolerance``), and on each segment its sign must match the
    active generator: nonnegative where the hop is on, nonpositive where
    the phase is on.  Protocols with zero final overlap at the target make
    the costate vanish identically; these are reported as "vacuous"
    rather than "consistent".
    """
    control = schedule_to_control(schedule)
    if not control.segments:
        return PontryaginReport((), (), "vacuous", tolerance, 0.0)
    state_path = integrate_state(control, n_sites, samples_per_segment)
    final_state = state_path.at_final()
    overlap = final_state[-1]
    fidelity = float(np.abs(overlap) ** 2)
    if np.abs(overlap) < _VACUOUS_OVERLAP:
        return PontryaginReport(
            (),
            tuple((i, 0.0) for i in range(len(control.segments))),
            "vacuous",
            tolerance,
            fidelity,
        )
    costate_path = integrate_costate(
        control, final_state, n_sites, samples_per_segment
    )
    phi = switching_function(state_path, costate_path)

    switch_values = []
    boundaries = np.cumsum([0.0] + [d for _, d in control.segments])
    for t_switch in control.switch_times:
        idx = int(np.argmin(np.abs(state_path.times - t_switch)))
        switch_values.append(float(phi[idx]))

    violations = []
    for seg_index, (s, _) in enumerate(control.segments):
        lo, hi = boundaries[seg_index], boundaries[seg_index + 1]
        mask = (state_path.times >= lo) & (state_path.times <= hi)
        seg_phi = phi[mask]
        if s == 0:
            bad = np.count_nonzero(seg_phi < -tolerance)
        else:
            bad = np.count_nonzero(seg_phi > tolerance)
        violations.append((seg_index, bad / seg_phi.size))

    consistent = all(abs(v) < tolerance for v in switch_values) and all(
        frac < 1e-3 for _, frac in violations
    )
    return PontryaginReport(
        tuple(switch_values),
        tuple(violations),
        "consistent" if consistent else "violated",
        tolerance,
        fidelity,
    )
