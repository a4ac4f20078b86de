"""Single-excitation dynamics of an open XY qubit chain under bang-bang control.

The controlled system alternates between two Hamiltonians: a hopping
Hamiltonian ``H_B`` (uniform XY coupling, strength 2 on every bond of the open
chain) and a projector Hamiltonian ``H_C = |N><N|`` that tags the target site.
Both conserve the total excitation number, so a protocol that starts from the
single-excitation basis state on site 1 stays inside the N-dimensional
single-excitation sector for the whole evolution.  Everything in this module
works directly with the N-component amplitude vector of that sector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ExcitationVector",
    "Schedule",
    "SpectralDecomposition",
    "apply_schedule",
    "build_hb",
    "build_hc",
    "diagonalize_hb",
    "evolve_b",
    "evolve_c",
    "fidelity",
    "fidelity_gradient",
]


def _check_n_sites(n_sites: int) -> int:
    if not isinstance(n_sites, (int, np.integer)) or n_sites < 2:
        raise ValueError(f"chain needs at least 2 sites, got {n_sites!r}")
    return int(n_sites)


# ---------------------------------------------------------------------------
# types
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ExcitationVector:
    """Amplitude vector of a single-excitation state, one entry per site."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size < 2:
            raise ValueError("amplitude vector must be 1-D with >= 2 entries")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_site(cls, n_sites: int, site: int = 1) -> "ExcitationVector":
        """Basis state with the excitation localized on ``site`` (1-based)."""
        n_sites = _check_n_sites(n_sites)
        if not 1 <= site <= n_sites:
            raise ValueError(f"site {site} outside 1..{n_sites}")
        amps = np.zeros(n_sites, dtype=complex)
        amps[site - 1] = 1.0
        return cls(amps)

    @property
    def n_sites(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def target_population(self) -> float:
        """Probability of finding the excitation on the last site."""
        return float(abs(self.amplitudes[-1]) ** 2)


@dataclass(frozen=True, eq=False)
class Schedule:
    """Bang-bang protocol: ``depth`` pairs of (hopping, projector) durations.

    ``pairs[k] = (dB_k, dC_k)`` means iteration k evolves under the hopping
    Hamiltonian for ``dB_k`` and then under the projector for ``dC_k``.  All
    durations must be nonnegative.
    """

    pairs: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.pairs, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 1:
            raise ValueError("schedule needs shape (depth, 2)")
        if not np.all(np.isfinite(arr)):
            raise ValueError("schedule durations must be finite")
        if np.any(arr < 0):
            raise ValueError("schedule durations must be nonnegative")
        object.__setattr__(self, "pairs", arr)

    @classmethod
    def from_durations(cls, durations: Sequence[float] | np.ndarray) -> "Schedule":
        """Build from the flat layout ``[dB1, dC1, dB2, dC2, ...]``."""
        flat = np.asarray(durations, dtype=float)
        if flat.ndim != 1 or flat.size == 0 or flat.size % 2:
            raise ValueError("flat duration list must have positive even length")
        return cls(flat.reshape(-1, 2))

    @classmethod
    def from_string(cls, text: str) -> "Schedule":
        """Parse the semicolon syntax ``"dB1;dC1;dB2;dC2;..."``."""
        parts = [p for p in text.split(";") if p.strip()]
        try:
            values = [float(p) for p in parts]
        except ValueError as exc:
            raise ValueError(f"bad schedule string {text!r}: {exc}") from None
        return cls.from_durations(values)

    @property
    def depth(self) -> int:
        return self.pairs.shape[0]

    @property
    def durations(self) -> np.ndarray:
        """Flat copy ``[dB1, dC1, dB2, dC2, ...]``."""
        return self.pairs.reshape(-1).copy()

    def total_time(self) -> float:
        return float(self.pairs.sum())

    def to_string(self) -> str:
        return ";".join(format(d, ".17g") for d in self.pairs.reshape(-1))


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigendecomposition of the hopping Hamiltonian, eigenvalues ascending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # column k is the eigenvector for eigenvalues[k]

    @property
    def n_sites(self) -> int:
        return self.eigenvalues.size


# ---------------------------------------------------------------------------
# Hamiltonians
# ---------------------------------------------------------------------------


def build_hb(n_sites: int) -> np.ndarray:
    """Hopping Hamiltonian on the open chain: tridiagonal, off-diagonal 2.

    This is the single-excitation block of the uniform XY coupling
    sum_i (X_i X_{i+1} + Y_i Y_{i+1}); each bond hops the excitation with
    amplitude 2.
    """
    n_sites = _check_n_sites(n_sites)
    h = np.zeros((n_sites, n_sites))
    idx = np.arange(n_sites - 1)
    h[idx, idx + 1] = 2.0
    h[idx + 1, idx] = 2.0
    return h


def build_hc(n_sites: int) -> np.ndarray:
    """Projector Hamiltonian onto the target (last) site."""
    n_sites = _check_n_sites(n_sites)
    h = np.zeros((n_sites, n_sites))
    h[-1, -1] = 1.0
    return h


@lru_cache(maxsize=None)
def diagonalize_hb(n_sites: int) -> SpectralDecomposition:
    """Cached eigendecomposition of ``build_hb(n_sites)``.

    The returned object is shared between callers; eigenvalues come back
    ascending and the eigenvector matrix is orthogonal (real symmetric input).
    """
    vals, vecs = np.linalg.eigh(build_hb(n_sites))
    vals.setflags(write=False)
    vecs.setflags(write=False)
    return SpectralDecomposition(vals, vecs)


# ---------------------------------------------------------------------------
# evolution
# ---------------------------------------------------------------------------


def evolve_b(
    state: ExcitationVector, delta: float, spect: SpectralDecomposition | None = None
) -> ExcitationVector:
    """Evolve under the hopping Hamiltonian for time ``delta``.

    Applies exp(-i H_B delta) through the cached spectral decomposition:
    rotate into the eigenbasis, apply phases, rotate back.
    """
    if spect is None:
        spect = diagonalize_hb(state.n_sites)
    amps = _evolve_b_raw(state.amplitudes, float(delta), spect)
    return ExcitationVector(amps)


def evolve_c(state: ExcitationVector, delta: float) -> ExcitationVector:
    """Evolve under the projector Hamiltonian: phase e^{-i delta} on site N."""
    amps = state.amplitudes.copy()
    amps[-1] *= np.exp(-1j * float(delta))
    return ExcitationVector(amps)


def _evolve_b_raw(
    amps: np.ndarray, delta: float, spect: SpectralDecomposition
) -> np.ndarray:
    v = spect.eigenvectors
    phases = np.exp(-1j * delta * spect.eigenvalues)
    return v @ (phases * (v.T @ amps))


def _propagate(
    durations: np.ndarray,
    spect: SpectralDecomposition,
    keep_history: bool = False,
) -> tuple[np.ndarray, np.ndarray | None]:
    """Run the protocol from the site-1 basis state.

    Returns the final amplitude vector and, when ``keep_history`` is set, the
    stack of intermediate vectors after every half-step (2p rows).
    """
    n = spect.n_sites
    v = spect.eigenvectors
    vt = v.T
    energies = spect.eigenvalues
    psi = np.zeros(n, dtype=complex)
    psi[0] = 1.0
    history = np.empty((durations.size, n), dtype=complex) if keep_history else None
    for k in range(durations.size // 2):
        psi = v @ (np.exp(-1j * durations[2 * k] * energies) * (vt @ psi))
        if history is not None:
            history[2 * k] = psi
        psi = psi.copy()
        psi[-1] *= np.exp(-1j * durations[2 * k + 1])
        if history is not None:
            history[2 * k + 1] = psi
    return psi, history


def apply_schedule(schedule: Schedule, n_sites: int) -> ExcitationVector:
    """Apply the full protocol to the site-1 basis state."""
    spect = diagonalize_hb(_check_n_sites(n_sites))
    psi, _ = _propagate(schedule.durations, spect)
    return ExcitationVector(psi)


def fidelity(schedule: Schedule, n_sites: int) -> float:
    """Transfer fidelity |<N|U|1>|^2 of the protocol."""
    spect = diagonalize_hb(_check_n_sites(n_sites))
    psi, _ = _propagate(schedule.durations, spect)
    return float(abs(psi[-1]) ** 2)


def fidelity_gradient(schedule: Schedule, n_sites: int) -> np.ndarray:
    """Gradient of the transfer fidelity with respect to all 2p durations.

    Uses reverse-mode (adjoint) differentiation: one forward sweep storing the
    state after every half-step, one backward sweep carrying the costate.  The
    derivative of each propagator is exp(-i H d)' = -i H exp(-i H d), so the
    contribution of duration d_k is 2 Re[conj(z) * <costate|(-i H)|state_k>]
    with z the final target amplitude.  Output layout matches
    ``Schedule.durations``: ``[dB1, dC1, dB2, dC2, ...]``.
    """
    spect = diagonalize_hb(_check_n_sites(n_sites))
    _, grad = _fidelity_and_gradient(schedule.durations, spect)
    return grad


def _fidelity_and_gradient(
    durations: np.ndarray, spect: SpectralDecomposition
) -> tuple[float, np.ndarray]:
    """Fast path shared by the optimizer: returns (F, dF/d durations)."""
    v = spect.eigenvectors
    vt = v.T
    energies = spect.eigenvalues
    psi, history = _propagate(durations, spect, keep_history=True)
    z = psi[-1]
    fid = float(abs(z) ** 2)
    zbar = np.conj(z)

    grad = np.empty_like(durations)
    chi = np.zeros(spect.n_sites, dtype=complex)
    chi[-1] = 1.0
    for k in range(durations.size // 2 - 1, -1, -1):
        # projector half-step: generator -i H_C only touches the last entry
        dz = -1j * np.conj(chi[-1]) * history[2 * k + 1][-1]
        grad[2 * k + 1] = 2.0 * (zbar * dz).real
        chi = chi.copy()
        chi[-1] *= np.exp(1j * durations[2 * k + 1])
        # hopping half-step
        hb_psi = v @ (energies * (vt @ history[2 * k]))
        dz = -1j * (np.conj(chi) @ hb_psi)
        grad[2 * k] = 2.0 * (zbar * dz).real
        chi = v @ (np.exp(1j * durations[2 * k] * energies) * (vt @ chi))
    return fid, grad
