"""Bang-bang state transfer on XY qubit chains: simulation, optimization, bounds."""

from .subspace import (
    ExcitationVector,
    Schedule,
    SpectralDecomposition,
    apply_schedule,
    build_hb,
    build_hc,
    diagonalize_hb,
    evolve_b,
    evolve_c,
    fidelity,
    fidelity_gradient,
)

__version__ = "0.1.0"
