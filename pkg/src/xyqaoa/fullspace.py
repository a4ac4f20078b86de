"""Full 2^N-dimensional oracle for the bang-bang chain dynamics.

Independent cross-check for the subspace simulator: builds the complete
many-qubit Hamiltonians (uniform XY coupling on every bond, plus the
half-spin projector (Z_N + I)/2 on the target site), evolves the one-excitation
basis state through a schedule in the full Hilbert space, and reports the
target-site transfer probability.  Deliberately shares no linear algebra with
the subspace code path.

Excitation convention: basis index ``b`` has bit (i-1) set iff site i carries
the excitation; the Z operator of an excited site has eigenvalue +1.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import expm_multiply

from .subspace import Schedule, _check_n_sites

__all__ = ["MAX_ORACLE_SITES", "full_hilbert_oracle"]

MAX_ORACLE_SITES = 12
_DENSE_LIMIT = 10  # up to here we pre-diagonalize the full coupling matrix


def _build_full_coupling(n_sites: int) -> coo_matrix:
    """Sparse sum of X_i X_{i+1} + Y_i Y_{i+1} over the open chain's bonds."""
    dim = 1 << n_sites
    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    basis = np.arange(dim, dtype=np.int64)
    for i in range(n_sites - 1):
        mask = (1 << i) | (1 << (i + 1))
        bits = (basis >> i) & 3
        src = basis[(bits == 1) | (bits == 2)]  # exactly one of the pair excited
        rows.append(src ^ mask)
        cols.append(src)
    row = np.concatenate(rows)
    col = np.concatenate(cols)
    data = np.full(row.size, 2.0)
    return coo_matrix((data, (row, col)), shape=(dim, dim))


@lru_cache(maxsize=4)
def _oracle_tables(n_sites: int):
    dim = 1 << n_sites
    popcount = np.bitwise_count(np.arange(dim, dtype=np.uint64)).astype(np.int64)
    z_total = 2 * popcount - n_sites  # diagonal of the total-Z operator
    coupling = _build_full_coupling(n_sites)
    if n_sites <= _DENSE_LIMIT:
        vals, vecs = np.linalg.eigh(coupling.toarray())
        return popcount, z_total, (vals, vecs), None
    return popcount, z_total, None, coupling.tocsr()


def full_hilbert_oracle(schedule: Schedule, n_sites: int) -> float:
    """Evolve in the full Hilbert space and return the transfer probability.

    Also asserts, after every half-step, that the dynamics honours the
    symmetries the subspace simulator takes for granted: total-Z expectation
    conserved to 1e-10, leakage out of the single-excitation sector below
    1e-12, and a vacuum amplitude that never gets populated.

    Raises ValueError above ``MAX_ORACLE_SITES`` sites; the full space grows
    as 2^N and this is a verification tool, not a production path.
    """
    n_sites = _check_n_sites(n_sites)
    if n_sites > MAX_ORACLE_SITES:
        raise ValueError(
            f"full-space oracle limited to {MAX_ORACLE_SITES} sites, got {n_sites}"
        )
    popcount, z_total, dense, sparse = _oracle_tables(n_sites)
    dim = 1 << n_sites

    psi = np.zeros(dim, dtype=complex)
    psi[1] = 1.0  # excitation on site 1
    z_expect_initial = 2 - n_sites

    def check(state: np.ndarray) -> None:
        probs = np.abs(state) ** 2
        z_expect = float(probs @ z_total)
        if abs(z_expect - z_expect_initial) > 1e-10:
            raise RuntimeError("total-Z expectation drifted during evolution")
        if float(probs[popcount != 1].sum()) > 1e-12:
            raise RuntimeError("leakage out of the single-excitation sector")
        if abs(state[0]) > 1e-12:
            raise RuntimeError("vacuum amplitude became populated")

    target_phase_mask = (np.arange(dim) >> (n_sites - 1)) & 1
    for d_hop, d_proj in schedule.pairs:
        if dense is not None:
            vals, vecs = dense
            psi = vecs @ (np.exp(-1j * d_hop * vals) * (vecs.T @ psi))
        else:
            psi = expm_multiply(-1j * d_hop * sparse, psi)
        check(psi)
        # projector (Z_N + I)/2 is diagonal: phase on states with site N excited
        psi = np.where(target_phase_mask, psi * np.exp(-1j * d_proj), psi)
        check(psi)

    return float(abs(psi[1 << (n_sites - 1)]) ** 2)
