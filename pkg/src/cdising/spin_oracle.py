"""Dense spin-space oracle for the counterdiabatic Ising chain.

Brute-force construction of the chain Hamiltonian and of the multi-spin
counterdiabatic term as explicit Pauli-string matrices on the full 2^n
space, ground states resolved inside the positive-parity sector, and full
Schrodinger evolution. Everything here is meant to validate the
free-fermion pipeline at small sizes, not to be fast.
"""

from __future__ import annotations

from functools import reduce

import numpy as np
from scipy.integrate import solve_ivp

from .coefficients import CouplingModel, coupling_set
from .dynamics import IntegrationError, Schedule

MAX_SPINS = 10

_ID = np.eye(2, dtype=complex)
_SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
_SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def _check_size(n: int) -> None:
    if n < 2 or n % 2 or n > MAX_SPINS:
        raise ValueError(f"spin count must be even, 2 <= n <= {MAX_SPINS}, got {n}")


def pauli_string(n: int, factors: dict[int, np.ndarray]) -> np.ndarray:
    """Tensor product over n sites with the given single-site factors."""
    return reduce(np.kron, [factors.get(site, _ID) for site in range(n)])


def ising_hamiltonian(n: int, g: float) -> np.ndarray:
    """Dense transverse-field Ising Hamiltonian with periodic bonds.

    The bond sum runs over all n sites; for n = 2 the two bond terms act
    on the same pair and are deliberately both kept, exactly as the sum
    dictates.
    """
    _check_size(n)
    h = np.zeros((2**n, 2**n), dtype=complex)
    for site in range(n):
        h -= pauli_string(n, {site: _SX, (site + 1) % n: _SX})
        h -= g * pauli_string(n, {site: _SZ})
    return h


def multi_spin_term(n: int, m: int) -> np.ndarray:
    """Range-m counterdiabatic interaction: x-(z string)-y plus y-(z string)-x.

    Sums over all n starting sites, with the z string spanning the m - 1
    sites strictly between the endpoints (periodic indexing).
    """
    _check_size(n)
    if not 1 <= m <= n // 2:
        raise ValueError(f"interaction range m={m} outside [1, {n // 2}]")
    term = np.zeros((2**n, 2**n), dtype=complex)
    for site in range(n):
        string = {(site + step) % n: _SZ for step in range(1, m)}
        term += pauli_string(n, {site: _SX, **string, (site + m) % n: _SY})
        term += pauli_string(n, {site: _SY, **string, (site + m) % n: _SX})
    return term


def cd_hamiltonian(n: int, g: float, gdot: float, model: CouplingModel) -> np.ndarray:
    """Dense counterdiabatic term at field g and ramp rate gdot.

    Minus gdot times the coupling-weighted sum of multi_spin_term over
    ranges 1 .. n/2, the longest range entering with half weight.
    """
    _check_size(n)
    h = np.zeros((2**n, 2**n), dtype=complex)
    if gdot == 0.0:
        return h
    values = coupling_set(model, g, n)
    for m in range(1, n // 2 + 1):
        weight = 0.5 if m == n // 2 else 1.0
        h -= gdot * weight * values[m - 1] * multi_spin_term(n, m)
    return h


def parity_operator(n: int) -> np.ndarray:
    """Product of z operators over all sites (diagonal, entries +-1)."""
    _check_size(n)
    return pauli_string(n, {site: _SZ for site in range(n)})


def _even_sector(n: int) -> np.ndarray:
    # positive-parity basis states have an even number of down spins
    bits = np.arange(2**n)
    popcount = np.array([bin(b).count("1") for b in bits])
    return np.flatnonzero(popcount % 2 == 0)


def parity_ground_state(n: int, g: float) -> np.ndarray:
    """Lowest eigenvector of the chain Hamiltonian with parity +1.

    Diagonalizes inside the positive-parity sector, which both selects the
    +1 member of any cross-sector degeneracy (for example at zero field)
    and keeps the returned vector deterministic. The global phase is fixed
    by making the largest-magnitude amplitude real positive.
    """
    _check_size(n)
    h = ising_hamiltonian(n, g)
    sector = _even_sector(n)
    block = h[np.ix_(sector, sector)]
    eigenvalues, eigenvectors = np.linalg.eigh(block)
    state = np.zeros(2**n, dtype=complex)
    state[sector] = eigenvectors[:, 0]
    anchor = state[np.argmax(np.abs(state))]
    state *= anchor.conjugate() / abs(anchor)
    return state / np.linalg.norm(state)


def sector_ground_energy(n: int, g: float) -> float:
    """Lowest eigenvalue of the chain Hamiltonian in the parity +1 sector."""
    _check_size(n)
    h = ising_hamiltonian(n, g)
    sector = _even_sector(n)
    block = h[np.ix_(sector, sector)]
    return float(np.linalg.eigvalsh(block)[0])


def dense_evolve(
    n: int,
    schedule: Schedule,
    model: CouplingModel,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-12,
) -> float:
    """Full 2^n Schrodinger evolution; squared overlap with the target state.

    Starts from the positive-parity ground state at the initial field,
    integrates under chain Hamiltonian plus counterdiabatic term with the
    same adaptive integrator contract as the mode evolution, and projects
    onto the positive-parity ground state at the final field.
    """
    _check_size(n)
    base_x = np.zeros((2**n, 2**n), dtype=complex)
    for site in range(n):
        base_x += pauli_string(n, {site: _SX, (site + 1) % n: _SX})
    base_z = pauli_string(n, {0: _SZ})
    for site in range(1, n):
        base_z += pauli_string(n, {site: _SZ})
    weighted_terms = np.stack(
        [
            (0.5 if m == n // 2 else 1.0) * multi_spin_term(n, m)
            for m in range(1, n // 2 + 1)
        ]
    )
    duration = schedule.duration

    def rhs(t, state):
        tc = min(max(t, 0.0), duration)
        g = schedule.value(tc)
        gp = schedule.rate(tc)
        values = coupling_set(model, g, n)
        h_state = -(base_x @ state) - g * (base_z @ state)
        if gp != 0.0:
            mixed = np.tensordot(weighted_terms, state, axes=([2], [0]))
            h_state -= gp * (values @ mixed)
        return -1j * h_state

    start = parity_ground_state(n, schedule.g0)
    sol = solve_ivp(rhs, (0.0, duration), start, method="DOP853", rtol=rel_tol, atol=abs_tol)
    if not sol.success:
        raise IntegrationError(f"dense run (n={n}, {model.label()}): {sol.message}")
    target = parity_ground_state(n, schedule.gf)
    overlap = np.vdot(target, sol.y[:, -1])
    return float(abs(overlap) ** 2)
