"""Collective-spin states in the Dicke basis and their first/second moments.

All states live in the maximal-spin manifold j = N/2 of N two-mode bosons
and carry real coefficients, which is sufficient here because the Josephson
Hamiltonian is real symmetric in the Jz eigenbasis.  With real coefficients
<Jy> vanishes identically, so moments are characterized by five numbers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DickeBasis",
    "SpinState",
    "StateEnsemble",
    "Moments",
    "build_basis",
    "ladder_coefficient",
    "compute_moments",
    "ensemble_moments",
    "rotate_pi2_about_x",
]

NORM_TOL = 1e-9


@dataclass(frozen=True)
class DickeBasis:
    """Labeling of the |j, m> ladder for N particles, m = -j ... +j."""

    n_particles: int
    j: float
    m_values: np.ndarray

    def __post_init__(self):
        if len(self.m_values) != self.n_particles + 1:
            raise ValueError("m_values must have length N+1")


@dataclass(frozen=True)
class SpinState:
    """Real coefficient vector over the Dicke ladder of its basis."""

    basis: DickeBasis
    coeffs: np.ndarray

    def __post_init__(self):
        if len(self.coeffs) != len(self.basis.m_values):
            raise ValueError("coefficient vector does not match basis size")


@dataclass(frozen=True)
class StateEnsemble:
    """Convex mixture of SpinStates (all sharing one basis)."""

    states: tuple
    weights: np.ndarray

    def __post_init__(self):
        if len(self.states) == 0:
            raise ValueError("empty ensemble")
        if len(self.states) != len(self.weights):
            raise ValueError("weights do not match states")
        w = np.asarray(self.weights, dtype=float)
        if np.any(w < 0):
            raise ValueError("negative ensemble weight")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("ensemble weights must sum to 1")


@dataclass(frozen=True)
class Moments:
    """First and second collective-spin moments (hbar = 1)."""

    jx: float
    jy: float
    jz: float
    jx2: float
    jy2: float
    jz2: float


def build_basis(n_particles: int) -> DickeBasis:
    """Dicke ladder for ``n_particles`` bosons: j = N/2, m = -j, ..., +j."""
    if not isinstance(n_particles, (int, np.integer)) or isinstance(n_particles, bool):
        raise TypeError("particle count must be an integer")
    if n_particles < 1:
        raise ValueError("particle count must be >= 1")
    j = n_particles / 2.0
    m_values = np.arange(n_particles + 1) - j
    return DickeBasis(int(n_particles), j, m_values)


def ladder_coefficient(basis: DickeBasis, m: float) -> float:
    """Off-diagonal Jx matrix element c_m = sqrt(j(j+1) - m(m+1)) / 2.

    Couples |j, m> and |j, m+1>; both must lie inside the ladder.
    """
    j = basis.j
    if m < -j - 1e-12 or m + 1 > j + 1e-12:
        raise ValueError(f"m={m} out of range for j={j}")
    return 0.5 * np.sqrt(j * (j + 1) - m * (m + 1))


def _ladder_array(basis: DickeBasis) -> np.ndarray:
    # c_m for m = -j ... j-1, vector of length N
    m = basis.m_values[:-1]
    j = basis.j
    return 0.5 * np.sqrt(j * (j + 1) - m * (m + 1))


def compute_moments(state: SpinState) -> Moments:
    """Spin moments of a normalized real-coefficient state, O(N) evaluation.

    Uses the J+/J- decomposition: the one-step couplings c_m give <Jx>,
    the two-step couplings c_m c_{m+1} give the anisotropy between <Jx^2>
    and <Jy^2> on top of the isotropic part <J^2 - Jz^2>/2.
    """
    psi = np.asarray(state.coeffs, dtype=float)
    norm2 = float(psi @ psi)
    if abs(norm2 - 1.0) > NORM_TOL:
        raise ValueError(f"state not normalized: |psi|^2 = {norm2!r}")
    basis = state.basis
    m = basis.m_values
    j = basis.j
    c = _ladder_array(basis)

    jz = float(m @ (psi * psi))
    jz2 = float((m * m) @ (psi * psi))
    jx = 2.0 * float(c @ (psi[:-1] * psi[1:]))
    # <J+^2> = <J-^2> = 4 sum_m c_m c_{m+1} psi_m psi_{m+2}
    two_step = float((c[:-1] * c[1:]) @ (psi[:-2] * psi[2:]))
    iso = 0.5 * (j * (j + 1) - jz2)
    jx2 = iso + 2.0 * two_step
    jy2 = iso - 2.0 * two_step
    return Moments(jx=jx, jy=0.0, jz=jz, jx2=jx2, jy2=jy2, jz2=jz2)


def ensemble_moments(ensemble: StateEnsemble) -> Moments:
    """Weight-averaged moments; moments are linear in the density matrix."""
    acc = np.zeros(6)
    for w, st in zip(ensemble.weights, ensemble.states):
        mom = compute_moments(st)
        acc += w * np.array([mom.jx, mom.jy, mom.jz, mom.jx2, mom.jy2, mom.jz2])
    return Moments(*acc)


def rotate_pi2_about_x(moments: Moments) -> Moments:
    """Moments after the exact rotation exp(-i (pi/2) Jx).

    Remaps (Jy, Jz) -> (-Jz, Jy) and swaps the corresponding second moments,
    turning number-squeezing into phase-squeezing.  Jx moments are untouched.
    """
    return Moments(
        jx=moments.jx,
        jy=-moments.jz,
        jz=moments.jy,
        jx2=moments.jx2,
        jy2=moments.jz2,
        jz2=moments.jy2,
    )
