"""Bosonic Josephson junction H = -Jx + (Lambda/N) Jz^2 + delta Jz.

In the Jz eigenbasis the Hamiltonian is a real symmetric tridiagonal matrix;
its diagonal holds the interaction and tilt terms and its off-diagonal the
(negated) Jx ladder elements.  Energies are in units of the Josephson
tunneling energy E_J, temperatures in units of E_J / k_B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .spin_core import (
    DickeBasis,
    SpinState,
    StateEnsemble,
    build_basis,
    compute_moments,
)

__all__ = [
    "ModelParams",
    "SymTridiag",
    "Spectrum",
    "ConvergenceError",
    "build_hamiltonian",
    "ground_state",
    "full_spectrum",
    "thermal_ensemble",
    "FULL_SPECTRUM_CAP",
]

FULL_SPECTRUM_CAP = 4000

RESIDUAL_TOL = 1e-8
ORTHO_TOL = 1e-8


class ConvergenceError(RuntimeError):
    """Eigensolver failed to meet the residual/orthonormality tolerances."""


@dataclass(frozen=True)
class ModelParams:
    n_particles: int
    lam: float
    delta: float = 0.0

    def __post_init__(self):
        if self.n_particles < 1:
            raise ValueError("n_particles must be >= 1")
        if not (math.isfinite(self.lam) and math.isfinite(self.delta)):
            raise ValueError("lam and delta must be finite")


@dataclass(frozen=True)
class SymTridiag:
    diag: np.ndarray
    offdiag: np.ndarray

    @property
    def norm_estimate(self) -> float:
        """Max row sum, an upper bound on the spectral norm."""
        d, e = np.abs(self.diag), np.abs(self.offdiag)
        row = d.copy()
        row[:-1] += e
        row[1:] += e
        return float(row.max())

    def matvec(self, v: np.ndarray) -> np.ndarray:
        w = self.diag[:, None] * v if v.ndim == 2 else self.diag * v
        if v.ndim == 2:
            w[:-1] += self.offdiag[:, None] * v[1:]
            w[1:] += self.offdiag[:, None] * v[:-1]
        else:
            w[:-1] += self.offdiag * v[1:]
            w[1:] += self.offdiag * v[:-1]
        return w


@dataclass(frozen=True)
class Spectrum:
    params: ModelParams
    energies: np.ndarray
    states: tuple  # of SpinState, ascending in energy


def build_hamiltonian(params: ModelParams) -> SymTridiag:
    """Tridiagonal matrix of the junction Hamiltonian in the Jz basis."""
    basis = build_basis(params.n_particles)
    m = basis.m_values
    j = basis.j
    diag = (params.lam / params.n_particles) * m * m + params.delta * m
    offdiag = -0.5 * np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    return SymTridiag(diag, offdiag)


def _check_eigenpairs(h: SymTridiag, energies: np.ndarray, vectors: np.ndarray):
    """Residual and orthonormality guards, independent of the backend."""
    norm_h = max(h.norm_estimate, 1e-300)
    resid = h.matvec(vectors) - vectors * energies[None, :]
    worst = np.sqrt((resid * resid).sum(axis=0)).max()
    if worst > RESIDUAL_TOL * norm_h:
        raise ConvergenceError(
            f"eigenpair residual {worst:.3e} exceeds {RESIDUAL_TOL:.0e} * |H|"
        )
    gram = vectors.T @ vectors
    gram[np.diag_indices_from(gram)] -= 1.0
    ortho = np.abs(gram).max()
    if ortho > ORTHO_TOL:
        raise ConvergenceError(f"orthonormality defect {ortho:.3e}")


def _fix_signs(basis: DickeBasis, vectors: np.ndarray) -> np.ndarray:
    """Deterministic sign convention: <Jx> >= 0, ties broken by the first
    nonzero coefficient being positive."""
    c = 0.5 * np.sqrt(
        basis.j * (basis.j + 1) - basis.m_values[:-1] * (basis.m_values[:-1] + 1)
    )
    for k in range(vectors.shape[1]):
        v = vectors[:, k]
        jx = 2.0 * float(c @ (v[:-1] * v[1:]))
        if jx < -1e-13:
            v *= -1.0
        elif abs(jx) <= 1e-13:
            nz = np.flatnonzero(np.abs(v) > 1e-12)
            if nz.size and v[nz[0]] < 0:
                v *= -1.0
    return vectors


def _solve(params: ModelParams, **select) -> tuple[np.ndarray, np.ndarray]:
    h = build_hamiltonian(params)
    try:
        energies, vectors = eigh_tridiagonal(h.diag, h.offdiag, **select)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - backend failure
        raise ConvergenceError(str(exc)) from exc
    _check_eigenpairs(h, energies, vectors)
    vectors = _fix_signs(build_basis(params.n_particles), vectors)
    return energies, vectors


def ground_state(params: ModelParams) -> tuple[float, SpinState]:
    """Lowest eigenpair of the junction Hamiltonian."""
    energies, vectors = _solve(params, select="i", select_range=(0, 0), lapack_driver="stebz")
    basis = build_basis(params.n_particles)
    return float(energies[0]), SpinState(basis, vectors[:, 0])


def full_spectrum(params: ModelParams, cap: int = FULL_SPECTRUM_CAP) -> Spectrum:
    """All N+1 eigenpairs, residual- and orthonormality-checked."""
    if params.n_particles > cap:
        raise ValueError(
            f"n_particles={params.n_particles} exceeds full-spectrum cap {cap}"
        )
    energies, vectors = _solve(params)
    basis = build_basis(params.n_particles)
    states = tuple(SpinState(basis, vectors[:, k]) for k in range(vectors.shape[1]))
    return Spectrum(params, energies, states)


def _partial_spectrum(params: ModelParams, energy_window: float):
    """Eigenpairs with E - E0 <= energy_window (ascending)."""
    h = build_hamiltonian(params)
    e0 = eigh_tridiagonal(
        h.diag, h.offdiag, eigvals_only=True, select="i", select_range=(0, 0),
        lapack_driver="stebz",
    )[0]
    energies, vectors = _solve(
        params, select="v", select_range=(e0 - 1.0, e0 + energy_window)
    )
    return energies, vectors


def thermal_ensemble(
    params: ModelParams,
    temperature: float,
    weight_cutoff: float = 1e-16,
) -> StateEnsemble:
    """Boltzmann mixture of eigenstates at k_B T / E_J = ``temperature``.

    Weights are exp(-beta (E_n - E0)), normalized to unit sum.  States whose
    relative weight falls below ``weight_cutoff`` are dropped, so only the
    thermally occupied part of the spectrum is diagonalized.
    """
    if temperature < 0:
        raise ValueError("temperature must be >= 0")
    basis = build_basis(params.n_particles)
    if temperature == 0:
        _, gs = ground_state(params)
        return StateEnsemble((gs,), np.array([1.0]))
    if math.isinf(temperature):
        spec = full_spectrum(params)
        n = len(spec.states)
        return StateEnsemble(spec.states, np.full(n, 1.0 / n))

    beta = 1.0 / temperature
    # exp(-beta dE) < cutoff  <=>  dE > -ln(cutoff) / beta
    window = -math.log(weight_cutoff) / beta
    energies, vectors = _partial_spectrum(params, window)
    rel = energies - energies[0]
    weights = np.exp(-beta * rel)
    keep = weights >= weight_cutoff * weights.max()
    weights = weights[keep]
    weights /= weights.sum()
    states = tuple(
        SpinState(basis, vectors[:, k]) for k in np.flatnonzero(keep)
    )
    return StateEnsemble(states, weights)
