"""Noise channels: tilt fluctuations, finite temperature, detector blur.

Gaussian shot-to-shot fluctuations of the well imbalance delta turn the
ground state into a mixture of tilted ground states.  The Gaussian weight
is discretized by a quadrature split at delta = 0: on the attractive side
the ground state crosses over abruptly between the two wells around zero
tilt, so moments are effectively discontinuous there and a global rule
(Gauss-Hermite) converges only at first order.  Gauss-Legendre panels on
each half-axis with Gaussian weights restore spectral convergence; a
node-doubling check guards every mixture.  Finite detector resolution acts
on the fitted density only, multiplying the visibility by exp(-k^2 s^2 / 2)
while leaving the squeezing of the source state untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .josephson import ConvergenceError, ModelParams, ground_state, thermal_ensemble
from .spin_core import Moments, SpinState, StateEnsemble, ensemble_moments
from .witnesses import bell_witness

__all__ = [
    "NoiseConfig",
    "QuadratureRule",
    "gauss_hermite_rule",
    "split_gaussian_rule",
    "delta_mixture",
    "delta_thermal_mixture",
    "blur_visibility",
    "witness_with_noise",
    "DEFAULT_QUAD_ORDER",
    "MAX_QUAD_ORDER",
]

DEFAULT_QUAD_ORDER = 41
MAX_QUAD_ORDER = 641
CONVERGENCE_RTOL = 1e-6
CONVERGENCE_ATOL = 1e-12
# Gaussian support kept per half-axis, in units of sigma; the truncated
# tail weight (~1e-15) is absorbed by renormalization.
GAUSSIAN_SPAN = 8.0


@dataclass(frozen=True)
class NoiseConfig:
    sigma_delta: float = 0.0
    temperature: float = 0.0
    sigma_detector: float = 0.0
    k_fringe: float = 1.0

    def __post_init__(self):
        for name in ("sigma_delta", "temperature", "sigma_detector", "k_fringe"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.sigma_detector > 0 and self.k_fringe <= 0:
            raise ValueError("k_fringe must be positive when blur is used")


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray


def gauss_hermite_rule(order: int, sigma: float) -> QuadratureRule:
    """Nodes and unit-sum weights discretizing a centered Gaussian of
    standard deviation ``sigma``."""
    x, w = np.polynomial.hermite.hermgauss(order)
    return QuadratureRule(nodes=math.sqrt(2.0) * sigma * x, weights=w / w.sum())


def split_gaussian_rule(half_order: int, sigma: float) -> QuadratureRule:
    """Quadrature for a centered Gaussian of standard deviation ``sigma``,
    split at zero: a Gauss-Legendre panel on each half-axis with the
    Gaussian folded into the weights (unit sum).  Nodes are strictly
    nonzero and symmetric about the origin."""
    x, w = np.polynomial.legendre.leggauss(half_order)
    d = 0.5 * GAUSSIAN_SPAN * sigma * (x + 1.0)
    gw = w * np.exp(-0.5 * (d / sigma) ** 2)
    nodes = np.concatenate([-d[::-1], d])
    weights = np.concatenate([gw[::-1], gw])
    return QuadratureRule(nodes=nodes, weights=weights / weights.sum())


def _mirror(state: SpinState) -> SpinState:
    # H(-delta) = P H(delta) P with P the m -> -m parity, so the ground
    # state at -delta is the reversed coefficient vector
    return SpinState(state.basis, np.asarray(state.coeffs)[::-1].copy())


def _mixture_at_order(n_particles: int, lam: float, sigma_delta: float, order: int):
    half = (order + 1) // 2
    rule = split_gaussian_rule(half, sigma_delta)
    positive = rule.nodes[half:]
    pos_states = tuple(
        ground_state(ModelParams(n_particles, lam, delta))[1] for delta in positive
    )
    neg_states = tuple(_mirror(st) for st in reversed(pos_states))
    return StateEnsemble(neg_states + pos_states, rule.weights)


def _moments_close(a: Moments, b: Moments) -> bool:
    for va, vb in zip(
        (a.jx, a.jy, a.jz, a.jx2, a.jy2, a.jz2),
        (b.jx, b.jy, b.jz, b.jx2, b.jy2, b.jz2),
    ):
        if abs(va - vb) > CONVERGENCE_ATOL + CONVERGENCE_RTOL * abs(vb):
            return False
    return True


def delta_mixture(
    n_particles: int,
    lam: float,
    sigma_delta: float,
    order: int = DEFAULT_QUAD_ORDER,
    check: bool = True,
) -> StateEnsemble:
    """Mixture of tilted ground states under Gaussian delta fluctuations.

    Split-at-zero Gaussian quadrature of the given (odd) total order; only
    positive-tilt ground states are solved, the negative half follows from
    parity.  With ``check`` on, a node-doubling comparison guards the
    discretization: the order is doubled until every ensemble moment is
    stable to 1e-6 relative, and a mixture that is still drifting at the
    order cap raises ConvergenceError.
    """
    if sigma_delta < 0:
        raise ValueError("sigma_delta must be nonnegative")
    if order < 1 or order % 2 == 0:
        raise ValueError("quadrature order must be a positive odd integer")
    if sigma_delta == 0:
        _, gs = ground_state(ModelParams(n_particles, lam, 0.0))
        return StateEnsemble((gs,), np.array([1.0]))

    ens = _mixture_at_order(n_particles, lam, sigma_delta, order)
    if not check:
        return ens
    while True:
        doubled = 2 * order - 1
        ens_hi = _mixture_at_order(n_particles, lam, sigma_delta, doubled)
        if _moments_close(ensemble_moments(ens), ensemble_moments(ens_hi)):
            return ens_hi
        if doubled >= MAX_QUAD_ORDER:
            raise ConvergenceError(
                f"delta mixture not converged at quadrature order {doubled} "
                f"(lam={lam}, sigma_delta={sigma_delta})"
            )
        order, ens = doubled, ens_hi


def delta_thermal_mixture(
    n_particles: int,
    lam: float,
    sigma_delta: float,
    temperature: float,
    order: int = DEFAULT_QUAD_ORDER,
) -> StateEnsemble:
    """Composition of tilt fluctuations with a thermal state: a Boltzmann
    ensemble at every quadrature node.  This combined channel is an
    extension beyond the single-axis noise scans."""
    if sigma_delta == 0:
        return thermal_ensemble(ModelParams(n_particles, lam, 0.0), temperature)
    if temperature == 0:
        return delta_mixture(n_particles, lam, sigma_delta, order=order, check=False)
    half = (order + 1) // 2
    rule = split_gaussian_rule(half, sigma_delta)
    states = []
    weights = []
    for delta, w in zip(rule.nodes[half:], rule.weights[half:]):
        ens = thermal_ensemble(ModelParams(n_particles, lam, delta), temperature)
        # the spectrum at -delta is identical and its eigenstates are the
        # parity mirrors, so both tilt signs come from one diagonalization
        states.extend(ens.states)
        weights.append(w * np.asarray(ens.weights))
        states.extend(_mirror(st) for st in ens.states)
        weights.append(w * np.asarray(ens.weights))
    return StateEnsemble(tuple(states), np.concatenate(weights))


def blur_visibility(nu: float, k_fringe: float, sigma_detector: float) -> float:
    """Visibility after Gaussian detector blur: nu * exp(-k^2 s^2 / 2)."""
    if not 0.0 <= nu <= 1.0:
        raise ValueError("nu must lie in [0, 1]")
    return nu * math.exp(-0.5 * (k_fringe * sigma_detector) ** 2)


def witness_with_noise(xi2_thermal: float, nu_blurred: float) -> float:
    """Bell witness with thermal squeezing and blurred visibility; reduces
    to the noiseless witness at T = 0, sigma = 0."""
    return bell_witness(xi2_thermal, nu_blurred)
