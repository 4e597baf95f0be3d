"""Monte-Carlo bench for the interference experiment.

Each simulated shot draws a fringe phase (the quantum shot-to-shot
fluctuation, normal with variance xi^2/N), samples atom positions from the
one-body density 1 + nu cos(kx + phase) by rejection, bins them, and fits
the phase back by least squares.  The sample variance of the fitted phase
over many shots is compared against the closed-form sensitivity prediction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .witnesses import sensitivity

__all__ = [
    "FringeParams",
    "FitResult",
    "SensitivityResult",
    "FitError",
    "density",
    "sample_shot",
    "draw_shot_phase",
    "fit_phase",
    "verify_sensitivity",
]

TWO_PI = 2.0 * math.pi

MIN_FIT_POSITIONS = 100
GN_MAX_ITER = 200
GN_STEP_TOL = 1e-12
N_FIT_STARTS = 8


class FitError(RuntimeError):
    """Least-squares fit failed to converge from every starting point."""


@dataclass(frozen=True)
class FringeParams:
    nu: float
    phi: float
    k: float
    n_atoms: int
    n_periods: int = 8

    def __post_init__(self):
        if not 0.0 <= self.nu <= 1.0:
            raise ValueError("nu must lie in [0, 1]")
        if self.n_atoms < 1:
            raise ValueError("n_atoms must be >= 1")
        if self.n_periods < 1:
            raise ValueError("n_periods must be >= 1")
        if self.k <= 0:
            raise ValueError("k must be positive")

    @property
    def window(self) -> float:
        return self.n_periods * TWO_PI / self.k


@dataclass(frozen=True)
class FitResult:
    phi_est: float
    nu_fit: float
    residual: float


@dataclass(frozen=True)
class SensitivityResult:
    empirical_variance: float
    predicted_variance: float
    mean_deviation: float
    std_error: float
    n_shots: int
    n_failed: int


def density(x, nu: float, phi: float, k: float):
    """One-body fringe density 1 + nu cos(kx + phi) (mean 1 per period)."""
    if not 0.0 <= nu <= 1.0:
        raise ValueError("nu must lie in [0, 1]")
    return 1.0 + nu * np.cos(k * np.asarray(x) + phi)


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _rejection_sample(params: FringeParams, shot_phase: float, rng):
    """Rejection sampling with the flat envelope 1 + nu; returns the
    accepted positions (in draw order) and the number of proposals used."""
    window = params.window
    envelope = 1.0 + params.nu
    out = np.empty(params.n_atoms)
    filled = 0
    proposed = 0
    # batch size chosen so one or two rounds usually suffice
    batch = max(64, int(1.3 * envelope * params.n_atoms))
    while filled < params.n_atoms:
        x = rng.uniform(0.0, window, batch)
        u = rng.uniform(0.0, envelope, batch)
        accepted = x[u < density(x, params.nu, shot_phase, params.k)]
        proposed += batch
        take = min(len(accepted), params.n_atoms - filled)
        out[filled : filled + take] = accepted[:take]
        filled += take
    return out, proposed


def sample_shot(params: FringeParams, shot_phase: float, rng_seed) -> np.ndarray:
    """Atom positions of one shot, i.i.d. draws from the fringe density.

    Deterministic for a given seed (or Generator) and parameter set.
    """
    positions, _ = _rejection_sample(params, shot_phase, _as_rng(rng_seed))
    return positions


def draw_shot_phase(phi: float, xi2: float, n_atoms: int, rng_seed) -> float:
    """True phase plus the quantum fluctuation, normal with variance
    xi^2 / n_atoms."""
    if xi2 < 0:
        raise ValueError("xi2 must be >= 0")
    if xi2 == 0:
        return phi
    return phi + _as_rng(rng_seed).normal(0.0, math.sqrt(xi2 / n_atoms))


def _bin_positions(positions: np.ndarray, k: float, window: float):
    n_periods = int(round(window * k / TWO_PI))
    bins_per_period = math.ceil(math.sqrt(len(positions)))
    n_bins = n_periods * bins_per_period
    counts, edges = np.histogram(positions, bins=n_bins, range=(0.0, window))
    centers = 0.5 * (edges[:-1] + edges[1:])
    # normalize to mean 1 so the histogram matches the model background
    h = counts * (n_bins / len(positions))
    return centers, h


def wrap_phase(phi):
    """Wrap to (-pi, pi]."""
    w = -((-np.asarray(phi) + math.pi) % TWO_PI - math.pi)
    return float(w) if np.ndim(phi) == 0 else w


def fit_phase(
    positions: np.ndarray,
    k: float,
    window: float,
    fit_visibility: bool = True,
    nu_fixed: float = None,
) -> FitResult:
    """Least-squares fit of 1 + nu cos(kx + phi) to the binned histogram.

    Gauss-Newton from 8 equispaced phase starting points; the start with the
    smallest residual wins.  With ``fit_visibility`` off the contrast is held
    at ``nu_fixed`` and only the phase is adjusted.
    """
    positions = np.asarray(positions)
    if len(positions) < MIN_FIT_POSITIONS:
        raise ValueError(f"need at least {MIN_FIT_POSITIONS} positions to fit")
    centers, h = _bin_positions(positions, k, window)
    kx = k * centers

    phi = TWO_PI * np.arange(N_FIT_STARTS) / N_FIT_STARTS
    if fit_visibility:
        nu = np.full(N_FIT_STARTS, 0.5)
    else:
        if nu_fixed is None:
            raise ValueError("nu_fixed required when fit_visibility is off")
        nu = np.full(N_FIT_STARTS, float(nu_fixed))
    active = np.ones(N_FIT_STARTS, dtype=bool)

    for _ in range(GN_MAX_ITER):
        arg = kx[None, :] + phi[:, None]
        cos_arg = np.cos(arg)
        sin_arg = np.sin(arg)
        r = 1.0 + nu[:, None] * cos_arg - h[None, :]
        j_phi = -nu[:, None] * sin_arg
        a22 = (j_phi * j_phi).sum(axis=1)
        b2 = -(j_phi * r).sum(axis=1)
        if fit_visibility:
            a11 = (cos_arg * cos_arg).sum(axis=1)
            a12 = (cos_arg * j_phi).sum(axis=1)
            b1 = -(cos_arg * r).sum(axis=1)
            det = a11 * a22 - a12 * a12
            ok = active & (np.abs(det) > 1e-30)
            d_nu = np.where(ok, (a22 * b1 - a12 * b2) / np.where(ok, det, 1.0), 0.0)
            d_phi = np.where(ok, (a11 * b2 - a12 * b1) / np.where(ok, det, 1.0), 0.0)
        else:
            ok = active & (a22 > 1e-30)
            d_nu = np.zeros(N_FIT_STARTS)
            d_phi = np.where(ok, b2 / np.where(ok, a22, 1.0), 0.0)
        nu = nu + d_nu
        phi = phi + d_phi
        step = np.maximum(np.abs(d_nu), np.abs(d_phi))
        active = ok & (step > GN_STEP_TOL)
        if not active.any():
            break

    arg = kx[None, :] + phi[:, None]
    r = 1.0 + nu[:, None] * np.cos(arg) - h[None, :]
    sse = (r * r).sum(axis=1)
    sse = np.where(np.isfinite(sse) & np.isfinite(phi) & np.isfinite(nu), sse, np.inf)
    best = int(np.argmin(sse))
    if not np.isfinite(sse[best]):
        raise FitError("Gauss-Newton diverged from all starting points")

    best_nu, best_phi = float(nu[best]), float(phi[best])
    if best_nu < 0:  # sign ambiguity: (-nu, phi) == (nu, phi + pi)
        best_nu, best_phi = -best_nu, best_phi + math.pi
    return FitResult(
        phi_est=wrap_phase(best_phi),
        nu_fit=best_nu,
        residual=float(sse[best]),
    )


def verify_sensitivity(
    params: FringeParams,
    xi2: float,
    n_shots: int,
    rng_seed,
    fit_visibility: bool = True,
) -> SensitivityResult:
    """Run the full bench and compare the empirical phase variance with the
    closed-form prediction (xi^2 + sqrt(1-nu^2)/nu^2) / N.

    Shots use independent child seeds derived from the master seed, so runs
    are reproducible and order-independent.
    """
    if not 0.2 < params.nu < 0.98:
        raise ValueError("nu outside the fit-regime guard (0.2, 0.98)")
    if n_shots < 1000:
        raise ValueError("need at least 1000 shots")

    children = np.random.SeedSequence(rng_seed).spawn(n_shots)
    deviations = []
    n_failed = 0
    for child in children:
        rng = np.random.default_rng(child)
        shot_phase = draw_shot_phase(params.phi, xi2, params.n_atoms, rng)
        positions = sample_shot(params, shot_phase, rng)
        try:
            fit = fit_phase(
                positions,
                params.k,
                params.window,
                fit_visibility=fit_visibility,
                nu_fixed=None if fit_visibility else params.nu,
            )
        except FitError:
            n_failed += 1
            if n_failed > 0.01 * n_shots:
                raise RuntimeError("more than 1% of shots failed to fit")
            continue
        deviations.append(wrap_phase(fit.phi_est - params.phi))

    dev = np.asarray(deviations)
    empirical = float(np.var(dev, ddof=1))
    predicted = sensitivity(xi2, params.nu, params.n_atoms)
    return SensitivityResult(
        empirical_variance=empirical,
        predicted_variance=predicted,
        mean_deviation=float(dev.mean()),
        std_error=float(dev.std(ddof=1) / math.sqrt(len(dev))),
        n_shots=n_shots,
        n_failed=n_failed,
    )
