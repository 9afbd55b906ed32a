"""Projective-space geometry of Gaussian packets and detector classes.

The angular distance between unit states, rho = arccos |<phi, psi>|, makes
packet families into Riemannian submanifolds of the projective space.  For
equal-width Gaussian packets the squared cosine of that distance factorizes
into Euclidean displacements of center and momentum, which is the identity
the ``metric_relation_residual`` diagnostic checks on the grid.

Detector classes are moment predicates: a state belongs to the class at c
when its position expectation sits within ``mu_tol`` of c and its spread
does not exceed the detector resolution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize

from .errors import ConfigurationError, DomainError
from .grids import Grid1D, WaveFunction, inner, normalize, position_moments

__all__ = [
    "GaussianParams",
    "EquivalenceClassSpec",
    "TauSChart",
    "ClassDistanceResult",
    "fs_distance",
    "gaussian_packet",
    "metric_relation_residual",
    "class_membership",
    "class_distance",
    "tau_s_state",
]

PADDING_SIGMAS = 6.0


@dataclass(frozen=True)
class GaussianParams:
    """Center, momentum and width of a Gaussian packet."""

    a: float
    p: float
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ConfigurationError("sigma must be positive")


@dataclass(frozen=True)
class EquivalenceClassSpec:
    """Detector cell: all states with mu_z within mu_tol of c and delta_z <= sigma."""

    c: float
    sigma: float
    mu_tol: float

    def __post_init__(self):
        if not (self.sigma > 0 and self.mu_tol > 0):
            raise ConfigurationError("sigma and mu_tol must be positive")


@dataclass(frozen=True)
class TauSChart:
    """A point of the translate/rescale surface generated by a base state.

    tau is the target position expectation; s shifts the log of the spread,
    so the chart state has moments (tau, delta_0 * exp(s)).
    """

    base_state: WaveFunction
    tau: float
    s: float


@dataclass(frozen=True)
class ClassDistanceResult:
    distance: float
    sigma_opt: float
    p_opt: float
    converged: bool


def fs_distance(phi: WaveFunction, psi: WaveFunction) -> float:
    """Angular distance arccos(|<phi,psi>|) between unit states, in [0, pi/2]."""
    ov = abs(inner(phi, psi))
    return float(np.arccos(np.clip(ov, 0.0, 1.0)))


def gaussian_packet(params: GaussianParams, grid: Grid1D, hbar: float = 1.0) -> WaveFunction:
    """Normalized Gaussian packet (2 pi sigma^2)^(-1/4) exp(-(x-a)^2/4 sigma^2) e^(i p x / hbar).

    Requires a +- 6 sigma of support inside the box (the padding rule used by
    every experiment default).
    """
    a, p, sig = params.a, params.p, params.sigma
    if not grid.contains(a - PADDING_SIGMAS * sig, a + PADDING_SIGMAS * sig):
        raise ConfigurationError(
            f"packet at a={a}, sigma={sig} violates the {PADDING_SIGMAS:.0f}-sigma padding rule "
            f"for grid [{grid.x_min}, {grid.x_max}]"
        )
    x = grid.x
    amp = (2.0 * np.pi * sig**2) ** (-0.25) * np.exp(-((x - a) ** 2) / (4.0 * sig**2))
    amp = amp.astype(np.complex128) * np.exp(1j * p * x / hbar)
    return normalize(WaveFunction(grid, amp))


def metric_relation_residual(
    pa: GaussianParams, pb: GaussianParams, grid: Grid1D, hbar: float = 1.0
) -> float:
    """|cos^2(rho_grid) - exp(-(a-b)^2/4 sigma^2 - (p-q)^2 sigma^2 / hbar^2)|.

    The relation holds for equal widths only; mismatched widths raise.
    """
    if abs(pa.sigma - pb.sigma) > 1e-12 * max(pa.sigma, pb.sigma):
        raise DomainError("the phase-space metric relation is stated for equal widths")
    phi = gaussian_packet(pa, grid, hbar)
    psi = gaussian_packet(pb, grid, hbar)
    rho = fs_distance(phi, psi)
    sig = pa.sigma
    closed = np.exp(
        -((pa.a - pb.a) ** 2) / (4.0 * sig**2) - ((pa.p - pb.p) ** 2) * sig**2 / hbar**2
    )
    return float(abs(np.cos(rho) ** 2 - closed))


def class_membership(psi: WaveFunction, cls: EquivalenceClassSpec) -> bool:
    """Moment predicate: |mu_z - c| <= mu_tol and delta_z <= sigma."""
    mu, delta = position_moments(psi)
    return bool(abs(mu - cls.c) <= cls.mu_tol and delta <= cls.sigma)


def class_distance(
    psi: WaveFunction, cls: EquivalenceClassSpec, hbar: float = 1.0
) -> ClassDistanceResult:
    """Approximate infimum distance from psi to the class at c.

    The search runs over the Gaussian-with-momentum slice of the class,
    g_{c, sigma'} e^{i p x / hbar} with sigma' in (0, sigma] and p free; the
    full class also contains non-Gaussian members, so this is an upper bound
    on the true infimum.  Non-convergence is reported, not raised; the best
    value found is returned either way.
    """
    grid = psi.grid
    sig_hi = cls.sigma
    sig_lo = max(2.0 * grid.dx, 1e-3 * cls.sigma)
    sig_lo = min(sig_lo, 0.5 * sig_hi)

    def objective(v: np.ndarray) -> float:
        sig = float(np.clip(v[0], sig_lo, sig_hi))
        chi = gaussian_packet(GaussianParams(cls.c, float(v[1]), sig), grid, hbar)
        return fs_distance(psi, chi)

    p_guess = 0.0
    best = None
    converged = False
    for sig0 in (sig_hi, 0.5 * (sig_lo + sig_hi)):
        res = minimize(
            objective,
            x0=np.array([sig0, p_guess]),
            method="Nelder-Mead",
            options={"xatol": 1e-6, "fatol": 1e-10, "maxiter": 400},
        )
        if best is None or res.fun < best.fun:
            best = res
        converged = converged or bool(res.success)
    sig_opt = float(np.clip(best.x[0], sig_lo, sig_hi))
    return ClassDistanceResult(float(best.fun), sig_opt, float(best.x[1]), converged)


def _affine_resample(base: WaveFunction, mu0: float, tau: float, s: float) -> WaveFunction:
    """psi(x) = e^{-s/2} base(mu0 + (x - tau) e^{-s}), cubic-spline resampled."""
    x = base.grid.x
    pts = mu0 + (x - tau) * np.exp(-s)
    re = CubicSpline(x, base.amp.real, extrapolate=False)(pts)
    im = CubicSpline(x, base.amp.imag, extrapolate=False)(pts)
    amp = np.where(np.isfinite(re), re, 0.0) + 1j * np.where(np.isfinite(im), im, 0.0)
    return normalize(WaveFunction(base.grid, np.exp(-s / 2.0) * amp))


def tau_s_state(chart: TauSChart) -> WaveFunction:
    """Translate and rescale the base state to moments (tau, delta_0 e^s).

    Resamples on the base grid; a single corrective pass removes the
    interpolation bias so the moments land within ~1e-8 of the target.
    Raises when the rescaled support no longer fits the grid.
    """
    base = chart.base_state
    mu0, d0 = position_moments(base)
    target_mu = chart.tau
    target_delta = d0 * np.exp(chart.s)

    psi = _affine_resample(base, mu0, chart.tau, chart.s)
    mu1, d1 = position_moments(psi)
    if d1 <= 0:
        raise ConfigurationError("rescaled state collapsed below grid resolution")
    # corrective pass against interpolation/truncation bias
    tau2 = chart.tau - (mu1 - target_mu)
    s2 = chart.s - np.log(d1 / target_delta)
    psi = _affine_resample(base, mu0, tau2, s2)
    mu2, d2 = position_moments(psi)
    if abs(mu2 - target_mu) > 1e-4 * max(1.0, abs(target_mu)) or abs(d2 - target_delta) > 1e-4 * target_delta:
        raise ConfigurationError(
            "translated/rescaled support exceeds the grid "
            f"(requested mu={target_mu:.4g}, delta={target_delta:.4g}; "
            f"achieved mu={mu2:.4g}, delta={d2:.4g})"
        )
    return psi
