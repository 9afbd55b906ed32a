"""Deterministic propagation and the classical reference dynamics.

Quantum propagation is second-order Strang splitting (half potential kick,
full kinetic drift in momentum space, half kick).  The classical reference
is leapfrog, which is symplectic, so quantum/classical comparisons are not
polluted by integrator drift.  The squared projective speed of a trajectory
equals the energy variance over hbar^2, which gives a dt-free handle on the
velocity/acceleration/spreading decomposition for Gaussian packets.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundaryContaminationWarning, ConfigurationError
from .geometry import GaussianParams
from .grids import Grid1D, WaveFunction

__all__ = [
    "PotentialSpec",
    "ClassicalState",
    "ParticleParams",
    "split_step_propagate",
    "fs_velocity_norm2",
    "decomposition_terms",
    "newton_trajectory",
    "ehrenfest_deviation",
]


@dataclass(frozen=True)
class PotentialSpec:
    """Time-independent potential: free, harmonic (k x^2 / 2), linear (-F x), or tabulated."""

    kind: str
    k: float = 0.0
    force: float = 0.0
    values: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in ("free", "harmonic", "linear", "tabulated"):
            raise ConfigurationError(f"unknown potential kind {self.kind!r}")
        if self.kind == "tabulated":
            if self.values is None:
                raise ConfigurationError("tabulated potential requires values")
            vals = np.asarray(self.values, dtype=float)
            if not np.all(np.isfinite(vals)):
                raise ConfigurationError("tabulated potential has non-finite entries")
            object.__setattr__(self, "values", vals)

    def on_grid(self, grid: Grid1D) -> np.ndarray:
        x = grid.x
        if self.kind == "free":
            return np.zeros_like(x)
        if self.kind == "harmonic":
            return 0.5 * self.k * x**2
        if self.kind == "linear":
            return -self.force * x
        if self.values.shape != (grid.n_points,):
            raise ConfigurationError("tabulated potential does not match the grid")
        return self.values

    def gradient_at(self, a: float, grid: Grid1D | None = None) -> float:
        if self.kind == "free":
            return 0.0
        if self.kind == "harmonic":
            return self.k * a
        if self.kind == "linear":
            return -self.force
        if grid is None:
            raise ConfigurationError("tabulated gradient needs the grid")
        # central finite difference on the table
        j = int(np.clip(round((a - grid.x_min) / grid.dx), 1, grid.n_points - 2))
        return float((self.values[j + 1] - self.values[j - 1]) / (2.0 * grid.dx))


@dataclass(frozen=True)
class ClassicalState:
    a: float
    p: float


@dataclass(frozen=True)
class ParticleParams:
    mass: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if not (self.mass > 0 and self.hbar > 0):
            raise ConfigurationError("mass and hbar must be positive")


def _check_boundary(amp: np.ndarray, dx: float):
    dens = np.abs(amp) ** 2 * dx
    edge = float(dens[:3].sum() + dens[-3:].sum())
    if edge > 1e-8:
        warnings.warn(
            f"probability mass {edge:.3e} within 3 cells of the grid edge",
            BoundaryContaminationWarning,
            stacklevel=3,
        )


def split_step_propagate(
    psi: WaveFunction,
    potential: PotentialSpec,
    params: ParticleParams,
    dt: float,
    n_steps: int,
) -> WaveFunction:
    """Strang-split evolution under h = p^2/2m + V(x) for n_steps of size dt."""
    grid = psi.grid
    v = potential.on_grid(grid)
    k = grid.wavenumbers
    half_kick = np.exp(-0.5j * dt * v / params.hbar)
    drift = np.exp(-0.5j * dt * params.hbar * k**2 / params.mass)
    amp = psi.amp.copy()
    for _ in range(n_steps):
        amp *= half_kick
        amp = np.fft.ifft(np.fft.fft(amp) * drift)
        amp *= half_kick
    _check_boundary(amp, grid.dx)
    return WaveFunction(grid, amp)


def _apply_h(psi: WaveFunction, potential: PotentialSpec, params: ParticleParams) -> np.ndarray:
    k = psi.grid.wavenumbers
    kin = np.fft.ifft((params.hbar**2 * k**2 / (2.0 * params.mass)) * np.fft.fft(psi.amp))
    return kin + potential.on_grid(psi.grid) * psi.amp


def fs_velocity_norm2(
    psi: WaveFunction, potential: PotentialSpec, params: ParticleParams
) -> float:
    """Squared projective speed of the Schrodinger trajectory through psi.

    Equals (<h psi, h psi> - <psi, h psi>^2) / hbar^2 for a unit state; the
    kinetic part of h is applied spectrally, the potential pointwise.
    """
    dx = psi.grid.dx
    hpsi = _apply_h(psi, potential, params)
    e1 = float(np.real(np.vdot(psi.amp, hpsi)) * dx)
    e2 = float(np.real(np.vdot(hpsi, hpsi)) * dx)
    return (e2 - e1**2) / params.hbar**2


def decomposition_terms(
    gp: GaussianParams,
    potential: PotentialSpec,
    params: ParticleParams,
    grid: Grid1D | None = None,
) -> tuple[float, float, float]:
    """Velocity, acceleration and spreading contributions to the squared speed.

    For a packet g_{a,sigma} e^{ipx/hbar}: v^2/(4 sigma^2) with v = p/m,
    m^2 w^2 sigma^2 / hbar^2 with w = -grad V / m, and hbar^2/(32 m^2 sigma^4).
    """
    m, hbar = params.mass, params.hbar
    v = gp.p / m
    w = -potential.gradient_at(gp.a, grid) / m
    velocity = v**2 / (4.0 * gp.sigma**2)
    acceleration = m**2 * w**2 * gp.sigma**2 / hbar**2
    spreading = hbar**2 / (32.0 * m**2 * gp.sigma**4)
    return velocity, acceleration, spreading


def newton_trajectory(
    c0: ClassicalState,
    potential: PotentialSpec,
    params: ParticleParams,
    dt: float,
    n_steps: int,
    grid: Grid1D | None = None,
) -> list[ClassicalState]:
    """Leapfrog integration of da/dt = p/m, dp/dt = -grad V(a)."""
    m = params.mass
    out = [c0]
    a, p = c0.a, c0.p
    # kick-drift-kick
    for _ in range(n_steps):
        p_half = p - 0.5 * dt * potential.gradient_at(a, grid)
        a = a + dt * p_half / m
        p = p_half - 0.5 * dt * potential.gradient_at(a, grid)
        out.append(ClassicalState(a, p))
    return out


def ehrenfest_deviation(
    gp: GaussianParams,
    potential: PotentialSpec,
    params: ParticleParams,
    grid: Grid1D,
    total_time: float,
    dt: float,
) -> float:
    """max_t |<x>_quantum(t) - a_classical(t)| from matched initial data."""
    from .geometry import gaussian_packet
    from .grids import position_moments

    n_steps = int(round(total_time / dt))
    psi = gaussian_packet(gp, grid, params.hbar)
    classical = newton_trajectory(
        ClassicalState(gp.a, gp.p), potential, params, dt, n_steps, grid
    )
    worst = 0.0
    for k in range(1, n_steps + 1):
        psi = split_step_propagate(psi, potential, params, dt, 1)
        mu, _ = position_moments(psi)
        worst = max(worst, abs(mu - classical[k].a))
    return worst
