"""Discretized one-dimensional Hilbert space.

Wave functions live on uniform periodic grids with a power-of-two number of
points, so momentum-space operations go through the FFT.  All quadrature is
midpoint quadrature on grid values: ``sum(f) * dx``.  Two-particle states are
tensor products stored as dense (n_a, n_b) amplitude arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DegenerateStateError

__all__ = [
    "Grid1D",
    "WaveFunction",
    "WaveFunction2",
    "inner",
    "norm",
    "normalize",
    "position_moments",
    "momentum_expectation",
    "tensor",
    "marginal",
]


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid1D:
    """Uniform spatial grid x_j = x_min + j*dx, j = 0..n_points-1."""

    n_points: int
    x_min: float
    x_max: float

    def __post_init__(self):
        if not _is_power_of_two(self.n_points):
            raise ConfigurationError(f"n_points must be a power of two, got {self.n_points}")
        if not self.x_max > self.x_min:
            raise ConfigurationError("x_max must exceed x_min")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    @property
    def wavenumbers(self) -> np.ndarray:
        """FFT-ordered wavenumbers in [-pi/dx, pi/dx)."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, self.dx)

    def contains(self, lo: float, hi: float) -> bool:
        return lo >= self.x_min and hi <= self.x_max


@dataclass(frozen=True)
class WaveFunction:
    """Complex amplitudes on a Grid1D."""

    grid: Grid1D
    amp: np.ndarray = field(repr=False)

    def __post_init__(self):
        amp = np.asarray(self.amp, dtype=np.complex128)
        if amp.shape != (self.grid.n_points,):
            raise ConfigurationError(
                f"amplitude shape {amp.shape} does not match grid ({self.grid.n_points},)"
            )
        if not np.all(np.isfinite(amp.view(np.float64))):
            raise DegenerateStateError("non-finite amplitudes")
        object.__setattr__(self, "amp", amp)

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.amp) ** 2


@dataclass(frozen=True)
class WaveFunction2:
    """Two-particle amplitudes on the product of two grids."""

    grid_a: Grid1D
    grid_b: Grid1D
    amp: np.ndarray = field(repr=False)

    def __post_init__(self):
        amp = np.asarray(self.amp, dtype=np.complex128)
        if amp.shape != (self.grid_a.n_points, self.grid_b.n_points):
            raise ConfigurationError("amplitude shape does not match the product grid")
        if not np.all(np.isfinite(amp.view(np.float64))):
            raise DegenerateStateError("non-finite amplitudes")
        object.__setattr__(self, "amp", amp)


def inner(phi: WaveFunction, psi: WaveFunction) -> complex:
    """L2 pairing <phi, psi> = sum conj(phi_j) psi_j dx.  Grids must match."""
    if phi.grid != psi.grid:
        raise ConfigurationError("inner product requires matching grids")
    return complex(np.vdot(phi.amp, psi.amp) * phi.grid.dx)


def norm(psi: WaveFunction) -> float:
    return float(np.sqrt(np.sum(psi.density) * psi.grid.dx))


def normalize(psi: WaveFunction) -> WaveFunction:
    """Rescale to unit L2 norm; the projective point (including phase) is unchanged."""
    n = norm(psi)
    if n < 1e-300:
        raise DegenerateStateError("cannot normalize a zero vector")
    return WaveFunction(psi.grid, psi.amp / n)


def position_moments(psi: WaveFunction) -> tuple[float, float]:
    """Position expectation mu_z and spread delta_z of a normalized state."""
    x = psi.grid.x
    w = psi.density * psi.grid.dx
    mu = float(np.sum(x * w))
    var = float(np.sum((x - mu) ** 2 * w))
    return mu, float(np.sqrt(max(var, 0.0)))


def momentum_expectation(psi: WaveFunction, hbar: float = 1.0) -> float:
    """<p> in the discrete Fourier representation."""
    ft = np.fft.fft(psi.amp)
    w = np.abs(ft) ** 2
    total = np.sum(w)
    if total == 0.0:
        raise DegenerateStateError("zero state")
    return float(hbar * np.sum(psi.grid.wavenumbers * w) / total)


def tensor(phi: WaveFunction, psi: WaveFunction) -> WaveFunction2:
    """Product state amp[j, k] = phi_j psi_k."""
    return WaveFunction2(phi.grid, psi.grid, np.outer(phi.amp, psi.amp))


def marginal(state: WaveFunction2, axis: str) -> np.ndarray:
    """Position density of one factor, integrating out the other.

    axis="first" returns the density on grid_a, axis="second" on grid_b.
    The result is nonnegative and integrates to one under the retained dx.
    """
    dens = np.abs(state.amp) ** 2
    if axis == "first":
        return dens.sum(axis=1) * state.grid_b.dx
    if axis == "second":
        return dens.sum(axis=0) * state.grid_a.dx
    raise ValueError("axis must be 'first' or 'second'")


def joint_position_moments(state: WaveFunction2) -> dict:
    """Per-axis moments and the cross covariance of a two-particle state."""
    dens = np.abs(state.amp) ** 2 * state.grid_a.dx * state.grid_b.dx
    xa = state.grid_a.x
    xb = state.grid_b.x
    pa = dens.sum(axis=1)
    pb = dens.sum(axis=0)
    mua = float(np.sum(xa * pa))
    mub = float(np.sum(xb * pb))
    vara = float(np.sum((xa - mua) ** 2 * pa))
    varb = float(np.sum((xb - mub) ** 2 * pb))
    cov = float(np.einsum("a,b,ab->", xa - mua, xb - mub, dens))
    return {
        "mu_a": mua,
        "mu_b": mub,
        "delta_a": float(np.sqrt(max(vara, 0.0))),
        "delta_b": float(np.sqrt(max(varb, 0.0))),
        "cov_ab": cov,
    }
