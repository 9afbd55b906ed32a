"""Shared experiment machinery: detector lattices, records, Born targets."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError, DegenerateTargetError
from ..geometry import PADDING_SIGMAS, EquivalenceClassSpec, GaussianParams, gaussian_packet
from ..grids import Grid1D, WaveFunction, inner

__all__ = [
    "ClassLattice",
    "TrialOutcome",
    "ExperimentRecord",
    "born_targets",
    "total_variation",
    "empirical_distribution",
    "NOTE_REGISTERED_WALK",
    "NOTE_CLASS_SLICE",
]

NOTE_REGISTERED_WALK = (
    "measurement walk runs at the detector-registered level: unitary random-matrix kicks enter "
    "through the calibrated increment law of the class coordinates, each registration restarting "
    "from the recorded representative; degrees of freedom beyond the class chart are absorbed"
)
NOTE_CLASS_SLICE = (
    "equivalence-class geometry is evaluated on the Gaussian-with-momentum slice of each class"
)


@dataclass(frozen=True)
class ClassLattice:
    """Arithmetic detector lattice c_k = c0 + k * spacing with common resolution."""

    centers: np.ndarray
    sigma: float
    mu_tol: float

    def __post_init__(self):
        centers = np.sort(np.asarray(self.centers, dtype=float))
        if centers.size < 1:
            raise ConfigurationError("lattice needs at least one center")
        if centers.size > 1:
            gaps = np.diff(centers)
            if not np.allclose(gaps, gaps[0], rtol=1e-9, atol=1e-12):
                raise ConfigurationError("lattice centers must be an arithmetic sequence")
            if not gaps[0] > 0:
                raise ConfigurationError("lattice spacing must be positive")
        if not (self.sigma > 0 and self.mu_tol > 0):
            raise ConfigurationError("sigma and mu_tol must be positive")
        object.__setattr__(self, "centers", centers)

    @property
    def spacing(self) -> float:
        return float(self.centers[1] - self.centers[0]) if self.centers.size > 1 else 0.0

    def cls(self, k: int) -> EquivalenceClassSpec:
        return EquivalenceClassSpec(float(self.centers[k]), self.sigma, self.mu_tol)

    def coverage(self, grid: Grid1D) -> float:
        """Fraction of the padded grid interior covered by the lattice span."""
        interior = grid.length - 2.0 * PADDING_SIGMAS * self.sigma
        if interior <= 0:
            return 0.0
        span = float(self.centers[-1] - self.centers[0]) + self.spacing
        return min(span / interior, 1.0)

    @classmethod
    def regular(
        cls, grid: Grid1D, sigma: float, spacing: float, mu_tol: float, center: float = 0.0
    ) -> "ClassLattice":
        """Maximal symmetric lattice whose packets respect the padding rule."""
        lo = grid.x_min + PADDING_SIGMAS * sigma
        hi = grid.x_max - PADDING_SIGMAS * sigma
        if hi <= lo:
            raise ConfigurationError("grid too small for this detector resolution")
        k_lo = int(np.ceil((lo - center) / spacing))
        k_hi = int(np.floor((hi - center) / spacing))
        if k_hi < k_lo:
            raise ConfigurationError("no lattice center fits the padded interior")
        centers = center + spacing * np.arange(k_lo, k_hi + 1)
        return cls(centers, sigma, mu_tol)


@dataclass(frozen=True)
class TrialOutcome:
    hit_center: float | None
    steps_to_hit: int
    delta_z_at_hit: float


@dataclass
class ExperimentRecord:
    """Everything one experiment run produced.

    ``table`` holds the per-trial columns written to trials.csv (in order);
    ``summary`` the named scalars; ``series`` the vector data plots consume;
    ``notes`` the approximations in force when the run was made.
    """

    kind: str
    config: dict
    master_seed: int
    trials: int
    table: dict[str, np.ndarray] = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    series: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def born_targets(
    psi0: WaveFunction, lattice: ClassLattice, hbar: float = 1.0
) -> np.ndarray:
    """Outcome probabilities p_k proportional to |<g_{c_k, sigma}, psi0>|^2.

    Representatives carry zero momentum; the position detector cannot see
    momentum, so the class representative choice is momentum-free.
    """
    raw = np.empty(lattice.centers.size)
    for k, c in enumerate(lattice.centers):
        g = gaussian_packet(GaussianParams(float(c), 0.0, lattice.sigma), psi0.grid, hbar)
        raw[k] = abs(inner(g, psi0)) ** 2
    if np.all(raw < 1e-12):
        raise DegenerateTargetError("state has no overlap with any detector class")
    return raw / raw.sum()


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return float(0.5 * np.sum(np.abs(np.asarray(p) - np.asarray(q))))


def empirical_distribution(hits: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Frequencies of hit centers over the lattice, among trials that hit."""
    got = hits[~np.isnan(hits)]
    if got.size == 0:
        return np.zeros(len(centers))
    counts = np.array([np.sum(np.isclose(got, c)) for c in centers], dtype=float)
    return counts / got.size
