"""Random Hamiltonians and exactly-unitary stochastic steps.

The ensemble convention: independent entries with E|H_jk|^2 = scale^2 for
every j, k (real N(0, scale^2) on the diagonal, complex with independent
N(0, scale^2/2) parts off it).  A walk step is psi -> exp(-i H dt / hbar) psi
with a fresh draw per step; the propagator is applied through the full
eigendecomposition by default, or through a Lanczos (Krylov) expansion when
only one vector is needed and the dimension makes O(n^3) per step wasteful.

Calibration ties the abstract ensemble scale to a detector-space step size:
the RMS displacement of the position expectation per step, measured from a
reference Gaussian of width sigma, is matched to the requested dz by
bisection.  That RMS is dimension-independent (it depends on the state's
position spread only), which the test suite checks across dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats

from .errors import CalibrationError, ConfigurationError
from .grids import Grid1D, WaveFunction, position_moments
from .geometry import GaussianParams, gaussian_packet

__all__ = [
    "GUEConfig",
    "WalkConfig",
    "WalkState",
    "WalkResult",
    "sample_gue",
    "unitary_step",
    "step_overlap",
    "run_walk",
    "isotropy_statistic",
    "calibrate_scale",
    "registered_step_rms",
]


@dataclass(frozen=True)
class GUEConfig:
    dim: int
    scale: float
    seed: int = 0

    def __post_init__(self):
        if self.dim < 2:
            raise ConfigurationError("dim must be at least 2")
        if not self.scale > 0:
            raise ConfigurationError("scale must be positive")


@dataclass(frozen=True)
class WalkConfig:
    dt: float
    dz: float
    max_steps: int
    hbar: float = 1.0

    def __post_init__(self):
        if not (self.dt > 0 and self.dz > 0 and self.max_steps >= 1):
            raise ConfigurationError("dt, dz must be positive and max_steps >= 1")

    @property
    def diffusion(self) -> float:
        """D = dz^2 / dt."""
        return self.dz**2 / self.dt


@dataclass
class WalkState:
    psi: WaveFunction
    step_count: int
    rng: np.random.Generator


@dataclass
class WalkResult:
    hit: bool
    final_state: WaveFunction
    steps_used: int
    trace: list[tuple[float, float]] | None = None
    renormalizations: int = 0


def sample_gue(cfg: GUEConfig, rng: np.random.Generator) -> np.ndarray:
    """One Hermitian draw; exactly Hermitian by construction."""
    n = cfg.dim
    z = rng.standard_normal((2, n, n))
    upper = np.triu((z[0] + 1j * z[1]) / np.sqrt(2.0), k=1)
    h = upper + upper.conj().T
    h[np.diag_indices(n)] = z[0].diagonal()
    return cfg.scale * h


def unitary_step(
    psi: np.ndarray, h: np.ndarray, dt: float, hbar: float = 1.0, method: str = "eigh"
) -> np.ndarray:
    """psi' = exp(-i h dt / hbar) psi.

    method="eigh" uses the full eigendecomposition (exact); "krylov" uses a
    reorthogonalized Lanczos expansion, exact to machine precision for the
    step angles used here and much cheaper for large dimensions.
    """
    if h.shape[0] != h.shape[1] or h.shape[0] != psi.shape[0]:
        raise ConfigurationError("Hamiltonian/state dimension mismatch")
    if method == "eigh":
        try:
            w, v = np.linalg.eigh(h)
        except np.linalg.LinAlgError as exc:
            raise ConfigurationError(f"eigendecomposition failed: {exc}") from exc
        return v @ (np.exp(-1j * w * dt / hbar) * (v.conj().T @ psi))
    if method == "krylov":
        return _lanczos_expm(h, psi, dt / hbar)
    raise ConfigurationError(f"unknown propagator method {method!r}")


def _lanczos_tridiag(h: np.ndarray, v0: np.ndarray, m: int):
    n = v0.shape[0]
    m = min(m, n)
    basis = np.zeros((m, n), dtype=np.complex128)
    alpha = np.zeros(m)
    beta = np.zeros(max(m - 1, 0))
    nrm = np.linalg.norm(v0)
    basis[0] = v0 / nrm
    w = h @ basis[0]
    alpha[0] = np.vdot(basis[0], w).real
    w = w - alpha[0] * basis[0]
    k = 1
    for j in range(1, m):
        b = np.linalg.norm(w)
        if b < 1e-13:
            break
        beta[j - 1] = b
        basis[j] = w / b
        w = h @ basis[j] - b * basis[j - 1]
        alpha[j] = np.vdot(basis[j], w).real
        w = w - alpha[j] * basis[j]
        # full reorthogonalization keeps the expansion unitary
        w = w - basis[: j + 1].T @ (basis[: j + 1].conj() @ w)
        k = j + 1
    return basis[:k], alpha[:k], beta[: k - 1], nrm


def _lanczos_expm(h: np.ndarray, psi: np.ndarray, t: float, m: int = 24) -> np.ndarray:
    basis, alpha, beta, nrm = _lanczos_tridiag(h, psi, m)
    tri = np.diag(alpha) + np.diag(beta, 1) + np.diag(beta, -1)
    w, v = np.linalg.eigh(tri)
    coeff = v @ (np.exp(-1j * w * t) * v[0].conj())
    return nrm * (basis.T @ coeff)


def step_overlap(h: np.ndarray, psi: np.ndarray, dt: float, hbar: float = 1.0, m: int = 24) -> complex:
    """<psi, exp(-i h dt/hbar) psi> for a unit psi, via the Lanczos tridiagonal."""
    _, alpha, beta, _ = _lanczos_tridiag(h, psi, m)
    tri = np.diag(alpha) + np.diag(beta, 1) + np.diag(beta, -1)
    w, v = np.linalg.eigh(tri)
    return complex(np.sum(np.abs(v[0]) ** 2 * np.exp(-1j * w * dt / hbar)))


def run_walk(
    psi0: WaveFunction,
    walk_cfg: WalkConfig,
    gue_cfg: GUEConfig,
    stop: Callable[[WaveFunction], bool],
    rng: np.random.Generator | None = None,
    record_trace: bool = False,
    method: str = "eigh",
) -> WalkResult:
    """Iterate fresh-draw unitary steps until stop(state) or max_steps.

    The stop predicate is evaluated before the first step (a state already
    inside its target counts as a hit at step zero) and after every step.
    Norm drift beyond 1e-12 triggers renormalization, which is counted.
    """
    if gue_cfg.dim != psi0.grid.n_points:
        raise ConfigurationError("GUE dimension must match the state dimension")
    rng = rng if rng is not None else np.random.default_rng(gue_cfg.seed)
    amp = psi0.amp.copy()
    grid = psi0.grid
    sqdx = np.sqrt(grid.dx)
    renorms = 0
    trace: list[tuple[float, float]] | None = [] if record_trace else None

    def as_wf(a: np.ndarray) -> WaveFunction:
        return WaveFunction(grid, a)

    state = as_wf(amp)
    if record_trace:
        trace.append(position_moments(state))
    if stop(state):
        return WalkResult(True, state, 0, trace, renorms)
    for step in range(1, walk_cfg.max_steps + 1):
        h = sample_gue(gue_cfg, rng)
        vec = amp * sqdx
        vec = unitary_step(vec, h, walk_cfg.dt, walk_cfg.hbar, method=method)
        nrm = np.linalg.norm(vec)
        if abs(nrm - 1.0) > 1e-12:
            vec = vec / nrm
            renorms += 1
        amp = vec / sqdx
        state = as_wf(amp)
        if record_trace:
            trace.append(position_moments(state))
        if stop(state):
            return WalkResult(True, state, step, trace, renorms)
    return WalkResult(False, state, walk_cfg.max_steps, trace, renorms)


def _fs_step_samples(
    psi: np.ndarray, gue_cfg: GUEConfig, dt: float, hbar: float, trials: int, rng: np.random.Generator
) -> np.ndarray:
    out = np.empty(trials)
    for i in range(trials):
        h = sample_gue(gue_cfg, rng)
        ov = abs(step_overlap(h, psi, dt, hbar))
        out[i] = np.arccos(min(ov, 1.0))
    return out


def isotropy_statistic(
    psi_a: WaveFunction,
    psi_b: WaveFunction,
    walk_cfg: WalkConfig,
    gue_cfg: GUEConfig,
    trials: int,
    rng: np.random.Generator | None = None,
) -> float:
    """Two-sample KS statistic between single-step displacement distributions."""
    if psi_a.grid.n_points != psi_b.grid.n_points:
        raise ConfigurationError("states must share a dimension")
    rng = rng if rng is not None else np.random.default_rng(gue_cfg.seed)
    sqdx = np.sqrt(psi_a.grid.dx)
    da = _fs_step_samples(psi_a.amp * sqdx, gue_cfg, walk_cfg.dt, walk_cfg.hbar, trials, rng)
    db = _fs_step_samples(psi_b.amp * sqdx, gue_cfg, walk_cfg.dt, walk_cfg.hbar, trials, rng)
    return float(stats.ks_2samp(da, db).statistic)


def _reference_grid(dim: int, sigma: float) -> Grid1D:
    # wide enough that the saturated registered step exceeds any dz a
    # detector of this resolution can meaningfully request
    return Grid1D(dim, -12.0 * sigma, 12.0 * sigma)


def registered_step_rms(
    scale: float,
    dim: int,
    dt: float,
    sigma: float,
    hbar: float,
    trials: int,
    rng: np.random.Generator,
) -> float:
    """Fresh-draw RMS of the per-step position-expectation displacement.

    Measured from the width-sigma reference Gaussian; used by the test suite
    to cross-check calibration self-consistency.
    """
    grid = _reference_grid(dim, sigma)
    psi = gaussian_packet(GaussianParams(0.0, 0.0, sigma), grid, hbar)
    vec = psi.amp * np.sqrt(grid.dx)
    mu0, _ = position_moments(psi)
    cfg = GUEConfig(dim, scale, 0)
    x = grid.x
    sq = np.empty(trials)
    for i in range(trials):
        h = sample_gue(cfg, rng)
        out = unitary_step(vec, h, dt, hbar, method="eigh")
        dens = np.abs(out) ** 2
        dens /= dens.sum()
        sq[i] = (float(np.sum(x * dens)) - mu0) ** 2
    return float(np.sqrt(sq.mean()))


def calibrate_scale(
    dim: int,
    dt: float,
    dz: float,
    sigma: float,
    hbar: float = 1.0,
    trials: int = 200,
    rng: np.random.Generator | None = None,
    rel_tol: float = 1e-3,
) -> float:
    """Find the ensemble scale whose registered step size equals dz.

    The per-step displacement of mu_z from the reference Gaussian is measured
    over a frozen batch of unit-scale draws (their eigendecompositions are
    reused across scales, so the bisection objective is smooth and exactly
    deterministic).  Raises CalibrationError when dz exceeds the saturated
    displacement reachable by the ensemble on this grid.
    """
    if trials < 100:
        raise ConfigurationError("calibration needs at least 100 trials")
    rng = rng if rng is not None else np.random.default_rng(0)
    grid = _reference_grid(dim, sigma)
    psi = gaussian_packet(GaussianParams(0.0, 0.0, sigma), grid, hbar)
    vec = psi.amp * np.sqrt(grid.dx)
    mu0, _ = position_moments(psi)
    x = grid.x

    unit = GUEConfig(dim, 1.0, 0)
    eigs = []
    for _ in range(trials):
        h = sample_gue(unit, rng)
        w, v = np.linalg.eigh(h)
        eigs.append((w, v.conj().T @ vec, v))

    def rms_at(scale: float) -> float:
        sq = 0.0
        for w, coef, v in eigs:
            out = v @ (np.exp(-1j * w * scale * dt / hbar) * coef)
            dens = np.abs(out) ** 2
            dens /= dens.sum()
            sq += (float(np.sum(x * dens)) - mu0) ** 2
        return float(np.sqrt(sq / trials))

    lo, hi = 0.0, dz / (np.sqrt(2.0) * dt * sigma / hbar)  # first-order guess
    expansions = 0
    while rms_at(hi) < dz:
        hi *= 2.0
        expansions += 1
        if expansions > 24:
            raise CalibrationError(
                f"cannot reach dz={dz} from a width-{sigma} reference on dim {dim}: "
                f"saturated RMS {rms_at(hi):.4g}"
            )
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if rms_at(mid) < dz:
            lo = mid
        else:
            hi = mid
        if hi - lo <= rel_tol * hi:
            break
    return 0.5 * (lo + hi)
