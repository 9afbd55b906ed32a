"""Monitoring-frequency sweep: survival in a detector class under full-space kicks."""

from __future__ import annotations

import numpy as np

from ..geometry import EquivalenceClassSpec, GaussianParams, gaussian_packet
from ..grids import Grid1D
from ..gue import GUEConfig, sample_gue, unitary_step
from ..seeding import trial_rng
from .base import ExperimentRecord

__all__ = ["run_zeno", "zeno_survival_one"]

NOTE_FULLSPACE = (
    "survival runs use the full-dimensional unitary walk; each registration restarts the state "
    "from an interior representative of the class (width rep_width < sigma)"
)


def zeno_survival_one(
    args: tuple,
) -> tuple[int, float, int]:
    """One trial: (kick index, dt, trial) -> (row id, survived, n_registrations)."""
    (row, dt, trial_seed_pair, cls, grid, gue_dim, scale, hbar, horizon, rep_width) = args
    master_seed, trial = trial_seed_pair
    rng = trial_rng(master_seed, trial)
    gue_cfg = GUEConfig(gue_dim, scale, 0)
    sqdx = np.sqrt(grid.dx)
    psi = gaussian_packet(GaussianParams(cls.c, 0.0, rep_width), grid, hbar)
    vec = psi.amp * sqdx
    x = grid.x
    n_steps = int(round(horizon / dt))
    registrations = 0
    for _ in range(n_steps):
        h = sample_gue(gue_cfg, rng)
        vec = unitary_step(vec, h, dt, hbar, method="eigh")
        dens = np.abs(vec) ** 2
        dens = dens / dens.sum()
        mu = float(np.sum(x * dens))
        delta = float(np.sqrt(max(np.sum((x - mu) ** 2 * dens), 0.0)))
        if delta <= cls.sigma and abs(mu - cls.c) <= cls.mu_tol:
            psi = gaussian_packet(GaussianParams(mu, 0.0, rep_width), grid, hbar)
            vec = psi.amp * sqdx
            registrations += 1
    dens = np.abs(vec) ** 2
    dens = dens / dens.sum()
    mu = float(np.sum(x * dens))
    delta = float(np.sqrt(max(np.sum((x - mu) ** 2 * dens), 0.0)))
    survived = float(delta <= cls.sigma and abs(mu - cls.c) <= cls.mu_tol)
    return row, survived, registrations


def run_zeno(
    cls: EquivalenceClassSpec,
    gue_scale: float,
    kick_intervals: list[float],
    horizon: float,
    trials: int,
    master_seed: int,
    grid: Grid1D,
    hbar: float = 1.0,
    rep_width: float | None = None,
    pool=None,
    config_snapshot: dict | None = None,
) -> ExperimentRecord:
    """Survival frequency in the class at the horizon, per kick interval.

    The ensemble scale is held fixed across the sweep, so the kick interval
    alone sets both the per-kick strength (through dt) and the monitoring
    frequency; finer monitoring suppresses escape.
    """
    rep = rep_width if rep_width is not None else 0.7 * cls.sigma
    tasks = []
    row = 0
    for ki, dt in enumerate(kick_intervals):
        for t in range(trials):
            tasks.append(
                (
                    row,
                    dt,
                    (master_seed, ki * trials + t),
                    cls,
                    grid,
                    grid.n_points,
                    gue_scale,
                    hbar,
                    horizon,
                    rep,
                )
            )
            row += 1
    if pool is not None:
        results = pool.map(zeno_survival_one, tasks, chunksize=16)
    else:
        results = [zeno_survival_one(t) for t in tasks]
    results.sort(key=lambda r: r[0])
    survived = np.array([r[1] for r in results])
    regs = np.array([r[2] for r in results])

    n_k = len(kick_intervals)
    surv = survived.reshape(n_k, trials)
    survival = surv.mean(axis=1)
    stderr = np.sqrt(np.maximum(survival * (1 - survival), 1e-12) / trials)

    kick_col = np.repeat(np.asarray(kick_intervals, dtype=float), trials)
    record = ExperimentRecord(
        kind="zeno",
        config=config_snapshot or {},
        master_seed=master_seed,
        trials=trials * n_k,
        table={
            "trial_index": np.arange(trials * n_k),
            "kick_dt": kick_col,
            "survived": survived.astype(np.int64),
            "registrations": regs,
        },
        summary={
            **{f"survival_dt_{i}": float(survival[i]) for i in range(n_k)},
            **{f"stderr_dt_{i}": float(stderr[i]) for i in range(n_k)},
            "gue_scale": gue_scale,
            "horizon": horizon,
            "rep_width": rep,
        },
        series={
            "kick_intervals": list(map(float, kick_intervals)),
            "survival": survival.tolist(),
            "stderr": stderr.tolist(),
        },
        notes=[NOTE_FULLSPACE],
    )
    return record
