"""Outcome statistics on a detector lattice and the spread-condition frequency."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigurationError
from ..geometry import GaussianParams, gaussian_packet
from ..grids import WaveFunction, position_moments
from ..gue import GUEConfig, WalkConfig
from ..reduction import run_absorbing_walks, run_chart_walks
from .base import (
    NOTE_REGISTERED_WALK,
    ClassLattice,
    ExperimentRecord,
    born_targets,
    empirical_distribution,
    total_variation,
)

__all__ = ["run_born_experiment", "run_half_probability"]


def run_born_experiment(
    psi0: WaveFunction,
    lattice: ClassLattice,
    walk_cfg: WalkConfig,
    gue_cfg: GUEConfig,
    trials: int,
    master_seed: int,
    config_snapshot: dict | None = None,
) -> ExperimentRecord:
    """First-hitting outcome distribution of the registered walk, against targets.

    Targets are closed-form class overlaps; the walk starts from the state's
    registered position (the target-weighted center of the support, exactly
    the martingale coordinate) and its outcome mean reproduces the target
    mean exactly, so for support on two classes the full distribution is the
    target one up to window-discretization effects that vanish with dz.
    """
    targets = born_targets(psi0, lattice, walk_cfg.hbar)
    mu0, _ = position_moments(psi0)
    hits, steps, _ = run_absorbing_walks(
        mu0,
        lattice.centers,
        lattice.mu_tol,
        walk_cfg.dz,
        lattice.sigma,
        walk_cfg.max_steps,
        trials,
        master_seed,
    )
    empirical = empirical_distribution(hits, lattice.centers)
    hit_rate = float(np.mean(~np.isnan(hits)))
    tv = total_variation(empirical, targets)
    rep = gaussian_packet(
        GaussianParams(float(lattice.centers[0]), 0.0, lattice.sigma), psi0.grid, walk_cfg.hbar
    )
    _, delta_rep = position_moments(rep)
    delta_at_hit = np.where(np.isnan(hits), np.nan, delta_rep)

    record = ExperimentRecord(
        kind="born",
        config=config_snapshot or {},
        master_seed=master_seed,
        trials=trials,
        table={
            "trial_index": np.arange(trials),
            "hit_center": hits,
            "steps_to_hit": steps,
            "delta_z_at_hit": delta_at_hit,
        },
        summary={
            "hit_rate": hit_rate,
            "total_variation": tv,
            "mean_steps_to_hit": float(steps[~np.isnan(hits)].mean()) if hit_rate > 0 else float("nan"),
            "gue_scale": gue_cfg.scale,
            "dz": walk_cfg.dz,
            "dt": walk_cfg.dt,
        },
        series={
            "centers": lattice.centers.tolist(),
            "empirical": empirical.tolist(),
            "targets": targets.tolist(),
        },
        notes=[NOTE_REGISTERED_WALK],
    )
    if hit_rate < 0.5:
        record.warnings.append(f"under-converged walk: hit rate {hit_rate:.3f} < 0.5")
    return record


def run_half_probability(
    psi0: WaveFunction,
    sigma: float,
    walk_cfg: WalkConfig,
    gue_cfg: GUEConfig,
    trials: int,
    t_obs: float,
    master_seed: int,
    sigma_ref: float | None = None,
    config_snapshot: dict | None = None,
) -> ExperimentRecord:
    """Frequency of delta_z <= sigma after a fixed, absorption-free stretch.

    The state walks the translate/rescale surface of its own profile; the
    log-spread component is an unbiased walk, so the frequency climbs toward
    one half from below as t_obs grows.  ``sigma_ref`` is the resolution the
    step size dz was calibrated against (defaults to the tested sigma).
    """
    n_steps = int(round(t_obs / walk_cfg.dt))
    if n_steps < 100:
        raise ConfigurationError("t_obs must cover at least 100 steps")
    mu0, delta0 = position_moments(psi0)
    if sigma_ref is None:
        sigma_ref = sigma if sigma > 0 else 1.0
    s_cap = float(np.log(psi0.grid.length / (2.0 * delta0)))
    tau, s = run_chart_walks(
        delta0, walk_cfg.dz, sigma_ref, n_steps, trials, master_seed, tau0=mu0, s_max=s_cap
    )
    final_delta = delta0 * np.exp(s)
    within = final_delta <= sigma
    freq = float(within.mean())
    stderr = float(np.sqrt(max(freq * (1 - freq), 1e-12) / trials))

    return ExperimentRecord(
        kind="half_prob",
        config=config_snapshot or {},
        master_seed=master_seed,
        trials=trials,
        table={
            "trial_index": np.arange(trials),
            "final_mu": tau,
            "final_delta": final_delta,
            "within": within.astype(np.int64),
        },
        summary={
            "frequency": freq,
            "stderr": stderr,
            "n_steps": n_steps,
            "sigma": sigma,
            "delta0": delta0,
            "gue_scale": gue_cfg.scale,
        },
        series={"final_delta": final_delta.tolist()},
        notes=[NOTE_REGISTERED_WALK],
    )
