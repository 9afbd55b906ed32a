"""Build experiment inputs from a RunConfig and dispatch the run."""

from __future__ import annotations

import numpy as np

from .config import RunConfig
from .dynamics import ParticleParams, PotentialSpec
from .errors import ConfigurationError
from .experiments import (
    ClassLattice,
    make_two_lobe_pair,
    run_born_experiment,
    run_constrained_brownian,
    run_device_product_form,
    run_double_slit,
    run_epr,
    run_half_probability,
    run_qct,
    run_zeno,
)
from .experiments.base import ExperimentRecord
from .geometry import EquivalenceClassSpec, GaussianParams, gaussian_packet
from .grids import Grid1D, WaveFunction, normalize
from .gue import GUEConfig, WalkConfig, calibrate_scale
from .seeding import CALIBRATION_DOMAIN, trial_rng
from .suites import decomposition_suite, geometry_suite

__all__ = ["run_from_config", "resolve_scale"]


def _grid(cfg: RunConfig, section: str = "grid") -> Grid1D:
    sec = cfg.sections[section]
    return Grid1D(sec["n"], sec["x_min"], sec["x_max"])


def _walk(cfg: RunConfig) -> WalkConfig:
    w = cfg.sections["walk"]
    return WalkConfig(dt=w["dt"], dz=w["dz"], max_steps=w["max_steps"], hbar=w["hbar"])


def resolve_scale(cfg: RunConfig) -> float:
    """Numeric ensemble scale: taken from the config or calibrated to walk.dz."""
    raw = cfg.get("gue", "scale")
    if raw != "auto":
        return float(raw)
    w = _walk(cfg)
    rng = trial_rng(cfg.get("experiment", "seed"), CALIBRATION_DOMAIN)
    return calibrate_scale(
        cfg.get("gue", "calib_dim"),
        w.dt,
        w.dz,
        cfg.get("detector", "sigma"),
        w.hbar,
        cfg.get("gue", "calib_trials"),
        rng,
    )


def _two_lobe_state(cfg: RunConfig, grid: Grid1D, hbar: float) -> tuple[WaveFunction, float]:
    src = cfg.sections["source"]
    half = src["separation"] / 2.0
    center = cfg.get("detector", "center")
    w_left = src["weight_left"]
    g_l = gaussian_packet(GaussianParams(center - half, 0.0, src["sigma"]), grid, hbar)
    g_r = gaussian_packet(GaussianParams(center + half, 0.0, src["sigma"]), grid, hbar)
    amp = np.sqrt(w_left) * g_l.amp + np.sqrt(1.0 - w_left) * g_r.amp
    return normalize(WaveFunction(grid, amp)), half


def _source_lattice(cfg: RunConfig, grid: Grid1D, half: float) -> ClassLattice:
    det = cfg.sections["detector"]
    center = det["center"]
    return ClassLattice.regular(
        grid, det["sigma"], det["spacing"], det["mu_tol"], center=center - half
    )


def run_from_config(cfg: RunConfig, pool=None) -> ExperimentRecord:
    kind = cfg.kind
    seed = cfg.get("experiment", "seed")
    trials = cfg.get("experiment", "trials")
    snapshot = cfg.sections

    if kind == "geometry_suite":
        _, lines, record = geometry_suite()
        record.series["lines"] = lines
        return record
    if kind == "decomposition_suite":
        _, lines, record = decomposition_suite()
        record.series["lines"] = lines
        return record

    walk = _walk(cfg)
    hbar = walk.hbar

    if kind in ("born", "half_prob"):
        grid = _grid(cfg)
        psi0, half = _two_lobe_state(cfg, grid, hbar)
        scale = resolve_scale(cfg)
        gue_cfg = GUEConfig(grid.n_points, scale, seed)
        if kind == "born":
            lattice = _source_lattice(cfg, grid, half)
            return run_born_experiment(psi0, lattice, walk, gue_cfg, trials, seed, snapshot)
        t_obs = cfg.get("experiment", "t_obs_steps") * walk.dt
        return run_half_probability(
            psi0, cfg.get("detector", "sigma"), walk, gue_cfg, trials, t_obs, seed, snapshot
        )

    if kind == "brownian":
        grid = _grid(cfg)
        det = cfg.sections["detector"]
        lattice = ClassLattice.regular(grid, det["sigma"], det["spacing"], det["mu_tol"], det["center"])
        scale = resolve_scale(cfg)
        gue_cfg = GUEConfig(grid.n_points, scale, seed)
        start = float(lattice.centers[np.abs(lattice.centers - det["center"]).argmin()])
        return run_constrained_brownian(
            start,
            lattice,
            walk,
            gue_cfg,
            trials,
            cfg.get("experiment", "n_records"),
            seed,
            cfg.get("experiment", "max_steps_per_record"),
            snapshot,
        )

    if kind == "qct":
        grid = _grid(cfg)
        src = cfg.sections["source"]
        pot_sec = cfg.sections["potential"]
        potential = (
            PotentialSpec("harmonic", k=pot_sec["k"])
            if pot_sec["kind"] == "harmonic"
            else PotentialSpec("free")
        )
        params = ParticleParams(mass=cfg.get("walk", "mass"), hbar=hbar)
        det = cfg.sections["detector"]
        lattice = ClassLattice.regular(grid, det["sigma"], det["spacing"], det["mu_tol"], det["center"])
        scale = resolve_scale(cfg)
        gue_cfg = GUEConfig(grid.n_points, scale, seed)
        return run_qct(
            GaussianParams(src["a0"], src["p0"], src["sigma"]),
            potential,
            params,
            lattice,
            walk,
            gue_cfg,
            cfg.get("experiment", "kick_every"),
            cfg.get("experiment", "total_time"),
            trials,
            seed,
            grid,
            snapshot,
        )

    if kind == "double_slit":
        grid = _grid(cfg)
        slit = cfg.sections["slits"]
        det = cfg.sections["detector"]
        params = ParticleParams(mass=cfg.get("walk", "mass"), hbar=hbar)
        half = slit["separation"] / 2.0
        s1 = GaussianParams(-half, slit["momentum"], slit["sigma"])
        s2 = GaussianParams(+half, slit["momentum"], slit["sigma"])
        lattice_screen = ClassLattice.regular(
            grid, det["sigma"], det["spacing"], det["mu_tol"], det["center"]
        )
        scale = resolve_scale(cfg)
        gue_cfg = GUEConfig(grid.n_points, scale, seed)
        return run_double_slit(
            (s1, s2),
            params,
            cfg.get("experiment", "screen_time"),
            lattice_screen,
            walk,
            gue_cfg,
            trials,
            cfg.get("experiment", "measure_at_slits"),
            seed,
            grid,
            slit["mu_tol"],
            snapshot,
        )

    if kind == "epr":
        grid = _grid(cfg)
        src = cfg.sections["source"]
        det = cfg.sections["detector"]
        psi2 = make_two_lobe_pair(src["u"], src["sigma"], grid, grid, hbar)
        lattice_a = ClassLattice.regular(grid, det["sigma"], det["spacing"], det["mu_tol"], det["center"] - src["u"])
        lattice_b = ClassLattice.regular(grid, det["sigma_b"], det["spacing"], det["mu_tol"], det["center"] - src["u"])
        scale = resolve_scale(cfg)
        gue_cfg = GUEConfig(grid.n_points**2, scale, seed)
        return run_epr(
            psi2,
            lattice_a,
            lattice_b,
            walk,
            gue_cfg,
            trials,
            seed,
            hbar,
            det["sigma_b_alt"],
            snapshot,
        )

    if kind == "zeno":
        grid = _grid(cfg)
        det = cfg.sections["detector"]
        cls = EquivalenceClassSpec(det["center"], det["sigma"], det["mu_tol"])
        scale = resolve_scale(cfg)
        return run_zeno(
            cls,
            scale,
            cfg.get("experiment", "kick_intervals"),
            cfg.get("experiment", "horizon"),
            trials,
            seed,
            grid,
            hbar,
            cfg.get("experiment", "rep_width_fraction") * det["sigma"],
            pool,
            snapshot,
        )

    if kind == "product_form":
        grid = _grid(cfg)
        dev = cfg.sections["device"]
        device_grid = Grid1D(dev["n"], dev["x_min"], dev["x_max"])
        phi0 = gaussian_packet(
            GaussianParams(0.0, 0.0, cfg.get("source", "sigma")), grid, hbar
        )
        scale = resolve_scale(cfg)
        return run_device_product_form(
            phi0,
            device_grid,
            dev["sigma_list"],
            walk,
            scale,
            trials,
            seed,
            dev["pointer_cell"],
            pool=pool,
            config_snapshot=snapshot,
        )

    raise ConfigurationError(f"no runner for experiment kind {kind!r}")
