"""Diagnostic figures rendered to self-contained SVG next to the record files."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiments.base import ExperimentRecord

__all__ = ["emit_plots"]


def _save(fig, out_dir: str, name: str, made: list[str]):
    path = os.path.join(out_dir, name)
    fig.savefig(path, format="svg")
    plt.close(fig)
    made.append(path)


def _bar_pair(ax, centers, empirical, targets):
    centers = np.asarray(centers, dtype=float)
    width = 0.35 * (centers[1] - centers[0]) if len(centers) > 1 else 0.35
    ax.bar(centers - width / 2, empirical, width=width, label="empirical")
    ax.bar(centers + width / 2, targets, width=width, label="target")
    ax.set_xlabel("class center")
    ax.set_ylabel("probability")
    ax.legend(frameon=False)


def emit_plots(record: ExperimentRecord, out_dir: str) -> list[str]:
    """Render the per-kind diagnostic figure(s); best effort, never raises."""
    os.makedirs(out_dir, exist_ok=True)
    made: list[str] = []
    kind = record.kind
    s = record.series
    try:
        if kind in ("born", "double_slit"):
            fig, ax = plt.subplots(figsize=(6.4, 4.0))
            _bar_pair(ax, s.get("centers", []), s.get("empirical", []), s.get("targets", []))
            title = "outcome distribution" if kind == "born" else "screen histogram"
            ax.set_title(title)
            _save(fig, out_dir, f"{kind}.svg", made)
        elif kind == "qct":
            fig, ax = plt.subplots(figsize=(6.4, 4.0))
            ax.plot(s.get("reference_t", []), s.get("reference_a", []), "-", label="Newtonian reference")
            t = record.table.get("t")
            mu = record.table.get("mu_z")
            if t is not None and len(t):
                ax.plot(t, mu, ".", ms=2, alpha=0.4, label="recorded positions")
            ax.set_xlabel("t")
            ax.set_ylabel("position")
            ax.legend(frameon=False)
            ax.set_title("monitored motion vs reference")
            _save(fig, out_dir, "qct.svg", made)
        elif kind == "zeno":
            fig, ax = plt.subplots(figsize=(6.4, 4.0))
            ax.errorbar(
                s.get("kick_intervals", []),
                s.get("survival", []),
                yerr=s.get("stderr", None),
                marker="o",
            )
            ax.set_xlabel("kick interval dt")
            ax.set_ylabel("survival frequency")
            ax.set_ylim(-0.05, 1.05)
            ax.set_title("survival vs monitoring interval")
            _save(fig, out_dir, "zeno.svg", made)
        elif kind == "brownian":
            fig, ax = plt.subplots(figsize=(6.4, 4.0))
            inc = np.asarray(s.get("increments", []), dtype=float)
            if inc.size:
                ax.hist(inc, bins=40, density=True, alpha=0.6, label="increments")
                xs = np.linspace(inc.min(), inc.max(), 200)
                sd = inc.std() if inc.std() > 0 else 1.0
                ax.plot(
                    xs,
                    np.exp(-0.5 * (xs / sd) ** 2) / (sd * np.sqrt(2 * np.pi)),
                    "-",
                    label="Gaussian fit",
                )
                ax.legend(frameon=False)
            ax.set_xlabel("recorded increment")
            ax.set_ylabel("density")
            ax.set_title("recorded-position increments")
            _save(fig, out_dir, "brownian.svg", made)
        elif kind == "epr":
            fig, ax = plt.subplots(figsize=(5.2, 4.6))
            joint = np.asarray(s.get("joint_empirical", []), dtype=float)
            ca = s.get("centers_a", [])
            cb = s.get("centers_b", [])
            if joint.size:
                im = ax.imshow(joint, origin="lower", aspect="auto", cmap="viridis")
                ax.set_xticks(range(len(cb)), [f"{c:g}" for c in cb])
                ax.set_yticks(range(len(ca)), [f"{c:g}" for c in ca])
                fig.colorbar(im, ax=ax, label="frequency")
            ax.set_xlabel("outcome B")
            ax.set_ylabel("outcome A")
            ax.set_title("joint outcome frequencies")
            _save(fig, out_dir, "epr.svg", made)
        elif kind == "half_prob":
            fig, ax = plt.subplots(figsize=(6.4, 4.0))
            vals = np.asarray(s.get("final_delta", []), dtype=float)
            if vals.size:
                ax.hist(vals, bins=40, density=True, alpha=0.7)
                ax.axvline(record.summary.get("sigma", 1.0), ls="--", color="k", label="sigma")
                ax.legend(frameon=False)
            ax.set_xlabel("final delta_z")
            ax.set_ylabel("density")
            ax.set_title("spread after the observation window")
            _save(fig, out_dir, "half_prob.svg", made)
        elif kind == "product_form":
            fig, ax = plt.subplots(figsize=(6.4, 4.0))
            ax.plot(s.get("device_sigmas", []), s.get("median_registered", []), "o-", label="registered")
            ax.plot(s.get("device_sigmas", []), s.get("median_raw", []), "s--", label="raw")
            ax.set_xlabel("device width sigma_d")
            ax.set_ylabel("median single-step entanglement")
            ax.legend(frameon=False)
            ax.set_title("entanglement per step vs device width")
            _save(fig, out_dir, "product_form.svg", made)
        else:
            fig, ax = plt.subplots(figsize=(6.4, 4.0))
            ax.set_title(f"{kind}: no dedicated figure")
            _save(fig, out_dir, f"{kind}.svg", made)
    except Exception:  # plots are best-effort; the record itself already exists
        plt.close("all")
    return made
