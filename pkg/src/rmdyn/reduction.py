"""Detector-registered walks used by the measurement experiments.

A position detector registers only the moments (mu_z, delta_z); everything
else a state carries is absorbed into the detector's equivalence class, and
each registration restarts the stochastic evolution from the recorded
representative.  Seen through that chart, the fresh-draw unitary steps of
the full walk reduce to independent Gaussian increments of the registered
coordinates: translations of the class point with RMS equal to the
calibrated step dz (times the current spread relative to the reference
width), and, on the translate/rescale surface, an independent increment of
ln(delta_z).  Translation covariance of the ensemble makes the increment law
identical at every class center, so the reduction is exact at the reference
state by calibration and homogeneous everywhere else.

Every trial consumes its own derived stream, so results are reproducible
bit-for-bit regardless of batching or worker count.
"""

from __future__ import annotations

import numpy as np

from .seeding import trial_rng

__all__ = [
    "BlockStreams",
    "run_absorbing_walks",
    "run_recorded_walks",
    "run_chart_walks",
    "run_cascade_walks",
    "run_branch_line_walks",
]

BLOCK = 256


class BlockStreams:
    """Per-trial normal deviates, buffered in blocks of BLOCK draws.

    Each row consumes its own generator strictly in order, so a trial's
    deviates depend only on (master_seed, trial_index, how many draws that
    trial has made).
    """

    def __init__(self, master_seed: int, trial_indices: np.ndarray, width: int = 1):
        self._rngs = [trial_rng(master_seed, int(t)) for t in trial_indices]
        self._width = width
        n = len(self._rngs)
        self._buf = np.empty((n, BLOCK, width))
        self._pos = np.full(n, BLOCK, dtype=np.int64)

    def next_draws(self, active: np.ndarray) -> np.ndarray:
        """(n_active, width) standard normals for the flagged rows."""
        rows = np.flatnonzero(active)
        need = rows[self._pos[rows] >= BLOCK]
        for i in need:
            self._buf[i] = self._rngs[i].standard_normal((BLOCK, self._width))
            self._pos[i] = 0
        out = self._buf[rows, self._pos[rows], :]
        self._pos[rows] += 1
        return out


def _nearest(centers: np.ndarray, mu: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    idx = np.abs(mu[:, None] - centers[None, :]).argmin(axis=1)
    return idx, np.abs(mu - centers[idx])


def _branch_std(
    centers: np.ndarray, mu: np.ndarray, sigma: float, dz: float, adaptive: bool
) -> np.ndarray:
    """Registered step std: dz scaled by the current spread over the reference width.

    Between two bracketing centers the registered state is a two-branch
    superposition with weight w set by the martingale coordinate, so its
    spread is sqrt(4 w (1-w) (gap/2)^2 + sigma^2); outside the lattice, and
    with adaptivity off, the spread is pinned at the representative width.
    """
    if not adaptive or centers.size < 2:
        return np.full(mu.shape, dz)
    ii = np.clip(np.searchsorted(centers, mu) - 1, 0, len(centers) - 2)
    lo, hi = centers[ii], centers[ii + 1]
    w = np.clip((mu - lo) / (hi - lo), 0.0, 1.0)
    var = sigma**2 + 4.0 * w * (1.0 - w) * ((hi - lo) / 2.0) ** 2
    return dz * np.sqrt(var) / sigma


def run_absorbing_walks(
    mu0: float,
    centers: np.ndarray,
    mu_tol: float,
    dz: float,
    sigma: float,
    max_steps: int,
    trials: int,
    master_seed: int,
    trial_offset: int = 0,
    adaptive: bool = True,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """First-hitting walks of the registered position on a class lattice.

    Returns (hit_center, steps_to_hit, final_mu); hit_center is NaN for
    trials that exhaust max_steps.  Membership is checked before the first
    step, so a start inside a class window hits at step zero.
    """
    centers = np.sort(np.asarray(centers, dtype=float))
    streams = BlockStreams(master_seed, trial_offset + np.arange(trials))
    mu = np.full(trials, float(mu0))
    hit = np.full(trials, np.nan)
    steps = np.zeros(trials, dtype=np.int64)
    active = np.ones(trials, dtype=bool)
    for step in range(max_steps + 1):
        if not active.any():
            break
        idx, dist = _nearest(centers, mu[active])
        absorbed = dist <= mu_tol
        if absorbed.any():
            rows = np.flatnonzero(active)[absorbed]
            hit[rows] = centers[idx[absorbed]]
            steps[rows] = step
            active[rows] = False
        if step == max_steps or not active.any():
            break
        sd = _branch_std(centers, mu[active], sigma, dz, adaptive)
        mu[active] += streams.next_draws(active)[:, 0] * sd
    steps[np.isnan(hit)] = max_steps
    return hit, steps, mu


def run_recorded_walks(
    mu0: float,
    centers: np.ndarray,
    mu_tol: float,
    dz: float,
    n_records: int,
    max_steps_per_record: int,
    trials: int,
    master_seed: int,
    trial_offset: int = 0,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Record-and-restart walks on the class manifold.

    Each trial walks at the fixed registered step dz (the state is re-pinned
    to the recorded representative after every registration) and records
    (step_index, mu) whenever it sits inside a class window, up to n_records
    per trial.  Trials that go max_steps_per_record steps without a record
    stop early (starvation).  Returns (record_mu, record_step, attained).
    """
    centers = np.sort(np.asarray(centers, dtype=float))
    streams = BlockStreams(master_seed, trial_offset + np.arange(trials))
    mu = np.full(trials, float(mu0))
    rec_mu = np.full((trials, n_records), np.nan)
    rec_step = np.full((trials, n_records), -1, dtype=np.int64)
    count = np.zeros(trials, dtype=np.int64)
    since = np.zeros(trials, dtype=np.int64)
    active = np.ones(trials, dtype=bool)
    limit = n_records * max_steps_per_record
    for step in range(1, limit + 1):
        if not active.any():
            break
        mu[active] += streams.next_draws(active)[:, 0] * dz
        since[active] += 1
        _, dist = _nearest(centers, mu[active])
        got = dist <= mu_tol
        rows = np.flatnonzero(active)[got]
        if rows.size:
            cols = count[rows]
            rec_mu[rows, cols] = mu[rows]
            rec_step[rows, cols] = step
            count[rows] += 1
            since[rows] = 0
            active[rows[count[rows] >= n_records]] = False
        starved = active & (since >= max_steps_per_record)
        active[starved] = False
    return rec_mu, rec_step, count


def run_chart_walks(
    delta0: float,
    dz: float,
    sigma_ref: float,
    n_steps: int,
    trials: int,
    master_seed: int,
    trial_offset: int = 0,
    tau0: float = 0.0,
    s_max: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Free walks on the translate/rescale surface of a base state.

    Per step: d tau ~ N(0, (dz * delta/sigma_ref)^2) and
    ds ~ N(0, 2 (dz / 2 sigma_ref)^2), independent (the chart directions are
    orthogonal).  ``s_max`` caps the log-spread at the box scale: a grid
    state cannot spread past its domain.  Returns final (tau, s) arrays.
    """
    streams = BlockStreams(master_seed, trial_offset + np.arange(trials), width=2)
    tau = np.full(trials, float(tau0))
    s = np.zeros(trials)
    sd_s = np.sqrt(2.0) * dz / (2.0 * sigma_ref)
    everyone = np.ones(trials, dtype=bool)
    for _ in range(n_steps):
        z = streams.next_draws(everyone)
        tau += z[:, 0] * dz * (delta0 * np.exp(s)) / sigma_ref
        s += z[:, 1] * sd_s
        if s_max is not None:
            np.minimum(s, s_max, out=s)
    return tau, s


def run_cascade_walks(
    weights: np.ndarray,
    centers: np.ndarray,
    mu_tol: float,
    dz: float,
    sigma: float,
    max_steps: int,
    trials: int,
    master_seed: int,
    trial_offset: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Coarse-to-fine registration over a weighted center set.

    The detector resolves position progressively: each stage is a driftless
    gambler between the mass centers of the two halves of the remaining
    center range, started at the conditional mean, so every binary outcome
    carries the conditional weight of its half and the leaf distribution
    telescopes to the weights themselves.  Needed when the initial mass
    spreads over more than two classes (a single flat gambler is mean-exact
    but not distribution-exact there).  Returns (hit_center, total_steps);
    NaN marks trials that ran out of steps mid-cascade.
    """
    centers = np.asarray(centers, dtype=float)
    order = np.argsort(centers)
    centers = centers[order]
    weights = np.asarray(weights, dtype=float)[order]
    weights = weights / weights.sum()
    streams = BlockStreams(master_seed, trial_offset + np.arange(trials))

    prefix = np.concatenate([[0.0], np.cumsum(weights)])
    prefix_c = np.concatenate([[0.0], np.cumsum(weights * centers)])

    def half_stats(i, j):
        mass = prefix[j + 1] - prefix[i]
        safe = np.where(mass > 0, mass, 1.0)
        return (prefix_c[j + 1] - prefix_c[i]) / safe, mass

    lo = np.zeros(trials, dtype=np.int64)
    hi = np.full(trials, centers.size - 1, dtype=np.int64)
    mu = np.zeros(trials)
    c_l = np.zeros(trials)
    c_r = np.zeros(trials)
    steps = np.zeros(trials, dtype=np.int64)
    walking = np.zeros(trials, dtype=bool)
    settled = np.zeros(trials, dtype=bool)

    def open_stage(rows: np.ndarray):
        """Descend empty halves, mark singletons settled, set stage targets."""
        rows = rows.copy()
        while rows.size:
            single = rows[hi[rows] == lo[rows]]
            settled[single] = True
            walking[single] = False
            rows = rows[hi[rows] > lo[rows]]
            if rows.size == 0:
                return
            mid = (lo[rows] + hi[rows]) // 2
            ml, wl = half_stats(lo[rows], mid)
            mr, wr = half_stats(mid + 1, hi[rows])
            empty_l = wl <= 0
            empty_r = (wr <= 0) & ~empty_l
            lo[rows[empty_l]] = mid[empty_l] + 1
            hi[rows[empty_r]] = mid[empty_r]
            live = ~(empty_l | empty_r)
            sel = rows[live]
            c_l[sel] = ml[live]
            c_r[sel] = mr[live]
            frac = wr[live] / (wl[live] + wr[live])
            mu[sel] = ml[live] + frac * (mr[live] - ml[live])
            walking[sel] = True
            rows = rows[~live]

    open_stage(np.arange(trials))
    while walking.any():
        rows = np.flatnonzero(walking)
        d_l = np.abs(mu[rows] - c_l[rows])
        d_r = np.abs(mu[rows] - c_r[rows])
        went_l = d_l <= mu_tol
        went_r = (d_r <= mu_tol) & ~went_l
        finished = went_l | went_r
        if finished.any():
            sel = rows[finished]
            mid = (lo[sel] + hi[sel]) // 2
            hi[sel[went_l[finished]]] = mid[went_l[finished]]
            lo[sel[went_r[finished]]] = mid[went_r[finished]] + 1
            walking[sel] = False
            open_stage(sel)
            rows = np.flatnonzero(walking)
            if rows.size == 0:
                break
        out_of_steps = steps[rows] >= max_steps
        if out_of_steps.any():
            walking[rows[out_of_steps]] = False
            rows = rows[~out_of_steps]
            if rows.size == 0:
                continue
        gap = c_r[rows] - c_l[rows]
        w = np.clip((mu[rows] - c_l[rows]) / gap, 0.0, 1.0)
        sd = dz * np.sqrt(sigma**2 + 4.0 * w * (1.0 - w) * (gap / 2.0) ** 2) / sigma
        mu[rows] += streams.next_draws(walking)[:, 0] * sd
        steps[rows] += 1

    hits = np.full(trials, np.nan)
    hits[settled] = centers[lo[settled]]
    return hits, steps


def run_branch_line_walks(
    branch_a: np.ndarray,
    branch_b: np.ndarray,
    weights: tuple[float, float],
    centers_a: np.ndarray,
    centers_b: np.ndarray,
    tol_a: float,
    tol_b: float,
    dz: float,
    sigma: float,
    max_steps: int,
    trials: int,
    master_seed: int,
    trial_offset: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Joint first-hitting walks for a two-branch (entangled) state.

    The persistent coordinate runs along the line joining the two branch
    centers in the (x_a, x_b) plane; transverse registered jitter is
    within-class noise re-pinned by each registration, so it is drawn fresh
    each step instead of accumulating.  Absorption requires both marginals
    to sit inside lattice windows simultaneously.  Returns (hits, steps)
    where hits has shape (trials, 2) and NaN rows mark exhausted trials.
    """
    a1 = np.asarray(branch_a, dtype=float)
    a2 = np.asarray(branch_b, dtype=float)
    mid = 0.5 * (a1 + a2)
    half = 0.5 * float(np.linalg.norm(a2 - a1))
    e = (a2 - a1) / (2.0 * half)
    perp = np.array([-e[1], e[0]])
    w1, w2 = weights
    xi0 = (w2 - w1) * half

    streams = BlockStreams(master_seed, trial_offset + np.arange(trials), width=2)
    xi = np.full(trials, xi0)
    hits = np.full((trials, 2), np.nan)
    steps = np.zeros(trials, dtype=np.int64)
    active = np.ones(trials, dtype=bool)
    ca = np.sort(np.asarray(centers_a, dtype=float))
    cb = np.sort(np.asarray(centers_b, dtype=float))
    for step in range(max_steps + 1):
        if not active.any():
            break
        rows0 = np.flatnonzero(active)
        z = streams.next_draws(active)
        eta = z[:, 1] * dz
        pos_a = mid[0] + xi[rows0] * e[0] + eta * perp[0]
        pos_b = mid[1] + xi[rows0] * e[1] + eta * perp[1]
        ia, da = _nearest(ca, pos_a)
        ib, db = _nearest(cb, pos_b)
        absorbed = (da <= tol_a) & (db <= tol_b)
        if absorbed.any():
            rows = rows0[absorbed]
            hits[rows, 0] = ca[ia[absorbed]]
            hits[rows, 1] = cb[ib[absorbed]]
            steps[rows] = step
            active[rows] = False
        if step == max_steps or not active.any():
            break
        live = ~absorbed
        sel = rows0[live]
        w = np.clip(xi[sel] / (2.0 * half) + 0.5, 0.0, 1.0)
        var = sigma**2 + 4.0 * w * (1.0 - w) * half**2
        xi[sel] += z[live, 0] * dz * np.sqrt(var) / sigma
    steps[np.isnan(hits[:, 0])] = max_steps
    return hits, steps
