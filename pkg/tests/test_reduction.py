import numpy as np
import pytest

from rmdyn.reduction import (
    BLOCK,
    BlockStreams,
    run_absorbing_walks,
    run_branch_line_walks,
    run_cascade_walks,
    run_chart_walks,
    run_recorded_walks,
)
from rmdyn.seeding import derive_key, mix64, trial_rng


def test_mix64_bijective_sample():
    seen = {mix64(x) for x in range(2000)}
    assert len(seen) == 2000


def test_derived_keys_distinct():
    keys = {derive_key(42, i) for i in range(5000)}
    assert len(keys) == 5000
    assert derive_key(42, 0) != derive_key(43, 0)


def test_trial_rng_reproducible():
    a = trial_rng(7, 3).standard_normal(5)
    b = trial_rng(7, 3).standard_normal(5)
    np.testing.assert_array_equal(a, b)


def test_block_streams_match_direct_consumption():
    # a trial's deviates depend only on its own draw count
    streams = BlockStreams(99, np.arange(4))
    seen = {t: [] for t in range(4)}
    active = np.array([True, True, True, True])
    for step in range(BLOCK + 10):
        if step == 5:
            active = np.array([True, False, True, True])
        draws = streams.next_draws(active)
        for row, t in enumerate(np.flatnonzero(active)):
            seen[t].append(draws[row, 0])
    for t in range(4):
        direct = trial_rng(99, t).standard_normal((2 * BLOCK, 1))[: len(seen[t]), 0]
        np.testing.assert_array_equal(np.asarray(seen[t]), direct)


def test_absorbing_walk_immediate_hit():
    hits, steps, _ = run_absorbing_walks(3.0, np.array([-3.0, 3.0]), 0.25, 0.2, 1.0, 100, 50, 1)
    assert np.all(hits == 3.0)
    assert np.all(steps == 0)


def test_absorbing_walk_two_center_split():
    hits, steps, _ = run_absorbing_walks(0.0, np.array([-3.0, 3.0]), 0.25, 0.25, 1.0, 20000, 4000, 5)
    got = hits[~np.isnan(hits)]
    assert got.size >= 0.99 * 4000
    frac = np.mean(got == 3.0)
    assert frac == pytest.approx(0.5, abs=0.03)


def test_absorbing_walk_gambler_ruin_mean():
    # asymmetric start: first-passage splits linearly between the neighbors
    hits, _, _ = run_absorbing_walks(1.0, np.array([-3.0, 3.0]), 0.25, 0.25, 1.0, 20000, 4000, 6)
    got = hits[~np.isnan(hits)]
    assert np.mean(got == 3.0) == pytest.approx(2.0 / 3.0, abs=0.03)


def test_absorbing_walk_determinism_and_offset():
    a = run_absorbing_walks(0.0, np.array([-3.0, 3.0]), 0.25, 0.25, 1.0, 5000, 200, 7)
    b = run_absorbing_walks(0.0, np.array([-3.0, 3.0]), 0.25, 0.25, 1.0, 5000, 200, 7)
    np.testing.assert_array_equal(a[0], b[0])
    np.testing.assert_array_equal(a[1], b[1])
    c = run_absorbing_walks(0.0, np.array([-3.0, 3.0]), 0.25, 0.25, 1.0, 5000, 200, 7, trial_offset=10)
    assert not np.array_equal(a[0], c[0])


def test_recorded_walk_increment_variance():
    rec_mu, rec_step, attained = run_recorded_walks(
        0.0, np.arange(-40.0, 40.5, 0.5), 0.25, 0.25, 400, 5000, 12, 11
    )
    assert np.all(attained == 400)
    incs, dts = [], []
    for t in range(12):
        incs.append(np.diff(rec_mu[t]))
        dts.append(np.diff(rec_step[t]).astype(float))
    incs = np.concatenate(incs)
    dts = np.concatenate(dts)
    var_rate = np.sum(incs**2) / np.sum(dts)
    assert var_rate == pytest.approx(0.25**2, rel=0.1)
    assert abs(incs.mean()) < 3 * incs.std() / np.sqrt(incs.size)


def test_chart_walk_spread_statistics():
    tau, s = run_chart_walks(2.0, 0.2, 1.0, 400, 3000, 13)
    # s is a driftless Gaussian walk with per-step std sqrt(2) dz / 2 sigma
    sd_expected = np.sqrt(2) * 0.2 / 2.0 * np.sqrt(400)
    assert abs(s.mean()) < 3 * sd_expected / np.sqrt(3000)
    assert s.std() == pytest.approx(sd_expected, rel=0.05)


def test_cascade_matches_weights():
    centers = np.arange(-6.0, 6.1, 1.5)
    rng = np.random.default_rng(0)
    w = rng.random(centers.size) ** 2
    w /= w.sum()
    hits, steps = run_cascade_walks(w, centers, 0.2, 0.1, 0.5, 100000, 8000, 17)
    got = hits[~np.isnan(hits)]
    assert got.size >= 0.99 * 8000
    emp = np.array([np.mean(got == c) for c in centers])
    tv = 0.5 * np.abs(emp - w).sum()
    assert tv < 0.04


def test_cascade_two_centers_reduces_to_gambler():
    hits, _ = run_cascade_walks(
        np.array([1 / 3, 2 / 3]), np.array([-3.0, 3.0]), 0.25, 0.25, 1.0, 50000, 4000, 19
    )
    got = hits[~np.isnan(hits)]
    assert np.mean(got == 3.0) == pytest.approx(2.0 / 3.0, abs=0.03)


def test_branch_line_concentrates_on_branches():
    c = np.array([-3.0, 3.0])
    hits, steps = run_branch_line_walks(
        np.array([-3.0, -3.0]),
        np.array([3.0, 3.0]),
        (0.5, 0.5),
        c,
        c,
        0.28,
        0.28,
        0.25,
        1.0,
        20000,
        4000,
        23,
    )
    got = ~np.isnan(hits[:, 0])
    assert got.mean() > 0.95
    h = hits[got]
    assert np.mean(h[:, 0] == h[:, 1]) > 0.995
    assert np.mean((h[:, 0] == 3.0) & (h[:, 1] == 3.0)) == pytest.approx(0.5, abs=0.03)
