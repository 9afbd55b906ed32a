import numpy as np
import pytest

from rmdyn import (
    ConfigurationError,
    DomainError,
    EquivalenceClassSpec,
    GaussianParams,
    Grid1D,
    TauSChart,
    WaveFunction,
    class_distance,
    class_membership,
    fs_distance,
    gaussian_packet,
    metric_relation_residual,
    normalize,
    position_moments,
    tau_s_state,
)
from rmdyn.gue import GUEConfig, sample_gue

from conftest import packet


def test_fs_distance_phase_invariance(grid):
    psi = packet(grid)
    rotated = WaveFunction(grid, np.exp(0.9j) * psi.amp)
    assert fs_distance(psi, rotated) <= 1e-7


def test_fs_distance_two_sigma_separation(grid):
    # closed form: cos^2 rho = exp(-(a-b)^2 / 4 sigma^2), so rho = arccos(e^{-1/2})
    a = packet(grid, a=0.0, sigma=1.0)
    b = packet(grid, a=2.0, sigma=1.0)
    assert fs_distance(a, b) == pytest.approx(np.arccos(np.exp(-0.5)), abs=1e-9)


def test_fs_distance_orthogonal_states(grid):
    a = packet(grid, a=-6.0, sigma=0.5)
    b = packet(grid, a=6.0, sigma=0.5)
    assert fs_distance(a, b) == pytest.approx(np.pi / 2, abs=1e-6)


def test_fs_distance_metric_properties(grid):
    rng = np.random.default_rng(5)
    states = [
        normalize(WaveFunction(grid, rng.normal(size=256) + 1j * rng.normal(size=256)))
        for _ in range(6)
    ]
    for a in states:
        for b in states:
            assert fs_distance(a, b) == pytest.approx(fs_distance(b, a), abs=0.0)
    for a, b, c in zip(states, states[1:], states[2:]):
        assert fs_distance(a, c) <= fs_distance(a, b) + fs_distance(b, c) + 1e-9


def test_fs_distance_unitary_invariance():
    g = Grid1D(64, -10.0, 10.0)
    a = packet(g, a=-1.0)
    b = packet(g, a=1.5, sigma=0.7)
    base = fs_distance(a, b)
    rng = np.random.default_rng(7)
    for _ in range(4):
        h = sample_gue(GUEConfig(64, 1.0, 0), rng)
        w, v = np.linalg.eigh(h)
        u = v @ np.diag(np.exp(-1j * w)) @ v.conj().T
        ua = WaveFunction(g, u @ a.amp)
        ub = WaveFunction(g, u @ b.amp)
        assert fs_distance(ua, ub) == pytest.approx(base, abs=1e-9)


def test_gaussian_packet_moments(grid):
    psi = gaussian_packet(GaussianParams(1.0, 2.0, 0.5), grid)
    mu, delta = position_moments(psi)
    assert mu == pytest.approx(1.0, abs=1e-8)
    assert delta == pytest.approx(0.5, abs=1e-6)
    from rmdyn import momentum_expectation

    assert momentum_expectation(psi) == pytest.approx(2.0, abs=1e-6)


def test_gaussian_packet_padding_violation(grid):
    with pytest.raises(ConfigurationError):
        gaussian_packet(GaussianParams(8.0, 0.0, 1.0), grid)


def test_metric_relation_identical_points(grid):
    p = GaussianParams(0.5, 1.0, 1.0)
    assert metric_relation_residual(p, p, grid) <= 1e-12


def test_metric_relation_position_split(grid):
    # separation 2 sigma at equal momenta: cos^2 rho = e^{-1}
    pa = GaussianParams(-1.0, 0.0, 1.0)
    pb = GaussianParams(1.0, 0.0, 1.0)
    a = gaussian_packet(pa, grid)
    b = gaussian_packet(pb, grid)
    assert np.cos(fs_distance(a, b)) ** 2 == pytest.approx(np.exp(-1.0), rel=1e-6)
    assert metric_relation_residual(pa, pb, grid) < 1e-6


def test_metric_relation_momentum_split(grid):
    # boost difference sigma (p-q) / hbar = 1: cos^2 rho = e^{-1}
    pa = GaussianParams(0.0, 0.0, 1.0)
    pb = GaussianParams(0.0, 1.0, 1.0)
    a = gaussian_packet(pa, grid)
    b = gaussian_packet(pb, grid)
    assert np.cos(fs_distance(a, b)) ** 2 == pytest.approx(np.exp(-1.0), rel=1e-6)
    assert metric_relation_residual(pa, pb, grid) < 1e-6


def test_metric_relation_lattice(grid):
    worst = 0.0
    for da in np.linspace(0, 4, 5):
        for dp in np.linspace(0, 4, 5):
            worst = max(
                worst,
                metric_relation_residual(
                    GaussianParams(-2.0, 0.0, 1.0), GaussianParams(-2.0 + da, dp, 1.0), grid
                ),
            )
    assert worst < 1e-6


def test_metric_relation_sigma_mismatch(grid):
    with pytest.raises(DomainError):
        metric_relation_residual(GaussianParams(0, 0, 1.0), GaussianParams(0, 0, 2.0), grid)


def test_class_membership(grid):
    cls = EquivalenceClassSpec(c=1.0, sigma=1.0, mu_tol=0.1)
    assert class_membership(packet(grid, a=1.0, sigma=0.5), cls)
    assert not class_membership(packet(grid, a=1.0, sigma=1.4), cls)
    lobes = normalize(
        WaveFunction(grid, packet(grid, a=-2.0, sigma=0.5).amp + packet(grid, a=4.0, sigma=0.5).amp)
    )
    assert not class_membership(lobes, cls)


def test_class_membership_momentum_blind(grid):
    cls = EquivalenceClassSpec(c=0.0, sigma=1.0, mu_tol=0.1)
    for p in (0.0, 1.0, 4.0):
        for sig in (0.5, 0.9):
            assert class_membership(packet(grid, a=0.0, p=p, sigma=sig), cls)


def test_class_distance_member_is_zero(grid):
    cls = EquivalenceClassSpec(c=0.5, sigma=1.0, mu_tol=0.1)
    res = class_distance(packet(grid, a=0.5, p=1.5, sigma=1.0), cls)
    assert res.distance < 1e-4


def test_class_distance_upper_bound_and_scan_oracle(grid):
    # oracle: dense scan over the same slice upper-bounds the optimizer value
    cls = EquivalenceClassSpec(c=0.0, sigma=1.0, mu_tol=0.1)
    psi = packet(grid, a=1.2, sigma=1.0)
    res = class_distance(psi, cls)
    assert res.distance <= np.arccos(np.exp(-1.2**2 / 8.0)) + 1e-6
    best = np.inf
    for sig in np.linspace(0.2, 1.0, 17):
        for p in np.linspace(-1.0, 1.0, 17):
            chi = gaussian_packet(GaussianParams(0.0, p, sig), grid)
            best = min(best, fs_distance(psi, chi))
    assert res.distance <= best + 1e-4


def test_class_distance_matches_representative_form(grid):
    # between class representatives the closed form is attained
    a = packet(grid, a=0.0, sigma=1.0)
    cls = EquivalenceClassSpec(c=2.0, sigma=1.0, mu_tol=0.1)
    res = class_distance(a, cls)
    assert res.distance == pytest.approx(np.arccos(np.exp(-0.5)), abs=1e-4)
    assert res.sigma_opt == pytest.approx(1.0, abs=1e-2)


def test_tau_s_identity_point(grid):
    base = packet(grid, a=0.0, sigma=1.0)
    mu0, _ = position_moments(base)
    out = tau_s_state(TauSChart(base, mu0, 0.0))
    assert fs_distance(out, base) < 1e-6


def test_tau_s_moves_gaussian(grid):
    base = packet(grid, a=0.0, sigma=1.0)
    out = tau_s_state(TauSChart(base, 2.0, np.log(0.5)))
    mu, delta = position_moments(out)
    assert mu == pytest.approx(2.0, abs=1e-6)
    assert delta == pytest.approx(0.5, abs=1e-6)


def test_tau_s_lattice_moment_exact(grid):
    base = normalize(
        WaveFunction(grid, packet(grid, a=-1.0, sigma=0.6).amp + packet(grid, a=1.0, sigma=0.6).amp)
    )
    _, d0 = position_moments(base)
    for tau in np.linspace(-2, 2, 5):
        for s in np.linspace(-0.6, 0.4, 5):
            out = tau_s_state(TauSChart(base, tau, s))
            mu, delta = position_moments(out)
            assert mu == pytest.approx(tau, abs=1e-6)
            assert delta == pytest.approx(d0 * np.exp(s), rel=1e-6)


def test_tau_s_overflow_raises(grid):
    base = packet(grid, a=0.0, sigma=1.0)
    with pytest.raises(ConfigurationError):
        tau_s_state(TauSChart(base, 9.5, 1.5))


def test_tau_s_chart_orthogonality(grid):
    # finite-difference tangents along tau and s are FS-orthogonal at the base
    base = packet(grid, a=0.0, sigma=1.0)
    mu0, _ = position_moments(base)
    eps = 1e-4
    t_tau = (tau_s_state(TauSChart(base, mu0 + eps, 0.0)).amp - base.amp) / eps
    t_s = (tau_s_state(TauSChart(base, mu0, eps)).amp - base.amp) / eps
    dx = grid.dx
    proj_tau = t_tau - (np.vdot(base.amp, t_tau) * dx) * base.amp
    proj_s = t_s - (np.vdot(base.amp, t_s) * dx) * base.amp
    ip = np.vdot(proj_tau, proj_s) * dx
    denom = np.sqrt((np.vdot(proj_tau, proj_tau) * dx).real * (np.vdot(proj_s, proj_s) * dx).real)
    assert abs(ip) / denom < 1e-4
