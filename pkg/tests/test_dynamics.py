import numpy as np
import pytest

from rmdyn import (
    BoundaryContaminationWarning,
    ClassicalState,
    GaussianParams,
    Grid1D,
    ParticleParams,
    PotentialSpec,
    decomposition_terms,
    ehrenfest_deviation,
    fs_velocity_norm2,
    gaussian_packet,
    momentum_expectation,
    newton_trajectory,
    position_moments,
    split_step_propagate,
)

PARAMS = ParticleParams()
FREE = PotentialSpec("free")


def test_free_packet_center_motion():
    # oracle: <x>(t) = a + (p/m) t for free motion, 10 widths of travel
    grid = Grid1D(512, -32.0, 32.0)
    psi = gaussian_packet(GaussianParams(-10.0, 2.0, 2.0), grid)
    dt, n = 0.01, 1000
    out = split_step_propagate(psi, FREE, PARAMS, dt, n)
    mu, _ = position_moments(out)
    assert mu == pytest.approx(-10.0 + 2.0 * dt * n, abs=1e-4)


def test_free_packet_spreading(fine_grid):
    # oracle: delta(t)^2 = sigma^2 + (hbar t / 2 m sigma)^2
    sigma = 1.0
    psi = gaussian_packet(GaussianParams(0.0, 0.0, sigma), fine_grid)
    t = 4.0
    out = split_step_propagate(psi, FREE, PARAMS, 0.01, 400)
    _, delta = position_moments(out)
    assert delta**2 == pytest.approx(sigma**2 + (t / (2 * sigma)) ** 2, abs=1e-4)


def test_coherent_packet_oscillates():
    k = 1.0
    omega = 1.0
    sigma_c = np.sqrt(0.5)
    grid = Grid1D(512, -16.0, 16.0)
    pot = PotentialSpec("harmonic", k=k)
    a0 = 2.0
    psi = gaussian_packet(GaussianParams(a0, 0.0, sigma_c), grid)
    period = 2 * np.pi / omega
    dt = period / 1000
    deltas = []
    mus = []
    for frac in (0.25, 0.25, 0.25, 0.25):
        psi = split_step_propagate(psi, pot, PARAMS, dt, 250)
        mu, d = position_moments(psi)
        mus.append(mu)
        deltas.append(d)
    assert mus[-1] == pytest.approx(a0 * np.cos(2 * np.pi), abs=1e-4)
    for d in deltas:
        assert d == pytest.approx(sigma_c, abs=1e-4)


def test_split_step_norm_and_energy_conservation(fine_grid):
    pot = PotentialSpec("harmonic", k=0.3)
    psi = gaussian_packet(GaussianParams(1.0, 0.5, 0.9), fine_grid)

    def energy(p):
        k = p.grid.wavenumbers
        kin = np.fft.ifft((k**2 / 2) * np.fft.fft(p.amp))
        h = kin + pot.on_grid(p.grid) * p.amp
        return float(np.real(np.vdot(p.amp, h)) * p.grid.dx)

    # Strang conserves a shadow energy: the true energy oscillates at
    # O(dt^2) within a period but must not drift; compare at full periods
    omega = np.sqrt(0.3)
    period = 2 * np.pi / omega
    dt = period / 1000
    es = [energy(psi)]
    out = psi
    for _ in range(5):
        out = split_step_propagate(out, pot, PARAMS, dt, 1000)
        es.append(energy(out))
    assert abs(np.sum(np.abs(out.amp) ** 2) * fine_grid.dx - 1.0) < 1e-10
    assert max(abs(e - es[0]) for e in es) / abs(es[0]) < 1e-8


def test_boundary_contamination_warns():
    grid = Grid1D(128, -8.0, 8.0)
    psi = gaussian_packet(GaussianParams(0.0, 2.0, 1.0), grid)
    with pytest.warns(BoundaryContaminationWarning):
        split_step_propagate(psi, FREE, PARAMS, 0.01, 600)


def test_fs_speed_zero_momentum_point(fine_grid):
    psi = gaussian_packet(GaussianParams(0.0, 0.0, 1.0), fine_grid)
    assert fs_velocity_norm2(psi, FREE, PARAMS) == pytest.approx(1.0 / 32.0, abs=1e-4)


def test_fs_speed_moving_packet(fine_grid):
    sigma, p = 1.0, 2.0
    psi = gaussian_packet(GaussianParams(0.0, p, sigma), fine_grid)
    expected = p**2 / (4 * sigma**2) + 1.0 / (32 * sigma**4)
    assert fs_velocity_norm2(psi, FREE, PARAMS) == pytest.approx(expected, rel=1e-3)


def test_fs_speed_linear_potential(fine_grid):
    F = 0.7
    sigma = 1.0
    psi = gaussian_packet(GaussianParams(0.0, 0.0, sigma), fine_grid)
    pot = PotentialSpec("linear", force=F)
    expected = F**2 * sigma**2 + 1.0 / (32 * sigma**4)
    assert fs_velocity_norm2(psi, pot, PARAMS) == pytest.approx(expected, rel=1e-3)


def test_fs_speed_phase_and_translation_invariance(fine_grid):
    psi = gaussian_packet(GaussianParams(0.0, 1.0, 1.0), fine_grid)
    pot = PotentialSpec("linear", force=0.5)
    base = fs_velocity_norm2(psi, pot, PARAMS)
    from rmdyn import WaveFunction

    rotated = WaveFunction(fine_grid, np.exp(1.3j) * psi.amp)
    assert fs_velocity_norm2(rotated, pot, PARAMS) == pytest.approx(base, rel=1e-12)
    # translate state and potential together: linear V(x - c) = V(x) + const
    shifted = gaussian_packet(GaussianParams(2.0, 1.0, 1.0), fine_grid)
    assert fs_velocity_norm2(shifted, pot, PARAMS) == pytest.approx(base, rel=1e-6)


def test_decomposition_terms_values(fine_grid):
    terms = decomposition_terms(GaussianParams(0.0, 0.0, 1.0), FREE, PARAMS)
    assert terms == (0.0, 0.0, 1.0 / 32.0)
    k = 0.4
    a = 1.5
    terms = decomposition_terms(GaussianParams(a, 0.0, 1.0), PotentialSpec("harmonic", k=k), PARAMS)
    assert terms[1] == pytest.approx((k * a) ** 2, rel=1e-12)


def test_decomposition_matches_grid_oracle(fine_grid):
    # oracle = spectral variance of h on the grid, for an at-most-linear V
    gp = GaussianParams(0.5, 1.5, 0.8)
    pot = PotentialSpec("linear", force=0.9)
    psi = gaussian_packet(gp, fine_grid)
    assert sum(decomposition_terms(gp, pot, PARAMS)) == pytest.approx(
        fs_velocity_norm2(psi, pot, PARAMS), rel=1e-3
    )


def test_newton_free_motion_exact():
    traj = newton_trajectory(ClassicalState(1.0, 2.0), FREE, PARAMS, 0.1, 100)
    assert traj[-1].a == pytest.approx(1.0 + 2.0 * 10.0, rel=1e-12)
    assert traj[-1].p == 2.0


def test_newton_harmonic_period():
    k = 2.0
    period = 2 * np.pi * np.sqrt(1.0 / k)
    n = 4000
    traj = newton_trajectory(ClassicalState(1.0, 0.0), PotentialSpec("harmonic", k=k), PARAMS, period / n, n)
    assert traj[-1].a == pytest.approx(1.0, rel=1e-4)
    assert abs(traj[-1].p) < 1e-3


def test_newton_linear_force_exact():
    F = 0.5
    traj = newton_trajectory(ClassicalState(0.0, 1.0), PotentialSpec("linear", force=F), PARAMS, 0.1, 50)
    assert traj[-1].p == pytest.approx(1.0 + F * 5.0, rel=1e-12)


def test_newton_energy_drift_harmonic():
    k = 1.0
    period = 2 * np.pi
    traj = newton_trajectory(ClassicalState(1.5, 0.0), PotentialSpec("harmonic", k=k), PARAMS, period / 1000, 1000)
    e = [0.5 * s.p**2 + 0.5 * k * s.a**2 for s in traj]
    # leapfrog energy error oscillates but must not drift: same-phase compare
    assert abs(e[-1] - e[0]) / e[0] < 1e-6
    assert max(abs(x - e[0]) for x in e) / e[0] < 1e-4


def test_ehrenfest_harmonic_one_period():
    k = 1.0
    sigma_c = np.sqrt(0.5)
    grid = Grid1D(512, -16.0, 16.0)
    period = 2 * np.pi
    dev = ehrenfest_deviation(
        GaussianParams(2.0, 0.0, sigma_c), PotentialSpec("harmonic", k=k), PARAMS, grid, period, period / 1000
    )
    assert dev < 1e-3 * sigma_c


def test_ehrenfest_free_travel():
    grid = Grid1D(512, -24.0, 24.0)
    dev = ehrenfest_deviation(GaussianParams(-5.0, 2.0, 1.0), FREE, PARAMS, grid, 5.0, 0.01)
    assert dev < 1e-3


def test_ehrenfest_quartic_breakdown_monotone():
    grid = Grid1D(512, -16.0, 16.0)
    sigma_c = np.sqrt(0.5)
    period = 2 * np.pi
    devs = []
    for eps in (0.0, 1e-3, 1e-2):
        vals = 0.5 * grid.x**2 + eps * grid.x**4
        pot = PotentialSpec("tabulated", values=vals)
        devs.append(
            ehrenfest_deviation(
                GaussianParams(2.0, 0.0, sigma_c), pot, PARAMS, grid, period, period / 1000
            )
        )
    assert devs[0] < devs[1] < devs[2]


def test_constrained_projection_matches_newton():
    # coherent packet's (mu, <p>) trajectory reproduces the leapfrog reference
    k = 1.0
    sigma_c = np.sqrt(0.5)
    grid = Grid1D(512, -16.0, 16.0)
    pot = PotentialSpec("harmonic", k=k)
    dt = 2 * np.pi / 1000
    psi = gaussian_packet(GaussianParams(2.0, 0.0, sigma_c), grid)
    ref = newton_trajectory(ClassicalState(2.0, 0.0), pot, PARAMS, dt, 1000)
    worst = 0.0
    for step in range(1, 1001):
        psi = split_step_propagate(psi, pot, PARAMS, dt, 1)
        mu, _ = position_moments(psi)
        worst = max(worst, abs(mu - ref[step].a))
        if step % 250 == 0:
            assert momentum_expectation(psi) == pytest.approx(ref[step].p, abs=2e-3)
    assert worst < 1e-3 * sigma_c
