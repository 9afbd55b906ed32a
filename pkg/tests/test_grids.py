import numpy as np
import pytest

from rmdyn import (
    ConfigurationError,
    DegenerateStateError,
    Grid1D,
    WaveFunction,
    inner,
    marginal,
    momentum_expectation,
    norm,
    normalize,
    position_moments,
    tensor,
)
from rmdyn.grids import joint_position_moments

from conftest import brute_moments, packet


def test_grid_requires_power_of_two():
    with pytest.raises(ConfigurationError):
        Grid1D(100, -1.0, 1.0)


def test_inner_normalized_state_is_one(grid):
    psi = packet(grid)
    assert abs(inner(psi, psi) - 1.0) <= 1e-10


def test_inner_gaussian_overlap_closed_form(grid):
    # oracle: <g_a, g_b> = exp(-(a-b)^2 / 8 sigma^2) for equal widths
    a = packet(grid, a=0.0, sigma=1.0)
    b = packet(grid, a=2.0, sigma=1.0)
    got = inner(a, b)
    assert got.real == pytest.approx(np.exp(-0.5), abs=1e-9)
    assert abs(got.imag) < 1e-12


def test_inner_distinct_sine_modes_orthogonal(grid):
    x = grid.x
    L = grid.length
    s1 = normalize(WaveFunction(grid, np.sin(2 * np.pi * 3 * (x - grid.x_min) / L).astype(complex)))
    s2 = normalize(WaveFunction(grid, np.sin(2 * np.pi * 5 * (x - grid.x_min) / L).astype(complex)))
    assert abs(inner(s1, s2)) <= 1e-10


def test_inner_grid_mismatch_raises(grid):
    other = Grid1D(128, -10.0, 10.0)
    with pytest.raises(ConfigurationError):
        inner(packet(grid), packet(other))


def test_inner_conjugate_symmetry(grid):
    rng = np.random.default_rng(3)
    for _ in range(10):
        a = WaveFunction(grid, rng.normal(size=256) + 1j * rng.normal(size=256))
        b = WaveFunction(grid, rng.normal(size=256) + 1j * rng.normal(size=256))
        assert inner(a, b) == np.conj(inner(b, a))


def test_normalize_scaling_and_phase(grid):
    psi = packet(grid)
    doubled = WaveFunction(grid, 2.0 * psi.amp)
    np.testing.assert_allclose(normalize(doubled).amp, psi.amp, atol=1e-14)
    theta = 0.7
    rotated = WaveFunction(grid, np.exp(1j * theta) * psi.amp)
    np.testing.assert_allclose(normalize(rotated).amp, np.exp(1j * theta) * psi.amp, atol=1e-14)


def test_normalize_sum_has_unit_norm(grid):
    a = packet(grid, a=0.0)
    b = packet(grid, a=4.0)
    out = normalize(WaveFunction(grid, a.amp + b.amp))
    assert abs(norm(out) - 1.0) <= 1e-10


def test_normalize_zero_vector_raises(grid):
    with pytest.raises(DegenerateStateError):
        normalize(WaveFunction(grid, np.zeros(256, dtype=complex)))


def test_position_moments_gaussian(grid):
    psi = packet(grid, a=1.5, sigma=0.5)
    mu, delta = position_moments(psi)
    assert mu == pytest.approx(1.5, abs=1e-6)
    assert delta == pytest.approx(0.5, abs=1e-6)


def test_position_moments_symmetric_superposition(grid):
    a = packet(grid, a=-2.0)
    b = packet(grid, a=2.0)
    psi = normalize(WaveFunction(grid, a.amp + b.amp))
    mu, _ = position_moments(psi)
    assert abs(mu) < 1e-10


def test_position_moments_two_lobe_spread(grid):
    # analytic value sqrt(4 + 0.25) for non-overlapping lobes at +-2, width 0.5
    a = packet(grid, a=-2.0, sigma=0.5)
    b = packet(grid, a=2.0, sigma=0.5)
    psi = normalize(WaveFunction(grid, a.amp + b.amp))
    mu_o, delta_o = brute_moments(psi)
    mu, delta = position_moments(psi)
    assert mu == pytest.approx(mu_o, abs=1e-12)
    assert delta == pytest.approx(delta_o, abs=1e-12)
    assert delta == pytest.approx(np.sqrt(4.25), abs=1e-3)


def test_momentum_expectation_boosted_gaussian(grid):
    psi = packet(grid, p=3.0)
    assert momentum_expectation(psi) == pytest.approx(3.0, abs=1e-6)


def test_momentum_expectation_real_state_zero(grid):
    psi = packet(grid)
    assert abs(momentum_expectation(psi)) < 1e-10


def test_momentum_expectation_conjugate_flips_sign(grid):
    psi = packet(grid, p=2.0)
    conj = WaveFunction(grid, psi.amp.conj())
    assert momentum_expectation(conj) == pytest.approx(-momentum_expectation(psi), abs=1e-10)


def test_parseval(grid):
    rng = np.random.default_rng(11)
    psi = normalize(WaveFunction(grid, rng.normal(size=256) + 1j * rng.normal(size=256)))
    ft = np.fft.fft(psi.amp) / np.sqrt(256)
    assert abs(np.sum(np.abs(ft) ** 2) * grid.dx - 1.0) <= 1e-10


def test_moments_converge_with_resolution():
    # error shrinks as dx drops with padding held at >= 8 sigma
    errs = []
    for n in (128, 256):
        g = Grid1D(n, -10.0, 10.0)
        mu, delta = position_moments(packet(g, a=0.7, sigma=1.0))
        errs.append(abs(mu - 0.7) + abs(delta - 1.0))
    assert errs[1] <= errs[0]
    assert errs[1] < 1e-8


def test_tensor_norm_and_moments(grid):
    small = Grid1D(64, -10.0, 10.0)
    a = packet(small, a=0.0, sigma=1.0)
    b = packet(small, a=1.0, sigma=1.4)
    prod = tensor(a, b)
    dens = np.abs(prod.amp) ** 2
    assert dens.sum() * small.dx * small.dx == pytest.approx(1.0, abs=1e-10)
    m = joint_position_moments(prod)
    assert m["mu_a"] == pytest.approx(0.0, abs=1e-8)
    assert m["delta_a"] == pytest.approx(1.0, abs=1e-6)
    assert m["mu_b"] == pytest.approx(1.0, abs=1e-8)
    assert m["delta_b"] == pytest.approx(1.4, abs=1e-4)


def test_marginal_of_product_state(grid):
    small = Grid1D(64, -10.0, 10.0)
    a = packet(small, a=0.0)
    b = packet(small, a=2.0)
    prod = tensor(a, b)
    dens = marginal(prod, "first")
    np.testing.assert_allclose(dens, np.abs(a.amp) ** 2, atol=1e-10)
    assert dens.sum() * small.dx == pytest.approx(1.0, abs=1e-8)


def test_marginal_entangled_bimodal():
    small = Grid1D(64, -10.0, 10.0)
    gm = packet(small, a=-1.0, sigma=0.4)
    gp = packet(small, a=1.0, sigma=0.4)
    amp = np.outer(gm.amp, gm.amp) + np.outer(gp.amp, gp.amp)
    amp /= np.sqrt((np.abs(amp) ** 2).sum() * small.dx**2)
    from rmdyn import WaveFunction2

    state = WaveFunction2(small, small, amp)
    dens = marginal(state, "first")
    x = small.x
    center = np.isclose(x, 0.0)
    left = dens[x < 0].sum() * small.dx + 0.5 * dens[center].sum() * small.dx
    right = dens[x > 0].sum() * small.dx + 0.5 * dens[center].sum() * small.dx
    assert left == pytest.approx(0.5, abs=1e-3)
    assert right == pytest.approx(0.5, abs=1e-3)


def test_marginal_independent_of_other_factor():
    small = Grid1D(64, -10.0, 10.0)
    a = packet(small, a=0.5)
    for other_center in (-2.0, 0.0, 2.0):
        b = packet(small, a=other_center)
        dens = marginal(tensor(a, b), "first")
        np.testing.assert_allclose(dens, np.abs(a.amp) ** 2, atol=1e-10)
