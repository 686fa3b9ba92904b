import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

import diracwalk.evolve as ev
import diracwalk.spectral as sp
from diracwalk.errors import DomainError, InputError
from diracwalk.lattice import LatticeGeometry, norm_sq

K_GRID = np.linspace(-np.pi, np.pi, 10_001)


def test_transfer_matrix_examples():
    assert np.allclose(sp.transfer_matrix(0.0), np.eye(2), atol=1e-15)
    assert np.allclose(sp.transfer_matrix(np.pi / 2), [[0, -1j], [-1j, 0]], atol=1e-15)
    m = sp.transfer_matrix(K_GRID)
    assert np.max(np.abs(np.linalg.det(m) - 1)) < 1e-14
    eye = np.einsum("kij,klj->kil", m, m.conj())
    assert np.max(np.abs(eye - np.eye(2))) < 1e-14


def test_transfer_matrix_is_one_walk_step_per_mode():
    """Build the mode matrix from the walk itself: evolve pure even/odd plane waves one step."""
    L = 32
    g = LatticeGeometry((L,))
    e = ev.WalkEngine.create(g)
    n = np.arange(L)
    for j in range(L // 2):
        k = np.pi * j / (L // 2)
        cols = []
        for parity in (0, 1):
            f = ev.init_delta(g)
            f.amps[:] = np.where(n % 2 == parity, np.exp(-1j * k * n), 0)
            out = ev.step(e, f).amps
            # coefficients back on the same plane waves
            cols.append([np.sum(np.exp(1j * k * n) * out * (n % 2 == q)) / (L // 2) for q in (0, 1)])
        assert np.allclose(np.array(cols).T, sp.transfer_matrix(k), atol=1e-13)


def test_dispersion_examples():
    assert sp.dispersion(0.0) == 0.0
    assert sp.dispersion(np.pi / 2) == pytest.approx(np.pi / 2, abs=1e-15)
    assert sp.dispersion(np.pi / 4) == pytest.approx(np.pi / 3, abs=1e-15)
    lp, lm = sp.eigenvalues(np.pi / 4)
    assert lp == pytest.approx(0.5 + 1j * math.sqrt(0.5) * math.sqrt(1.5), abs=1e-15)
    assert abs(lp) == pytest.approx(1, abs=1e-15)
    lp, lm = sp.eigenvalues(np.pi / 2)
    assert lp == pytest.approx(1j, abs=1e-15) and lm == pytest.approx(-1j, abs=1e-15)


def test_eigenvalues_on_grid():
    lp, lm = sp.eigenvalues(K_GRID)
    assert np.max(np.abs(np.abs(lp) - 1)) < 1e-14
    assert np.max(np.abs(lp - np.exp(1j * sp.dispersion(K_GRID) * np.sign(np.sin(K_GRID))))) < 1e-7
    ev_num = np.linalg.eigvals(sp.transfer_matrix(K_GRID))
    pair = np.stack([lp, lm], axis=1)
    direct = np.abs(ev_num - pair).max(axis=1)
    swapped = np.abs(ev_num - pair[:, ::-1]).max(axis=1)
    assert np.max(np.minimum(direct, swapped)) < 1e-7


def test_eigenvectors():
    k = K_GRID[np.abs(np.sin(K_GRID)) > 1e-3]
    ep, em = sp.eigenvectors(k)
    lp, lm = sp.eigenvalues(k)
    m = sp.transfer_matrix(k)
    assert np.max(np.abs(np.einsum("kij,kj->ki", m, ep) - lp[:, None] * ep)) < 1e-12
    assert np.max(np.abs(np.einsum("kij,kj->ki", m, em) - lm[:, None] * em)) < 1e-12
    assert np.max(np.abs(np.sum(ep.conj() * em, axis=1))) < 1e-12
    ep, em = sp.eigenvectors(np.pi / 2)
    assert np.allclose(ep, np.array([-1, 1]) / math.sqrt(2))
    assert np.allclose(em, np.array([1, 1]) / math.sqrt(2))
    ep, em = sp.eigenvectors(0.0)
    assert np.array_equal(ep, [1, 0]) and np.array_equal(em, [0, 1])


def test_group_velocity_by_finite_differences():
    k = np.linspace(1e-4, np.pi / 2, 20_001)
    h = 1e-6
    v = (sp.dispersion(k + h) - sp.dispersion(k - h)) / (2 * h)
    # sqrt(2) sites per step, i.e. 1/sqrt(2) of the directed walk's 2 sites per step
    assert np.max(np.abs(v)) == pytest.approx(math.sqrt(2), rel=1e-4)
    assert np.max(np.abs(v)) / 2 == pytest.approx(1 / math.sqrt(2), rel=1e-4)
    assert np.allclose(sp.dispersion(-k), sp.dispersion(k))


@pytest.mark.parametrize("start, t, L", [("delta", 32, 256), ("symmetric", 100, 512), ("delta", 100, 512)])
def test_spectral_matches_direct(start, t, L):
    g = LatticeGeometry((L,))
    f0 = ev.init_delta(g) if start == "delta" else ev.init_symmetric_1d(g)
    direct = ev.run(ev.WalkEngine.create(g), f0, t)
    assert np.max(np.abs(sp.spectral_propagate(f0, t).amps - direct.amps)) < 1e-8


def test_spectral_identity_and_errors():
    g = LatticeGeometry((64,))
    f = ev.init_random(g, 2)
    assert np.max(np.abs(sp.spectral_propagate(f, 0).amps - f.amps)) < 1e-14
    with pytest.raises(InputError):
        sp.spectral_propagate(ev.init_delta(LatticeGeometry((4, 4))), 1)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31), st.integers(0, 40), st.integers(0, 40))
def test_parseval_and_composition(seed, t1, t2):
    g = LatticeGeometry((128,))
    f = ev.init_random(g, seed)
    assert sp.to_spectral(f).norm_sq() == pytest.approx(norm_sq(f), abs=1e-10)
    two = sp.spectral_propagate(sp.spectral_propagate(f, t1), t2)
    assert np.max(np.abs(two.amps - sp.spectral_propagate(f, t1 + t2).amps)) < 1e-10


def test_smooth_density_values():
    assert sp.smooth_density(0.0, 32) == pytest.approx(1 / (64 * math.pi), rel=1e-15)
    assert 1 / (64 * math.pi) == pytest.approx(0.0049736, abs=1e-7)
    near = sp.smooth_density(math.sqrt(2) * 32 * (1 - 1e-9), 32)
    assert near > 1e3 * sp.smooth_density(0.0, 32)
    with pytest.raises(DomainError):
        sp.smooth_density(math.sqrt(2) * 32, 32)


@pytest.mark.parametrize("t", [1, 8, 32, 64])
def test_smooth_moments_by_raw_quadrature(t):
    """Integrate the singular density directly (quad's algebraic endpoint weight) as an oracle."""
    a = math.sqrt(2) * t

    def raw(n, p):
        # density times sqrt(a - n), leaving the (a - n)^(-1/2) factor to the weight
        return abs(n) ** p * 4 * t * t / (math.pi * math.sqrt(2) * math.sqrt(a + n) * (4 * t * t - n * n))

    vals = []
    for p in (0, 1, 2):
        half = integrate.quad(raw, 0, a, args=(p,), weight="alg", wvar=(0, -0.5))[0]
        vals.append(2 * half)
    closed = sp.smooth_moments(t)
    quad = sp.smooth_moments_quadrature(t)
    for v, c, q in zip(vals, closed, quad):
        assert v == pytest.approx(c, rel=1e-6)
        assert q == pytest.approx(c, rel=1e-6)


def test_smooth_moments_examples():
    assert sp.smooth_moments(1) == pytest.approx((1, 1, 2 * (2 - math.sqrt(2))))
    assert 2 * (2 - math.sqrt(2)) == pytest.approx(1.17157, abs=1e-5)
    assert sp.smooth_moments(32)[2] == pytest.approx(1199.6906242599, rel=1e-12)


def test_dispersion_table():
    header, rows = sp.dispersion_table(1024)
    assert header == ["k", "omega", "re_lambda_plus", "im_lambda_plus"]
    k_half = [r for r in rows if r[0] == pytest.approx(math.pi / 2, abs=1e-12)]
    assert len(k_half) == 1 and k_half[0][1] == pytest.approx(math.pi / 2, abs=1e-15)
