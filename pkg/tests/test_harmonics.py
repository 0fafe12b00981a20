import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import sph_harm_y

from dpie.errors import DomainError
from dpie.harmonics import (
    HarmonicTables,
    SphereGrid,
    mode_count,
    mode_degrees,
    mode_index,
    sph_harmonic,
    vector_harmonic_frame,
)


def test_mode_indexing():
    assert mode_index(0, 0) == 0
    assert mode_index(1, -1) == 1
    assert mode_index(3, 3) == mode_count(3) - 1
    n, m = mode_degrees(4)
    assert [mode_index(a, b) for a, b in zip(n, m)] == list(range(mode_count(4)))


@pytest.mark.parametrize("n,m", [(0, 0), (1, -1), (3, 2), (7, -5), (12, 12)])
def test_matches_scipy(n, m):
    th = np.array([0.0, 0.3, 1.2, 2.9, np.pi])
    ph = np.array([0.0, 1.0, 2.5, 4.0, 6.0])
    assert np.allclose(sph_harmonic(n, m, th, ph), sph_harm_y(n, m, th, ph), atol=1e-13)


def test_orthonormality():
    nmax = 10
    g = SphereGrid.for_degree(nmax)
    tab = HarmonicTables.build(nmax, g.theta_grid, g.phi_grid)
    gram = np.einsum("atp,btp,tp->ab", tab.Y.conj(), tab.Y, g.weights)
    assert np.abs(gram - np.eye(mode_count(nmax))).max() < 1e-12
    U = tab.U[1:]
    V = tab.V[1:]
    gu = np.einsum("atpc,btpc,tp->ab", U.conj(), U, g.weights)
    gv = np.einsum("atpc,btpc,tp->ab", V.conj(), V, g.weights)
    guv = np.einsum("atpc,btpc,tp->ab", U.conj(), V, g.weights)
    eye = np.eye(mode_count(nmax) - 1)
    assert np.abs(gu - eye).max() < 1e-12
    assert np.abs(gv - eye).max() < 1e-12
    assert np.abs(guv).max() < 1e-12


def test_surface_gradient_by_differencing():
    n, m = 5, 3
    th, ph, h = 0.8, 1.1, 1e-6
    f = vector_harmonic_frame(n, m, th, ph)
    dth = (sph_harmonic(n, m, th + h, ph) - sph_harmonic(n, m, th - h, ph)) / (2 * h)
    dph = (sph_harmonic(n, m, th, ph + h) - sph_harmonic(n, m, th, ph - h)) / (2 * h)
    that = np.array([np.cos(th) * np.cos(ph), np.cos(th) * np.sin(ph), -np.sin(th)])
    phat = np.array([-np.sin(ph), np.cos(ph), 0.0])
    grad = (dth * that + dph / np.sin(th) * phat) / np.sqrt(n * (n + 1))
    assert np.allclose(f.U, grad, atol=1e-8)


def test_pole_values_finite():
    tab = HarmonicTables.build(8, np.array([0.0, np.pi]), np.array([0.0, 0.0]))
    assert np.all(np.isfinite(tab.U)) and np.all(np.isfinite(tab.V))


def test_analysis_roundtrip(rng):
    nmax = 9
    g = SphereGrid.for_degree(nmax)
    tab = HarmonicTables.build(nmax, g.theta_grid, g.phi_grid)
    c = rng.normal(size=mode_count(nmax)) + 1j * rng.normal(size=mode_count(nmax))
    f = np.einsum("a,atp->tp", c, tab.Y)
    assert np.allclose(g.analyze_scalar(f, nmax), c, atol=1e-12)
    cu = rng.normal(size=mode_count(nmax)) + 0j
    cv = rng.normal(size=mode_count(nmax)) + 0j
    cu[0] = cv[0] = 0
    F = np.einsum("a,atpc->tpc", cu, tab.U) + np.einsum("a,atpc->tpc", cv, tab.V)
    ru, rv = g.analyze_tangential(F, nmax)
    assert np.allclose(ru, cu, atol=1e-12) and np.allclose(rv, cv, atol=1e-12)


def test_grid_too_coarse():
    g = SphereGrid(8, 10)
    with pytest.raises(DomainError):
        g.analyze_scalar(np.zeros((8, 10)), 6)


@given(n=st.integers(0, 20), th=st.floats(0.0, np.pi), ph=st.floats(0.0, 2 * np.pi))
def test_property_conjugate_symmetry(n, th, ph):
    for m in range(-n, n + 1, max(1, n // 3)):
        a = sph_harmonic(n, -m, th, ph)
        b = (-1) ** m * np.conj(sph_harmonic(n, m, th, ph))
        assert abs(a - b) < 1e-12


@given(n=st.integers(1, 15), th=st.floats(0.01, 3.13), ph=st.floats(0.0, 6.28))
def test_property_frame_orthogonality(n, th, ph):
    f = vector_harmonic_frame(n, n // 2, th, ph)
    rhat = np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])
    assert abs(np.dot(f.U, rhat)) < 1e-12
    assert np.allclose(f.V, np.cross(rhat, f.U), atol=1e-14)
