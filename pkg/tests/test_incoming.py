import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dpie.errors import DomainError, TruncationError
from dpie.harmonics import HarmonicTables
from dpie.incoming import (
    MultipoleKind,
    MultipoleSource,
    PlaneWave,
    gauge_audit,
    project_boundary_data,
    rejected_plane_wave_potentials,
)
from dpie.specfun import RadialKind

from conftest import exterior_points

Z = np.array([0.0, 0.0, 1.0])


def _sources(k):
    yield PlaneWave(np.array([1.0, 1j, 0.0]), Z, k)
    for kind in MultipoleKind:
        for radial in RadialKind:
            yield MultipoleSource(3, -2, kind, radial, k)


def _fd_curl(fn, x, h=1e-4):
    J = np.zeros(x.shape + (3,), dtype=complex)  # J[..., i, j] = d_j F_i
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        J[..., :, j] = (fn(x + e) - fn(x - e)) / (2 * h)
    return np.stack(
        [J[..., 2, 1] - J[..., 1, 2], J[..., 0, 2] - J[..., 2, 0], J[..., 1, 0] - J[..., 0, 1]],
        axis=-1,
    )


@pytest.mark.parametrize("k", [0.0, 1e-3, 1.0, 10.0])
def test_every_generator_is_lorenz(k):
    for src in _sources(k):
        assert gauge_audit(src) <= 1e-6, src.describe()


@pytest.mark.parametrize("k", [0.0, 0.7, 4.0])
def test_fields_follow_from_potentials(k, rng):
    x = exterior_points(rng, 6, 1.2, 3.0)
    for src in _sources(k):
        A, _ = src.potentials(x)
        E, H = src.fields(x)
        E_pot = 1j * src.omega * A - src.grad_phi(x)
        assert np.allclose(E, E_pot, atol=1e-12)
        curl = _fd_curl(lambda y: src.potentials(y)[0], x)
        assert np.allclose(H, curl / src.mu, atol=1e-6)


@pytest.mark.parametrize("k", [0.5, 3.0])
def test_multipole_fields_satisfy_maxwell(k, rng):
    x = exterior_points(rng, 5, 1.2, 3.0)
    for src in _sources(k):
        curlE = _fd_curl(lambda y: src.fields(y)[0], x)
        _, H = src.fields(x)
        assert np.allclose(curlE, 1j * src.omega * src.mu * H, atol=1e-6)


def test_grad_phi_by_differencing(rng):
    x = exterior_points(rng, 4, 1.2, 2.5)
    h = 1e-5
    for src in _sources(2.0):
        g = np.zeros(x.shape, dtype=complex)
        for c in range(3):
            e = np.zeros(3)
            e[c] = h
            g[:, c] = (src.potentials(x + e)[1] - src.potentials(x - e)[1]) / (2 * h)
        assert np.allclose(src.grad_phi(x), g, atol=1e-8)


def test_plane_wave_potentials_bounded_at_zero_frequency(rng):
    x = exterior_points(rng, 10, 1.0, 3.0)
    sizes = []
    for k in (1e-2, 1e-4, 1e-6, 0.0):
        A, phi = PlaneWave(np.array([1.0, 0, 0]), Z, k).potentials(x)
        sizes.append(np.abs(A).max() + np.abs(phi).max())
    assert max(sizes) < 10


def test_rejected_gauge_diverges(rng):
    x = exterior_points(rng, 10, 1.0, 3.0)
    sizes = []
    for k in (1e-1, 1e-3, 1e-5):
        A, _ = rejected_plane_wave_potentials(PlaneWave(np.array([1.0, 0, 0]), Z, k), x)
        sizes.append(np.abs(A).max())
    assert sizes[2] / sizes[0] == pytest.approx(1e4, rel=1e-2)
    with pytest.raises(DomainError):
        rejected_plane_wave_potentials(PlaneWave(np.array([1.0, 0, 0]), Z, 0.0), x)


def test_validation():
    with pytest.raises(DomainError):
        PlaneWave(np.array([1.0, 0, 0]), np.array([1.0, 0, 0]), 1.0)
    with pytest.raises(DomainError):
        PlaneWave(np.array([1.0, 0, 0]), np.array([0, 0, 2.0]), 1.0)
    with pytest.raises(DomainError):
        PlaneWave(np.array([1.0, 0, 0]), Z, -1.0)
    with pytest.raises(DomainError):
        PlaneWave(np.array([1.0, 0, 0]), Z, 1.0, mu=0.0)
    with pytest.raises(DomainError):
        MultipoleSource(0, 0, MultipoleKind.MAGNETIC, RadialKind.REGULAR_BESSEL, 1.0)
    with pytest.raises(DomainError):
        project_boundary_data(object(), 5)


def test_projection_reconstructs_dirichlet_data():
    pw = PlaneWave(np.array([0.0, 1.0, 0.0]), Z, 2.0)
    nmax = 30
    data = project_boundary_data(pw, nmax)
    th = np.array([0.3, 1.4, 2.8])
    ph = np.array([0.1, 3.0, 5.5])
    tab = HarmonicTables.build(nmax, th, ph)
    x = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], -1)
    _, phi = pw.potentials(x)
    assert np.allclose(tab.Y.T @ data.f, -phi, atol=1e-12)
    assert np.allclose(data.h, 1j * pw.omega * data.f)


def test_projection_truncation_error():
    with pytest.raises(TruncationError):
        project_boundary_data(PlaneWave(np.array([1.0, 0, 0]), Z, 30.0), 10)


@given(
    k=st.floats(0.0, 8.0),
    n=st.integers(1, 5),
    kind=st.sampled_from(list(MultipoleKind)),
    radial=st.sampled_from(list(RadialKind)),
)
def test_property_multipole_lorenz(k, n, kind, radial):
    src = MultipoleSource(n, n // 2, kind, radial, k)
    assert gauge_audit(src, n_points=4) <= 1e-6


@given(theta=st.floats(0.0, np.pi), phi=st.floats(0.0, 2 * np.pi), k=st.floats(0.0, 10.0))
def test_property_plane_wave_any_direction(theta, phi, k):
    u = np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
    e = np.cross(u, [0.3, -0.5, 0.8])
    e /= np.linalg.norm(e)
    assert gauge_audit(PlaneWave(e, u, k), n_points=4) <= 1e-6
