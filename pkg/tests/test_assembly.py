import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dpie.assembly import (
    BoundaryDataSpectrum,
    Formulation,
    ModeSystem,
    default_eta,
    efie_mfie_mode_system,
    mode_system,
    scalar_mode_system,
    solve_mode,
    solve_scalar,
    solve_vector,
    truncation_for,
    vector_mode_system,
)
from dpie.errors import DomainError, SingularBlockError
from dpie.sphere_ops import ScalarOpKind, scalar_signature, vector_L_block, vector_R_block


def test_scalar_block_value():
    k, n, eta = 2.0, 3, 1.7
    S = scalar_signature(ScalarOpKind.SINGLE_LAYER, n, k)
    D = scalar_signature(ScalarOpKind.DOUBLE_LAYER, n, k)
    sys = scalar_mode_system(n, k, Formulation.DPIES, eta)
    assert sys.matrix.shape == (1, 1)
    assert sys.matrix[0, 0] == pytest.approx(0.5 + D - 1j * eta * S)


def test_scalar_degree_zero_layout():
    sys = scalar_mode_system(0, 1.0)
    assert sys.unknowns == ("sigma", "V")
    assert sys.matrix[0, 1] == -1 and sys.matrix[1, 1] == 0


def test_vector_block_value():
    k, n, eta = 3.0, 2, 0.8
    sys = vector_mode_system(n, k, Formulation.DPIEV, eta)
    ref = 0.5 * np.eye(3) + vector_L_block(n, k) + 1j * eta * vector_R_block(n, k)
    assert np.allclose(sys.matrix, ref, atol=1e-15)


def test_vector_degree_zero_active_pair():
    sys = vector_mode_system(0, 0.0)
    assert sys.size == 4 and sys.active == (2, 3)
    assert sys.active_matrix.shape == (2, 2)
    assert sys.matrix[2, 3] == 1


def test_scaled_form_rules():
    # below k = 1 the scaled forms reduce to the unscaled ones with eta = 1
    for s, u in ((Formulation.DPIES_SCALED, Formulation.DPIES),
                 (Formulation.DPIEV_SCALED, Formulation.DPIEV)):
        a = mode_system(3, 0.5, s)
        b = mode_system(3, 0.5, u, 1.0)
        assert not a.scaled and np.array_equal(a.matrix, b.matrix)
        c = mode_system(3, 10.0, s)
        assert c.scaled and c.eta == 10.0


def test_default_eta_and_truncation():
    assert default_eta(0.3) == 1.0 and default_eta(7.0) == 7.0
    assert truncation_for(0.0) == 12
    assert truncation_for(10.0) == 35
    ks = np.linspace(0, 50, 400)
    assert np.all(np.diff([truncation_for(k) for k in ks]) >= 0)


def test_efie_mfie():
    with pytest.raises(DomainError):
        efie_mfie_mode_system(1, 0.0, Formulation.EFIE)
    assert efie_mfie_mode_system(0, 1.0, Formulation.EFIE).size == 0
    m = efie_mfie_mode_system(2, 0.0, Formulation.MFIE)
    assert m.matrix.shape == (2, 2) and m.matrix[0, 1] == 0
    e1 = np.linalg.cond(efie_mfie_mode_system(1, 1e-2, Formulation.EFIE).matrix)
    e2 = np.linalg.cond(efie_mfie_mode_system(1, 1e-3, Formulation.EFIE).matrix)
    assert e2 / e1 > 50


def test_argument_errors():
    with pytest.raises(DomainError):
        scalar_mode_system(1, 1.0, Formulation.DPIEV)
    with pytest.raises(DomainError):
        vector_mode_system(1, 1.0, Formulation.DPIES)
    with pytest.raises(DomainError):
        scalar_mode_system(1, 1.0, Formulation.DPIES, eta=0.0)
    with pytest.raises(DomainError):
        scalar_mode_system(-1, 1.0)


def test_solve_mode_errors():
    sing = ModeSystem(1, 1.0, Formulation.DPIES, 1.0, False, np.zeros((1, 1), complex), ("sigma",))
    with pytest.raises(SingularBlockError):
        solve_mode(sing, np.array([1.0]))
    with pytest.raises(DomainError):
        solve_mode(scalar_mode_system(1, 1.0), np.zeros(3))


def test_zero_data_gives_zero_solution():
    data = BoundaryDataSpectrum.zeros(6, 1.0)
    s = solve_scalar(data)
    v = solve_vector(data, Formulation.DPIEV_SCALED)
    assert not np.any(s.sigma) and s.V == 0
    assert not (np.any(v.aU) or np.any(v.aV) or np.any(v.rho)) and v.v == 0


@given(k=st.floats(0.0, 20.0), n=st.integers(0, 60),
       form=st.sampled_from(["dpies", "dpies-scaled", "dpiev", "dpiev-scaled"]))
def test_property_blocks_invertible(k, n, form):
    sys = mode_system(n, k, form)
    s = np.linalg.svd(sys.active_matrix, compute_uv=False)
    assert s.min() > 1e-3


@given(k=st.floats(0.0, 10.0), n=st.integers(1, 30), seed=st.integers(0, 2**16))
def test_property_solve_roundtrip(k, n, seed):
    sys = vector_mode_system(n, k)
    rng = np.random.default_rng(seed)
    b = rng.normal(size=3) + 1j * rng.normal(size=3)
    x = solve_mode(sys, b)
    assert np.allclose(sys.matrix @ x, b, atol=1e-12)
