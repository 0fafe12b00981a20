import numpy as np
import pytest

from dpie.errors import DomainError
from dpie.oracle import (
    _route_addition,
    _route_direct,
    oracle_evaluate,
    oracle_scalar_signature,
    oracle_vector_block,
)
from dpie.sphere_ops import ScalarOpKind, scalar_signature, vector_L_block, vector_R_block


@pytest.mark.parametrize("n,m,k", [(0, 0, 0.0), (2, 1, 1.0), (3, -2, 2.0)])
def test_two_routes_agree(n, m, k):
    a = _route_addition(n, m, k, 64)
    b = _route_direct(n, m, k, 64)
    assert a.distance(b) < 1e-6


@pytest.mark.parametrize("n,k", [(1, 0.5), (4, 10.0)])
def test_matches_closed_forms(n, k):
    for op in ScalarOpKind:
        ref = scalar_signature(op, n, k)
        assert abs(oracle_scalar_signature(op, n, 1, k) - ref) < 1e-6
    assert np.abs(oracle_vector_block("L", n, 1, k) - vector_L_block(n, k)).max() < 1e-6
    assert np.abs(oracle_vector_block("R", n, 1, k) - vector_R_block(n, k)).max() < 1e-6


def test_order_independence():
    a = oracle_evaluate(3, 0, 1.0, 64)
    b = oracle_evaluate(3, 3, 1.0, 64)
    c = oracle_evaluate(3, -2, 1.0, 64)
    assert a.distance(b) < 1e-8 and a.distance(c) < 1e-8


def test_returns_copies():
    blk = oracle_vector_block("L", 1, 0, 1.0)
    blk[:] = 0
    assert np.abs(oracle_vector_block("L", 1, 0, 1.0)).max() > 0


def test_validation():
    with pytest.raises(DomainError):
        oracle_evaluate(2, 3, 1.0, 64)
    with pytest.raises(DomainError):
        oracle_evaluate(2, 0, -1.0, 64)
    with pytest.raises(DomainError):
        oracle_evaluate(30, 0, 1.0, 64)
    with pytest.raises(DomainError):
        oracle_vector_block("X", 1, 0, 1.0)
