"""Closed-form spectral signatures of the layer operators on the unit sphere.

The Green's function ``e^{ik|x-y|} / (4 pi |x-y|)`` expands as
``sum_n j~_n(k, r<) h~_n(k, r>) / (2n+1) sum_m Y_n^m(x) conj(Y_n^m(y))`` in the
normalized radial functions, so every operator is diagonal in the harmonic
basis. Scalar signatures are principal values on ``r = 1``:

* ``S``: ``j~ h~ / (2n+1)``
* ``D`` and ``S'``: ``(j~' h~ + j~ h~') / (2 (2n+1))``
* ``D'``: ``j~' h~' / (2n+1)``

Jump terms are never included; ``D`` exterior is ``D + 1/2`` and the exterior
``S'`` is ``S' - 1/2``.

Vector operators act on densities ``a = a_U U + a_V V`` and ``rho Y``. Their
3x3 blocks map ``(a_U, a_V, rho)`` to the ``(U, V, scalar)`` components of the
output. The tangential blocks mix degrees ``n - 1`` and ``n + 1`` of the
scalar single layer because the Cartesian components of ``U`` and ``W`` are
harmonics of those degrees.
"""

from __future__ import annotations

import enum
import logging
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .specfun import MAX_DEGREE, RadialKind, mod_radial_all, mod_radial_derivative_all

__all__ = [
    "ScalarOpKind",
    "scalar_signature",
    "scalar_signatures",
    "vector_L_block",
    "vector_R_block",
    "VectorSignatures",
    "vector_signatures",
]

log = logging.getLogger(__name__)


class ScalarOpKind(enum.Enum):
    """Scalar layer operators."""

    SINGLE_LAYER = "S"
    DOUBLE_LAYER = "D"
    NORMAL_DERIV_SINGLE = "Sp"
    HYPERSINGULAR = "Dp"


def _check(n: int, k: float) -> None:
    if int(n) != n or n < 0 or n > MAX_DEGREE:
        raise DomainError(f"degree must be an integer in [0, {MAX_DEGREE}], got {n}")
    if not (np.isfinite(k) and k >= 0):
        raise DomainError(f"wavenumber must be finite and non-negative, got {k}")


@lru_cache(maxsize=256)
def _unit_radial(nmax: int, k: float) -> tuple[np.ndarray, ...]:
    # j~, j~', h~, h~' at r = 1 for degrees 0..nmax; arrays are frozen
    one = np.asarray(1.0)
    out = (
        mod_radial_all(RadialKind.REGULAR_BESSEL, nmax, k, one).astype(complex),
        mod_radial_derivative_all(RadialKind.REGULAR_BESSEL, nmax, k, one).astype(
            complex
        ),
        mod_radial_all(RadialKind.OUTGOING_HANKEL, nmax, k, one),
        mod_radial_derivative_all(RadialKind.OUTGOING_HANKEL, nmax, k, one),
    )
    for a in out:
        a.setflags(write=False)
    return out


def scalar_signatures(op: ScalarOpKind, nmax: int, k: float) -> np.ndarray:
    """Signatures of one scalar operator for every degree ``0 .. nmax``.

    Parameters
    ----------
    op : ScalarOpKind
    nmax : int
    k : float
        Wavenumber, ``k >= 0``; ``k = 0`` gives the Laplace values.

    Returns
    -------
    ndarray of complex, shape ``(nmax + 1,)``
    """
    _check(nmax, k)
    return _signatures(ScalarOpKind(op), int(nmax), float(k))


def _signatures(op: ScalarOpKind, nmax: int, k: float) -> np.ndarray:
    j, dj, h, dh = _unit_radial(nmax, k)
    w = 2.0 * np.arange(nmax + 1) + 1.0
    if op is ScalarOpKind.SINGLE_LAYER:
        return j * h / w
    if op is ScalarOpKind.HYPERSINGULAR:
        return dj * dh / w
    return (dj * h + j * dh) / (2 * w)


def scalar_signature(op: ScalarOpKind, n: int, k: float) -> complex:
    """Eigenvalue of a scalar layer operator on ``Y_n^m`` (any m).

    Examples
    --------
    >>> scalar_signature(ScalarOpKind.SINGLE_LAYER, 0, 0.0)
    (1+0j)
    >>> scalar_signature(ScalarOpKind.DOUBLE_LAYER, 0, 0.0)
    (-0.5+0j)
    """
    _check(n, k)
    return complex(scalar_signatures(op, n, k)[n])


class VectorSignatures:
    """Per-degree building blocks of the vector operators.

    Attributes are arrays over degrees ``0 .. nmax``. Entries that need the
    degree ``n - 1`` single layer are zero at ``n = 0`` where their factors
    vanish anyway.

    Attributes
    ----------
    s, d : ndarray
        Scalar single- and double-layer signatures (``d`` is also the PV of
        the radial derivative of the single-layer profile).
    ell_u, ell_v : ndarray
        PV of ``n x curl S`` on U and on V.
    s_uu, s_uw, s_ww : ndarray
        Single layer acting on ``U`` and ``W = n Y``: ``S[U]`` has U component
        ``s_uu`` and W component ``s_uw``; ``S[W]`` has W component ``s_ww``
        and U component ``s_uw``.
    """

    def __init__(self, nmax: int, k: float):
        self.nmax = nmax
        self.k = k
        s = _signatures(ScalarOpKind.SINGLE_LAYER, nmax + 1, k)
        d = _signatures(ScalarOpKind.DOUBLE_LAYER, nmax + 1, k)
        n = np.arange(nmax + 1, dtype=float)
        w = 2 * n + 1
        c = np.sqrt(n * (n + 1))
        s_up, d_up = s[1:], d[1:]
        s_dn = np.concatenate([[0.0], s[:-2]])
        d_dn = np.concatenate([[0.0], d[:-2]])
        self.c = c
        self.s = s[:-1].copy()
        self.d = d[:-1].copy()
        self.s_uu = (n * s_up + (n + 1) * s_dn) / w
        self.s_ww = ((n + 1) * s_up + n * s_dn) / w
        self.s_uw = c * (s_dn - s_up) / w
        self.ell_u = -(
            n * ((n + 2) * s_up + d_up) + (n + 1) * ((1 - n) * s_dn + d_dn)
        ) / w
        self.ell_v = -(self.s + self.d)
        self.s_uw[0] = 0.0
        self.s_uu[0] = 0.0
        self.ell_u[0] = 0.0
        self.ell_v[0] = 0.0

    def L(self, n: int) -> np.ndarray:
        """PV block of the L operator at degree n."""
        blk = np.zeros((3, 3), dtype=complex)
        blk[0, 0] = self.ell_u[n]
        blk[1, 1] = self.ell_v[n]
        blk[1, 2] = -self.s_uw[n]
        blk[2, 2] = self.d[n]
        return blk

    def R(self, n: int) -> np.ndarray:
        """PV block of the R operator at degree n."""
        c = self.c[n]
        blk = np.zeros((3, 3), dtype=complex)
        blk[0, 0] = -self.s[n] if n > 0 else 0.0
        blk[1, 1] = -self.s_uu[n]
        blk[1, 2] = c * self.s[n]
        blk[2, 1] = c * self.s[n]
        blk[2, 2] = -self.k**2 * self.s[n]
        return blk


@lru_cache(maxsize=64)
def vector_signatures(nmax: int, k: float) -> VectorSignatures:
    """Cached :class:`VectorSignatures` for degrees ``0 .. nmax``."""
    _check(nmax, k)
    return VectorSignatures(int(nmax), float(k))


def vector_L_block(n: int, k: float) -> np.ndarray:
    """3x3 PV block of ``L`` mapping ``(a_U, a_V, rho)`` to ``(f_U, f_V, h)``.

    ``L a = n x curl S[a]`` on the tangential rows, ``-n x S[n rho]`` couples
    the scalar density into the tangential rows and ``D`` acts on ``rho``.
    """
    _check(n, k)
    return vector_signatures(int(n), float(k)).L(int(n))


def vector_R_block(n: int, k: float) -> np.ndarray:
    """3x3 PV block of ``R``.

    ``R a = n x S[n x a]`` and ``n x grad S[rho]`` on the tangential rows;
    ``div S[n x a]`` and ``-k^2 S[rho]`` on the scalar row.
    """
    _check(n, k)
    return vector_signatures(int(n), float(k)).R(int(n))
