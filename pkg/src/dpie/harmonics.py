"""Scalar and vector spherical harmonics plus a tensor-product sphere grid.

Harmonics are orthonormal on the unit sphere with the Condon-Shortley phase,
``Y_n^{-m} = (-1)^m conj(Y_n^m)``. Coefficient arrays are flat, indexed by
``n * n + n + m`` for ``0 <= n <= nmax`` and ``|m| <= n``.

The vector frame at degree n is

* ``U = grad_s Y / sqrt(n (n + 1))``
* ``V = rhat x U``
* ``W = rhat Y``
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError

__all__ = [
    "mode_index",
    "mode_count",
    "mode_degrees",
    "legendre_tables",
    "sph_harmonic",
    "VectorHarmonicFrame",
    "vector_harmonic_frame",
    "HarmonicTables",
    "SphereGrid",
]


def mode_index(n: int, m: int) -> int:
    """Flat position of ``(n, m)`` in a coefficient array."""
    if abs(m) > n:
        raise DomainError(f"|m| must not exceed n, got n={n}, m={m}")
    return n * n + n + m


def mode_count(nmax: int) -> int:
    """Length of a coefficient array truncated at degree ``nmax``."""
    return (nmax + 1) ** 2


def mode_degrees(nmax: int) -> tuple[np.ndarray, np.ndarray]:
    """Degree and order arrays aligned with the flat coefficient layout."""
    n = np.concatenate([np.full(2 * l + 1, l) for l in range(nmax + 1)])
    m = np.concatenate([np.arange(-l, l + 1) for l in range(nmax + 1)])
    return n, m


def legendre_tables(nmax: int, theta) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Normalized associated Legendre functions and their angular companions.

    Parameters
    ----------
    nmax : int
        Highest degree.
    theta : array_like
        Polar angles.

    Returns
    -------
    p, dp, mp : ndarray
        Each of shape ``(nmax + 1, nmax + 1) + theta.shape`` indexed ``[n, m]``
        for ``0 <= m <= n``: the function ``Pbar_n^m(cos theta)`` including the
        ``sqrt((2n+1)/(4 pi) (n-m)!/(n+m)!)`` factor and the Condon-Shortley
        phase, its theta-derivative, and ``m Pbar_n^m / sin(theta)``. The last
        two are built from recurrences that stay finite at the poles.
    """
    theta = np.asarray(theta, dtype=float)
    x = np.cos(theta)
    s = np.sin(theta)
    # tables padded by one degree so the companion identities can look ahead
    top = nmax + 1
    p = np.zeros((top + 1, top + 2) + theta.shape)
    p[0, 0] = 1.0 / np.sqrt(4 * np.pi)
    for m in range(1, top + 1):
        p[m, m] = -np.sqrt((2 * m + 1) / (2 * m)) * s * p[m - 1, m - 1]
    for m in range(0, top):
        p[m + 1, m] = np.sqrt(2 * m + 3) * x * p[m, m]
    for m in range(0, top + 1):
        for n in range(m + 2, top + 1):
            a = np.sqrt((4 * n * n - 1) / (n * n - m * m))
            b = np.sqrt(((n - 1) ** 2 - m * m) / (4 * (n - 1) ** 2 - 1))
            p[n, m] = a * (x * p[n - 1, m] - b * p[n - 2, m])

    def at(n: int, m: int) -> np.ndarray:
        # Pbar_n^m with the symmetry Pbar_n^{-m} = (-1)^m Pbar_n^m
        if abs(m) > n:
            return np.zeros(theta.shape)
        if m < 0:
            return (-1) ** (-m) * p[n, -m]
        return p[n, m]

    shape = (nmax + 1, nmax + 1) + theta.shape
    dp = np.zeros(shape)
    mp = np.zeros(shape)
    for n in range(nmax + 1):
        for m in range(0, n + 1):
            dp[n, m] = 0.5 * (
                np.sqrt((n + m + 1) * (n - m)) * at(n, m + 1)
                - np.sqrt((n + m) * (n - m + 1)) * at(n, m - 1)
            )
            if m == 0 or n == 0:
                continue
            mp[n, m] = -0.5 * np.sqrt((2 * n + 1) / (2 * n - 1)) * (
                np.sqrt((n - m) * (n - m - 1)) * at(n - 1, m + 1)
                + np.sqrt((n + m) * (n + m - 1)) * at(n - 1, m - 1)
            )
    return p[: nmax + 1, : nmax + 1].copy(), dp, mp


def _phase(m: np.ndarray | int):
    return np.where(np.asarray(m) < 0, (-1.0) ** np.abs(m), 1.0)


def sph_harmonic(n: int, m: int, theta, phi) -> np.ndarray:
    """Orthonormal spherical harmonic ``Y_n^m(theta, phi)``.

    Examples
    --------
    >>> float(abs(sph_harmonic(0, 0, 0.3, 1.0)) * np.sqrt(4 * np.pi))
    1.0
    """
    if n < 0 or abs(m) > n:
        raise DomainError(f"need n >= 0 and |m| <= n, got n={n}, m={m}")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    p, _, _ = legendre_tables(n, theta)
    return _phase(m) * p[n, abs(m)] * np.exp(1j * m * phi)


@dataclass(frozen=True)
class VectorHarmonicFrame:
    """Cartesian components of the (U, V, W) frame, each shaped ``(..., 3)``."""

    U: np.ndarray
    V: np.ndarray
    W: np.ndarray


def _spherical_units(theta: np.ndarray, phi: np.ndarray):
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    rhat = np.stack([st * cp, st * sp, ct], axis=-1)
    that = np.stack([ct * cp, ct * sp, -st], axis=-1)
    phat = np.stack([-sp, cp, np.zeros_like(sp)], axis=-1)
    return rhat, that, phat


def vector_harmonic_frame(n: int, m: int, theta, phi) -> VectorHarmonicFrame:
    """Vector frame ``(U, V, W)`` of degree n and order m at given angles."""
    if n < 0 or abs(m) > n:
        raise DomainError(f"need n >= 0 and |m| <= n, got n={n}, m={m}")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    theta, phi = np.broadcast_arrays(theta, phi)
    tables = HarmonicTables.build(n, theta, phi)
    return tables.frame(n, m)


@dataclass(frozen=True)
class HarmonicTables:
    """Scalar and vector harmonics for all modes up to ``nmax`` at fixed points.

    Attributes
    ----------
    Y : ndarray
        Shape ``(modes, *points)``.
    dtheta, dphi : ndarray
        ``dY/dtheta`` and ``(1/sin theta) dY/dphi``, same shape as ``Y``.
    rhat, that, phat : ndarray
        Spherical unit vectors, shape ``(*points, 3)``.
    """

    nmax: int
    Y: np.ndarray
    dtheta: np.ndarray
    dphi: np.ndarray
    rhat: np.ndarray
    that: np.ndarray
    phat: np.ndarray

    @classmethod
    def build(cls, nmax: int, theta, phi) -> "HarmonicTables":
        theta = np.asarray(theta, dtype=float)
        phi = np.asarray(phi, dtype=float)
        p, dp, mp = legendre_tables(nmax, theta)
        ns, ms = mode_degrees(nmax)
        am = np.abs(ms)
        expand = (slice(None),) + (None,) * theta.ndim
        phase = _phase(ms)[expand]
        e = np.exp(1j * ms[expand] * phi[None])
        Y = phase * p[ns, am] * e
        dth = phase * dp[ns, am] * e
        dph = 1j * np.sign(ms)[expand] * phase * mp[ns, am] * e
        rhat, that, phat = _spherical_units(theta, phi)
        return cls(nmax, Y, dth, dph, rhat, that, phat)

    @cached_property
    def _norms(self) -> np.ndarray:
        ns, _ = mode_degrees(self.nmax)
        c = np.sqrt(ns * (ns + 1.0))
        return np.where(c > 0, 1.0 / np.where(c > 0, c, 1.0), 0.0)

    @cached_property
    def U(self) -> np.ndarray:
        """Shape ``(modes, *points, 3)``."""
        inv = self._norms.reshape((-1,) + (1,) * (self.Y.ndim - 1))
        return (
            (inv * self.dtheta)[..., None] * self.that[None]
            + (inv * self.dphi)[..., None] * self.phat[None]
        )

    @cached_property
    def V(self) -> np.ndarray:
        return np.cross(self.rhat[None], self.U)

    @cached_property
    def W(self) -> np.ndarray:
        return self.Y[..., None] * self.rhat[None]

    def frame(self, n: int, m: int) -> VectorHarmonicFrame:
        i = mode_index(n, m)
        return VectorHarmonicFrame(self.U[i], self.V[i], self.W[i])


class SphereGrid:
    """Gauss-Legendre (polar) by trapezoid (azimuth) grid on the unit sphere.

    Parameters
    ----------
    n_theta, n_phi : int
        Node counts. Products of band-limited functions with total degree up
        to ``2 n_theta - 1`` in cos(theta) and below ``n_phi`` in azimuth are
        integrated exactly.
    """

    def __init__(self, n_theta: int, n_phi: int):
        x, w = np.polynomial.legendre.leggauss(n_theta)
        self.n_theta = n_theta
        self.n_phi = n_phi
        self.theta = np.arccos(x)
        self.phi = 2 * np.pi * np.arange(n_phi) / n_phi
        self.weights_theta = w
        th, ph = np.meshgrid(self.theta, self.phi, indexing="ij")
        self.theta_grid = th
        self.phi_grid = ph
        self.weights = np.outer(w, np.full(n_phi, 2 * np.pi / n_phi))
        self.rhat, self.that, self.phat = _spherical_units(th, ph)

    @classmethod
    def for_degree(cls, nmax: int, extra: int = 16) -> "SphereGrid":
        """Grid that resolves products of two degree-``nmax`` fields."""
        return cls(nmax + extra, 2 * nmax + 2 * extra)

    @property
    def points(self) -> np.ndarray:
        """Cartesian nodes, shape ``(n_theta, n_phi, 3)``."""
        return self.rhat

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Surface integral over the trailing ``(n_theta, n_phi)`` axes."""
        return np.tensordot(values, self.weights, axes=([-2, -1], [0, 1]))

    def _azimuthal(self, values: np.ndarray, nmax: int) -> np.ndarray:
        if self.n_phi <= 2 * nmax:
            raise DomainError("azimuthal resolution too low for requested degree")
        # F[..., t, m] = (2 pi / n_phi) sum_j f e^{-i m phi_j}
        return np.fft.fft(values, axis=-1) * (2 * np.pi / self.n_phi)

    def analyze_scalar(self, values: np.ndarray, nmax: int) -> np.ndarray:
        """Coefficients ``<Y_n^m, f>`` for all modes up to ``nmax``.

        ``values`` may carry leading batch axes before ``(n_theta, n_phi)``.
        """
        F = self._azimuthal(np.asarray(values, dtype=complex), nmax)
        p, _, _ = legendre_tables(nmax, self.theta)
        ns, ms = mode_degrees(nmax)
        pw = _phase(ms)[:, None] * p[ns, np.abs(ms)] * self.weights_theta[None]
        Fm = F[..., ms % self.n_phi]  # (..., n_theta, modes)
        return np.einsum("...tk,kt->...k", Fm, pw)

    def analyze_tangential(
        self, field: np.ndarray, nmax: int
    ) -> tuple[np.ndarray, np.ndarray]:
        """Coefficients ``<U, F>`` and ``<V, F>`` of a Cartesian field.

        Parameters
        ----------
        field : ndarray
            Shape ``(..., n_theta, n_phi, 3)``.
        """
        field = np.asarray(field, dtype=complex)
        ft = np.einsum("...c,...c->...", field, self.that)
        fp = np.einsum("...c,...c->...", field, self.phat)
        Ft = self._azimuthal(ft, nmax)
        Fp = self._azimuthal(fp, nmax)
        _, dp, mp = legendre_tables(nmax, self.theta)
        ns, ms = mode_degrees(nmax)
        am = np.abs(ms)
        ph = _phase(ms)[:, None]
        c = np.sqrt(ns * (ns + 1.0))
        inv = np.where(c > 0, 1.0 / np.where(c > 0, c, 1.0), 0.0)[:, None]
        wt = self.weights_theta[None]
        d = ph * dp[ns, am] * inv * wt
        q = np.sign(ms)[:, None] * ph * mp[ns, am] * inv * wt
        Ftm = Ft[..., ms % self.n_phi]
        Fpm = Fp[..., ms % self.n_phi]
        # conj(U) = (d theta-hat - i q phi-hat) e^{-i m phi}
        cu = np.einsum("...tk,kt->...k", Ftm, d) - 1j * np.einsum(
            "...tk,kt->...k", Fpm, q
        )
        # V = rhat x U swaps theta-hat -> phi-hat, phi-hat -> -theta-hat
        cv = np.einsum("...tk,kt->...k", Fpm, d) + 1j * np.einsum(
            "...tk,kt->...k", Ftm, q
        )
        return cu, cv
