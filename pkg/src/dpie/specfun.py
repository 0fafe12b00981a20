"""Spherical Bessel/Hankel functions and their normalized radial forms.

The normalized ("modified") radial functions used throughout the package are

.. math::

    \\tilde h_n(k, r) = \\frac{i (kr)^{n+1} h_n(kr)}{(2n-1)!!\\, r^{n+1}},
    \\qquad
    \\tilde j_n(k, r) = \\frac{(2n+1)!!\\, j_n(kr)}{k^n},

so that :math:`\\tilde h_n \\to r^{-(n+1)}` and :math:`\\tilde j_n \\to r^n` as
:math:`k \\to 0`. Neither is ever formed from the raw function and a double
factorial; both are built from the scaled quantities

* ``H_n(z) = i z^{n+1} h_n(z) / (2n-1)!!`` (tends to 1 as z -> 0)
* ``J_n(z) = (2n+1)!! j_n(z) / z^n`` (tends to 1 as z -> 0)

which are O(1) wherever the raw functions would over- or underflow.
"""

from __future__ import annotations

import enum

import numpy as np

from .errors import DomainError

__all__ = [
    "MAX_DEGREE",
    "MAX_ARGUMENT",
    "RadialKind",
    "SphericalPoint",
    "scaled_bessel_all",
    "scaled_hankel_all",
    "sph_bessel_j",
    "sph_bessel_y",
    "sph_hankel1",
    "sph_bessel_j_all",
    "sph_bessel_y_all",
    "sph_hankel1_all",
    "sph_hankel1_derivative_all",
    "sph_bessel_j_derivative_all",
    "mod_radial",
    "mod_radial_all",
    "mod_radial_derivative",
    "mod_radial_derivative_all",
]

MAX_DEGREE = 200
MAX_ARGUMENT = 500.0

_SERIES_TERMS = 28
_RESCALE = 1e200


class RadialKind(enum.Enum):
    """Branch of the normalized radial function."""

    OUTGOING_HANKEL = "outgoing"
    REGULAR_BESSEL = "regular"


class SphericalPoint:
    """A point given by radius and angles, convertible to Cartesian form."""

    __slots__ = ("r", "theta", "phi")

    def __init__(self, r: float, theta: float, phi: float):
        if not r > 0:
            raise DomainError(f"radius must be positive, got {r}")
        if not 0.0 <= theta <= np.pi:
            raise DomainError(f"theta must lie in [0, pi], got {theta}")
        self.r = float(r)
        self.theta = float(theta)
        self.phi = float(phi) % (2 * np.pi)

    @classmethod
    def from_cartesian(cls, x) -> "SphericalPoint":
        x = np.asarray(x, dtype=float)
        r = float(np.linalg.norm(x))
        if r == 0:
            raise DomainError("the origin has no angular coordinates")
        theta = float(np.arccos(np.clip(x[2] / r, -1.0, 1.0)))
        return cls(r, theta, float(np.arctan2(x[1], x[0])))

    def cartesian(self) -> np.ndarray:
        st = np.sin(self.theta)
        return self.r * np.array(
            [st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)]
        )

    def __repr__(self) -> str:
        return f"SphericalPoint(r={self.r!r}, theta={self.theta!r}, phi={self.phi!r})"


def _check_degree(n: int, slack: int = 0) -> None:
    if int(n) != n or n < 0 or n > MAX_DEGREE + slack:
        raise DomainError(f"degree must be an integer in [0, {MAX_DEGREE}], got {n}")


def _check_argument(
    z: np.ndarray, allow_zero: bool = False, limit: float | None = None
) -> None:
    if np.any(~np.isfinite(z)):
        raise DomainError("argument must be finite")
    if allow_zero:
        bad = np.any(z < 0)
    else:
        bad = np.any(z <= 0)
    if bad:
        raise DomainError("argument must be positive")
    if limit is not None and np.any(z > limit):
        raise DomainError(f"argument must not exceed {limit}")


def _miller_j(nmax: int, z: np.ndarray) -> np.ndarray:
    """Raw j_0..j_nmax by downward recurrence, for z bounded away from 0."""
    zmax = float(np.max(z)) if z.size else 0.0
    size = max(nmax, zmax)
    start = int(size + 30 + 10 * size ** (1.0 / 3.0))
    out = np.zeros((nmax + 1,) + z.shape)
    f_hi = np.zeros_like(z)
    f = np.full_like(z, 1e-30)
    for i in range(start, 0, -1):
        f_lo = (2 * i + 1) / z * f - f_hi
        f_hi, f = f, f_lo
        if i - 1 <= nmax:
            out[i - 1] = f
        big = np.abs(f) > _RESCALE
        if np.any(big):
            scale = np.where(big, 1.0 / _RESCALE, 1.0)
            f = f * scale
            f_hi = f_hi * scale
            out *= scale
    j0 = np.sin(z) / z
    j1 = np.sin(z) / z**2 - np.cos(z) / z
    use0 = np.abs(j0) >= np.abs(j1)
    norm = np.where(use0, j0 / out[0], j1 / np.where(use0, 1.0, out[min(1, nmax)]))
    if nmax == 0:
        norm = j0 / out[0]
    return out * norm


def scaled_bessel_all(nmax: int, z) -> np.ndarray:
    """Scaled regular functions ``J_n(z) = (2n+1)!! j_n(z) / z^n`` for n <= nmax.

    Parameters
    ----------
    nmax : int
        Highest degree.
    z : array_like
        Non-negative real arguments.

    Returns
    -------
    ndarray
        Shape ``(nmax + 1,) + z.shape``. ``J_n(0) = 1`` for every n.
    """
    _check_degree(nmax, slack=2)
    z = np.asarray(z, dtype=float)
    _check_argument(z, allow_zero=True)
    shape = z.shape
    z = z.ravel()
    out = np.empty((nmax + 1, z.size))
    z2 = z * z
    far = z2 > 3.0
    if np.any(far):
        zf = z[far]
        raw = _miller_j(nmax, zf)
        prod = np.ones_like(zf)
        vals = np.empty((nmax + 1, zf.size))
        with np.errstate(over="ignore", invalid="ignore"):
            for n in range(nmax + 1):
                if n > 0:
                    prod = prod * (2 * n + 1) / zf
                vals[n] = prod * raw[n]
        out[:, far] = vals
    for n in range(nmax + 1):
        # power series wherever the argument is small relative to the degree
        near = z2 <= 2 * n + 3
        if not np.any(near):
            continue
        w = -0.5 * z2[near]
        term = np.ones_like(w)
        total = np.ones_like(w)
        for p in range(1, _SERIES_TERMS):
            term = term * w / (p * (2 * n + 2 * p + 1))
            total = total + term
        out[n, near] = total
    return out.reshape((nmax + 1,) + shape)


def scaled_hankel_all(nmax: int, z) -> np.ndarray:
    """Scaled outgoing functions ``H_n(z) = i z^{n+1} h_n(z) / (2n-1)!!``.

    The real part obeys a stable upward recurrence; the imaginary part is
    ``c_n J_n`` with ``c_n = z^{2n+1} / ((2n+1)!! (2n-1)!!)``.

    Parameters
    ----------
    nmax : int
        Highest degree.
    z : array_like
        Non-negative real arguments.

    Returns
    -------
    ndarray of complex
        Shape ``(nmax + 1,) + z.shape``. ``H_n(0) = 1`` for every n.
    """
    _check_degree(nmax, slack=2)
    z = np.asarray(z, dtype=float)
    _check_argument(z, allow_zero=True)
    jj = scaled_bessel_all(nmax, z)
    z2 = z * z
    re = np.empty((nmax + 1,) + z.shape)
    re[0] = np.cos(z)
    if nmax >= 1:
        re[1] = np.cos(z) + z * np.sin(z)
    for n in range(1, nmax):
        re[n + 1] = re[n] - z2 / ((2 * n + 1) * (2 * n - 1)) * re[n - 1]
    coef = np.empty_like(re)
    coef[0] = z
    for n in range(1, nmax + 1):
        coef[n] = coef[n - 1] * z2 / ((2 * n + 1) * (2 * n - 1))
    return re + 1j * coef * jj


def _raw_prefactors(nmax: int, z: np.ndarray) -> np.ndarray:
    """``z^n / (2n+1)!!`` for n <= nmax, built as a running product."""
    out = np.empty((nmax + 1,) + z.shape)
    out[0] = 1.0
    for n in range(1, nmax + 1):
        out[n] = out[n - 1] * z / (2 * n + 1)
    return out


def sph_bessel_j_all(nmax: int, z) -> np.ndarray:
    """Spherical Bessel functions ``j_0 .. j_nmax`` at positive real z."""
    _check_degree(nmax, slack=2)
    z = np.asarray(z, dtype=float)
    _check_argument(z)
    return scaled_bessel_all(nmax, z) * _raw_prefactors(nmax, z)


def sph_bessel_y_all(nmax: int, z) -> np.ndarray:
    """Spherical Neumann functions ``y_0 .. y_nmax`` by upward recurrence."""
    _check_degree(nmax, slack=2)
    z = np.asarray(z, dtype=float)
    _check_argument(z)
    out = np.empty((nmax + 1,) + z.shape)
    out[0] = -np.cos(z) / z
    if nmax >= 1:
        out[1] = -np.cos(z) / z**2 - np.sin(z) / z
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, nmax):
            out[n + 1] = (2 * n + 1) / z * out[n] - out[n - 1]
    return out


def sph_hankel1_all(nmax: int, z) -> np.ndarray:
    """Spherical Hankel functions of the first kind ``h_n = j_n + i y_n``."""
    return sph_bessel_j_all(nmax, z) + 1j * sph_bessel_y_all(nmax, z)


def sph_bessel_j_derivative_all(nmax: int, z) -> np.ndarray:
    """Derivatives ``j_n'(z)`` via ``j_n' = n j_n / z - j_{n+1}``."""
    z = np.asarray(z, dtype=float)
    j = sph_bessel_j_all(nmax + 1, z)
    n = np.arange(nmax + 1).reshape((-1,) + (1,) * z.ndim)
    return n * j[: nmax + 1] / z - j[1:]


def sph_hankel1_derivative_all(nmax: int, z) -> np.ndarray:
    """Derivatives ``h_n'(z)`` via ``h_n' = h_{n-1} - (n+1) h_n / z``."""
    z = np.asarray(z, dtype=float)
    h = sph_hankel1_all(max(nmax, 1), z)
    out = np.empty((nmax + 1,) + z.shape, dtype=complex)
    out[0] = -h[1]
    for n in range(1, nmax + 1):
        out[n] = h[n - 1] - (n + 1) / z * h[n]
    return out


def sph_bessel_j(n: int, z: float) -> float:
    """Spherical Bessel function ``j_n(z)`` for real ``0 < z <= 500``.

    Examples
    --------
    >>> round(sph_bessel_j(0, 1.0), 10)
    0.8414709848
    """
    _check_degree(n)
    _check_argument(np.asarray(z, dtype=float), limit=MAX_ARGUMENT)
    return float(sph_bessel_j_all(n, np.asarray(z, dtype=float))[n])


def sph_bessel_y(n: int, z: float) -> float:
    """Spherical Neumann function ``y_n(z)``."""
    _check_degree(n)
    _check_argument(np.asarray(z, dtype=float), limit=MAX_ARGUMENT)
    return float(sph_bessel_y_all(n, np.asarray(z, dtype=float))[n])


def sph_hankel1(n: int, z: float) -> complex:
    """Spherical Hankel function of the first kind ``h_n(z)``."""
    _check_degree(n)
    _check_argument(np.asarray(z, dtype=float), limit=MAX_ARGUMENT)
    return complex(sph_hankel1_all(n, np.asarray(z, dtype=float))[n])


def _check_radius(r: np.ndarray) -> None:
    if np.any(~(r > 0)) or np.any(~np.isfinite(r)):
        raise DomainError("radius must be positive and finite")


def _check_k(k: float) -> None:
    if not (np.isfinite(k) and k >= 0):
        raise DomainError(f"wavenumber must be finite and non-negative, got {k}")


def mod_radial_all(kind: RadialKind, nmax: int, k: float, r) -> np.ndarray:
    """Normalized radial functions for degrees ``0 .. nmax``.

    Parameters
    ----------
    kind : RadialKind
        ``OUTGOING_HANKEL`` for h~_n, ``REGULAR_BESSEL`` for j~_n.
    nmax : int
        Highest degree.
    k : float
        Wavenumber, ``k >= 0``. ``k = 0`` returns the exact static monomials.
    r : array_like
        Positive radii.

    Returns
    -------
    ndarray
        Shape ``(nmax + 1,) + r.shape``; complex for the outgoing branch.
    """
    _check_degree(nmax, slack=2)
    _check_k(k)
    r = np.asarray(r, dtype=float)
    _check_radius(r)
    kind = RadialKind(kind)
    n = np.arange(nmax + 1).reshape((-1,) + (1,) * r.ndim)
    if kind is RadialKind.OUTGOING_HANKEL:
        base = r ** (-(n + 1.0))
        if k == 0:
            return base.astype(complex)
        return scaled_hankel_all(nmax, k * r) * base
    base = r ** n.astype(float)
    if k == 0:
        return base
    return scaled_bessel_all(nmax, k * r) * base


def mod_radial_derivative_all(
    kind: RadialKind, nmax: int, k: float, r
) -> np.ndarray:
    """Radial derivatives of :func:`mod_radial_all` via degree recurrences."""
    _check_degree(nmax, slack=1)
    kind = RadialKind(kind)
    r = np.asarray(r, dtype=float)
    if kind is RadialKind.OUTGOING_HANKEL:
        h = mod_radial_all(kind, nmax, k, r)
        out = np.empty_like(h)
        out[0] = (1j * k - 1.0 / r) * h[0]
        for n in range(1, nmax + 1):
            out[n] = (r * k * k / (2 * n - 1) * h[n - 1] - (n + 1) * h[n]) / r
        return out
    j = mod_radial_all(kind, nmax + 1, k, r)
    n = np.arange(nmax + 1).reshape((-1,) + (1,) * r.ndim)
    return (n * j[: nmax + 1] - r * k * k / (2 * n + 3) * j[1:]) / r


def mod_radial(kind: RadialKind, n: int, k: float, r: float) -> complex:
    """Single value of the normalized radial function.

    Examples
    --------
    >>> mod_radial(RadialKind.OUTGOING_HANKEL, 2, 0.0, 2.0)
    (0.125+0j)
    >>> mod_radial(RadialKind.REGULAR_BESSEL, 3, 0.0, 2.0)
    (8+0j)
    """
    _check_degree(n)
    return complex(mod_radial_all(kind, n, k, np.asarray(r, dtype=float))[n])


def mod_radial_derivative(kind: RadialKind, n: int, k: float, r: float) -> complex:
    """Radial derivative of :func:`mod_radial`."""
    _check_degree(n)
    return complex(
        mod_radial_derivative_all(kind, n, k, np.asarray(r, dtype=float))[n]
    )
