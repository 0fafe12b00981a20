"""Bounded incoming potentials in the Lorenz gauge and their boundary data.

Sources expose ``potentials``, ``grad_phi`` and ``fields`` at Cartesian points
of shape ``(..., 3)``. All of them stay finite as the frequency goes to zero;
the rejected choice ``A = E / (i omega)`` is kept only as a negative control.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

import numpy as np

from .assembly import BoundaryDataSpectrum
from .errors import DomainError, TruncationError
from .harmonics import HarmonicTables, SphereGrid, mode_index
from .specfun import RadialKind, mod_radial_all, mod_radial_derivative_all

__all__ = [
    "PlaneWave",
    "MultipoleKind",
    "MultipoleSource",
    "plane_wave_potentials",
    "multipole_potentials",
    "rejected_plane_wave_potentials",
    "project_boundary_data",
    "gauge_audit",
    "DECAY_TOLERANCE",
]

log = logging.getLogger(__name__)

DECAY_TOLERANCE = 1e-10


def _points(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 3:
        raise DomainError("points must have a trailing axis of length 3")
    return x


@dataclass(frozen=True)
class PlaneWave:
    """Plane wave ``E = E_p exp(i k u.x)`` with bounded potentials.

    Parameters
    ----------
    E_p : array_like
        Polarization, possibly complex; must satisfy ``E_p . u = 0``.
    u : array_like
        Unit propagation direction.
    k : float
        Wavenumber ``omega sqrt(mu eps)``.
    mu, eps : float
        Material constants of the exterior.
    """

    E_p: np.ndarray
    u: np.ndarray
    k: float
    mu: float = 1.0
    eps: float = 1.0

    def __post_init__(self):
        E_p = np.asarray(self.E_p, dtype=complex).reshape(3)
        u = np.asarray(self.u, dtype=float).reshape(3)
        if abs(np.dot(u, u) - 1) > 1e-12:
            raise DomainError("propagation direction must be a unit vector")
        if abs(np.dot(E_p, u)) > 1e-12 * max(1.0, np.linalg.norm(E_p)):
            raise DomainError("polarization is not transverse to the direction")
        if not (np.isfinite(self.k) and self.k >= 0):
            raise DomainError("wavenumber must be finite and non-negative")
        if self.mu <= 0 or self.eps <= 0:
            raise DomainError("mu and eps must be positive")
        object.__setattr__(self, "E_p", E_p)
        object.__setattr__(self, "u", u)

    lorenz = True

    @property
    def omega(self) -> float:
        return self.k / np.sqrt(self.mu * self.eps)

    @property
    def impedance(self) -> float:
        return np.sqrt(self.mu / self.eps)

    @property
    def amplitude(self) -> float:
        return float(np.linalg.norm(self.E_p))

    def _phase(self, x):
        return np.exp(1j * self.k * (x @ self.u))

    def potentials(self, x) -> tuple[np.ndarray, np.ndarray]:
        """``A = -u (x.E_p) sqrt(mu eps) e``, ``phi = -(x.E_p) e``."""
        x = _points(x)
        e = self._phase(x)
        xe = x @ self.E_p
        phi = -xe * e
        A = np.sqrt(self.mu * self.eps) * phi[..., None] * self.u
        return A, phi

    def grad_phi(self, x) -> np.ndarray:
        x = _points(x)
        e = self._phase(x)
        xe = x @ self.E_p
        return -(e[..., None] * self.E_p + (1j * self.k * xe * e)[..., None] * self.u)

    def fields(self, x) -> tuple[np.ndarray, np.ndarray]:
        x = _points(x)
        e = self._phase(x)[..., None]
        return e * self.E_p, e * np.cross(self.u, self.E_p) / self.impedance

    def describe(self) -> dict:
        return {
            "type": "plane-wave",
            "pol": [complex(c) for c in self.E_p],
            "dir": [float(c) for c in self.u],
            "k": self.k,
            "mu": self.mu,
            "eps": self.eps,
        }


class MultipoleKind(enum.Enum):
    MAGNETIC = "magnetic"
    ELECTRIC = "electric"


def _spherical(x: np.ndarray):
    r = np.linalg.norm(x, axis=-1)
    if np.any(r == 0):
        raise DomainError("multipoles are not evaluated at the origin")
    theta = np.arccos(np.clip(x[..., 2] / r, -1.0, 1.0))
    phi = np.arctan2(x[..., 1], x[..., 0])
    return r, theta, phi


@dataclass(frozen=True)
class MultipoleSource:
    """Unit-strength magnetic or electric multipole of degree n and order m.

    ``radial`` selects the outgoing (h~) or regular (j~) radial function; the
    regular branch is an incident field, the outgoing one radiates from the
    origin.
    """

    n: int
    m: int
    kind: MultipoleKind
    radial: RadialKind
    k: float
    mu: float = 1.0
    eps: float = 1.0

    def __post_init__(self):
        if self.n < 1 or abs(self.m) > self.n:
            raise DomainError(f"need n >= 1 and |m| <= n, got n={self.n}, m={self.m}")
        if not (np.isfinite(self.k) and self.k >= 0):
            raise DomainError("wavenumber must be finite and non-negative")
        object.__setattr__(self, "kind", MultipoleKind(self.kind))
        object.__setattr__(self, "radial", RadialKind(self.radial))

    lorenz = True

    @property
    def omega(self) -> float:
        return self.k / np.sqrt(self.mu * self.eps)

    @property
    def amplitude(self) -> float:
        return 1.0

    def _frame(self, x):
        r, theta, phi = _spherical(x)
        tab = HarmonicTables.build(self.n, theta, phi)
        i = mode_index(self.n, self.m)
        return r, tab.Y[i], tab.U[i], tab.V[i], tab.W[i]

    def _radial(self, r):
        # f, f' at degree n and g, g' at the gradient degree n -/+ 1
        top = self.n + 1
        f = mod_radial_all(self.radial, top, self.k, r)
        df = mod_radial_derivative_all(self.radial, top, self.k, r)
        return f, df

    def _parts(self, x):
        """Radial profiles on the (W, U, V) frame for A, phi and grad phi."""
        x = _points(x)
        r, Y, U, V, W = self._frame(x)
        n = self.n
        c = np.sqrt(n * (n + 1.0))
        f, df = self._radial(r)
        iwme = 1j * self.omega * self.mu * self.eps
        zero = np.zeros(r.shape, dtype=complex)
        if self.kind is MultipoleKind.MAGNETIC:
            aW, aU, aV = zero, zero, -self.mu * c * f[n]
            p, dp = zero, zero
        else:
            if self.radial is RadialKind.REGULAR_BESSEL:
                g, dg, coef = f[n + 1], df[n + 1], iwme / (2 * n + 3)
                p, dp = -(n + 1) * f[n], -(n + 1) * df[n]
            else:
                g, dg, coef = f[n - 1], df[n - 1], -iwme / (2 * n - 1)
                p, dp = n * f[n], n * df[n]
            # -i w mu eps x f Y + coef grad(r g Y)
            aW = -iwme * r * f[n] + coef * (g + r * dg)
            aU = coef * c * g
            aV = zero
        return r, Y, U, V, W, c, f[n], df[n], (aW, aU, aV), (p, dp)

    def potentials(self, x) -> tuple[np.ndarray, np.ndarray]:
        r, Y, U, V, W, c, f, df, (aW, aU, aV), (p, dp) = self._parts(x)
        A = aW[..., None] * W + aU[..., None] * U + aV[..., None] * V
        return A, p * Y

    def grad_phi(self, x) -> np.ndarray:
        r, Y, U, V, W, c, f, df, _, (p, dp) = self._parts(x)
        return dp[..., None] * W + (c * p / r)[..., None] * U

    def fields(self, x) -> tuple[np.ndarray, np.ndarray]:
        r, Y, U, V, W, c, f, df, (aW, aU, aV), (p, dp) = self._parts(x)
        A = aW[..., None] * W + aU[..., None] * U + aV[..., None] * V
        gp = dp[..., None] * W + (c * p / r)[..., None] * U
        E = 1j * self.omega * A - gp
        if self.kind is MultipoleKind.MAGNETIC:
            # curl(f V) = -(c f / r) W - ((r f)' / r) U with A = -mu c f V
            curl = c * (
                (c * f / r)[..., None] * W + ((f + r * df) / r)[..., None] * U
            )
            H = curl
        else:
            iwme = 1j * self.omega * self.mu * self.eps
            H = (iwme * c * f / self.mu)[..., None] * V
        return E, H

    def describe(self) -> dict:
        return {
            "type": "multipole",
            "kind": self.kind.value,
            "radial": self.radial.value,
            "n": self.n,
            "m": self.m,
            "k": self.k,
            "mu": self.mu,
            "eps": self.eps,
        }


def plane_wave_potentials(pw: PlaneWave, x) -> tuple[np.ndarray, np.ndarray]:
    """Bounded plane-wave potentials ``(A, phi)`` at points ``x``."""
    return pw.potentials(x)


def multipole_potentials(src: MultipoleSource, x) -> tuple[np.ndarray, np.ndarray]:
    """Multipole potentials ``(A, phi)`` at points ``x``."""
    return src.potentials(x)


def rejected_plane_wave_potentials(pw: PlaneWave, x) -> tuple[np.ndarray, np.ndarray]:
    """Negative control: the gauge ``A = E / (i omega)``, ``phi = 0``.

    It represents the same field but blows up like ``1 / omega``.
    """
    if pw.omega == 0:
        raise DomainError("A = E / (i omega) is unbounded at omega = 0")
    E, _ = pw.fields(x)
    return E / (1j * pw.omega), np.zeros(E.shape[:-1], dtype=complex)


def project_boundary_data(
    source, nmax: int, grid: SphereGrid | None = None, check_decay: bool = True
) -> BoundaryDataSpectrum:
    """Harmonic coefficients of the boundary data for scattering from ``source``.

    The data are ``f = -phi``, ``(f_U, f_V)`` from ``-n x A``, ``h = -div A``
    (taken as ``-i omega mu eps phi`` for Lorenz-gauge sources), ``Q`` the
    negative flux of ``grad phi`` and ``q`` the negative flux of ``A``.

    Raises
    ------
    TruncationError
        If any data coefficient at degree ``nmax`` exceeds ``DECAY_TOLERANCE``
        times the largest coefficient.
    """
    if not getattr(source, "lorenz", False):
        raise DomainError("only Lorenz-gauge sources can be projected")
    grid = grid or SphereGrid.for_degree(nmax)
    x = grid.points
    A, phi = source.potentials(x)
    dphi = np.einsum("...c,...c->...", source.grad_phi(x), grid.rhat)
    nA = np.einsum("...c,...c->...", A, grid.rhat)
    f = grid.analyze_scalar(-phi, nmax)
    fU, fV = grid.analyze_tangential(-np.cross(grid.rhat, A), nmax)
    iwme = 1j * source.omega * source.mu * source.eps
    h = iwme * f
    Q = complex(-grid.integrate(dphi))
    q = complex(-grid.integrate(nA))
    if check_decay:
        allc = np.concatenate([f, fU, fV, h])
        peak = np.abs(allc).max()
        tail = slice(mode_index(nmax, -nmax), mode_index(nmax, nmax) + 1)
        worst = max(np.abs(a[tail]).max() for a in (f, fU, fV, h))
        if peak > 0 and worst > DECAY_TOLERANCE * peak:
            raise TruncationError(
                f"boundary data not resolved at degree {nmax}: tail/peak "
                f"{worst / peak:.2e}"
            )
    return BoundaryDataSpectrum(nmax, source.k, f, fU, fV, h, Q, q)


def _fd_divergence(fn, x: np.ndarray, step: float) -> np.ndarray:
    """Fourth-order central-difference divergence of ``fn`` at points ``x``."""
    div = np.zeros(x.shape[:-1], dtype=complex)
    for c in range(3):
        e = np.zeros(3)
        e[c] = step
        vals = [fn(x + s * e)[..., c] for s in (-2, -1, 1, 2)]
        div += (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * step)
    return div


def gauge_audit(
    source, points=None, n_points: int = 20, seed: int = 0,
    step: float | None = None, potentials=None,
) -> float:
    """Normalized Lorenz-gauge residual ``|div A - i omega mu eps phi| / (1 + |A|)``.

    Parameters
    ----------
    source
        Incoming source; ``potentials`` may override its potential function
        (used for negative controls).
    points : array_like, optional
        Evaluation points; by default ``n_points`` seeded random points with
        radius in ``[1.2, 3]``.
    step : float, optional
        Finite-difference step, by default ``1e-3 / max(1, k)``.

    Returns
    -------
    float
        Maximum normalized residual over the points.
    """
    pot = potentials or source.potentials
    if points is None:
        rng = np.random.default_rng(seed)
        d = rng.normal(size=(n_points, 3))
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        points = d * rng.uniform(1.2, 3.0, size=(n_points, 1))
    x = _points(points)
    if step is None:
        step = 1e-3 / max(1.0, source.k)
    A, phi = pot(x)
    div = _fd_divergence(lambda y: pot(y)[0], x, step)
    iwme = 1j * source.omega * source.mu * source.eps
    res = np.abs(div - iwme * phi) / (1 + np.linalg.norm(A, axis=-1))
    return float(res.max())
