"""Classical Mie series for a plane wave scattered by the PEC unit sphere.

This module is the reference against which the integral-equation solver is
checked, so it shares nothing with it beyond the raw spherical Bessel
functions. The series is written for an x-polarized wave travelling along +z
and rotated to the requested direction; a complex polarization is treated as
the sum of its two transverse components.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .incoming import PlaneWave
from .specfun import sph_bessel_j_all, sph_hankel1_all

__all__ = [
    "FieldSample",
    "mie_order",
    "mie_coefficients",
    "mie_reference",
    "mie_far_field",
    "cross_sections",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FieldSample:
    """Electric and magnetic fields at a batch of points, each ``(..., 3)``."""

    E: np.ndarray
    H: np.ndarray


def mie_order(k: float) -> int:
    """Series length with a comfortable margin over the usual rule."""
    return int(np.ceil(k + 4.05 * k ** (1.0 / 3.0) + 20))


def mie_coefficients(nmax: int, k: float) -> tuple[np.ndarray, np.ndarray]:
    """PEC coefficients ``a_n = psi_n'(k) / xi_n'(k)`` and ``b_n = psi_n / xi_n``.

    Returns arrays over ``n = 1 .. nmax``.
    """
    if not k > 0:
        raise DomainError("the Mie series needs k > 0")
    j = sph_bessel_j_all(nmax + 1, k)
    h = sph_hankel1_all(nmax + 1, k)
    n = np.arange(1, nmax + 1)
    # (z f_n)' = z f_{n-1} - n f_n
    dpsi = k * j[n - 1] - n * j[n]
    dxi = k * h[n - 1] - n * h[n]
    return dpsi / dxi, j[n] / h[n]


def _angular(nmax: int, mu: np.ndarray):
    pi = np.zeros((nmax + 1,) + mu.shape)
    tau = np.zeros_like(pi)
    if nmax >= 1:
        pi[1] = 1.0
    for n in range(2, nmax + 1):
        pi[n] = ((2 * n - 1) * mu * pi[n - 1] - n * pi[n - 2]) / (n - 1)
    for n in range(1, nmax + 1):
        tau[n] = n * mu * pi[n] - (n + 1) * pi[n - 1]
    return pi[1:], tau[1:]


def _frame(u: np.ndarray):
    """Orthonormal ``(e1, e2, u)`` with e1, e2 spanning the transverse plane."""
    a = np.array([1.0, 0.0, 0.0]) if abs(u[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = a - np.dot(a, u) * u
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(u, e1)


def _local_xpol(k, nmax, r, theta, phi, far: bool):
    """Scattered (E, H*Z) for a unit x-polarized wave along +z, local basis.

    Returns the spherical components ``(r, theta, phi)`` of E and Z H. With
    ``far`` set, returns the far-field amplitudes ``lim r e^{-ikr} (...)``.
    """
    a, b = mie_coefficients(nmax, k)
    n = np.arange(1, nmax + 1)[:, None]
    En = (1j**n) * (2 * n + 1) / (n * (n + 1.0))
    mu = np.cos(theta)
    st = np.sin(theta)
    pi, tau = _angular(nmax, mu)
    cp, sp = np.cos(phi), np.sin(phi)
    if far:
        # h_n(z) ~ (-i)^{n+1} e^{iz} / z and (z h_n)'/z ~ (-i)^n e^{iz} / z
        hz = ((-1j) ** (n + 1)) / k * np.ones_like(r)[None]
        dxz = ((-1j) ** n) / k * np.ones_like(r)[None]
        hr = np.zeros_like(hz)
    else:
        rho = k * r
        h = sph_hankel1_all(nmax, rho)
        hz = h[1:]
        dxz = (rho * h[:-1] - n * h[1:]) / rho
        hr = h[1:] / rho
    nn1 = n * (n + 1.0)
    # vector harmonics with the radial function folded in
    M_o = (cp * pi * hz, -sp * tau * hz)
    M_e = (-sp * pi * hz, -cp * tau * hz)
    N_e = (cp * nn1 * st * pi * hr, cp * tau * dxz, -sp * pi * dxz)
    N_o = (sp * nn1 * st * pi * hr, sp * tau * dxz, cp * pi * dxz)
    Er = np.sum(En * 1j * a[:, None] * N_e[0], axis=0)
    Et = np.sum(En * (1j * a[:, None] * N_e[1] - b[:, None] * M_o[0]), axis=0)
    Ep = np.sum(En * (1j * a[:, None] * N_e[2] - b[:, None] * M_o[1]), axis=0)
    Hr = np.sum(En * 1j * b[:, None] * N_o[0], axis=0)
    Ht = np.sum(En * (1j * b[:, None] * N_o[1] + a[:, None] * M_e[0]), axis=0)
    Hp = np.sum(En * (1j * b[:, None] * N_o[2] + a[:, None] * M_e[1]), axis=0)
    return (Er, Et, Ep), (Hr, Ht, Hp)


def _evaluate(pw: PlaneWave, x: np.ndarray, nmax: int | None, far: bool):
    if not pw.k > 0:
        raise DomainError("the Mie series needs k > 0")
    x = np.asarray(x, dtype=float)
    shape = x.shape[:-1]
    x = x.reshape(-1, 3)
    nmax = nmax or mie_order(pw.k)
    e1, e2 = _frame(pw.u)
    E_tot = np.zeros(x.shape, dtype=complex)
    H_tot = np.zeros(x.shape, dtype=complex)
    for ex, ey, amp in ((e1, e2, np.dot(pw.E_p, e1)), (e2, -e1, np.dot(pw.E_p, e2))):
        if amp == 0:
            continue
        ez = pw.u
        loc = np.stack([x @ ex, x @ ey, x @ ez], axis=-1)
        r = np.linalg.norm(loc, axis=-1)
        if not far and np.any(r < 1 - 1e-12):
            raise DomainError("evaluation points must lie outside the unit sphere")
        theta = np.arccos(np.clip(loc[:, 2] / np.where(r > 0, r, 1), -1, 1))
        phi = np.arctan2(loc[:, 1], loc[:, 0])
        (Er, Et, Ep), (Hr, Ht, Hp) = _local_xpol(pw.k, nmax, r, theta, phi, far)
        st, ct = np.sin(theta), np.cos(theta)
        sp, cp = np.sin(phi), np.cos(phi)
        rh = np.stack([st * cp, st * sp, ct], -1)
        th = np.stack([ct * cp, ct * sp, -st], -1)
        ph = np.stack([-sp, cp, np.zeros_like(sp)], -1)
        Eloc = Er[:, None] * rh + Et[:, None] * th + Ep[:, None] * ph
        Hloc = Hr[:, None] * rh + Ht[:, None] * th + Hp[:, None] * ph
        R = np.stack([ex, ey, ez], axis=1)  # local -> global
        E_tot += amp * Eloc @ R.T
        H_tot += amp * Hloc @ R.T / pw.impedance
    return E_tot.reshape(shape + (3,)), H_tot.reshape(shape + (3,))


def mie_reference(pw: PlaneWave, x, nmax: int | None = None) -> FieldSample:
    """Scattered fields at exterior points ``x`` (shape ``(..., 3)``)."""
    E, H = _evaluate(pw, x, nmax, far=False)
    return FieldSample(E, H)


def mie_far_field(pw: PlaneWave, directions, nmax: int | None = None) -> np.ndarray:
    """Far-field amplitude ``F`` with ``E_sc ~ F e^{ikr} / r``."""
    d = np.asarray(directions, dtype=float)
    d = d / np.linalg.norm(d, axis=-1, keepdims=True)
    E, _ = _evaluate(pw, d, nmax, far=True)
    return E


def cross_sections(pw: PlaneWave, nmax: int | None = None, n_quad: int = 64):
    """Extinction (optical theorem) and scattering (angular quadrature) sections.

    Returns
    -------
    (C_ext, C_sca) : tuple of float
        Both normalized by ``|E_p|^2``; equal for a lossless scatterer.
    """
    amp2 = np.vdot(pw.E_p, pw.E_p).real
    F0 = mie_far_field(pw, pw.u[None], nmax)[0]
    c_ext = 4 * np.pi / pw.k * np.imag(np.vdot(pw.E_p, F0)) / amp2
    x, w = np.polynomial.legendre.leggauss(n_quad)
    ph = 2 * np.pi * np.arange(2 * n_quad) / (2 * n_quad)
    th = np.arccos(x)
    T, P = np.meshgrid(th, ph, indexing="ij")
    d = np.stack([np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)], -1)
    F = mie_far_field(pw, d, nmax)
    wts = np.outer(w, np.full(ph.size, 2 * np.pi / ph.size))
    c_sca = float(np.sum(wts * np.sum(np.abs(F) ** 2, axis=-1))) / amp2
    return float(c_ext), c_sca
