"""End-to-end scattering: incoming potentials to scattered potentials and fields.

The scalar equation gives ``phi_sc = D[sigma] - i eta S[sigma]``; the vector
equation gives

.. math::

    A_{sc} = \\nabla\\times S[a] - \\beta S[n\\rho]
             + i(\\gamma S[n\\times a] + \\delta \\nabla S[\\rho])

with ``(beta, gamma, delta) = (1, eta, eta)``, or ``(k, k, 1)`` for the scaled
form. Off the sphere every layer potential of a harmonic density is a single
outgoing radial profile times a frame vector, so potentials, curls and
divergences are evaluated mode by mode without surface quadrature.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .assembly import (
    BoundaryDataSpectrum,
    Formulation,
    SolutionSpectrum,
    solve_scalar,
    solve_vector,
    truncation_for,
)
from .errors import DomainError, TruncationError
from .harmonics import HarmonicTables, SphereGrid, mode_degrees, mode_index
from .incoming import gauge_audit, project_boundary_data
from .mie import FieldSample
from .specfun import RadialKind, mod_radial_all, mod_radial_derivative_all

__all__ = [
    "ScatterSolution",
    "PotentialSample",
    "truncation_for",
    "solve_scattering",
    "eval_scattered_potentials",
    "eval_fields",
    "boundary_residuals",
    "gauge_link_residual",
    "SOLUTION_DECAY_TOLERANCE",
]

log = logging.getLogger(__name__)

SOLUTION_DECAY_TOLERANCE = 1e-10
GAUGE_AUDIT_TOLERANCE = 1e-6
_CHUNK = 512


@dataclass(frozen=True)
class PotentialSample:
    """Potentials at a batch of points: ``A`` is ``(..., 3)``, ``phi`` is ``(...)``."""

    A: np.ndarray
    phi: np.ndarray


@dataclass(frozen=True)
class ScatterSolution:
    """Result of :func:`solve_scattering`; immutable and safe to share."""

    scalar: SolutionSpectrum
    vector: SolutionSpectrum
    k: float
    formulations: tuple[Formulation, Formulation]
    nmax: int
    incoming: object
    data: BoundaryDataSpectrum
    mu: float = 1.0
    eps: float = 1.0
    params: dict = field(default_factory=dict)

    @property
    def omega(self) -> float:
        return self.k / np.sqrt(self.mu * self.eps)


_PAIRS = {
    "dpie": (Formulation.DPIES, Formulation.DPIEV),
    "dpie-scaled": (Formulation.DPIES_SCALED, Formulation.DPIEV_SCALED),
}


def _resolve_pair(formulation) -> tuple[Formulation, Formulation]:
    if isinstance(formulation, str):
        if formulation not in _PAIRS:
            raise DomainError(f"unknown formulation pair {formulation!r}")
        return _PAIRS[formulation]
    s, v = (Formulation(f) for f in formulation)
    if not (s.is_scalar and v.is_vector):
        raise DomainError("need a (scalar, vector) formulation pair")
    return s, v


def _check_decay(name: str, nmax: int, *arrays: np.ndarray) -> None:
    peak = max(np.abs(a).max() for a in arrays)
    if peak == 0:
        return
    tail = slice(mode_index(nmax, -nmax), mode_index(nmax, nmax) + 1)
    worst = max(np.abs(a[tail]).max() for a in arrays)
    if worst > SOLUTION_DECAY_TOLERANCE * peak:
        raise TruncationError(
            f"{name} coefficients not resolved at degree {nmax}: "
            f"tail/peak {worst / peak:.2e}"
        )


def solve_scattering(
    incoming,
    formulation="dpie",
    nmax: int | None = None,
    eta: float | None = None,
    check_gauge: bool = True,
) -> ScatterSolution:
    """Solve the scalar and vector equations for scattering of ``incoming``.

    Parameters
    ----------
    incoming
        A Lorenz-gauge source such as :class:`~dpie.incoming.PlaneWave`.
    formulation : str or pair
        ``"dpie"``, ``"dpie-scaled"`` or an explicit ``(scalar, vector)`` pair
        of :class:`Formulation` values.
    nmax : int, optional
        Truncation degree; :func:`truncation_for` by default.
    eta : float, optional
        Coupling constant for the unscaled forms.
    check_gauge : bool
        Audit the incoming potentials before solving.

    Raises
    ------
    DomainError
        If the incoming source fails the gauge audit.
    TruncationError
        If data or solution coefficients have not decayed at ``nmax``.
    """
    k = float(incoming.k)
    nmax = truncation_for(k) if nmax is None else int(nmax)
    pair = _resolve_pair(formulation)
    if check_gauge:
        res = gauge_audit(incoming, n_points=5)
        if not res <= GAUGE_AUDIT_TOLERANCE:
            raise DomainError(f"incoming potentials fail the gauge audit ({res:.2e})")
    data = project_boundary_data(incoming, nmax)
    scal = solve_scalar(data, pair[0], eta)
    vec = solve_vector(data, pair[1], eta)
    _check_decay("scalar density", nmax, scal.sigma)
    _check_decay("vector density", nmax, vec.aU, vec.aV, vec.rho)
    log.info(
        "solved %s/%s at k=%g with nmax=%d", pair[0].value, pair[1].value, k, nmax
    )
    return ScatterSolution(
        scal, vec, k, pair, nmax, incoming, data,
        getattr(incoming, "mu", 1.0), getattr(incoming, "eps", 1.0),
        {"eta_scalar": scal.eta, "eta_vector": vec.eta, "scaled": vec.scaled},
    )


class _Profiles:
    """Exterior radial profiles of the layer potentials at radii ``r``.

    For degree L, the single layer of a unit harmonic density has profile
    ``s_L(r) = j~_L(1) h~_L(r) / (2L+1)`` and the double layer
    ``d_L(r) = j~_L'(1) h~_L(r) / (2L+1)``.
    """

    def __init__(self, nmax: int, k: float, r: np.ndarray):
        top = nmax + 1
        one = np.asarray(1.0)
        j1 = mod_radial_all(RadialKind.REGULAR_BESSEL, top, k, one)
        dj1 = mod_radial_derivative_all(RadialKind.REGULAR_BESSEL, top, k, one)
        h = mod_radial_all(RadialKind.OUTGOING_HANKEL, top, k, r)
        dh = mod_radial_derivative_all(RadialKind.OUTGOING_HANKEL, top, k, r)
        w = (2.0 * np.arange(top + 1) + 1.0)[:, None]
        s = (j1 / w[:, 0])[:, None] * h
        ds = (j1 / w[:, 0])[:, None] * dh
        self.s, self.ds = s[: nmax + 1], ds[: nmax + 1]
        self.d = (dj1[: nmax + 1] / w[: nmax + 1, 0])[:, None] * h[: nmax + 1]
        self.dd = (dj1[: nmax + 1] / w[: nmax + 1, 0])[:, None] * dh[: nmax + 1]
        n = np.arange(nmax + 1, dtype=float)[:, None]
        c = np.sqrt(n * (n + 1))
        wn = 2 * n + 1
        zero = np.zeros_like(s[:1])
        sp, dsp = s[1:], ds[1:]
        sm = np.concatenate([zero, s[: nmax]])
        dsm = np.concatenate([zero, ds[: nmax]])
        self.c = c
        self.gW = c * (sm - sp) / wn
        self.dgW = c * (dsm - dsp) / wn
        self.gU = (n * sp + (n + 1) * sm) / wn
        self.dgU = (n * dsp + (n + 1) * dsm) / wn
        self.tW = ((n + 1) * sp + n * sm) / wn
        self.dtW = ((n + 1) * dsp + n * dsm) / wn


def _mode_fields(sol: ScatterSolution, x: np.ndarray):
    """A, curl A, div A, phi and grad phi at points ``x`` of shape ``(P, 3)``."""
    k = sol.k
    nmax = sol.nmax
    r = np.linalg.norm(x, axis=-1)
    theta = np.arccos(np.clip(x[:, 2] / r, -1.0, 1.0))
    phi = np.arctan2(x[:, 1], x[:, 0])
    tab = HarmonicTables.build(nmax, theta, phi)
    pr = _Profiles(nmax, k, r)
    ls, _ = mode_degrees(nmax)
    s, ds, c = pr.s[ls], pr.ds[ls], pr.c[ls]
    gW, dgW, gU, dgU = pr.gW[ls], pr.dgW[ls], pr.gU[ls], pr.dgU[ls]
    tW, dtW = pr.tW[ls], pr.dtW[ls]
    tU, dtU = gW, dgW
    d, dd = pr.d[ls], pr.dd[ls]
    beta, gamma, delta = sol.vector.representation_weights
    aU = sol.vector.aU[:, None]
    aV = sol.vector.aV[:, None]
    rho = sol.vector.rho[:, None]
    sigma = sol.scalar.sigma[:, None]
    eta = sol.scalar.eta
    ig, idl = 1j * gamma, 1j * delta

    curlU_V = -c * gW / r + (gU + r * dgU) / r  # curl S[U] on V
    A_W = aV * (-c * s / r - ig * gW) + rho * (-beta * tW + idl * ds)
    A_U = aV * (-(s + r * ds) / r - ig * gU) + rho * (-beta * tU + idl * c * s / r)
    A_V = aU * (curlU_V + ig * s)
    C_W = aU * (k * k * gW - c * ds - ig * c * s / r)
    C_U = aU * (k * k * gU - c * c * s / r - ig * (s + r * ds) / r)
    C_V = aV * (k * k * s - ig * curlU_V) + rho * (
        -beta * (-c * tW / r + (tU + r * dtU) / r)
    )
    div = rho * (beta * d - idl * k * k * s) + aV * (ig * c * s)
    p = sigma * (d - 1j * eta * s)
    dp = sigma * (dd - 1j * eta * ds)

    def vec(cw, cu, cv):
        return (
            np.einsum("kp,kpc->pc", cw, tab.W)
            + np.einsum("kp,kpc->pc", cu, tab.U)
            + np.einsum("kp,kpc->pc", cv, tab.V)
        )

    A = vec(A_W, A_U, A_V)
    curl = vec(C_W, C_U, C_V)
    divA = np.einsum("kp,kp->p", div, tab.Y)
    ph = np.einsum("kp,kp->p", p, tab.Y)
    grad = vec(dp, c * p / r, np.zeros_like(p))
    return A, curl, divA, ph, grad


def _evaluate(sol: ScatterSolution, x, allow_boundary: bool = False):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 3:
        raise DomainError("points must have a trailing axis of length 3")
    shape = x.shape[:-1]
    flat = x.reshape(-1, 3)
    r = np.linalg.norm(flat, axis=-1)
    bad = r < 1 - 1e-12 if allow_boundary else r <= 1
    if np.any(bad):
        raise DomainError("evaluation points must lie outside the unit sphere")
    parts = [[] for _ in range(5)]
    for i in range(0, flat.shape[0], _CHUNK):
        for acc, val in zip(parts, _mode_fields(sol, flat[i : i + _CHUNK])):
            acc.append(val)
    out = [np.concatenate(p) if p else np.zeros((0,)) for p in parts]
    A, curl, divA, ph, grad = out
    return (
        A.reshape(shape + (3,)),
        curl.reshape(shape + (3,)),
        divA.reshape(shape),
        ph.reshape(shape),
        grad.reshape(shape + (3,)),
    )


def eval_scattered_potentials(sol: ScatterSolution, x) -> PotentialSample:
    """Scattered potentials at exterior points ``x`` (``|x| > 1``)."""
    A, _, _, ph, _ = _evaluate(sol, x)
    return PotentialSample(A, ph)


def _fields_from(sol, A, curl, grad):
    E = 1j * sol.omega * A - grad
    H = curl / sol.mu
    return E, H


def eval_fields(sol: ScatterSolution, x) -> FieldSample:
    """Scattered ``E = i omega A - grad phi`` and ``H = curl A / mu``."""
    A, curl, _, _, grad = _evaluate(sol, x)
    return FieldSample(*_fields_from(sol, A, curl, grad))


def _boundary_grid(nmax: int) -> SphereGrid:
    return SphereGrid(nmax + 8, 2 * (nmax + 8))


def boundary_residuals(sol: ScatterSolution, incoming=None) -> dict:
    """Boundary-condition, gauge-link and net-charge residuals.

    The scattered fields are taken as exterior one-sided limits on the unit
    sphere, sampled on a ``(nmax + 8) x 2 (nmax + 8)`` grid.

    Returns
    -------
    dict
        ``bc_tangE``: sup of ``|n x (E_sc + E_in)|`` over sup ``|E_in|``;
        ``bc_normH``: sup of ``|n . (H_sc + H_in)|`` over sup ``|H_in|``
        (each taken on the grid, 1 if the incident field vanishes);
        ``gauge_link``: see :func:`gauge_link_residual`; ``net_charge``:
        ``|int n . E_sc|`` over sup ``|E_in|``.
    """
    incoming = incoming if incoming is not None else sol.incoming
    grid = _boundary_grid(sol.nmax)
    x = grid.points
    A, curl, divA, ph, grad = _evaluate(sol, x, allow_boundary=True)
    E, H = _fields_from(sol, A, curl, grad)
    Ei, Hi = incoming.fields(x)
    amp = np.linalg.norm(Ei, axis=-1).max() or 1.0
    hamp = np.linalg.norm(Hi, axis=-1).max() or 1.0
    tang = np.linalg.norm(np.cross(grid.rhat, E + Ei), axis=-1).max() / amp
    norm = np.abs(np.einsum("...c,...c->...", grid.rhat, H + Hi)).max() / hamp
    charge = abs(grid.integrate(np.einsum("...c,...c->...", grid.rhat, E))) / amp
    return {
        "bc_tangE": float(tang),
        "bc_normH": float(norm),
        "gauge_link": gauge_link_residual(sol),
        "net_charge": float(charge),
    }


def gauge_link_residual(sol: ScatterSolution, points=None, seed: int = 0) -> float:
    """Normalized ``|div A_sc - i omega mu eps phi_sc|`` from the two solves.

    The default sample is the boundary grid plus 20 seeded exterior points
    with radius in ``[1.05, 3]``. The residual is divided by the largest of
    ``sup |div A|``, ``sup |omega mu eps phi|`` and ``max(k, 1) sup |A|``; the
    constants must also satisfy ``v = -i omega mu eps V`` and enter the
    maximum on the same scale. Returns 0 when every term vanishes.
    """
    if points is None:
        rng = np.random.default_rng(seed)
        d = rng.normal(size=(20, 3))
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        outer = d * rng.uniform(1.05, 3.0, size=(20, 1))
        points = np.concatenate([_boundary_grid(sol.nmax).points.reshape(-1, 3), outer])
    A, _, divA, ph, _ = _evaluate(sol, points, allow_boundary=True)
    wme = sol.omega * sol.mu * sol.eps
    resid = np.abs(divA - 1j * wme * ph).max()
    const = abs(sol.vector.v + 1j * wme * sol.scalar.V)
    scale = max(
        np.abs(divA).max(),
        wme * np.abs(ph).max(),
        max(sol.k, 1.0) * np.linalg.norm(A, axis=-1).max(),
        wme * abs(sol.scalar.V), abs(sol.vector.v),
    )
    worst = max(resid, const)
    if scale == 0:
        return float(worst)
    return float(worst / scale)
