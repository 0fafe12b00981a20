"""Brute-force evaluation of layer-operator signatures on the unit sphere.

Two routes are computed and must agree before a value is returned:

1. **Addition theorem.** Each Cartesian component of the density is projected
   onto scalar harmonics by quadrature, and the layer potential is summed with
   the Green's-function addition theorem in raw spherical Bessel functions
   (from ``scipy.special``). Exterior and interior limits on ``r = 1`` are
   averaged to obtain the principal value.
2. **Off-surface quadrature.** The kernels are integrated directly at
   ``r = 1 +/- eps`` on a target-centred grid with graded polar panels. The
   values are extrapolated to ``eps -> 0`` on each side and averaged.

Neither route uses the closed forms of :mod:`dpie.sphere_ops` or the
normalized radial functions, so agreement is a genuine check.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import spherical_jn, spherical_yn

from .errors import ConvergenceError, DomainError
from .harmonics import HarmonicTables, SphereGrid, mode_degrees, mode_index
from .sphere_ops import ScalarOpKind

__all__ = [
    "OracleResult",
    "oracle_scalar_signature",
    "oracle_vector_block",
    "oracle_evaluate",
]

log = logging.getLogger(__name__)

ROUTE_TOLERANCE = 1e-4
EXTRAPOLATION_STEPS = (1e-2, 5e-3, 2.5e-3, 1.25e-3)

# two generic target directions (theta, phi) for the least-squares projection
_TARGETS = ((0.9, 0.7), (2.2, 4.1))


@dataclass(frozen=True)
class OracleResult:
    """All operator values for one ``(n, m, k)`` from a single route.

    Attributes
    ----------
    scalar : dict
        Signature per :class:`ScalarOpKind`.
    L, R : ndarray
        3x3 blocks in the ``(a_U, a_V, rho)`` to ``(f_U, f_V, h)`` layout.
    """

    scalar: dict
    L: np.ndarray
    R: np.ndarray

    def distance(self, other: "OracleResult") -> float:
        d = max(abs(self.scalar[op] - other.scalar[op]) for op in self.scalar)
        d = max(d, np.abs(self.L - other.L).max(), np.abs(self.R - other.R).max())
        return float(d)


def _target_frames(n: int, m: int):
    th = np.array([t[0] for t in _TARGETS])
    ph = np.array([t[1] for t in _TARGETS])
    tab = HarmonicTables.build(n, th, ph)
    i = mode_index(n, m)
    return tab.rhat, tab.Y[i], tab.U[i], tab.V[i]


def _project(n: int, m: int, raw: list[dict]) -> OracleResult:
    """Turn per-target raw outputs into signatures and blocks.

    Each entry of ``raw`` maps output names to a 3-vector (tangential outputs)
    or a scalar, gathered at one target direction.
    """
    _, Y, U, V = _target_frames(n, m)

    def coef_scalar(name):
        vals = np.array([r[name] for r in raw])
        return complex(np.vdot(Y, vals) / np.vdot(Y, Y).real)

    # U and V are orthogonal only in L2, not pointwise, so solve jointly
    basis = np.stack([U.reshape(-1), V.reshape(-1)], axis=1)

    def coef_tangential(name):
        if n == 0:
            return np.zeros(2, dtype=complex)
        vals = np.array([r[name] for r in raw]).reshape(-1)
        return np.linalg.lstsq(basis, vals, rcond=None)[0]

    scalar = {
        ScalarOpKind.SINGLE_LAYER: coef_scalar("S"),
        ScalarOpKind.DOUBLE_LAYER: coef_scalar("D"),
        ScalarOpKind.NORMAL_DERIV_SINGLE: coef_scalar("Sp"),
        ScalarOpKind.HYPERSINGULAR: coef_scalar("Dp"),
    }
    L = np.zeros((3, 3), dtype=complex)
    R = np.zeros((3, 3), dtype=complex)
    for col, name in ((0, "U"), (1, "V")):
        L[:2, col] = coef_tangential(f"L11_{name}")
        R[:2, col] = coef_tangential(f"R11_{name}")
        R[2, col] = coef_scalar(f"R21_{name}") if n > 0 else 0.0
    L[:2, 2] = coef_tangential("L12")
    L[2, 2] = scalar[ScalarOpKind.DOUBLE_LAYER]
    R[:2, 2] = coef_tangential("R12")
    # R[2, 2] = -k^2 S is filled in by _finish, which knows k
    return OracleResult(scalar, L, R)


def _finish(res: OracleResult, k: float) -> OracleResult:
    R = res.R.copy()
    R[2, 2] = -(k**2) * res.scalar[ScalarOpKind.SINGLE_LAYER]
    return OracleResult(res.scalar, res.L, R)


# ---------------------------------------------------------------- route (a)


def _radial_profiles(L: int, k: float, side: int):
    """Single- and double-layer radial kernels and r-derivatives at r = 1.

    ``side`` is +1 for the exterior limit and -1 for the interior one.
    """
    l = np.arange(L + 1, dtype=float)
    if k == 0:
        w = 2 * l + 1
        if side > 0:
            ps, dps = 1 / w, -(l + 1) / w
            pd, dpd = l / w, -l * (l + 1) / w
        else:
            ps, dps = 1 / w, l / w
            pd, dpd = -(l + 1) / w, -(l + 1) * l / w
        return ps, dps, pd, dpd
    li = np.arange(L + 1)
    j = spherical_jn(li, k)
    dj = spherical_jn(li, k, derivative=True)
    h = j + 1j * spherical_yn(li, k)
    dh = dj + 1j * spherical_yn(li, k, derivative=True)
    ik = 1j * k
    if side > 0:
        # source at r_y = 1 inside the target radius
        return ik * j * h, ik * k * j * dh, ik * k * dj * h, ik * k * k * dj * dh
    return ik * h * j, ik * k * h * dj, ik * k * dh * j, ik * k * k * dh * dj


def _route_addition(n: int, m: int, k: float, quad_order: int) -> OracleResult:
    L = n + 20
    grid = SphereGrid(
        max(quad_order, L + n + 4), max(2 * quad_order, 2 * L + 2 * n + 8)
    )
    dens = HarmonicTables.build(n, grid.theta_grid, grid.phi_grid)
    i = mode_index(n, m)
    nrm = grid.rhat
    y = dens.Y[i]
    u = dens.U[i]
    v = dens.V[i]
    # densities whose single layers are needed, as Cartesian components
    fields = {
        "U": u,
        "V": v,
        "nxU": np.cross(nrm, u),
        "nxV": np.cross(nrm, v),
        "nrho": nrm * y[..., None],
    }
    comp = {
        key: grid.analyze_scalar(np.moveaxis(f, -1, 0), L) for key, f in fields.items()
    }
    rho = grid.analyze_scalar(y, L)

    th = np.array([t[0] for t in _TARGETS])
    ph = np.array([t[1] for t in _TARGETS])
    tgt = HarmonicTables.build(L, th, ph)
    ls, _ = mode_degrees(L)
    cl = np.sqrt(ls * (ls + 1.0))
    rhat = tgt.rhat

    results = []
    for side in (+1, -1):
        ps, dps, pd, dpd = _radial_profiles(L, k, side)

        def value(c, prof):
            return np.einsum("...k,kt->...t", c * prof[ls], tgt.Y)

        def grad(c, prof, dprof):
            # grad (P(r) Y) = P' Y rhat + P c_l U at r = 1
            radial = np.einsum("...k,kt->...t", c * dprof[ls], tgt.Y)
            tang = np.einsum("...k,ktc->...tc", c * (prof[ls] * cl), tgt.U)
            return radial[..., None] * rhat + tang

        per_target = [dict() for _ in _TARGETS]
        for name in ("U", "V"):
            g = grad(comp[name], ps, dps)  # (3 comps, targets, 3 dirs)
            curl = np.stack(
                [
                    g[2, :, 1] - g[1, :, 2],
                    g[0, :, 2] - g[2, :, 0],
                    g[1, :, 0] - g[0, :, 1],
                ],
                axis=-1,
            )
            L11 = np.cross(rhat, curl)
            R11 = np.cross(rhat, np.moveaxis(value(comp["nx" + name], ps), 0, -1))
            gn = grad(comp["nx" + name], ps, dps)
            R21 = gn[0, :, 0] + gn[1, :, 1] + gn[2, :, 2]
            for t in range(len(_TARGETS)):
                per_target[t][f"L11_{name}"] = L11[t]
                per_target[t][f"R11_{name}"] = R11[t]
                per_target[t][f"R21_{name}"] = R21[t]
        L12 = -np.cross(rhat, np.moveaxis(value(comp["nrho"], ps), 0, -1))
        gr = grad(rho, ps, dps)
        R12 = np.cross(rhat, gr)
        S = value(rho, ps)
        Sp = value(rho, dps)
        D = value(rho, pd)
        Dp = value(rho, dpd)
        for t in range(len(_TARGETS)):
            per_target[t].update(
                L12=L12[t], R12=R12[t], S=S[t], Sp=Sp[t], D=D[t], Dp=Dp[t]
            )
        results.append(per_target)
    avg = [
        {key: 0.5 * (results[0][t][key] + results[1][t][key]) for key in results[0][t]}
        for t in range(len(_TARGETS))
    ]
    return _finish(_project(n, m, avg), k)


# ---------------------------------------------------------------- route (b)


def _graded_panels(eps0: float, width: float = 0.2, order: int = 16):
    """Composite Gauss nodes on [0, pi], geometrically refined near 0."""
    edges = [0.0, eps0]
    while edges[-1] < width:
        edges.append(min(2 * edges[-1], width))
    while edges[-1] < np.pi:
        edges.append(min(edges[-1] + width, np.pi))
    x, w = np.polynomial.legendre.leggauss(order)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        nodes.append(0.5 * (b - a) * x + 0.5 * (b + a))
        weights.append(0.5 * (b - a) * w)
    return np.concatenate(nodes), np.concatenate(weights)


def _basis_for(t: np.ndarray):
    a = np.array([1.0, 0.0, 0.0]) if abs(t[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = a - np.dot(a, t) * t
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(t, e1)


def _direct_raw(n, m, k, quad_order, t, radii):
    """Raw outputs at ``r * t`` for each radius in ``radii`` by quadrature."""
    e1, e2 = _basis_for(t)
    tp, wt = _graded_panels(min(abs(radii - 1)) / 4)
    n_phi = max(quad_order, 2 * n + 16)
    pp = 2 * np.pi * np.arange(n_phi) / n_phi
    TP, PP = np.meshgrid(tp, pp, indexing="ij")
    w = (wt * np.sin(tp))[:, None] * np.full(n_phi, 2 * np.pi / n_phi)[None]
    st = np.sin(TP)
    y = (
        (st * np.cos(PP))[..., None] * e1
        + (st * np.sin(PP))[..., None] * e2
        + np.cos(TP)[..., None] * t
    )
    theta = np.arccos(np.clip(y[..., 2], -1, 1))
    phi = np.arctan2(y[..., 1], y[..., 0])
    dens = HarmonicTables.build(n, theta, phi)
    i = mode_index(n, m)
    rho, u, v = dens.Y[i], dens.U[i], dens.V[i]
    ny = y
    out = []
    for r in radii:
        x = r * t
        Rv = x - y
        d = np.linalg.norm(Rv, axis=-1)
        Rh = Rv / d[..., None]
        g = np.exp(1j * k * d) / (4 * np.pi * d)
        g1 = g * (1j * k - 1 / d)
        g2 = g * ((1j * k - 1 / d) ** 2 + 1 / d**2)
        tR = Rh @ t
        nR = np.einsum("...c,...c->...", ny, Rh)
        tn = ny @ t

        def integ(f):
            return np.tensordot(w, f, axes=([0, 1], [0, 1]))

        res = {}
        for name, a in (("U", u), ("V", v)):
            curl = integ(g1[..., None] * np.cross(Rh, a))
            res[f"L11_{name}"] = np.cross(t, curl)
            na = np.cross(ny, a)
            res[f"R11_{name}"] = np.cross(t, integ(g[..., None] * na))
            res[f"R21_{name}"] = integ(g1 * np.einsum("...c,...c->...", Rh, na))
        res["L12"] = -np.cross(t, integ((g * rho)[..., None] * ny))
        grad = integ((g1 * rho)[..., None] * Rh)
        res["R12"] = np.cross(t, grad)
        res["S"] = integ(g * rho)
        res["Sp"] = np.dot(t, grad)
        res["D"] = integ(-g1 * nR * rho)
        res["Dp"] = integ(-rho * (g2 * tR * nR + g1 / d * (tn - tR * nR)))
        out.append(res)
    return out


def _extrapolate(steps, values):
    """Polynomial extrapolation of ``values(steps)`` to step 0."""
    steps = np.asarray(steps, dtype=float)
    wts = []
    for i, si in enumerate(steps):
        others = np.delete(steps, i)
        wts.append(np.prod(others / (others - si)))
    return sum(wi * vi for wi, vi in zip(wts, values))


def _route_direct(n: int, m: int, k: float, quad_order: int) -> OracleResult:
    steps = np.array(EXTRAPOLATION_STEPS)
    per_target = []
    for th, ph in _TARGETS:
        t = np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])
        radii = np.concatenate([1 + steps, 1 - steps])
        raw = _direct_raw(n, m, k, quad_order, t, radii)
        ext, inn = raw[: len(steps)], raw[len(steps) :]
        merged = {}
        for key in raw[0]:
            lim_e = _extrapolate(steps, [r[key] for r in ext])
            lim_i = _extrapolate(steps, [r[key] for r in inn])
            merged[key] = 0.5 * (lim_e + lim_i)
        per_target.append(merged)
    return _finish(_project(n, m, per_target), k)


# ---------------------------------------------------------------- public API


def _validate(n: int, m: int, k: float, quad_order: int) -> None:
    if n < 0 or abs(m) > n:
        raise DomainError(f"need n >= 0 and |m| <= n, got n={n}, m={m}")
    if not (np.isfinite(k) and k >= 0):
        raise DomainError(f"wavenumber must be finite and non-negative, got {k}")
    if quad_order < 2 * n + 16:
        raise DomainError(f"quad_order must be at least 2n + 16 = {2 * n + 16}")


@lru_cache(maxsize=512)
def oracle_evaluate(n: int, m: int, k: float, quad_order: int) -> OracleResult:
    """Evaluate every operator by both routes and return the addition-theorem one.

    Raises
    ------
    ConvergenceError
        If the two routes differ by more than ``ROUTE_TOLERANCE`` in any entry.
    """
    _validate(n, m, k, quad_order)
    a = _route_addition(n, m, float(k), quad_order)
    b = _route_direct(n, m, float(k), quad_order)
    gap = a.distance(b)
    log.debug("oracle n=%d m=%d k=%g route gap %.2e", n, m, k, gap)
    if not gap <= ROUTE_TOLERANCE:
        raise ConvergenceError(
            f"oracle routes disagree by {gap:.3e} at n={n}, m={m}, k={k}"
        )
    return a


def oracle_scalar_signature(
    op: ScalarOpKind, n: int, m: int, k: float, quad_order: int = 64
) -> complex:
    """Brute-force signature of a scalar operator on ``Y_n^m``."""
    return oracle_evaluate(n, m, float(k), quad_order).scalar[ScalarOpKind(op)]


def oracle_vector_block(
    which: str, n: int, m: int, k: float, quad_order: int = 64
) -> np.ndarray:
    """Brute-force 3x3 block of the ``"L"`` or ``"R"`` vector operator."""
    res = oracle_evaluate(n, m, float(k), quad_order)
    if which == "L":
        return res.L.copy()
    if which == "R":
        return res.R.copy()
    raise DomainError(f"which must be 'L' or 'R', got {which!r}")
