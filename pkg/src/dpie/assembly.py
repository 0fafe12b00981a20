"""Per-degree linear systems of the decoupled potential integral equations.

Every operator is block diagonal in the harmonic basis, so each formulation
reduces to one small system per degree n shared by all orders m:

* scalar equation: ``1/2 + D - i eta S`` (1x1) for n >= 1, and a 2x2 system in
  ``(sigma_0, V)`` at n = 0 that adds the unknown constant and the flux
  constraint;
* vector equation: ``1/2 I + L + i eta R`` (3x3) in ``(a_U, a_V, rho)`` for
  n >= 1, and a 4x4 system at n = 0 whose tangential slots are inert, leaving
  the active pair ``(rho_0, v)``;
* EFIE and MFIE baselines: 2x2 blocks on the surface current ``(J_U, J_V)``.

At n = 0 the density and constant unknowns are *values* of the constant
function rather than ``Y_0^0`` coefficients; the conversion factor is
``sqrt(4 pi)``. All systems assume ``mu = eps = 1`` so that ``omega = k``.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SingularBlockError
from .harmonics import mode_count, mode_index
from .sphere_ops import ScalarOpKind, scalar_signatures, vector_signatures

__all__ = [
    "truncation_for",
    "Formulation",
    "default_eta",
    "uses_scaling",
    "ModeSystem",
    "BoundaryDataSpectrum",
    "SolutionSpectrum",
    "scalar_mode_system",
    "vector_mode_system",
    "efie_mfie_mode_system",
    "mode_system",
    "solve_mode",
    "solve_scalar",
    "solve_vector",
]

log = logging.getLogger(__name__)

SQRT4PI = np.sqrt(4 * np.pi)
AREA = 4 * np.pi


class Formulation(enum.Enum):
    """Integral-equation formulations available per degree."""

    DPIES = "dpies"
    DPIES_SCALED = "dpies-scaled"
    DPIEV = "dpiev"
    DPIEV_SCALED = "dpiev-scaled"
    EFIE = "efie"
    MFIE = "mfie"

    @property
    def is_scalar(self) -> bool:
        return self in (Formulation.DPIES, Formulation.DPIES_SCALED)

    @property
    def is_vector(self) -> bool:
        return self in (Formulation.DPIEV, Formulation.DPIEV_SCALED)

    @property
    def is_baseline(self) -> bool:
        return self in (Formulation.EFIE, Formulation.MFIE)


def default_eta(k: float) -> float:
    """Coupling constant: 1 up to k = 1 and k above."""
    return 1.0 if k <= 1 else float(k)


def uses_scaling(formulation: Formulation, k: float) -> bool:
    """Whether the scaled variant is actually in force (it needs k > 1)."""
    return formulation in (Formulation.DPIES_SCALED, Formulation.DPIEV_SCALED) and k > 1


def truncation_for(k: float) -> int:
    """Default truncation degree ``ceil(k + 6 k^(1/3) + 12)``.

    Examples
    --------
    >>> truncation_for(0.0), truncation_for(10.0)
    (12, 35)
    """
    if not (np.isfinite(k) and k >= 0):
        raise DomainError("wavenumber must be finite and non-negative")
    return int(np.ceil(k + 6 * np.cbrt(k) + 12 - 1e-12))


def _resolve_eta(formulation: Formulation, k: float, eta: float | None) -> float:
    if uses_scaling(formulation, k):
        return float(k)
    if formulation in (Formulation.DPIES_SCALED, Formulation.DPIEV_SCALED):
        return 1.0
    eta = default_eta(k) if eta is None else float(eta)
    if eta == 0 or not np.isfinite(eta):
        raise DomainError("eta must be finite and nonzero")
    return eta


@dataclass(frozen=True)
class ModeSystem:
    """Square system for one degree.

    Attributes
    ----------
    n, k : int, float
        Degree and wavenumber.
    formulation : Formulation
    eta : float
        Effective coupling constant (``k`` for an active scaled form).
    scaled : bool
        True when the scaled variant is in force.
    matrix : ndarray
        Complex matrix, densities first and constants last.
    unknowns : tuple of str
        Names of the unknowns in matrix order.
    active : tuple of int
        Indices that carry unknowns; inert slots are excluded from solves,
        eigenvalues and singular values.
    """

    n: int
    k: float
    formulation: Formulation
    eta: float
    scaled: bool
    matrix: np.ndarray
    unknowns: tuple[str, ...]
    active: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not self.active:
            object.__setattr__(self, "active", tuple(range(self.matrix.shape[0])))

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def active_matrix(self) -> np.ndarray:
        idx = np.asarray(self.active, dtype=int)
        return self.matrix[np.ix_(idx, idx)]


def _check(n: int, k: float) -> None:
    if int(n) != n or n < 0:
        raise DomainError(f"degree must be a non-negative integer, got {n}")
    if not (np.isfinite(k) and k >= 0):
        raise DomainError(f"wavenumber must be finite and non-negative, got {k}")


def scalar_mode_system(
    n: int, k: float, formulation: Formulation = Formulation.DPIES,
    eta: float | None = None,
) -> ModeSystem:
    """Scalar equation at degree n.

    For n >= 1 the 1x1 system ``1/2 + D - i eta S``. At n = 0 the unknowns are
    the constant density value and ``V``; the second row integrates the
    exterior normal derivative ``D' + i eta / 2 - i eta S'`` over the sphere.
    The scaled form uses ``eta = k`` and divides the constraint row by k.
    """
    _check(n, k)
    formulation = Formulation(formulation)
    if not formulation.is_scalar:
        raise DomainError(f"{formulation.value} is not a scalar formulation")
    scaled = uses_scaling(formulation, k)
    eta = _resolve_eta(formulation, k, eta)
    S = scalar_signatures(ScalarOpKind.SINGLE_LAYER, n, k)[n]
    D = scalar_signatures(ScalarOpKind.DOUBLE_LAYER, n, k)[n]
    lam = 0.5 + D - 1j * eta * S
    if n > 0:
        return ModeSystem(n, k, formulation, eta, scaled, np.array([[lam]]), ("sigma",))
    Sp = scalar_signatures(ScalarOpKind.NORMAL_DERIV_SINGLE, 0, k)[0]
    Dp = scalar_signatures(ScalarOpKind.HYPERSINGULAR, 0, k)[0]
    flux = AREA * (Dp + 0.5j * eta - 1j * eta * Sp)
    if scaled:
        flux = flux / k
    mat = np.array([[lam, -1.0], [flux, 0.0]], dtype=complex)
    return ModeSystem(n, k, formulation, eta, scaled, mat, ("sigma", "V"))


def _representation_weights(scaled: bool, eta: float, k: float):
    # weights (beta, gamma, delta) of the vector representation
    # A = curl S[a] - beta S[n rho] + i (gamma S[n x a] + delta grad S[rho])
    if scaled:
        return float(k), float(k), 1.0
    return 1.0, eta, eta


def vector_mode_system(
    n: int, k: float, formulation: Formulation = Formulation.DPIEV,
    eta: float | None = None,
) -> ModeSystem:
    """Vector equation at degree n.

    For n >= 1 the 3x3 block ``1/2 I + L + i eta R`` (or its scaled version,
    where ``L12`` and ``R11`` carry a factor k, ``R22`` a factor 1/k and the
    divergence data is divided by k). At n = 0 the 4x4 system in
    ``(a_U, a_V, rho, v)`` whose tangential rows and columns are zero.
    """
    _check(n, k)
    formulation = Formulation(formulation)
    if not formulation.is_vector:
        raise DomainError(f"{formulation.value} is not a vector formulation")
    scaled = uses_scaling(formulation, k)
    eta = _resolve_eta(formulation, k, eta)
    sig = vector_signatures(max(n, 1), k)
    Lb, Rb = sig.L(n), sig.R(n)
    if scaled:
        Lb[:2, 2] *= k
        Rb[:2, :2] *= k
        Rb[2, 2] /= k
        block = 0.5 * np.eye(3) + Lb + 1j * Rb
    else:
        block = 0.5 * np.eye(3) + Lb + 1j * eta * Rb
    names = ("aU", "aV", "rho")
    if n > 0:
        return ModeSystem(n, k, formulation, eta, scaled, block, names)
    beta, gamma, delta = _representation_weights(scaled, eta, k)
    del gamma
    mat = np.zeros((4, 4), dtype=complex)
    mat[2, 2] = block[2, 2]
    mat[2, 3] = 1.0
    # flux of n.A: -beta n.S[n rho] + i delta (S' - 1/2) rho
    mat[3, 2] = AREA * (-beta * sig.s_ww[0] + 1j * delta * (sig.d[0] - 0.5))
    return ModeSystem(n, k, formulation, eta, scaled, mat, names + ("v",), (2, 3))


def efie_mfie_mode_system(n: int, k: float, formulation: Formulation) -> ModeSystem:
    """EFIE or MFIE 2x2 block on the surface current ``(J_U, J_V)``.

    With ``mu = eps = 1``, the EFIE operator ``i k n x S[J] - (1/(i k))
    n x grad S[div_s J]`` maps U to V and V to U; the MFIE operator is
    ``1/2 - n x curl S``. Degree 0 carries no surface current and yields an
    empty system.
    """
    _check(n, k)
    formulation = Formulation(formulation)
    if not formulation.is_baseline:
        raise DomainError(f"{formulation.value} is not a baseline formulation")
    if formulation is Formulation.EFIE and k <= 0:
        raise DomainError("the EFIE is undefined at k = 0")
    if n == 0:
        return ModeSystem(n, k, formulation, 0.0, False, np.zeros((0, 0), complex), ())
    sig = vector_signatures(n, k)
    c2 = n * (n + 1.0)
    if formulation is Formulation.EFIE:
        mat = np.array(
            [
                [0.0, -1j * k * sig.s[n]],
                [1j * k * sig.s_uu[n] + c2 * sig.s[n] / (1j * k), 0.0],
            ],
            dtype=complex,
        )
    else:
        mat = np.diag([0.5 - sig.ell_u[n], 0.5 - sig.ell_v[n]]).astype(complex)
    return ModeSystem(n, k, formulation, 0.0, False, mat, ("JU", "JV"))


def mode_system(
    n: int, k: float, formulation: Formulation, eta: float | None = None
) -> ModeSystem:
    """Dispatch to the builder for ``formulation``."""
    formulation = Formulation(formulation)
    if formulation.is_scalar:
        return scalar_mode_system(n, k, formulation, eta)
    if formulation.is_vector:
        return vector_mode_system(n, k, formulation, eta)
    return efie_mfie_mode_system(n, k, formulation)


def solve_mode(system: ModeSystem, rhs: np.ndarray) -> np.ndarray:
    """Solve one degree's system for one or several right-hand sides.

    Parameters
    ----------
    system : ModeSystem
    rhs : ndarray
        Shape ``(size,)`` or ``(size, nrhs)``; entries in inert slots must be 0.

    Returns
    -------
    ndarray
        Solution of the same shape with inert slots zero.

    Raises
    ------
    SingularBlockError
        If the active block is singular or the backward error exceeds 1e-12.
    """
    rhs = np.asarray(rhs, dtype=complex)
    if rhs.shape[0] != system.size:
        raise DomainError(f"rhs has {rhs.shape[0]} rows, system has {system.size}")
    idx = np.asarray(system.active, dtype=int)
    A = system.active_matrix
    b = rhs[idx]
    try:
        x = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SingularBlockError(
            f"singular {system.formulation.value} block at n={system.n}, k={system.k}"
        ) from exc
    resid = np.linalg.norm(A @ x - b)
    scale = np.linalg.norm(A) * np.linalg.norm(x) + np.linalg.norm(b)
    if not np.all(np.isfinite(x)) or resid > 1e-12 * scale:
        raise SingularBlockError(
            f"unreliable solve for {system.formulation.value} at n={system.n}, "
            f"k={system.k}: residual {resid:.3e}"
        )
    out = np.zeros_like(rhs)
    out[idx] = x
    return out


@dataclass(frozen=True)
class BoundaryDataSpectrum:
    """Harmonic coefficients of the boundary data.

    Attributes
    ----------
    nmax : int
    k : float
    f : ndarray
        Scalar Dirichlet data coefficients, flat layout.
    fU, fV : ndarray
        Tangential data ``-n x A_in`` on the U and V frames.
    h : ndarray
        Divergence data.
    Q, q : complex
        Scalar and vector flux constants.
    """

    nmax: int
    k: float
    f: np.ndarray
    fU: np.ndarray
    fV: np.ndarray
    h: np.ndarray
    Q: complex = 0.0
    q: complex = 0.0

    @classmethod
    def zeros(cls, nmax: int, k: float) -> "BoundaryDataSpectrum":
        z = np.zeros(mode_count(nmax), dtype=complex)
        return cls(nmax, k, z, z.copy(), z.copy(), z.copy(), 0.0, 0.0)


@dataclass(frozen=True)
class SolutionSpectrum:
    """Density coefficients and constants from one solve.

    A scalar solve fills ``sigma`` and ``V``; a vector solve fills ``aU``,
    ``aV``, ``rho`` and ``v``. Unused arrays are zero. ``v`` is always the
    physical constant, undoing the 1/k scaling of the scaled vector form.
    """

    nmax: int
    k: float
    formulation: Formulation
    eta: float
    scaled: bool
    sigma: np.ndarray
    aU: np.ndarray
    aV: np.ndarray
    rho: np.ndarray
    V: complex
    v: complex

    @property
    def representation_weights(self) -> tuple[float, float, float]:
        """``(beta, gamma, delta)`` of the vector representation."""
        return _representation_weights(self.scaled, self.eta, self.k)


def _degree_slice(n: int) -> slice:
    return slice(mode_index(n, -n), mode_index(n, n) + 1)


def solve_scalar(
    data: BoundaryDataSpectrum,
    formulation: Formulation = Formulation.DPIES,
    eta: float | None = None,
) -> SolutionSpectrum:
    """Solve the scalar equation degree by degree."""
    formulation = Formulation(formulation)
    nmax, k = data.nmax, data.k
    sigma = np.zeros(mode_count(nmax), dtype=complex)
    sys0 = scalar_mode_system(0, k, formulation, eta)
    flux = data.Q / k if sys0.scaled else data.Q
    x = solve_mode(sys0, np.array([data.f[0] / SQRT4PI, flux]))
    sigma[0] = x[0] * SQRT4PI
    V = complex(x[1])
    for n in range(1, nmax + 1):
        sysn = scalar_mode_system(n, k, formulation, eta)
        sl = _degree_slice(n)
        sigma[sl] = solve_mode(sysn, data.f[sl][None, :])[0]
    zero = np.zeros_like(sigma)
    return SolutionSpectrum(
        nmax, k, formulation, sys0.eta, sys0.scaled, sigma, zero, zero.copy(),
        zero.copy(), V, 0.0,
    )


def solve_vector(
    data: BoundaryDataSpectrum,
    formulation: Formulation = Formulation.DPIEV,
    eta: float | None = None,
) -> SolutionSpectrum:
    """Solve the vector equation degree by degree."""
    formulation = Formulation(formulation)
    nmax, k = data.nmax, data.k
    size = mode_count(nmax)
    aU = np.zeros(size, dtype=complex)
    aV = np.zeros(size, dtype=complex)
    rho = np.zeros(size, dtype=complex)
    sys0 = vector_mode_system(0, k, formulation, eta)
    hscale = 1.0 / k if sys0.scaled else 1.0
    x = solve_mode(sys0, np.array([0.0, 0.0, data.h[0] * hscale / SQRT4PI, data.q]))
    rho[0] = x[2] * SQRT4PI
    v = complex(x[3]) / hscale
    for n in range(1, nmax + 1):
        sysn = vector_mode_system(n, k, formulation, eta)
        sl = _degree_slice(n)
        rhs = np.stack([data.fU[sl], data.fV[sl], data.h[sl] * hscale])
        sol = solve_mode(sysn, rhs)
        aU[sl], aV[sl], rho[sl] = sol
    return SolutionSpectrum(
        nmax, k, formulation, sys0.eta, sys0.scaled, np.zeros(size, complex),
        aU, aV, rho, 0.0, v,
    )
