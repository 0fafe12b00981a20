"""Spectra, singular values and condition numbers of the per-degree systems.

Because every operator is diagonal in the harmonic basis, the spectrum of a
formulation truncated at degree ``n_max`` is the union of the spectra of its
small per-degree blocks, and its condition number is

    max over blocks of sigma_max / min over blocks of sigma_min,

including the constraint-augmented n = 0 block. Inert slots of the n = 0
vector block are left out.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .assembly import Formulation, mode_system, truncation_for
from .errors import DomainError

__all__ = [
    "SpectrumRecord",
    "SweepRecord",
    "CLUSTER_POINTS",
    "truncation_for",
    "mode_spectrum",
    "condition_sweep",
    "cluster_fraction",
    "singular_value_branches",
]

log = logging.getLogger(__name__)

#: Accumulation points of the scaled vector spectrum at high degree.
CLUSTER_POINTS = (0.5 + 0.0j, 0.5 + 0.5j, 0.5 - 0.5j)


@dataclass(frozen=True)
class SpectrumRecord:
    """Eigenvalues and singular values of every retained block.

    Attributes
    ----------
    eigenvalues : list of (int, complex)
        ``(n, lambda)`` pairs, by decreasing modulus within each block.
    singular_values : list of (int, int, float)
        ``(n, branch, s)`` with branches numbered from 1 in decreasing order
        of ``s`` within each block.
    """

    k: float
    formulation: Formulation
    n_max: int
    eta: float
    scaled: bool
    eigenvalues: list
    singular_values: list


@dataclass(frozen=True)
class SweepRecord:
    """Global block-diagonal condition number at one wavenumber."""

    k: float
    formulation: Formulation
    n_max: int
    cond: float
    sigma_min: float
    sigma_max: float
    params: dict = field(default_factory=dict)


def _blocks(formulation: Formulation, k: float, n_max: int, eta: float | None):
    for n in range(n_max + 1):
        sys = mode_system(n, k, formulation, eta)
        if sys.active:
            yield sys


def mode_spectrum(
    formulation, k: float, n_max: int | None = None, eta: float | None = None
) -> SpectrumRecord:
    """Eigenvalues and singular values of all blocks up to ``n_max``.

    Parameters
    ----------
    formulation : Formulation or str
    k : float
        Wavenumber, ``k >= 0`` (``k > 0`` for the EFIE).
    n_max : int, optional
        Highest degree; :func:`truncation_for` by default.
    eta : float, optional
        Coupling constant for the unscaled DPIE forms.

    Examples
    --------
    >>> rec = mode_spectrum("dpies", 1.0, 40)
    >>> abs(rec.eigenvalues[-1][1] - 0.5) < 0.01
    True
    """
    formulation = Formulation(formulation)
    n_max = truncation_for(k) if n_max is None else int(n_max)
    if n_max < 0:
        raise DomainError("n_max must be non-negative")
    eigs, svals = [], []
    eta_used, scaled = np.nan, False
    for sys in _blocks(formulation, k, n_max, eta):
        a = sys.active_matrix
        eta_used, scaled = sys.eta, sys.scaled
        lams = np.linalg.eigvals(a)
        for lam in lams[np.lexsort((lams.imag, lams.real, -np.abs(lams)))]:
            eigs.append((sys.n, complex(lam)))
        for b, s in enumerate(np.linalg.svd(a, compute_uv=False), start=1):
            svals.append((sys.n, b, float(s)))
    return SpectrumRecord(k, formulation, n_max, float(eta_used), scaled, eigs, svals)


def singular_value_branches(record: SpectrumRecord) -> tuple[np.ndarray, np.ndarray]:
    """Tabulate singular values as ``(degrees, values[n, branch])``.

    Blocks with fewer branches than the widest block are padded with NaN.
    """
    degrees = sorted({n for n, _, _ in record.singular_values})
    width = max((b for _, b, _ in record.singular_values), default=0)
    row = {n: i for i, n in enumerate(degrees)}
    out = np.full((len(degrees), width), np.nan)
    for n, b, s in record.singular_values:
        out[row[n], b - 1] = s
    return np.asarray(degrees), out


def cluster_fraction(
    record: SpectrumRecord,
    points: Sequence[complex] = CLUSTER_POINTS,
    radius: float = 0.05,
    n_range: tuple[int, int] | None = None,
) -> float:
    """Fraction of eigenvalues within ``radius`` of any of ``points``.

    ``n_range`` restricts the count to degrees ``lo <= n <= hi``.
    """
    pts = np.asarray(points, dtype=complex)
    lams = np.array(
        [
            lam
            for n, lam in record.eigenvalues
            if n_range is None or n_range[0] <= n <= n_range[1]
        ],
        dtype=complex,
    )
    if lams.size == 0:
        return float("nan")
    dist = np.abs(lams[:, None] - pts[None]).min(axis=1)
    return float(np.mean(dist <= radius))


def _sweep_point(formulation, k, n_max, eta) -> SweepRecord:
    smin, smax = np.inf, 0.0
    eta_used, scaled = np.nan, False
    for sys in _blocks(formulation, k, n_max, eta):
        s = np.linalg.svd(sys.active_matrix, compute_uv=False)
        smin, smax = min(smin, s.min()), max(smax, s.max())
        eta_used, scaled = sys.eta, sys.scaled
    cond = smax / smin if smin > 0 else np.inf
    return SweepRecord(
        float(k), formulation, n_max, float(cond), float(smin), float(smax),
        {"eta": float(eta_used), "scaled": scaled},
    )


def condition_sweep(
    formulation,
    k_list: Iterable[float],
    n_max_rule: int | Callable[[float], int] = truncation_for,
    eta: float | None = None,
    workers: int | None = None,
) -> list[SweepRecord]:
    """Global condition number for each wavenumber in ``k_list``.

    Parameters
    ----------
    formulation : Formulation or str
    k_list : iterable of float
        Ascending wavenumbers.
    n_max_rule : int or callable
        Fixed truncation degree or a map ``k -> n_max``.
    eta : float, optional
        Coupling constant for the unscaled DPIE forms.
    workers : int, optional
        Thread count; records come back in ``k_list`` order regardless.
    """
    formulation = Formulation(formulation)
    ks = [float(k) for k in k_list]
    if any(b < a for a, b in zip(ks, ks[1:])):
        raise DomainError("k_list must be sorted ascending")
    rule = n_max_rule if callable(n_max_rule) else (lambda _k: int(n_max_rule))
    jobs = [(formulation, k, rule(k), eta) for k in ks]
    if workers and workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            out = list(pool.map(lambda j: _sweep_point(*j), jobs))
    else:
        out = [_sweep_point(*j) for j in jobs]
    log.info("swept %s over %d wavenumbers", formulation.value, len(out))
    return out
