"""Self-test driver: short oracle and invariant suites with a JSON-able report.

Each suite is a list of named checks; a check passes when its measured value
is within its tolerance. The suites are scaled-down versions of the test
suite so that an installed build can be audited without pytest.
"""

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .analysis import condition_sweep
from .incoming import MultipoleKind, MultipoleSource, PlaneWave, gauge_audit
from .mie import mie_reference
from .oracle import oracle_evaluate
from .scatter import boundary_residuals, eval_fields, solve_scattering
from .specfun import (
    RadialKind,
    mod_radial_all,
    sph_bessel_j_all,
    sph_bessel_j_derivative_all,
    sph_bessel_y_all,
)
from .sphere_ops import ScalarOpKind, scalar_signature, vector_L_block, vector_R_block

__all__ = ["Check", "SuiteResult", "run_selftest", "SUITES"]

log = logging.getLogger(__name__)


@dataclass
class Check:
    name: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value <= self.tolerance)


@dataclass
class SuiteResult:
    name: str
    checks: list[Check] = field(default_factory=list)
    seconds: float = 0.0
    error: str | None = None

    @property
    def passed(self) -> int:
        return sum(c.passed for c in self.checks)

    @property
    def failed(self) -> int:
        return len(self.checks) - self.passed + (self.error is not None)

    def report(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "failed": self.failed,
            "seconds": round(self.seconds, 3),
            "error": self.error,
            "failures": [asdict(c) for c in self.checks if not c.passed],
        }


def _specfun() -> list[Check]:
    z = np.linspace(0.1, 100, 400)
    n = np.arange(51)[:, None]
    j = sph_bessel_j_all(51, z)
    y = sph_bessel_y_all(51, z)
    dj = sph_bessel_j_derivative_all(50, z)
    dy = np.empty_like(y[:51])
    dy[0] = -y[1]
    dy[1:] = y[:50] - (n[1:] + 1) * y[1:51] / z
    w = (j[:51] * dy - dj * y[:51]) * z**2
    # only where y_n is representable
    ok = np.isfinite(w)
    wr = float(np.abs(w[ok] - 1).max())
    mid = j[1:50]
    rec = np.abs(j[:49] + j[2:51] - (2 * n[1:50] + 1) / z * mid)
    scale = np.abs(j[:49]) + np.abs(j[2:51]) + np.abs((2 * n[1:50] + 1) / z * mid)
    rr = float((rec / scale).max())
    r = np.array([1.0, 2.0])
    h0 = mod_radial_all(RadialKind.OUTGOING_HANKEL, 20, 0.0, r)
    h7 = mod_radial_all(RadialKind.OUTGOING_HANKEL, 20, 1e-7, r)
    exact = r[None] ** -(np.arange(21)[:, None] + 1.0)
    static = float(np.abs(h0 - exact).max())
    cont = float((np.abs(h7 - h0) / np.abs(h0)).max())
    return [
        Check("wronskian n<=50 z in [0.1,100]", wr, 1e-10),
        Check("three-term recurrence", rr, 1e-11),
        Check("static outgoing profile at k=0", static, 0.0),
        Check("continuity at k=1e-7", cont, 1e-6),
    ]


def _signatures() -> list[Check]:
    out = []
    for k in (0.0, 1.0, 10.0):
        for n in (0, 1, 3):
            res = oracle_evaluate(n, min(n, 1), k, 64)
            for op in ScalarOpKind:
                err = abs(res.scalar[op] - scalar_signature(op, n, k))
                out.append(Check(f"{op.value} n={n} k={k:g}", err, 1e-6))
            if n >= 1:
                eL = np.abs(res.L - vector_L_block(n, k)).max()
                eR = np.abs(res.R - vector_R_block(n, k)).max()
                out.append(Check(f"L block n={n} k={k:g}", float(eL), 1e-6))
                out.append(Check(f"R block n={n} k={k:g}", float(eR), 1e-6))
    return out


def _invertibility() -> list[Check]:
    out = []
    forms = ("dpies", "dpies-scaled", "dpiev", "dpiev-scaled")
    for f in forms:
        recs = condition_sweep(f, [0.0, 1e-4, 1e-2, 1.0, 10.0], 60, eta=1.0)
        smin = min(r.sigma_min for r in recs)
        out.append(Check(f"{f} 1/sigma_min", 1.0 / smin, 1e3))
    return out


def _gauge() -> list[Check]:
    out = []
    for k in (0.0, 1e-3, 1.0, 10.0):
        pw = PlaneWave(np.array([1.0, 1j, 0.0]) / np.sqrt(2), np.array([0.0, 0.0, 1.0]), k)
        out.append(Check(f"plane wave k={k:g}", gauge_audit(pw), 1e-6))
        for kind in MultipoleKind:
            for radial in RadialKind:
                src = MultipoleSource(2, 1, kind, radial, k)
                out.append(
                    Check(f"{kind.value} {radial.value} k={k:g}", gauge_audit(src), 1e-6)
                )
    return out


def _scattering() -> list[Check]:
    out = []
    rng = np.random.default_rng(0)
    d = rng.normal(size=(20, 3))
    x = d / np.linalg.norm(d, axis=1, keepdims=True) * rng.uniform(1.5, 10, (20, 1))
    for k in (1e-4, 1.0, 5.0):
        pw = PlaneWave(np.array([1.0, 0, 0]), np.array([0, 0, 1.0]), k)
        sol = solve_scattering(pw, "dpie-scaled")
        res = boundary_residuals(sol)
        out.append(Check(f"n x E k={k:g}", res["bc_tangE"], 1e-8))
        out.append(Check(f"n . H k={k:g}", res["bc_normH"], 1e-8))
        out.append(Check(f"gauge link k={k:g}", res["gauge_link"], 1e-7))
        out.append(Check(f"net charge k={k:g}", res["net_charge"], 1e-9))
        if k >= 0.5:
            F = eval_fields(sol, x)
            M = mie_reference(pw, x)
            err = np.linalg.norm(F.E - M.E, axis=-1).max() / np.linalg.norm(pw.E_p)
            out.append(Check(f"Mie agreement k={k:g}", float(err), 1e-6))
    return out


def _static_limit() -> list[Check]:
    x = np.array([[1.5, 0.2, 0.3], [0.0, 0.0, -3.0], [2.0, 2.0, 1.0]])
    out = []
    for f in ("dpie", "dpie-scaled"):
        F = {}
        for k in (0.0, 1e-6):
            pw = PlaneWave(np.array([1.0, 0, 0]), np.array([0, 0, 1.0]), k)
            F[k] = eval_fields(solve_scattering(pw, f), x)
        e = np.abs(F[0.0].E - F[1e-6].E).max() / np.abs(F[0.0].E).max()
        out.append(Check(f"{f} E continuity", float(e), 1e-5))
    return out


SUITES: dict[str, Callable[[], list[Check]]] = {
    "specfun": _specfun,
    "signatures": _signatures,
    "invertibility": _invertibility,
    "gauge": _gauge,
    "scattering": _scattering,
    "static-limit": _static_limit,
}


def run_selftest(names=None) -> dict:
    """Run the named suites (all by default) and return a report.

    The report has ``ok``, ``passed``, ``failed`` and a ``suites`` list; each
    suite lists its failing checks. An exception inside a suite is recorded as
    a failure rather than propagated.
    """
    names = list(SUITES) if names is None else list(names)
    results = []
    for name in names:
        t0 = time.perf_counter()
        res = SuiteResult(name)
        try:
            res.checks = SUITES[name]()
        except Exception as exc:  # reported, not raised
            log.exception("suite %s raised", name)
            res.error = f"{type(exc).__name__}: {exc}"
        res.seconds = time.perf_counter() - t0
        results.append(res)
    passed = sum(r.passed for r in results)
    failed = sum(r.failed for r in results)
    return {
        "ok": failed == 0,
        "passed": passed,
        "failed": failed,
        "suites": [r.report() for r in results],
    }

