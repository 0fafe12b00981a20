"""Command-line front end.

Subcommands::

    dpie signatures  --k 1 --n-max 20
    dpie spectrum    --formulation dpiev-scaled --k 10 --n-max 60
    dpie cond-sweep  --k-min 1e-6 --k-max 10 --points 40 --formulations dpies,efie
    dpie scatter     --k 1 --pol 1,0,0 --dir 0,0,1 --points pts.csv --out fields.csv
    dpie selftest

CSV output starts with ``#`` comment lines holding the resolved configuration
as JSON, then a header row; numbers use 17 significant digits. Exit status is
0 on success, 1 on usage errors, 2 on computation failures and 3 when the
self-test finds a failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .analysis import condition_sweep, mode_spectrum
from .assembly import Formulation, truncation_for
from .errors import ConvergenceError, DomainError, SingularBlockError, TruncationError
from .incoming import MultipoleKind, MultipoleSource, PlaneWave
from .scatter import boundary_residuals, eval_fields, solve_scattering
from .selftest import SUITES, run_selftest
from .specfun import RadialKind
from .sphere_ops import ScalarOpKind, scalar_signatures

__all__ = ["RunConfig", "UsageError", "parse_args", "run", "main"]

log = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_SELFTEST = 0, 1, 2, 3
_FMT = "{:.16e}"


class UsageError(Exception):
    """Invalid command line; maps to exit status 1."""


@dataclass
class RunConfig:
    """Fully resolved options for one invocation."""

    subcommand: str
    k: float | None = None
    k_min: float | None = None
    k_max: float | None = None
    n_points: int | None = None
    formulations: list[str] = field(default_factory=list)
    n_max: int | None = None
    eta: float | None = None
    pol: list[complex] | None = None
    direction: list[float] | None = None
    multipole: tuple[str, int, int] | None = None
    points_path: str | None = None
    n_random: int = 20
    out: str | None = None
    report: str | None = None
    fmt: str = "csv"
    seed: int = 0
    timestamp: bool = True
    suites: list[str] | None = None
    threads: int | None = None

    def header(self) -> dict:
        d = asdict(self)
        if self.pol is not None:
            d["pol"] = [_complex_text(c) for c in self.pol]
        d["version"] = __version__
        return d


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _complex_text(c: complex) -> str:
    return f"{c.real:.17g}{c.imag:+.17g}j"


def _vector(text: str, kind=float, length: int = 3):
    try:
        vals = [kind(t.strip().replace(" ", "")) for t in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"malformed vector {text!r}") from exc
    if len(vals) != length:
        raise UsageError(f"expected {length} comma-separated values, got {text!r}")
    return vals


def _formulation(text: str) -> str:
    try:
        return Formulation(text.strip().lower()).value
    except ValueError as exc:
        choices = ", ".join(f.value for f in Formulation)
        raise UsageError(f"unknown formulation {text!r} (choose from {choices})") from exc


def _build_parser() -> _Parser:
    p = _Parser(prog="dpie", description="Decoupled potential integral equations on the unit sphere.")
    p.add_argument("--version", action="version", version=f"dpie {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="subcommand", parser_class=_Parser)

    def common(sp, fmt=("csv",)):
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--format", dest="fmt", choices=fmt, default=fmt[0])
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--no-timestamp", dest="timestamp", action="store_false")

    s = sub.add_parser("signatures", help="scalar operator signatures")
    s.add_argument("--k", type=float, required=True)
    s.add_argument("--n-max", type=int)
    common(s, ("csv", "json"))

    s = sub.add_parser("spectrum", help="per-degree eigenvalues and singular values")
    s.add_argument("--formulation", required=True)
    s.add_argument("--k", type=float, required=True)
    s.add_argument("--n-max", type=int)
    s.add_argument("--eta", type=float)
    common(s, ("csv", "json"))

    s = sub.add_parser("cond-sweep", help="condition number against wavenumber")
    s.add_argument("--k-min", type=float, required=True)
    s.add_argument("--k-max", type=float, required=True)
    s.add_argument("--points", dest="n_points", type=int, default=40)
    s.add_argument("--formulations", default="dpies,dpiev,dpiev-scaled,efie")
    s.add_argument("--n-max", type=int)
    s.add_argument("--eta", type=float)
    common(s, ("csv", "json"))

    s = sub.add_parser("scatter", help="scattered fields and boundary residuals")
    s.add_argument("--k", type=float, required=True)
    s.add_argument("--pol", help="complex polarization, e.g. 1,1j,0")
    s.add_argument("--dir", dest="direction", help="propagation direction, e.g. 0,0,1")
    s.add_argument("--multipole", help="regular multipole source kind,n,m")
    s.add_argument("--formulation", default="dpie", choices=("dpie", "dpie-scaled"))
    s.add_argument("--n-max", type=int)
    s.add_argument("--eta", type=float)
    s.add_argument("--points", dest="points_path", help="CSV of x,y,z rows")
    s.add_argument("--n-random", type=int, default=20, help="seeded points if --points is absent")
    s.add_argument("--report", help="residual report path (default: <out>.json or stderr)")
    common(s, ("csv", "json"))

    s = sub.add_parser("selftest", help="run the oracle and invariant suites")
    s.add_argument("--suites", help=f"comma list from {','.join(SUITES)}")
    common(s, ("json",))
    return p


def parse_args(argv=None) -> RunConfig:
    """Parse and validate ``argv`` into a :class:`RunConfig`.

    Raises
    ------
    UsageError
        On unknown flags, missing requirements or malformed values.
    """
    ns = _build_parser().parse_args(argv)
    if ns.subcommand is None:
        raise UsageError("dpie: a subcommand is required (see --help)")
    logging.basicConfig(level=logging.WARNING - 10 * min(ns.verbose, 2))
    cfg = RunConfig(ns.subcommand)
    for name in ("k", "k_min", "k_max", "n_points", "n_max", "eta", "points_path",
                 "n_random", "out", "report", "fmt", "seed", "timestamp"):
        if hasattr(ns, name):
            setattr(cfg, name, getattr(ns, name))
    threads = os.environ.get("DPIE_THREADS")
    if threads:
        try:
            cfg.threads = max(1, int(threads))
        except ValueError as exc:
            raise UsageError(f"DPIE_THREADS must be an integer, got {threads!r}") from exc
    for name in ("k", "k_min", "k_max"):
        v = getattr(cfg, name)
        if v is not None and not (np.isfinite(v) and v >= 0):
            raise UsageError(f"--{name.replace('_', '-')} must be finite and >= 0")
    if cfg.n_max is not None and cfg.n_max < 0:
        raise UsageError("--n-max must be >= 0")

    if cfg.subcommand == "spectrum":
        cfg.formulations = [_formulation(ns.formulation)]
        if cfg.formulations[0] == "efie" and cfg.k == 0:
            raise UsageError("the EFIE needs --k > 0")
    elif cfg.subcommand == "cond-sweep":
        cfg.formulations = [_formulation(f) for f in ns.formulations.split(",") if f]
        if not cfg.formulations:
            raise UsageError("--formulations is empty")
        if cfg.k_max < cfg.k_min:
            raise UsageError("--k-max must not be below --k-min")
        if cfg.n_points < 1:
            raise UsageError("--points must be >= 1")
        if cfg.n_points > 1 and cfg.k_min <= 0:
            raise UsageError("log-spaced sweeps need --k-min > 0")
        if "efie" in cfg.formulations and cfg.k_min == 0:
            raise UsageError("the EFIE needs k > 0")
    elif cfg.subcommand == "scatter":
        cfg.formulations = [ns.formulation]
        if ns.multipole:
            if ns.pol or ns.direction:
                raise UsageError("--multipole excludes --pol/--dir")
            parts = [t.strip() for t in ns.multipole.split(",")]
            if len(parts) != 3 or parts[0] not in {m.value for m in MultipoleKind}:
                raise UsageError("--multipole expects kind,n,m with kind magnetic|electric")
            try:
                n, m = int(parts[1]), int(parts[2])
            except ValueError as exc:
                raise UsageError("--multipole degree and order must be integers") from exc
            if n < 1 or abs(m) > n:
                raise UsageError("--multipole needs n >= 1 and |m| <= n")
            cfg.multipole = (parts[0], n, m)
        else:
            if not (ns.pol and ns.direction):
                raise UsageError("scatter needs --pol and --dir, or --multipole")
            cfg.pol = _vector(ns.pol, complex)
            cfg.direction = _vector(ns.direction, float)
            u = np.asarray(cfg.direction)
            if not np.isclose(np.linalg.norm(u), 1.0, atol=1e-12):
                nrm = np.linalg.norm(u)
                if nrm == 0:
                    raise UsageError("--dir must be nonzero")
                cfg.direction = list(u / nrm)
            if abs(np.dot(np.asarray(cfg.pol), np.asarray(cfg.direction))) > 1e-12:
                raise UsageError("polarization not transverse to --dir")
        if cfg.points_path and not os.path.exists(cfg.points_path):
            raise UsageError(f"points file {cfg.points_path!r} not found")
    elif cfg.subcommand == "selftest":
        if ns.suites:
            cfg.suites = [s.strip() for s in ns.suites.split(",") if s.strip()]
            bad = [s for s in cfg.suites if s not in SUITES]
            if bad:
                raise UsageError(f"unknown suites {bad}")
    return cfg


def _num(x: float) -> str:
    return _FMT.format(float(x))


def _write(cfg: RunConfig, columns: list[str], rows, extra_json: dict | None = None):
    """Emit rows as CSV (with comment header) or JSON to ``cfg.out``."""
    if cfg.fmt == "json":
        payload = {"config": cfg.header(), "columns": columns, "rows": rows}
        if cfg.timestamp:
            payload["generated"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
        if extra_json:
            payload.update(extra_json)
        text = json.dumps(payload, indent=1, default=str) + "\n"
    else:
        buf = io.StringIO()
        buf.write(f"# dpie {cfg.subcommand}\n")
        if cfg.timestamp:
            buf.write(f"# generated: {_dt.datetime.now(_dt.timezone.utc).isoformat()}\n")
        buf.write("# config: " + json.dumps(cfg.header(), sort_keys=True, default=str) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_num(v) if isinstance(v, (float, np.floating)) else v for v in row])
        text = buf.getvalue()
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run_signatures(cfg: RunConfig) -> int:
    nmax = truncation_for(cfg.k) if cfg.n_max is None else cfg.n_max
    rows = []
    for op in ScalarOpKind:
        vals = scalar_signatures(op, nmax, cfg.k)
        rows += [[op.value, n, cfg.k, v.real, v.imag] for n, v in enumerate(vals)]
    _write(cfg, ["op", "n", "k", "re", "im"], rows)
    return EXIT_OK


def _run_spectrum(cfg: RunConfig) -> int:
    rec = mode_spectrum(cfg.formulations[0], cfg.k, cfg.n_max, cfg.eta)
    eig: dict[int, list[complex]] = {}
    for n, lam in rec.eigenvalues:
        eig.setdefault(n, []).append(lam)
    rows = []
    for n, b, s in rec.singular_values:
        lam = eig[n][b - 1]
        rows.append([rec.formulation.value, rec.k, n, b, lam.real, lam.imag, s])
    cols = ["formulation", "k", "n", "branch", "re_lambda", "im_lambda", "sigma"]
    _write(cfg, cols, rows, {"eta": rec.eta, "scaled": rec.scaled, "n_max": rec.n_max})
    return EXIT_OK


def _run_sweep(cfg: RunConfig) -> int:
    if cfg.n_points == 1:
        ks = np.array([cfg.k_min])
    else:
        ks = np.logspace(np.log10(cfg.k_min), np.log10(cfg.k_max), cfg.n_points)
    rule = cfg.n_max if cfg.n_max is not None else truncation_for
    rows = []
    for f in cfg.formulations:
        for r in condition_sweep(f, ks, rule, cfg.eta, workers=cfg.threads):
            rows.append([f, r.k, r.n_max, r.cond, r.sigma_min, r.sigma_max, r.params["eta"]])
    cols = ["formulation", "k", "n_max", "cond", "sigma_min", "sigma_max", "eta"]
    _write(cfg, cols, rows)
    return EXIT_OK


def _read_points(path: str) -> np.ndarray:
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for rec in csv.reader(fh):
            if not rec or rec[0].lstrip().startswith("#"):
                continue
            try:
                rows.append([float(v) for v in rec[:3]])
            except ValueError:
                if rows:
                    raise UsageError(f"malformed point row {rec!r} in {path}")
                continue  # header row
            if len(rows[-1]) != 3:
                raise UsageError(f"point rows need x,y,z in {path}")
    if not rows:
        raise UsageError(f"no points in {path}")
    return np.asarray(rows)


def _random_points(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    d = rng.normal(size=(n, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    return d * rng.uniform(1.5, 10.0, size=(n, 1))


def _run_scatter(cfg: RunConfig) -> int:
    if cfg.multipole:
        kind, n, m = cfg.multipole
        src = MultipoleSource(n, m, MultipoleKind(kind), RadialKind.REGULAR_BESSEL, cfg.k)
    else:
        src = PlaneWave(np.asarray(cfg.pol), np.asarray(cfg.direction), cfg.k)
    x = _read_points(cfg.points_path) if cfg.points_path else _random_points(cfg.n_random, cfg.seed)
    sol = solve_scattering(src, cfg.formulations[0], cfg.n_max, cfg.eta)
    F = eval_fields(sol, x)
    report = boundary_residuals(sol)
    report["params"] = {
        "k": sol.k, "n_max": sol.nmax,
        "formulations": [f.value for f in sol.formulations], **sol.params,
    }
    cols = ["x", "y", "z"]
    for name in ("E", "H"):
        for c in "xyz":
            cols += [f"Re{name}{c}", f"Im{name}{c}"]
    rows = []
    for p, e, h in zip(x, F.E, F.H):
        row = [float(v) for v in p]
        for vec in (e, h):
            for c in vec:
                row += [float(c.real), float(c.imag)]
        rows.append(row)
    _write(cfg, cols, rows, {"residuals": report})
    text = json.dumps(report, indent=1, sort_keys=True) + "\n"
    target = cfg.report or (cfg.out + ".json" if cfg.out and cfg.fmt == "csv" else None)
    if target:
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(text)
    elif cfg.fmt == "csv":
        sys.stderr.write(text)
    return EXIT_OK


def _run_selftest(cfg: RunConfig) -> int:
    rep = run_selftest(cfg.suites)
    rep["config"] = cfg.header()
    if cfg.timestamp:
        rep["generated"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
    text = json.dumps(rep, indent=1, default=str) + "\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if rep["ok"] else EXIT_SELFTEST


_RUNNERS = {
    "signatures": _run_signatures,
    "spectrum": _run_spectrum,
    "cond-sweep": _run_sweep,
    "scatter": _run_scatter,
    "selftest": _run_selftest,
}


def run(cfg: RunConfig) -> int:
    """Execute a validated configuration and return the exit status."""
    try:
        return _RUNNERS[cfg.subcommand](cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, SingularBlockError, ConvergenceError, TruncationError,
            ArithmeticError) as exc:
        print(f"computation failed in {cfg.subcommand}: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return EXIT_COMPUTE
    except OSError as exc:
        print(f"I/O error in {cfg.subcommand}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE


def main(argv=None) -> int:
    try:
        cfg = parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
