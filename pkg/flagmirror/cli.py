"""Command line front end: ``wp``, ``ladder``, ``verify``, ``pieri``, ``crit``, ``selftest``.

Exit codes: ``0`` every check passed, ``1`` a check failed, ``2`` usage error.
Reports go to stdout; logs go to stderr.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional, Sequence, TextIO

from core.logging import configure_logging, get_logger, warn_once
from core.runtime import default_seed, numeric_tolerance

from .combinat import FlagShape, ShapeError, parse_partition, parse_shape
from .critical import (
    CriticalCandidate,
    DegenerateParametersError,
    OutsideTorusError,
    SolverUndercountError,
    cp_points,
    find_all_critical,
    grad_WP,
    identity_checks,
    karp_points,
)
from .mirror import ExternalConvention, build_ladder, build_WP, phi_labels
from .render import (
    dumps,
    ladder_dot,
    ladder_json,
    ladder_text,
    pieri_json,
    wp_json,
    wp_latex,
    wp_text,
)
from .schubert import PieriError, flag_pieri
from .selftest import run_selftest
from .storage import ReportStorage
from .verify import VerificationReport, check_main_theorem, check_structure, check_symbolic, combine_reports

try:  # pragma: no cover - optional dependency
    import pandas as _pd
except Exception:  # pragma: no cover - pandas missing
    _pd = None

__all__ = ["EXIT_FAIL", "EXIT_OK", "EXIT_USAGE", "build_parser", "main"]

LOGGER = get_logger("flagmirror.cli")

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

DEFAULT_TRIALS = 100
DEFAULT_STARTS = 10_000


class UsageError(ValueError):
    """Raised by command handlers for invalid arguments; maps to exit code 2."""


def _strip_timing(payload: object) -> object:
    if isinstance(payload, dict):
        return {k: _strip_timing(v) for k, v in payload.items() if k != "elapsed_s"}
    if isinstance(payload, list):
        return [_strip_timing(v) for v in payload]
    return payload


def _shape(text: str) -> FlagShape:
    try:
        return parse_shape(text)
    except ShapeError as exc:
        where = f" at position {exc.position}" if exc.position is not None else ""
        raise UsageError(f"invalid shape{where}: {exc}") from None


def _parse_q(text: Optional[str], rho: int) -> List[complex]:
    if text is None:
        return [1 + 0j] * rho
    try:
        values = [complex(chunk.strip().replace(" ", "")) for chunk in text.split(",")]
    except ValueError:
        raise UsageError(f"invalid --q {text!r}") from None
    if len(values) != rho:
        raise UsageError(f"--q needs {rho} values, got {len(values)}")
    return values


def _write_frame(rows: List[Dict[str, object]], path: Optional[str]) -> None:
    if not path:
        return
    if _pd is None:
        warn_once(LOGGER, "pandas-missing", "csv_export skipped reason=pandas-missing path=%s", path)
        return
    _pd.DataFrame(rows).to_csv(path, index=False)
    LOGGER.info("csv_export path=%s rows=%d", path, len(rows))


# ---------------------------------------------------------------------------
# commands


def cmd_wp(args: argparse.Namespace, out: TextIO) -> int:
    wp = build_WP(_shape(args.shape))
    if args.format == "json":
        out.write(dumps(wp_json(wp)) + "\n")
    elif args.format == "latex":
        out.write(wp_latex(wp) + "\n")
    else:
        out.write(wp_text(wp) + "\n")
    return EXIT_OK


def cmd_ladder(args: argparse.Namespace, out: TextIO) -> int:
    shape = _shape(args.shape)
    d = build_ladder(shape)
    fmt = "dot" if args.dot else args.format
    labels = phi_labels(shape, args.externals) if args.phi else None
    if fmt == "dot":
        out.write(ladder_dot(d) + "\n")
    elif fmt == "json":
        out.write(dumps(ladder_json(d, labels)) + "\n")
    else:
        out.write(ladder_text(d, labels) + "\n")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, out: TextIO) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    reports: List[VerificationReport] = []
    for spec in args.shapes:
        shape = _shape(spec)
        parts = [
            check_main_theorem(shape, args.trials, args.seed, args.externals),
            check_structure(shape),
        ]
        if args.symbolic:
            parts.append(check_symbolic(shape))
        reports.append(combine_reports(*parts))
    payload = [r.to_json() for r in reports]
    out.write(dumps(_strip_timing(payload if len(payload) > 1 else payload[0])) + "\n")
    if args.store:
        ReportStorage(args.store).write_verification(reports)
    _write_frame([r.summary_row() for r in reports], args.csv)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_pieri(args: argparse.Namespace, out: TextIO) -> int:
    shape = _shape(args.shape)
    try:
        lam = parse_partition(args.lam)
        expr = flag_pieri(args.level, lam, shape)
    except (ShapeError, PieriError) as exc:
        raise UsageError(str(exc)) from None
    if args.format == "json":
        out.write(dumps(pieri_json(expr, args.level, lam)) + "\n")
    else:
        out.write(expr.render() + "\n")
    return EXIT_OK


def _crit_method(shape: FlagShape, requested: str) -> str:
    if requested != "auto":
        return requested
    if shape.is_grassmannian:
        return "karp"
    if shape.ranks == (2, 1):
        return "cp"
    return "newton"


def _identities(shape: FlagShape, points: Sequence[CriticalCandidate]) -> List[Dict[str, object]]:
    if shape.ranks == (2, 1):
        return [identity_checks(shape.n, p, strict=False).to_json() for p in points]
    return [grad_WP(p).to_json() for p in points]


def cmd_crit(args: argparse.Namespace, out: TextIO) -> int:
    shape = _shape(args.shape)
    q = _parse_q(args.q, shape.rho)
    if any(z == 0 for z in q):
        raise UsageError("quantum parameters must be nonzero")
    tol = numeric_tolerance()
    method = _crit_method(shape, args.method)
    try:
        if method == "karp":
            if not shape.is_grassmannian:
                raise UsageError("karp needs a Grassmannian")
            points: List[CriticalCandidate] = karp_points(shape.n, shape.ranks[0], q[0], sign=args.sign, tol=tol)
            expected: Optional[int] = len(points)
        elif method == "cp":
            if shape.ranks != (2, 1):
                raise UsageError("cp needs a shape n:2,1")
            try:
                points = cp_points(shape.n, q[0], q[1])
            except DegenerateParametersError as exc:
                if args.method != "auto":
                    raise
                LOGGER.info("crit shape=%s method=cp fallback=newton reason=%s", shape.spec, exc)
                method = "newton"
            else:
                for p in points:
                    grad_WP(p)
                expected = shape.n * (shape.n - 1)
        payload: Dict[str, object] = {"shape": shape.spec, "method": method, "q": [[z.real, z.imag] for z in q]}
        if method == "newton":
            search = find_all_critical(shape, q, args.starts, seed=args.seed, tol=tol)
            payload.update(search.to_json())
            points = search.points
            expected = None
        identities = _identities(shape, points)
    except OutsideTorusError as exc:
        LOGGER.error("crit shape=%s method=%s outside_torus=%s", shape.spec, method, exc)
        return EXIT_FAIL
    except UsageError:
        raise
    except (DegenerateParametersError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    except SolverUndercountError as exc:
        LOGGER.error("crit shape=%s found=%d expected=%d", shape.spec, exc.found, exc.expected)
        return EXIT_FAIL
    if method != "newton":
        payload["count"] = len(points)
        payload["points"] = [p.to_json() for p in points]
    worst = max((p.grad_norm or 0.0 for p in points), default=0.0)
    payload["max_grad_norm"] = worst
    payload["identities"] = identities
    out.write(dumps(payload) + "\n")
    if args.store:
        ReportStorage(args.store).write_critical(points)
    _write_frame(
        [
            {"shape": shape.spec, "source": p.source.value, "grad_norm": p.grad_norm, **{k: str(v) for k, v in p.to_json()["x"].items()}}
            for p in points
        ],
        args.csv,
    )
    ok = bool(points) and worst < tol and (expected is None or len(points) == expected)
    LOGGER.info("crit shape=%s method=%s count=%d max_grad=%.2e ok=%s", shape.spec, method, len(points), worst, ok)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_selftest(args: argparse.Namespace, out: TextIO) -> int:
    results = run_selftest(args.only)
    if not results:
        raise UsageError(f"no selftest case matches {args.only!r}")
    for r in results:
        out.write(f"{'ok  ' if r.ok else 'FAIL'} {r.name:<24} {r.detail}  [{r.where}]\n")
    return EXIT_OK if all(r.ok for r in results) else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=default_seed(), help="Seed für Stichproben und Startwerte (Default: FLAGMIRROR_SEED oder 0).")
    common.add_argument("--verbose", action="store_true", help="DEBUG-Logs aktivieren.")
    common.add_argument("--store", default=None, metavar="PATH", help="Optional: SQLite-Datei für Berichte.")
    common.add_argument("--csv", default=None, metavar="PATH", help="Optional: Ergebnis als CSV (pandas).")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="flag_mirror", description="Plücker-Koordinaten-Mirrors von Fahnenvarietäten")
    sub = parser.add_subparsers(dest="command", required=True)

    wp = sub.add_parser("wp", parents=[common], help="Superpotential W_P ausgeben")
    wp.add_argument("shape", help="ShapeSpec, z.B. 4:2,1")
    wp.add_argument("--format", choices=("text", "json", "latex"), default="text")
    wp.set_defaults(handler=cmd_wp)

    ladder = sub.add_parser("ladder", parents=[common], help="Leiterdiagramm ausgeben")
    ladder.add_argument("shape")
    ladder.add_argument("--format", choices=("text", "json", "dot"), default="text")
    ladder.add_argument("--dot", action="store_true", help="Kurzform für --format dot.")
    ladder.add_argument("--phi", action="store_true", help="Knoten mit den Plücker-Ausdrücken beschriften.")
    ladder.add_argument("--externals", choices=[c.value for c in ExternalConvention], default="cumulative")
    ladder.set_defaults(handler=cmd_ladder)

    verify = sub.add_parser("verify", parents=[common], help="φ*(W_T) = W_P exakt an Zufallspunkten prüfen")
    verify.add_argument("shapes", nargs="+", metavar="shape")
    verify.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    verify.add_argument("--externals", choices=[c.value for c in ExternalConvention], default="cumulative")
    verify.add_argument("--symbolic", action="store_true", help="Zusätzlich symbolischer Vergleich in der Rechteck-Karte.")
    verify.set_defaults(handler=cmd_verify)

    pieri = sub.add_parser("pieri", parents=[common], help="Quanten-Pieri-Regel auswerten")
    pieri.add_argument("shape")
    pieri.add_argument("-i", "--level", type=int, required=True)
    pieri.add_argument("--lambda", dest="lam", required=True, help="Partition, z.B. 2,2,2")
    pieri.add_argument("--format", choices=("text", "json"), default="text")
    pieri.set_defaults(handler=cmd_pieri)

    crit = sub.add_parser("crit", parents=[common], help="Kritische Punkte von W_P")
    crit.add_argument("shape")
    crit.add_argument("--q", default=None, help="Kommagetrennte Quantenparameter (komplex erlaubt), Default 1.")
    crit.add_argument("--starts", type=int, default=DEFAULT_STARTS)
    crit.add_argument("--sign", choices=("auto", "gu-sharpe", "karp"), default="auto")
    crit.add_argument("--method", choices=("auto", "karp", "cp", "newton"), default="auto")
    crit.set_defaults(handler=cmd_crit)

    selftest = sub.add_parser("selftest", parents=[common], help="Goldene Beispiele ausführen")
    selftest.add_argument("--only", default=None, metavar="PATTERN")
    selftest.set_defaults(handler=cmd_selftest)
    return parser


def main(argv: Sequence[str] | None = None, *, out: TextIO | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    configure_logging(default_level=logging.INFO, verbose=args.verbose)
    handler: Callable[[argparse.Namespace, TextIO], int] = args.handler
    try:
        return handler(args, out or sys.stdout)
    except UsageError as exc:
        sys.stderr.write(f"flag_mirror {args.command}: {exc}\n")
        return EXIT_USAGE
