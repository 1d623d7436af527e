"""Randomised exact checks of ``φ*(W_T) = W_P`` and the structure of ``W_P``.

Every trial draws a point of the rectangles torus with rational entries and
rational quantum parameters, evaluates both sides in :class:`fractions.Fraction`
arithmetic and compares them for equality.  Failures are collected as data
with the full witness; nothing in this module raises on a failed check.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional

from core.fanout import fan_out
from core.logging import get_logger

from .combinat import FlagShape
from .exactalg import Expr, EvaluationError, LaurentExpr, VarId, evaluate
from .geometry import (
    RATIONAL_BOUND,
    SamplingError,
    point_pluckers,
    rectangle_pluckers,
    sample_point,
    sample_rationals,
    trial_generator,
)
from .mirror import (
    ChartExpansionError,
    ExternalConvention,
    build_WP,
    expand_in_rectangles,
    normalize_empty,
    pullback_WT,
    reparametrize_plain,
)

try:  # pragma: no cover - optional dependency
    import pandas as _pd
except Exception:  # pragma: no cover - pandas missing
    _pd = None

__all__ = [
    "IDENTITY_NOTE",
    "TheoremFailure",
    "VerificationReport",
    "check_main_theorem",
    "check_structure",
    "check_symbolic",
    "combine_reports",
    "sweep_structure",
]

LOGGER = get_logger("flagmirror.verify")

IDENTITY_NOTE = (
    "Both sides are fixed rational functions; a nonzero difference of total degree d "
    "vanishes at a uniformly random point of a box with N values per coordinate with "
    "probability at most d/N, so agreement on every independent trial makes an "
    "accidental coincidence negligible."
)


def _fmt(value: object) -> str:
    if isinstance(value, Fraction):
        return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    return str(value)


@dataclass(slots=True)
class TheoremFailure:
    """One counterexample (or an unusable trial) with everything needed to replay it."""

    trial: int
    reason: str
    point: Optional[List[List[List[str]]]] = None
    q: List[str] = field(default_factory=list)
    lhs: Optional[str] = None
    rhs: Optional[str] = None

    def to_json(self) -> dict:
        return {
            "trial": self.trial,
            "reason": self.reason,
            "point": self.point,
            "q": self.q,
            "wp": self.lhs,
            "pullback": self.rhs,
        }


@dataclass(slots=True)
class VerificationReport:
    shape: FlagShape
    trials: int = 0
    seed: Optional[int] = None
    convention: Optional[str] = None
    failures: List[TheoremFailure] = field(default_factory=list)
    grading_ok: Optional[bool] = None
    positivity_ok: Optional[bool] = None
    term_count_ok: Optional[bool] = None
    symbolic_ok: Optional[bool] = None
    term_count: Optional[int] = None
    elapsed_s: float = 0.0
    note: str = ""

    @property
    def passed(self) -> bool:
        flags = (self.grading_ok, self.positivity_ok, self.term_count_ok, self.symbolic_ok)
        return not self.failures and all(flag is not False for flag in flags)

    def to_json(self) -> dict:
        return {
            "shape": self.shape.spec,
            "variety": str(self.shape),
            "passed": self.passed,
            "trials": self.trials,
            "seed": self.seed,
            "convention": self.convention,
            "grading_ok": self.grading_ok,
            "positivity_ok": self.positivity_ok,
            "term_count_ok": self.term_count_ok,
            "term_count": self.term_count,
            "symbolic_ok": self.symbolic_ok,
            "elapsed_s": round(self.elapsed_s, 3),
            "note": self.note,
            "failures": [f.to_json() for f in self.failures],
        }

    def summary_row(self) -> Dict[str, object]:
        return {
            "shape": self.shape.spec,
            "trials": self.trials,
            "seed": self.seed,
            "externals": self.convention,
            "passed": self.passed,
            "failures": len(self.failures),
            "grading_ok": self.grading_ok,
            "positivity_ok": self.positivity_ok,
            "term_count_ok": self.term_count_ok,
            "symbolic_ok": self.symbolic_ok,
            "elapsed_s": self.elapsed_s,
        }

    def to_frame(self):
        """One-row :class:`pandas.DataFrame`; raises :class:`RuntimeError` without pandas."""

        if _pd is None:
            raise RuntimeError("pandas is not installed")
        return _pd.DataFrame([self.summary_row()])


def combine_reports(first: VerificationReport, *others: VerificationReport) -> VerificationReport:
    """Merge reports of one shape; checked flags and failures accumulate."""

    merged = VerificationReport(
        shape=first.shape,
        trials=first.trials,
        seed=first.seed,
        convention=first.convention,
        failures=list(first.failures),
        grading_ok=first.grading_ok,
        positivity_ok=first.positivity_ok,
        term_count_ok=first.term_count_ok,
        symbolic_ok=first.symbolic_ok,
        term_count=first.term_count,
        elapsed_s=first.elapsed_s,
        note=first.note,
    )
    for other in others:
        if other.shape != merged.shape:
            raise ValueError(f"cannot merge reports of {merged.shape} and {other.shape}")
        merged.trials += other.trials
        merged.failures.extend(other.failures)
        merged.elapsed_s += other.elapsed_s
        for name in ("seed", "convention", "grading_ok", "positivity_ok", "term_count_ok", "symbolic_ok", "term_count"):
            if getattr(other, name) is not None:
                setattr(merged, name, getattr(other, name))
        merged.note = merged.note or other.note
    return merged


# ---------------------------------------------------------------------------
# main theorem


@lru_cache(maxsize=64)
def _theorem_sides(shape: FlagShape, convention: ExternalConvention) -> tuple:
    wp: Expr = build_WP(shape).as_laurent()
    if convention is ExternalConvention.PLAIN:
        wp = reparametrize_plain(wp, shape)
    return normalize_empty(wp, shape), normalize_empty(pullback_WT(shape, convention), shape)


def _run_trial(shape: FlagShape, seed: int, trial: int, convention: ExternalConvention) -> Optional[TheoremFailure]:
    wp, pullback = _theorem_sides(shape, convention)
    try:
        point = sample_point(shape, seed, trial=trial, rectangles=True)
    except SamplingError as exc:
        return TheoremFailure(trial, f"sampling: {exc}")
    q = sample_rationals(trial_generator(seed, trial, 1), shape.rho, bound=RATIONAL_BOUND, nonzero=True)
    full = point_pluckers(point)
    values: Dict[VarId, object] = dict(full)
    rect: Dict[VarId, object] = dict(rectangle_pluckers(full))
    for i, qi in enumerate(q, start=1):
        values[VarId.quantum(i)] = qi
        rect[VarId.quantum(i)] = qi
    witness_q = [_fmt(v) for v in q]
    try:
        lhs = evaluate(wp, values)
        rhs = evaluate(pullback, rect)
    except EvaluationError as exc:
        return TheoremFailure(trial, f"{exc.reason}: {exc}", point.to_json(), witness_q)
    if lhs != rhs:
        return TheoremFailure(trial, "mismatch", point.to_json(), witness_q, _fmt(lhs), _fmt(rhs))
    return None


def check_main_theorem(
    shape: FlagShape,
    trials: int,
    seed: int,
    convention: ExternalConvention | str = ExternalConvention.CUMULATIVE,
    *,
    max_workers: Optional[int] = None,
) -> VerificationReport:
    """Compare ``W_P`` with ``φ*(W_T)`` exactly at ``trials`` random rational points."""

    if trials < 1:
        raise ValueError("trials must be >= 1")
    convention = ExternalConvention(convention)
    start = time.perf_counter()
    _theorem_sides(shape, convention)
    stats = fan_out(
        lambda index, trial: _run_trial(shape, seed, trial, convention),
        range(trials),
        max_workers=max_workers,
        label="verify",
        logger=LOGGER,
    )
    failures = [f for f in stats.results if f is not None]
    elapsed = time.perf_counter() - start
    report = VerificationReport(
        shape=shape,
        trials=trials,
        seed=seed,
        convention=convention.value,
        failures=failures,
        elapsed_s=elapsed,
        note=IDENTITY_NOTE,
    )
    log = LOGGER.error if failures else LOGGER.info
    log("verify shape=%s trials=%d seed=%d externals=%s failures=%d elapsed_s=%.3f", shape.spec, trials, seed, convention.value, len(failures), elapsed)
    return report


# ---------------------------------------------------------------------------
# structure


def check_structure(shape: FlagShape) -> VerificationReport:
    """Term count ``Σ r_{i-1}``, positive coefficients, degree one in the anticanonical grading."""

    start = time.perf_counter()
    wp = build_WP(shape)
    expected = sum(shape.r(i - 1) for i in shape.levels)
    positive = all(c > 0 for term in wp.terms for c in term.numerator.coefficients()) and all(
        not term.numerator.is_zero() for term in wp.terms
    )
    graded = all(degrees == {1} for degrees in wp.term_degrees())
    report = VerificationReport(
        shape=shape,
        grading_ok=graded,
        positivity_ok=positive,
        term_count_ok=len(wp) == expected,
        term_count=len(wp),
        elapsed_s=time.perf_counter() - start,
    )
    if not report.passed:
        LOGGER.error("structure shape=%s terms=%d expected=%d positive=%s graded=%s", shape.spec, len(wp), expected, positive, graded)
    return report


def sweep_structure(n_max: int) -> List[VerificationReport]:
    reports = [check_structure(shape) for n in range(2, n_max + 1) for shape in FlagShape.all_shapes(n)]
    LOGGER.info("sweep n_max=%d shapes=%d failed=%d", n_max, len(reports), sum(not r.passed for r in reports))
    return reports


def check_symbolic(shape: FlagShape) -> VerificationReport:
    """``W_P`` expanded in the rectangles chart against ``φ*(W_T)``, as an identity.

    Shapes whose factors are too large for the expansion come back with
    ``symbolic_ok=None``.
    """

    start = time.perf_counter()
    report = VerificationReport(shape=shape, convention=ExternalConvention.CUMULATIVE.value)
    try:
        expanded = expand_in_rectangles(shape)
    except ChartExpansionError as exc:
        LOGGER.info("symbolic shape=%s skipped reason=%s", shape.spec, exc)
        report.elapsed_s = time.perf_counter() - start
        return report
    pullback = normalize_empty(pullback_WT(shape), shape)
    report.symbolic_ok = isinstance(pullback, LaurentExpr) and expanded == pullback
    report.elapsed_s = time.perf_counter() - start
    if not report.symbolic_ok:
        difference = expanded - pullback  # type: ignore[operator]
        report.failures.append(TheoremFailure(-1, "symbolic mismatch", lhs=str(expanded), rhs=str(pullback)))
        LOGGER.error("symbolic shape=%s mismatch terms=%d", shape.spec, len(difference) if isinstance(difference, LaurentExpr) else -1)
    return report
