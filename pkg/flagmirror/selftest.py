"""Golden table of worked examples, runnable as ``flag_mirror.py selftest``.

Each case carries a short description (``where``) and returns
``(ok, detail)``; the CLI prints one line per case and fails if any case
fails.
"""

from __future__ import annotations

import fnmatch
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

from core.logging import get_logger

from .combinat import (
    EMPTY,
    FlagPermutation,
    FlagShape,
    Partition,
    PartitionTuple,
    enumerate_M,
    parse_shape,
    perm_to_tuple,
    tuple_to_perm,
)
from .critical import (
    DegenerateParametersError,
    cp_points,
    find_all_critical,
    gu_sharpe_system,
    identity_checks,
    karp_points,
)
from .exactalg import LaurentExpr, VarId, differentiate
from .geometry import plucker_relation_residuals, pluckers, sample_point
from .mirror import (
    build_ladder,
    build_WP,
    build_WT,
    expand_in_rectangles,
    normalize_empty,
    phi_labels,
    pullback_WT,
)
from .render import wp_json, wp_text
from .schubert import flag_pieri, quantum_pieri_gr
from .verify import check_main_theorem, check_structure

__all__ = ["GOLDEN_CASES", "GoldenCase", "GoldenResult", "golden_wp", "run_selftest"]

LOGGER = get_logger("flagmirror.selftest")

Outcome = Tuple[bool, str]


@dataclass(frozen=True, slots=True)
class GoldenCase:
    name: str
    where: str
    run: Callable[[], Outcome]


@dataclass(slots=True)
class GoldenResult:
    name: str
    where: str
    ok: bool
    detail: str
    elapsed_s: float

    def to_json(self) -> dict:
        return {"name": self.name, "where": self.where, "ok": self.ok, "detail": self.detail, "elapsed_s": round(self.elapsed_s, 3)}


def _p(level: int, *parts: int) -> LaurentExpr:
    return LaurentExpr.var(VarId.plucker(level, Partition(parts)))


def _q(level: int) -> LaurentExpr:
    return LaurentExpr.var(VarId.quantum(level))


def golden_wp(spec: str) -> LaurentExpr:
    """The displayed superpotentials, written out by hand."""

    if spec == "4:2":
        return _p(1, 1) / _p(1) + _p(1, 2, 1) / _p(1, 2) + _p(1, 2, 1) / _p(1, 1, 1) + _q(1) * _p(1, 1) / _p(1, 2, 2)  # type: ignore[return-value]
    if spec == "4:2,1":
        return (
            _p(1, 1) / _p(1)
            + (_p(1, 2, 1) + _q(1)) / _p(1, 2)
            + _p(1, 2, 1) / _p(1, 1, 1)
            + _q(1) * _p(1, 1) * _p(2, 1) / _p(1, 2, 2)
            + _p(2, 1) / _p(2)
            + _q(2) / _p(2, 1)
        )  # type: ignore[return-value]
    if spec == "6:4,2,1":
        return (
            _p(1, 1) / _p(1)
            + _p(1, 2, 1, 1, 1) / _p(1, 1, 1, 1, 1)
            + _p(1, 2, 1) / _p(1, 2)
            + (_p(1, 2, 2, 1) + _q(1) * _p(1, 1)) / _p(1, 2, 2)
            + (_p(1, 2, 2, 2, 1) + _q(1) * _p(1, 1, 1) * _p(2, 1)) / _p(1, 2, 2, 2)
            + _q(1) * _p(1, 1, 1, 1) * _p(2, 1, 1) / _p(1, 2, 2, 2, 2)
            + _p(2, 1) / _p(2)
            + _p(2, 2, 1) / _p(2, 1, 1)
            + (_p(2, 2, 1) + _q(2)) / _p(2, 2)
            + _q(2) * _p(2, 1) * _p(3, 1) / _p(2, 2, 2)
            + _p(3, 1) / _p(3)
            + _q(3) / _p(3, 1)
        )  # type: ignore[return-value]
    raise KeyError(spec)


def _rectangles_chart_gr42() -> LaurentExpr:
    return (
        _p(1, 1)
        + _p(1, 1, 1) / _p(1, 1)
        + _p(1, 2) / _p(1, 1)
        + _p(1, 2, 2) / (_p(1, 1) * _p(1, 1, 1))
        + _p(1, 2, 2) / (_p(1, 1) * _p(1, 2))
        + _q(1) * _p(1, 1) / _p(1, 2, 2)
    )  # type: ignore[return-value]


def _wp_case(spec: str) -> Outcome:
    shape = parse_shape(spec)
    wp = build_WP(shape)
    ok = wp.as_laurent() == golden_wp(spec)
    return ok, f"{len(wp)} terms"


def _term_count(spec: str, expected: int) -> Outcome:
    count = len(build_WP(parse_shape(spec)))
    return count == expected, f"{count} terms (expected {expected})"


def _rectangles_chart() -> Outcome:
    shape = FlagShape.grassmannian(4, 2)
    expanded = expand_in_rectangles(shape)
    pullback = normalize_empty(pullback_WT(shape), shape)
    ok = expanded == _rectangles_chart_gr42() and pullback == expanded
    return ok, f"{len(expanded)} terms"


def _pieri_case() -> Outcome:
    text = flag_pieri(1, Partition((2, 2, 2)), parse_shape("6:4,2,1")).render()
    expected = "s1[2,2,2,1] + q1*s12[(1,1),(1)]"
    return text == expected, text


def _ladder_case() -> Outcome:
    d = build_ladder(parse_shape("5:3,2,1"))
    ok = len(d.vertices) == 13 and len(d.arrows) == 17
    return ok, f"{len(d.vertices)} vertices, {len(d.arrows)} arrows"


def _structure_case(spec: str) -> Outcome:
    report = check_structure(parse_shape(spec))
    return report.passed, f"terms={report.term_count} graded={report.grading_ok} positive={report.positivity_ok}"


def _theorem_case(spec: str, trials: int) -> Outcome:
    report = check_main_theorem(parse_shape(spec), trials, seed=0, max_workers=1)
    return report.passed, f"{trials} trials, {len(report.failures)} failures"


def _karp_case() -> Outcome:
    points = karp_points(4, 2, 1)
    worst = max(p.grad_norm or 0.0 for p in points)
    return len(points) == 6 and worst < 1e-8, f"{len(points)} points, max |grad| {worst:.1e}"


def _cp_case() -> Outcome:
    points = cp_points(4, 2, 3)
    return len(points) == 12, f"{len(points)} points"


def _perm_case() -> Outcome:
    shape = FlagShape(4, (2, 1))
    expected = {
        (1, 2, 3, 4): PartitionTuple.unit(2),
        (2, 1, 3, 4): PartitionTuple((EMPTY, Partition.of(1))),
        (3, 2, 1, 4): PartitionTuple((Partition.of(1, 1), Partition.of(1))),
        (1, 3, 2, 4): PartitionTuple((Partition.of(1), EMPTY)),
    }
    ok = all(perm_to_tuple(FlagPermutation(w), shape) == t for w, t in expected.items())
    ok = ok and all(tuple_to_perm(t, shape) == FlagPermutation(w) for w, t in expected.items())
    return ok, f"{len(expected)} permutations"


def _frozen_case() -> Outcome:
    frozen = set(enumerate_M(4, 2))
    ok = frozen == {EMPTY, Partition.of(2), Partition.of(1, 1), Partition.of(2, 2)}
    return ok, " ".join(str(lam.parts) for lam in enumerate_M(4, 2))


def _quantum_pieri_case() -> Outcome:
    top = quantum_pieri_gr(Partition.of(2, 2), 4, 2).render()
    row = quantum_pieri_gr(Partition.of(2), 4, 2).render()
    return (top, row) == ("q1*s1[1]", "s1[2,1]"), f"{top}; {row}"


def _pieri_fl421_case() -> Outcome:
    text = flag_pieri(1, Partition.of(2), FlagShape(4, (2, 1))).render()
    return text == "s1[2,1] + q1", text


def _labels_at(shape: FlagShape) -> Dict[Tuple[int, int], LaurentExpr]:
    return {(v.col, v.row): value for v, value in phi_labels(shape).items()}


def _phi_gr42_case() -> Outcome:
    label = _labels_at(FlagShape.grassmannian(4, 2))[(1, 0)]
    return label == _p(1, 2, 2) / _p(1, 1), str(label)


def _phi_fl5321_case() -> Outcome:
    labels = _labels_at(FlagShape(5, (3, 2, 1)))
    corners = [labels[(2, 2)], labels[(3, 1)], labels[(4, 0)]]
    ok = labels[(2, 1)] == _q(1) * _p(2, 1) / _p(2) and corners == [_q(1), _q(1) * _q(2), _q(1) * _q(2) * _q(3)]
    return ok, str(labels[(2, 1)])


def _wt_case(spec: str, expected: int) -> Outcome:
    wt = build_WT(build_ladder(parse_shape(spec)))
    return len(wt) == expected, f"{len(wt)} terms (expected {expected})"


def _plucker_relation_case() -> Outcome:
    shape = FlagShape.grassmannian(4, 2)
    box = shape.box(1)
    trials = 50
    for trial in range(trials):
        values = pluckers(sample_point(shape, seed=0, trial=trial).factor(1))
        if any(r != 0 for r in plucker_relation_residuals(values, box)):
            return False, f"trial {trial}"
    return True, f"{trials} points"


def _derivative_case() -> Outcome:
    for n in (4, 5):
        shape = FlagShape(n, (2, 1))
        p2 = VarId.plucker(2, Partition.of(1))
        wp = build_WP(shape).as_laurent()
        lhs = normalize_empty(LaurentExpr.var(p2) * differentiate(wp, p2), shape)
        rhs = normalize_empty(
            _q(1) * _p(1, n - 3) * _p(2, 1) / _p(1, n - 2, n - 2) + _p(2, 1) - _q(2) / _p(2, 1), shape
        )
        if lhs != rhs:
            return False, f"n={n}: {lhs}"
    return True, "n=4, n=5"


def _gu_sharpe_case() -> Outcome:
    shape = FlagShape(4, (2, 1))
    x11, x12, x21 = (LaurentExpr.var(VarId.chern_root(i, j)) for i, j in ((1, 1), (1, 2), (2, 1)))
    equations = gu_sharpe_system(shape)
    ok = equations[0] == x11**4 + _q(1) * (x21 - x11) and equations[-1] == (x21 - x11) * (x21 - x12) - _q(2)
    return ok, f"{len(equations)} equations"


def _cp_guard_case() -> Outcome:
    try:
        cp_points(4, 1, 1)
    except DegenerateParametersError:
        return True, "q1^2 = q2^3 rejected"
    return False, "guard did not trigger"


def _identities_case() -> Outcome:
    worst = 0.0
    for n in (4, 5):
        for p in cp_points(n, 2, 3):
            worst = max(worst, identity_checks(n, p).max_residual)
    return worst < 1e-8, f"max residual {worst:.1e}"


def _newton_case(spec: str, q: Tuple[int, ...], starts: int, expected: int) -> Outcome:
    search = find_all_critical(parse_shape(spec), q, starts, seed=0)
    return search.count == expected, f"{search.count} points from {search.starts} starts (best effort)"


def _wp_output_case() -> Outcome:
    text = wp_text(build_WP(FlagShape.grassmannian(4, 2)))
    payload = wp_json(build_WP(FlagShape(4, (2, 1))))
    ok = text.count(" + ") == 3 and payload["count"] == 6
    return ok, f"text terms={text.count(' + ') + 1} json count={payload['count']}"


GOLDEN_CASES: Tuple[GoldenCase, ...] = (
    GoldenCase("wp-gr42", "W_P of Gr(4,2), four terms", lambda: _wp_case("4:2")),
    GoldenCase("wp-fl421", "W_P of Fl(4;2,1), six terms", lambda: _wp_case("4:2,1")),
    GoldenCase("wp-fl6421", "W_P of Fl(6;4,2,1), twelve terms", lambda: _wp_case("6:4,2,1")),
    GoldenCase("wp-full-flag-4", "term count of the full flag Fl(4)", lambda: _term_count("4:3,2,1", 9)),
    GoldenCase("cli-wp-output", "wp text for Gr(4,2), wp json for Fl(4;2,1)", _wp_output_case),
    GoldenCase("perm-fl421", "words 1234, 2134, 3214, 1324 of Fl(4;2,1)", _perm_case),
    GoldenCase("frozen-gr42", "denominators of the Gr(4,2) superpotential", _frozen_case),
    GoldenCase("qpieri-gr42", "s_1 * s_(2,2) and s_1 * s_(2) in QH(Gr(4,2))", _quantum_pieri_case),
    GoldenCase("pieri-fl421", "numerator p^1_(2,1) + q1 of Fl(4;2,1)", _pieri_fl421_case),
    GoldenCase("pieri-fl6421", "quantum Pieri for (2,2,2) at level 1 of Fl(6;4,2,1)", _pieri_case),
    GoldenCase("rectangles-chart-gr42", "Gr(4,2) pulled back to the rectangles chart", _rectangles_chart),
    GoldenCase("plucker-relation-gr42", "p_(2) p_(1,1) + p_(2,2) p_∅ = p_(2,1) p_(1)", _plucker_relation_case),
    GoldenCase("ladder-fl5321", "ladder of Fl(5;3,2,1)", _ladder_case),
    GoldenCase("wt-gr42", "W_T of the Gr(4,2) ladder, one term per arrow", lambda: _wt_case("4:2", 6)),
    GoldenCase("wt-fl5321", "W_T of the Fl(5;3,2,1) ladder, one term per arrow", lambda: _wt_case("5:3,2,1", 17)),
    GoldenCase("phi-gr42-d", "Gr(4,2) label at row 2, column 2", _phi_gr42_case),
    GoldenCase("phi-fl5321-k", "Fl(5;3,2,1) label in block 2 and the corner values", _phi_fl5321_case),
    GoldenCase("structure-gr42", "four terms of degree one", lambda: _structure_case("4:2")),
    GoldenCase("structure-fl421", "positive coefficients and degree one", lambda: _structure_case("4:2,1")),
    GoldenCase("theorem-gr42", "pullback identity on Gr(4,2)", lambda: _theorem_case("4:2", 100)),
    GoldenCase("theorem-fl421", "pullback identity on Fl(4;2,1)", lambda: _theorem_case("4:2,1", 20)),
    GoldenCase("derivative-fl21", "p^2_(1) dW_P/dp^2_(1) on Fl(n;2,1)", _derivative_case),
    GoldenCase("gu-sharpe-fl421", "Gu-Sharpe equations of Fl(4;2,1)", _gu_sharpe_case),
    GoldenCase("karp-gr42", "Vandermonde critical points of Gr(4,2)", _karp_case),
    GoldenCase("cp-fl421", "C_P points of Fl(4;2,1)", _cp_case),
    GoldenCase("cp-guard-fl421", "C_P undefined when q1^2 = q2^(n-1)", _cp_guard_case),
    GoldenCase("identities-fl21", "Fl(n;2,1) relations at the C_P points", _identities_case),
    GoldenCase("newton-gr42", "multistart search on Gr(4,2), q = 1", lambda: _newton_case("4:2", (1,), 2000, 6)),
    GoldenCase("newton-fl421-degenerate", "multistart search on Fl(4;2,1), q = (1,1)", lambda: _newton_case("4:2,1", (1, 1), 10_000, 11)),
)


def run_selftest(only: Optional[str] = None) -> List[GoldenResult]:
    """Run every case (or those whose name matches the glob ``only``)."""

    results: List[GoldenResult] = []
    for case in GOLDEN_CASES:
        if only and not fnmatch.fnmatch(case.name, only) and only not in case.name:
            continue
        start = time.perf_counter()
        try:
            ok, detail = case.run()
        except Exception as exc:  # reported, not raised
            LOGGER.exception("selftest case=%s raised", case.name)
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        elapsed = time.perf_counter() - start
        results.append(GoldenResult(case.name, case.where, ok, detail, elapsed))
        LOGGER.debug("selftest case=%s ok=%s elapsed_s=%.3f", case.name, ok, elapsed)
    LOGGER.info("selftest cases=%d failed=%d", len(results), sum(not r.ok for r in results))
    return results
