import logging

import pytest

from flagmirror.combinat import FlagShape, parse_shape
from flagmirror.exactalg import LaurentExpr
from flagmirror.verify import (
    IDENTITY_NOTE,
    TheoremFailure,
    VerificationReport,
    check_main_theorem,
    check_structure,
    check_symbolic,
    combine_reports,
    sweep_structure,
)
import flagmirror.verify as verify_mod


@pytest.mark.parametrize("spec", ["4:2", "4:2,1", "5:2"])
def test_main_theorem_small_shapes(spec):
    report = check_main_theorem(parse_shape(spec), 100, seed=0, max_workers=1)
    assert report.trials == 100
    assert report.failures == []
    assert report.passed
    assert report.note == IDENTITY_NOTE


@pytest.mark.slow
@pytest.mark.parametrize("spec", ["6:3", "5:3,2,1", "6:4,2,1"])
def test_main_theorem_larger_shapes(spec):
    report = check_main_theorem(parse_shape(spec), 100, seed=0)
    assert report.failures == []


def test_main_theorem_plain_externals(fl421):
    report = check_main_theorem(fl421, 30, seed=2, convention="plain", max_workers=1)
    assert report.convention == "plain"
    assert report.passed


def test_main_theorem_is_deterministic(fl421):
    a = check_main_theorem(fl421, 10, seed=5, max_workers=1).to_json()
    b = check_main_theorem(fl421, 10, seed=5, max_workers=2).to_json()
    a.pop("elapsed_s")
    b.pop("elapsed_s")
    assert a == b


def test_main_theorem_rejects_zero_trials(gr42):
    with pytest.raises(ValueError):
        check_main_theorem(gr42, 0, seed=0)


def test_mismatch_is_reported_not_raised(gr42, monkeypatch, caplog):
    wp, pullback = verify_mod._theorem_sides(gr42, verify_mod.ExternalConvention.CUMULATIVE)
    monkeypatch.setattr(verify_mod, "_theorem_sides", lambda shape, convention: (wp + LaurentExpr.constant(1), pullback))
    with caplog.at_level(logging.ERROR, logger="flagmirror.verify"):
        report = check_main_theorem(gr42, 3, seed=0, max_workers=1)
    assert not report.passed
    assert [f.trial for f in report.failures] == [0, 1, 2]
    failure = report.failures[0]
    assert failure.reason == "mismatch"
    assert failure.point is not None and len(failure.point) == 1
    assert len(failure.q) == 1
    assert failure.lhs != failure.rhs
    assert "failures=3" in caplog.text


def test_failure_json_keys():
    payload = TheoremFailure(4, "mismatch", [[["1"]]], ["2"], "3", "4").to_json()
    assert payload == {"trial": 4, "reason": "mismatch", "point": [[["1"]]], "q": ["2"], "wp": "3", "pullback": "4"}


def test_structure_of_fl421(fl421):
    report = check_structure(fl421)
    assert report.term_count == 6
    assert report.term_count_ok and report.positivity_ok and report.grading_ok
    assert report.passed


def test_structure_sweep_small():
    reports = sweep_structure(5)
    assert len(reports) == 1 + 3 + 7 + 15
    assert all(r.passed for r in reports)


@pytest.mark.slow
def test_structure_sweep_up_to_eight():
    reports = sweep_structure(8)
    assert len(reports) == sum(2 ** (n - 1) - 1 for n in range(2, 9))
    assert all(r.passed for r in reports)


def test_symbolic_check(fl421):
    report = check_symbolic(fl421)
    assert report.symbolic_ok is True
    assert report.passed


def test_symbolic_check_skips_large_factors():
    report = check_symbolic(FlagShape.grassmannian(6, 3))
    assert report.symbolic_ok is None
    assert report.passed


def test_combine_reports_accumulates(fl421):
    theorem = check_main_theorem(fl421, 5, seed=1, max_workers=1)
    structure = check_structure(fl421)
    merged = combine_reports(theorem, structure)
    assert merged.trials == 5
    assert merged.seed == 1
    assert merged.term_count == 6
    assert merged.grading_ok is True
    assert merged.passed
    broken = VerificationReport(shape=fl421, positivity_ok=False)
    assert not combine_reports(merged, broken).passed


def test_combine_reports_rejects_other_shapes(fl421, gr42):
    with pytest.raises(ValueError):
        combine_reports(VerificationReport(shape=fl421), VerificationReport(shape=gr42))


def test_report_frame(gr42):
    pytest.importorskip("pandas")
    frame = check_structure(gr42).to_frame()
    assert list(frame["shape"]) == ["4:2"]
    assert bool(frame["passed"][0])


def test_report_frame_without_pandas(gr42, monkeypatch):
    monkeypatch.setattr(verify_mod, "_pd", None)
    with pytest.raises(RuntimeError):
        check_structure(gr42).to_frame()
