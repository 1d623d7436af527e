import logging

import pytest

import flagmirror.selftest as selftest_mod
from flagmirror.selftest import GOLDEN_CASES, GoldenCase, golden_wp, run_selftest


def test_golden_case_names_are_unique():
    names = [c.name for c in GOLDEN_CASES]
    assert len(names) == len(set(names))


def test_selftest_wp_cases_pass():
    results = run_selftest("wp-*")
    assert [r.name for r in results] == ["wp-gr42", "wp-fl421", "wp-fl6421", "wp-full-flag-4"]
    assert all(r.ok for r in results)


def test_selftest_substring_match():
    results = run_selftest("ladder")
    assert [r.name for r in results] == ["ladder-fl5321"]
    assert results[0].ok
    assert results[0].detail == "13 vertices, 17 arrows"


@pytest.mark.parametrize(
    "name",
    [
        "cli-wp-output",
        "perm-fl421",
        "frozen-gr42",
        "qpieri-gr42",
        "pieri-fl421",
        "plucker-relation-gr42",
        "wt-gr42",
        "wt-fl5321",
        "phi-gr42-d",
        "phi-fl5321-k",
        "structure-gr42",
        "derivative-fl21",
        "gu-sharpe-fl421",
        "cp-guard-fl421",
        "identities-fl21",
    ],
)
def test_worked_examples_pass(name):
    (result,) = run_selftest(name)
    assert result.name == name
    assert result.ok, result.detail
    assert result.where


def test_selftest_unknown_pattern_is_empty():
    assert run_selftest("no-such-case") == []


def test_selftest_reports_raising_case(monkeypatch, caplog):
    def boom():
        raise RuntimeError("kaputt")

    monkeypatch.setattr(selftest_mod, "GOLDEN_CASES", (GoldenCase("boom", "raises", boom),))
    with caplog.at_level(logging.ERROR, logger="flagmirror.selftest"):
        results = run_selftest()
    assert len(results) == 1
    assert not results[0].ok
    assert results[0].detail == "RuntimeError: kaputt"
    assert "case=boom" in caplog.text
    assert set(results[0].to_json()) == {"name", "where", "ok", "detail", "elapsed_s"}


def test_golden_wp_unknown_shape():
    with pytest.raises(KeyError):
        golden_wp("5:2")


@pytest.mark.slow
def test_full_selftest_passes():
    results = run_selftest()
    assert len(results) == len(GOLDEN_CASES)
    assert [r.name for r in results if not r.ok] == []
