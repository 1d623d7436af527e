import dataclasses

import numpy as np
import pytest

from flagmirror.combinat import FlagShape
from flagmirror.critical import (
    CandidateSource,
    DegenerateParametersError,
    ResidualError,
    SolverUndercountError,
    cp_points,
    find_all_critical,
    fl21_chern_roots,
    grad_WP,
    gu_sharpe_residuals,
    gu_sharpe_system,
    identity_checks,
    karp_points,
    karp_sign_report,
)
from flagmirror.exactalg import VarId


def test_karp_points_gr42_are_critical():
    points = karp_points(4, 2, 1)
    assert len(points) == 6
    assert all(p.source is CandidateSource.KARP for p in points)
    assert max(p.grad_norm for p in points) < 1e-8


def test_karp_points_gr52():
    points = karp_points(5, 2, 1)
    assert len(points) == 10
    assert max(p.grad_norm for p in points) < 1e-8


def test_karp_sign_report_separates_the_signs():
    report = karp_sign_report(4, 2, 1)
    assert set(report) == {1, -1}
    assert min(report.values()) < 1e-8
    assert max(report.values()) > 1e-3


def test_karp_points_solve_gu_sharpe():
    shape = FlagShape.grassmannian(5, 2)
    for p in karp_points(5, 2, 2, sign="gu-sharpe"):
        residuals = gu_sharpe_residuals(shape, p.x, p.q)
        assert max(abs(r) for r in residuals) < 1e-9


def test_karp_points_guards():
    with pytest.raises(DegenerateParametersError):
        karp_points(4, 2, 0)
    with pytest.raises(ValueError):
        karp_points(4, 2, 1, sign="both")


def test_gradient_cross_check_away_from_critical_points():
    worst = max(
        (p for sign in ("gu-sharpe", "karp") for p in karp_points(4, 2, 1, sign=sign)),
        key=lambda p: p.grad_norm,
    )
    check = grad_WP(worst)
    assert check.norm > 1e-3
    assert abs(check.fd_norm - check.norm) < 1e-6 * (1 + check.norm)
    assert check.error_h2 < check.error_h
    assert worst.grad_norm == check.norm


def test_gu_sharpe_system_shape(fl421):
    equations = gu_sharpe_system(fl421)
    assert len(equations) == 3
    assert VarId.quantum(2) in equations[-1].variables()


@pytest.mark.parametrize("n", [4, 5])
def test_cp_points_count_and_criticality(n):
    points = cp_points(n, 2, 3)
    assert len(points) == n * (n - 1)
    assert all(p.source is CandidateSource.CP for p in points)
    for p in points:
        assert grad_WP(p).norm < 1e-8


@pytest.mark.parametrize("n", [4, 5])
def test_goal_identity_at_cp_points(n):
    for p in cp_points(n, 2, 3):
        residuals = identity_checks(n, p)
        assert residuals.gu_sharpe < 1e-8
        assert residuals.max_residual < 1e-8


def test_identity_checks_reject_non_solutions():
    p = cp_points(4, 2, 3)[0]
    moved = dataclasses.replace(p, x={**p.x, VarId.chern_root(2, 1): p.x[VarId.chern_root(2, 1)] + 0.5})
    with pytest.raises(ResidualError):
        identity_checks(4, moved)
    loose = identity_checks(4, moved, strict=False)
    assert loose.gu_sharpe > 1e-3


def test_cp_points_guards():
    with pytest.raises(DegenerateParametersError):
        cp_points(2, 1, 1)
    with pytest.raises(DegenerateParametersError):
        cp_points(4, 0, 3)
    # q1^2 == q2^(n-1)
    with pytest.raises(DegenerateParametersError):
        cp_points(4, 1, 1)


def test_undercount_error_carries_counts():
    err = SolverUndercountError("short", 11, 12)
    assert (err.found, err.expected) == (11, 12)
    assert isinstance(err, RuntimeError)


@pytest.mark.parametrize("n,expected", [(2, 2), (3, 3)])
def test_multistart_on_projective_space(n, expected):
    search = find_all_critical(FlagShape.grassmannian(n, 1), [1], 200, seed=0, max_workers=1)
    assert search.count == expected
    assert search.best_effort
    assert all(p.grad_norm < 1e-8 for p in search.points)
    payload = search.to_json()
    assert payload["count"] == expected
    assert "elapsed_s" not in payload


def test_multistart_rejects_large_dimension():
    with pytest.raises(ValueError):
        find_all_critical(FlagShape(5, (4, 3, 2, 1)), [1, 1, 1, 1], 10)


@pytest.mark.slow
def test_multistart_fl421_degenerate_parameters(fl421):
    search = find_all_critical(fl421, [1, 1], 10_000, seed=0)
    assert search.starts >= 10_000
    assert search.count == 11
    assert np.all(np.isfinite([p.grad_norm for p in search.points]))


def test_chern_roots_are_recovered_from_the_realization():
    p = cp_points(4, 2, 3)[0]
    bare = dataclasses.replace(p, x={}, source=CandidateSource.NEWTON)
    roots = fl21_chern_roots(bare)
    assert abs(roots[VarId.chern_root(2, 1)] - p.x[VarId.chern_root(2, 1)]) < 1e-9
    pair = {roots[VarId.chern_root(1, 1)], roots[VarId.chern_root(1, 2)]}
    for z in (p.x[VarId.chern_root(1, 1)], p.x[VarId.chern_root(1, 2)]):
        assert min(abs(z - w) for w in pair) < 1e-9
    assert identity_checks(4, bare).max_residual < 1e-8


def test_multistart_gr42_matches_karp_count():
    search = find_all_critical(FlagShape.grassmannian(4, 2), [1], 2000, seed=0)
    assert search.count == 6
    assert all(p.grad_norm < 1e-8 for p in search.points)


def test_multistart_count_does_not_depend_on_seed_or_workers():
    shape = FlagShape.grassmannian(4, 2)
    counts = {
        find_all_critical(shape, [1], 2000, seed=seed, max_workers=workers).count
        for seed, workers in ((0, 1), (0, 2), (5, 1))
    }
    assert counts == {6}


@pytest.mark.slow
def test_multistart_fl421_generic_parameters(fl421):
    search = find_all_critical(fl421, [2, 3], 4000, seed=0)
    assert search.count == 12
    for p in search.points:
        assert identity_checks(4, p, strict=False).max_residual < 1e-6
