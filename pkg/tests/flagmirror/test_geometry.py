from fractions import Fraction

import numpy as np
import pytest

from flagmirror.combinat import EMPTY, BoxShape, Partition, is_rectangle
from flagmirror.exactalg import VarId, evaluate
from flagmirror.geometry import (
    FactorMatrix,
    GaugeError,
    SamplingError,
    YPoint,
    chart_pluckers,
    gauge_coords,
    gauge_variables,
    in_torus,
    numeric_point,
    plucker_relation_residuals,
    pluckers,
    point_pluckers,
    rectangle_pluckers,
    sample_point,
    sample_rationals,
    trial_generator,
    vandermonde,
)
from flagmirror.linalg import exact_det
from flagmirror.schubert import schur_table


def F(*xs):
    return [Fraction(x) for x in xs]


def test_vandermonde_minors_are_schur_values():
    xs = F(2, 3, Fraction(-1, 2))
    assert pluckers(vandermonde(xs, 5)) == schur_table(3, 2, xs)
    xs = F(1, 4)
    assert pluckers(vandermonde(xs, 4)) == schur_table(2, 2, xs)


def test_pluckers_are_normalised_and_indexed_by_box():
    m = FactorMatrix(1, ((Fraction(2), Fraction(0), Fraction(1)), (Fraction(0), Fraction(1), Fraction(3))))
    values = pluckers(m)
    assert values[EMPTY] == 1
    assert set(values) == {EMPTY, Partition((1,)), Partition((1, 1))}
    # columns {1,3} and {2,3} over columns {1,2}
    assert values[Partition((1,))] == Fraction(3, 1)
    assert values[Partition((1, 1))] == Fraction(-1, 2)


def test_pluckers_rejects_vanishing_base_minor():
    m = FactorMatrix(1, ((Fraction(1), Fraction(1), Fraction(0)), (Fraction(1), Fraction(1), Fraction(1))))
    with pytest.raises(GaugeError):
        pluckers(m)


@pytest.mark.parametrize("rows,n", [(2, 4), (2, 5)])
def test_three_term_relations_hold_exactly_on_random_matrices(rows, n):
    box = BoxShape(rows, n - rows)
    checked = 0
    for trial in range(1000):
        entries = sample_rationals(trial_generator(17, trial), rows * n, bound=20)
        m = FactorMatrix(1, tuple(tuple(entries[a * n : (a + 1) * n]) for a in range(rows)))
        try:
            values = pluckers(m)
        except GaugeError:
            continue
        residuals = plucker_relation_residuals(values, box)
        assert residuals and all(r == 0 for r in residuals)
        checked += 1
    assert checked > 900


def test_three_term_relations_hold_for_three_rows():
    xs = F(2, -3, 5)
    box = BoxShape(3, 3)
    values = pluckers(vandermonde(xs, 6))
    residuals = plucker_relation_residuals(values, box)
    assert len(residuals) > 0
    assert all(r == 0 for r in residuals)


def test_no_relations_in_small_boxes():
    assert plucker_relation_residuals({EMPTY: 1}, BoxShape(1, 3)) == []


def test_gauge_chart_reconstructs_an_equivalent_matrix():
    m = FactorMatrix(1, (tuple(F(1, 2, 3, 4)), tuple(F(0, 1, 5, 2))))
    chart = gauge_coords(m)
    assert chart.pivots == (1, 2)
    rebuilt = chart.reconstruct()
    assert pluckers(rebuilt) == pluckers(m)


def test_gauge_chart_skips_singular_pivots():
    m = FactorMatrix(1, (tuple(F(1, 1, 0)), tuple(F(2, 2, 1))))
    chart = gauge_coords(m)
    assert chart.pivots == (1, 3)
    with pytest.raises(GaugeError):
        gauge_coords(FactorMatrix(1, (tuple(F(1, 2, 3)), tuple(F(2, 4, 6)))))


def test_sample_point_is_deterministic_per_seed_and_trial(fl421):
    a = sample_point(fl421, seed=3, trial=5)
    b = sample_point(fl421, seed=3, trial=5)
    c = sample_point(fl421, seed=3, trial=6)
    assert a == b
    assert a != c
    assert [f.r for f in a.factors] == [2, 1]
    assert [f.n for f in a.factors] == [4, 2]
    assert in_torus(a, fl421)


def test_sample_point_for_rectangles_torus(gr42):
    point = sample_point(gr42, seed=0, rectangles=True)
    rect = rectangle_pluckers(point_pluckers(point))
    assert rect
    assert all(is_rectangle(v.partition) for v in rect)
    assert all(value != 0 for value in rect.values())


def test_sample_point_gives_up_after_retries(gr42, monkeypatch):
    monkeypatch.setattr("flagmirror.geometry.in_torus", lambda *a, **k: False)
    with pytest.raises(SamplingError) as exc:
        sample_point(gr42, seed=0, retries=3)
    assert exc.value.attempts == 3


def test_sample_rationals_nonzero():
    values = sample_rationals(trial_generator(0, 1), 200, bound=2, nonzero=True)
    assert len(values) == 200
    assert all(v != 0 for v in values)
    assert all(isinstance(v, Fraction) for v in values)


def test_chart_pluckers_agree_with_reconstructed_matrix(fl421):
    exprs = chart_pluckers(fl421)
    assert len(exprs) == 6 + 2
    variables = gauge_variables(fl421)
    assert len(variables) == fl421.dimension
    values = {v: Fraction(k + 2, 3) for k, v in enumerate(variables)}
    level1 = FactorMatrix(
        1,
        (
            (Fraction(1), Fraction(0), values[VarId.gauge(1, 1, 1)], values[VarId.gauge(1, 1, 2)]),
            (Fraction(0), Fraction(1), values[VarId.gauge(1, 2, 1)], values[VarId.gauge(1, 2, 2)]),
        ),
    )
    level2 = FactorMatrix(2, ((Fraction(1), values[VarId.gauge(2, 1, 1)]),))
    direct = point_pluckers(YPoint((level1, level2)))
    for var, expr in exprs.items():
        assert evaluate(expr, values) == direct[var]


def test_numeric_point_and_torus_membership(gr42):
    point = numeric_point([np.array([[1, 0, 2, 3], [0, 1, 4, 5]])])
    assert point.factor(1).n == 4
    assert in_torus(point, gr42)
    singular = numeric_point([np.array([[1, 0, 0, 3], [0, 1, 0, 5]])])
    # p_(2,2) uses columns {3,4}
    assert not in_torus(singular, gr42)


@pytest.mark.parametrize("rows,n", [(2, 4), (3, 5), (1, 3)])
def test_normalised_pluckers_ignore_left_multiplication(rows, n):
    checked = 0
    for trial in range(200):
        rng = trial_generator(23, trial)
        entries = sample_rationals(rng, rows * n, bound=9)
        m = FactorMatrix(1, tuple(tuple(entries[a * n : (a + 1) * n]) for a in range(rows)))
        g_entries = sample_rationals(rng, rows * rows, bound=9)
        g = [g_entries[a * rows : (a + 1) * rows] for a in range(rows)]
        if exact_det(g) == 0:
            continue
        try:
            before = pluckers(m)
        except GaugeError:
            continue
        assert pluckers(m.left_multiply(g)) == before
        checked += 1
    assert checked > 150
