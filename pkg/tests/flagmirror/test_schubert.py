from fractions import Fraction

import numpy as np
import pytest

from flagmirror.combinat import EMPTY, FlagShape, Partition, PartitionTuple, enumerate_M, enumerate_S
from flagmirror.schubert import (
    ClassExpr,
    ClassTerm,
    PieriError,
    anticanonical_check,
    flag_pieri,
    lr_multiply,
    precancellation_terms,
    quantum_multiply_gr,
    quantum_pieri_gr,
    rim_hook_reduce,
    schur_eval,
)


def _gr_class(n, r, *pairs):
    terms = [ClassTerm(c, (power,), PartitionTuple((Partition(parts),))) for c, power, parts in pairs]
    return ClassExpr.build(FlagShape.grassmannian(n, r), terms)


def test_schur_methods_agree_on_exact_values():
    xs = [Fraction(1), Fraction(2), Fraction(3)]
    assert schur_eval(Partition.of(1, 1), xs) == 11
    assert schur_eval(Partition.of(2), xs) == 25
    for lam in enumerate_S(6, 3):
        assert schur_eval(lam, xs) == schur_eval(lam, xs, method="bialternant")
    with pytest.raises(PieriError):
        schur_eval(Partition.of(1, 1, 1, 1), xs)


def _spread_points(rng, count, size=3):
    points = []
    while len(points) < count:
        xs = rng.uniform(0.5, 1.5, size) * np.exp(2j * np.pi * rng.random(size))
        if min(abs(a - b) for k, a in enumerate(xs) for b in xs[k + 1 :]) > 0.2:
            points.append([complex(x) for x in xs])
    return points


def test_schur_methods_agree_on_random_complex_points():
    rng = np.random.default_rng(7)
    shapes = enumerate_S(6, 3)
    checked = 0
    for xs in _spread_points(rng, 500):
        for lam in shapes:
            jt = schur_eval(lam, xs)
            ba = schur_eval(lam, xs, method="bialternant")
            assert abs(jt - ba) <= 1e-8 * (1 + abs(jt)), (lam, xs)
            checked += 1
    assert checked == 500 * len(shapes) >= 10_000


def test_littlewood_richardson_products():
    assert lr_multiply(Partition.of(1), Partition.of(1)) == {Partition.of(2): 1, Partition.of(1, 1): 1}
    assert lr_multiply(Partition.of(2, 1), Partition.of(2, 1)) == {
        Partition.of(4, 2): 1,
        Partition.of(4, 1, 1): 1,
        Partition.of(3, 3): 1,
        Partition.of(3, 2, 1): 2,
        Partition.of(3, 1, 1, 1): 1,
        Partition.of(2, 2, 2): 1,
        Partition.of(2, 2, 1, 1): 1,
    }


def test_rim_hook_reduction_signs_and_collisions():
    assert rim_hook_reduce(Partition.of(3, 2), 4, 2) == (1, 1, Partition.of(1))
    assert rim_hook_reduce(Partition.of(4), 4, 2) == (-1, 1, EMPTY)
    assert rim_hook_reduce(Partition.of(3, 1), 4, 2) == (1, 1, EMPTY)
    assert rim_hook_reduce(Partition.of(3, 3), 4, 2) == (1, 1, Partition.of(2))
    assert rim_hook_reduce(Partition.of(3), 4, 2) is None
    assert rim_hook_reduce(Partition.of(1, 1, 1), 4, 2) is None


def test_quantum_products_in_gr42():
    box = Partition.of(1)
    assert quantum_pieri_gr(Partition.of(2, 2), 4, 2) == _gr_class(4, 2, (1, 1, (1,)))
    assert quantum_multiply_gr(Partition.of(2), Partition.of(2), 4, 2) == _gr_class(4, 2, (1, 0, (2, 2)))
    assert quantum_multiply_gr(Partition.of(2), Partition.of(1, 1), 4, 2) == _gr_class(4, 2, (1, 1, ()))
    assert quantum_multiply_gr(box, box, 4, 2) == _gr_class(4, 2, (1, 0, (2,)), (1, 0, (1, 1)))
    with pytest.raises(PieriError):
        quantum_pieri_gr(Partition.of(3), 4, 2)


@pytest.mark.parametrize("n", range(2, 8))
def test_flag_pieri_matches_rim_hook_pieri_on_grassmannians(n):
    for r in range(1, n):
        shape = FlagShape.grassmannian(n, r)
        for lam in enumerate_M(n, r):
            assert flag_pieri(1, lam, shape) == quantum_pieri_gr(lam, n, r), (n, r, lam)


def test_pieri_fl6421_example():
    expr = flag_pieri(1, Partition.of(2, 2, 2), FlagShape(6, (4, 2, 1)))
    assert expr.render() == "s1[2,2,2,1] + q1*s12[(1,1),(1)]"
    assert expr.is_positive()


def test_flag_pieri_keeps_cross_terms():
    shape = FlagShape(4, (2, 1))
    expr = flag_pieri(2, Partition.of(1), shape)
    assert expr.render() == "s12[(1),(1)] + q2"
    assert flag_pieri(2, EMPTY, shape).render() == "s2[1]"
    with pytest.raises(PieriError):
        flag_pieri(1, Partition.of(1), shape)
    with pytest.raises(PieriError):
        flag_pieri(3, EMPTY, shape)


@pytest.mark.parametrize("n", range(2, 8))
def test_cross_terms_cancel_the_correction(n):
    for shape in FlagShape.all_shapes(n):
        report = anticanonical_check(shape)
        assert report.ok, shape
        assert report.q_degrees == {i: shape.r(i - 1) - shape.r(i + 1) for i in shape.levels}


def test_precancellation_terms_cover_every_frozen_coordinate():
    shape = FlagShape(5, (3, 2, 1))
    terms = precancellation_terms(shape)
    assert len(terms) == 5 + 3 + 2
    assert all(expr.is_positive() for expr in terms.values())


def test_class_expr_arithmetic():
    shape = FlagShape.grassmannian(4, 2)
    a = _gr_class(4, 2, (1, 0, (2,)))
    b = _gr_class(4, 2, (1, 0, (2,)), (1, 1, ()))
    total = a + b
    assert total.render() == "2*s1[2] + q1"
    assert total.scale((1,)).render() == "2*q1*s1[2] + q1^2"
    assert len(total.without(PartitionTuple((Partition.of(2),)))) == 1
    with pytest.raises(PieriError):
        a + ClassExpr.build(FlagShape.grassmannian(5, 2), [])
    assert str(ClassExpr(shape, ())) == "0"
