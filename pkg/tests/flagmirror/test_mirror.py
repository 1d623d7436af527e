import pytest

from flagmirror.combinat import EMPTY, FlagShape, Partition, parse_shape
from flagmirror.exactalg import LaurentExpr, VarId, evaluate
from flagmirror.mirror import (
    ChartExpansionError,
    ExternalConvention,
    LadderError,
    build_ladder,
    build_WP,
    build_WT,
    correction_terms,
    expand_in_rectangles,
    external_values,
    factor_mirror,
    normalize_empty,
    phi_labels,
    pullback_WT,
    rectangle_expansion,
    reparametrize_plain,
)
from flagmirror.selftest import golden_wp


def p(level, *parts):
    return LaurentExpr.var(VarId.plucker(level, Partition(parts)))


def q(level):
    return LaurentExpr.var(VarId.quantum(level))


def test_wp_gr42_four_terms(gr42):
    wp = build_WP(gr42)
    assert len(wp) == 4
    assert wp.as_laurent() == golden_wp("4:2")


def test_wp_fl421_example(fl421):
    wp = build_WP(fl421)
    assert len(wp) == 6
    assert wp.as_laurent() == golden_wp("4:2,1")
    assert wp.quantum_levels() == {1, 2}


def test_wp_fl6421_worked_example():
    wp = build_WP(FlagShape(6, (4, 2, 1)))
    assert len(wp) == 12
    assert wp.as_laurent() == golden_wp("6:4,2,1")


@pytest.mark.parametrize("spec, count", [("4:3,2,1", 9), ("5:3,2,1", 10), ("5:2", 5), ("6:3", 6)])
def test_term_count_is_sum_of_ranks(spec, count):
    assert len(build_WP(parse_shape(spec))) == count


def test_every_term_has_degree_one(fl421):
    assert all(d == {1} for d in build_WP(FlagShape(6, (4, 2, 1))).term_degrees())
    assert all(d == {1} for d in build_WP(fl421).term_degrees())


def test_correction_terms_couple_neighbouring_levels(fl421):
    expected = q(1) / p(1, 2) + q(1) * p(1, 1) * p(2, 1) / p(1, 2, 2) - q(1) * p(1, 1) / p(1, 2, 2)
    assert correction_terms(fl421) == expected
    assert factor_mirror(fl421) + correction_terms(fl421) == build_WP(fl421).as_laurent()


def test_gr21_both_sides_coincide():
    shape = FlagShape.grassmannian(2, 1)
    closed_form = p(1, 1) + q(1) / p(1, 1)
    assert normalize_empty(build_WP(shape).as_laurent(), shape) == closed_form
    assert normalize_empty(pullback_WT(shape), shape) == closed_form
    z = LaurentExpr.var(VarId.ladder(0, 0))
    assert build_WT(build_ladder(shape)) == z + q(1) / z


def test_ladder_fl5321_counts():
    d = build_ladder(FlagShape(5, (3, 2, 1)))
    assert len(d.vertices) == 13
    assert len(d.arrows) == 17
    assert len(d.internal()) == FlagShape(5, (3, 2, 1)).dimension
    assert [v.level for v in d.externals()] == [0, 1, 2, 3]
    assert [(v.col, v.row) for v in d.externals()] == [(0, 3), (2, 2), (3, 1), (4, 0)]
    for tail, head in d.arrows:
        assert (head.col, head.row) in {(tail.col + 1, tail.row), (tail.col, tail.row - 1)}


def test_ladder_fl421_has_nine_arrows(fl421, gr42):
    assert len(build_ladder(fl421).arrows) == 9
    cross = build_ladder(gr42).cross_block_arrows()
    assert [(t.label, h.label) for t, h in cross] == [("v1_2_2", "e1")]
    assert len(build_ladder(fl421).cross_block_arrows()) == 4


def test_external_values_and_count_check(fl421):
    assert external_values(fl421) == [LaurentExpr.constant(1), q(1), q(1) * q(2)]
    assert external_values(fl421, "plain") == [LaurentExpr.constant(1), q(1), q(2)]
    with pytest.raises(LadderError):
        build_WT(build_ladder(fl421), [1, 2])


def test_phi_labels_gr42_match_the_rectangle_ratios(gr42):
    labels = {(v.col, v.row): value for v, value in phi_labels(gr42).items()}
    assert labels[(0, 1)] == p(1, 1) / p(1)
    assert labels[(0, 0)] == p(1, 1, 1) / p(1)
    assert labels[(1, 1)] == p(1, 2) / p(1)
    assert labels[(1, 0)] == p(1, 2, 2) / p(1, 1)


def test_phi_labels_scale_by_quantum_parameters(fl421):
    cumulative = {v.label: value for v, value in phi_labels(fl421).items()}
    plain = {v.label: value for v, value in phi_labels(fl421, ExternalConvention.PLAIN).items()}
    assert cumulative["v2_1_1"] == q(1) * p(2, 1) / p(2)
    assert plain["v2_1_1"] == q(1) * p(2, 1) / p(2)
    assert cumulative["e2"] == q(1) * q(2)
    assert plain["e2"] == q(2)


def test_rectangle_expansion_gr42_two_row_relation():
    expansion = rectangle_expansion(1, Partition.of(2, 1), 2, 2)
    assert expansion == (p(1) * p(1, 2, 2) + p(1, 2) * p(1, 1, 1)) / p(1, 1)


def test_rectangles_chart_gr42(gr42):
    expanded = expand_in_rectangles(gr42)
    assert len(expanded) == 6
    assert expanded == normalize_empty(pullback_WT(gr42), gr42)


@pytest.mark.parametrize("spec", ["4:2,1", "5:2", "5:3", "5:3,2,1", "4:3,2,1", "5:2,1"])
def test_symbolic_chart_identity(spec):
    shape = parse_shape(spec)
    assert expand_in_rectangles(shape) == normalize_empty(pullback_WT(shape), shape)


def test_plain_convention_is_a_reparametrisation(fl421):
    assert reparametrize_plain(q(2), fl421) == q(2) / q(1)
    plain = normalize_empty(pullback_WT(fl421, "plain"), fl421)
    assert plain != normalize_empty(pullback_WT(fl421), fl421)
    assert reparametrize_plain(expand_in_rectangles(fl421), fl421) == plain


def test_large_factor_has_no_symbolic_expansion():
    with pytest.raises(ChartExpansionError):
        expand_in_rectangles(FlagShape.grassmannian(6, 3))


def test_superpotential_evaluates_exactly(gr42):
    values = {VarId.plucker(1, lam): 1 for lam in [EMPTY, Partition.of(1), Partition.of(2), Partition.of(1, 1), Partition.of(2, 1), Partition.of(2, 2)]}
    values[VarId.quantum(1)] = 2
    assert build_WP(gr42).evaluate(values) == 5
    assert evaluate(pullback_WT(gr42), values) == 7
