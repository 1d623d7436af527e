"""Superpotentials: the Plücker mirror ``W_P`` and the ladder mirror ``W_T``.

``W_P`` is assembled from :func:`flagmirror.schubert.flag_pieri`: every
``F^i_λ`` becomes a numerator over the frozen coordinate ``p^i_λ``.  The
``s^{i-1,i}_{□,λ}`` summands each contribute ``p^{i-1}_□`` and cancel the
``-r_i p^{i-1}_□`` correction, so they are dropped on assembly.

Numerators omit ``p^j_∅`` factors; every comparison in this package is
made on the normalisation ``p^j_∅ = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from core.logging import get_logger

from .combinat import (
    EMPTY,
    FlagShape,
    Partition,
    enumerate_M,
    enumerate_S,
    is_rectangle,
    rectangle,
    transpose,
)
from .exactalg import Expr, LaurentExpr, RatFunc, VarId, VarKind, as_ratfunc, degree, evaluate, substitute
from .schubert import flag_pieri, is_cross_term

__all__ = [
    "ChartExpansionError",
    "ExternalConvention",
    "LadderDiagram",
    "LadderError",
    "LadderVertex",
    "Superpotential",
    "WPTerm",
    "build_WP",
    "build_WT",
    "build_ladder",
    "correction_terms",
    "expand_in_rectangles",
    "external_values",
    "factor_mirror",
    "grading_weight",
    "normalize_empty",
    "phi_labels",
    "pullback_WT",
    "rectangle_expansion",
    "reparametrize_plain",
]

LOGGER = get_logger("flagmirror.mirror")


class LadderError(ValueError):
    """Raised when external values do not match the ladder."""


class ChartExpansionError(NotImplementedError):
    """Raised when a factor is too large for the symbolic rectangles expansion."""


class ExternalConvention(str, Enum):
    CUMULATIVE = "cumulative"
    PLAIN = "plain"


# ---------------------------------------------------------------------------
# W_P


@dataclass(frozen=True, slots=True)
class WPTerm:
    level: int
    frozen: Partition
    numerator: LaurentExpr

    @property
    def denominator(self) -> VarId:
        return VarId.plucker(self.level, self.frozen)

    def as_laurent(self) -> LaurentExpr:
        return self.numerator * LaurentExpr.var(self.denominator, -1)


@dataclass(frozen=True, slots=True)
class Superpotential:
    shape: FlagShape
    terms: Tuple[WPTerm, ...]

    def as_laurent(self) -> LaurentExpr:
        total = LaurentExpr()
        for term in self.terms:
            total = total + term.as_laurent()
        return total

    def evaluate(self, values: Mapping[VarId, object]) -> object:
        return evaluate(self.as_laurent(), values)

    def term_degrees(self) -> List[set]:
        weight = grading_weight(self.shape)
        return [degree(term.as_laurent(), weight) for term in self.terms]

    def quantum_levels(self) -> set:
        return {v.level for t in self.terms for v in t.numerator.variables() if v.kind is VarKind.QUANTUM}

    def __len__(self) -> int:
        return len(self.terms)


def grading_weight(shape: FlagShape):
    """``deg p^i_λ = |λ|`` and ``deg q_i = r_{i-1} - r_{i+1}``."""

    def weight(v: VarId) -> int:
        if v.kind is VarKind.PLUCKER:
            return sum(v.index)
        if v.kind is VarKind.QUANTUM:
            return shape.r(v.level - 1) - shape.r(v.level + 1)
        return 0

    return weight


@lru_cache(maxsize=256)
def build_WP(shape: FlagShape) -> Superpotential:
    """The Plücker coordinate superpotential, post-cancellation."""

    terms: List[WPTerm] = []
    for i in shape.levels:
        for lam in enumerate_M(shape.r(i - 1), shape.r(i)):
            pieri = flag_pieri(i, lam, shape)
            numerator = LaurentExpr()
            for term in pieri.terms:
                if is_cross_term(term, i, lam):
                    continue
                numerator = numerator + term.to_plucker()
            terms.append(WPTerm(i, lam, numerator))
    LOGGER.debug("build_wp shape=%s terms=%d", shape.spec, len(terms))
    return Superpotential(shape, tuple(terms))


def factor_mirror(shape: FlagShape) -> LaurentExpr:
    """Sum of the Grassmannian mirrors of the factors, level ``i`` carrying ``q_i``."""

    total = LaurentExpr()
    for i in shape.levels:
        factor = FlagShape.grassmannian(shape.r(i - 1), shape.r(i))
        relabel: Dict[VarId, object] = {VarId.quantum(1): LaurentExpr.var(VarId.quantum(i))}
        for lam in enumerate_S(shape.r(i - 1), shape.r(i)):
            relabel[VarId.plucker(1, lam)] = LaurentExpr.var(VarId.plucker(i, lam))
        total = total + substitute(build_WP(factor).as_laurent(), relabel)  # type: ignore[operator]
    return total


def correction_terms(shape: FlagShape) -> LaurentExpr:
    """``W_P - W_F``: the summands coupling neighbouring levels."""

    return build_WP(shape).as_laurent() - factor_mirror(shape)


# ---------------------------------------------------------------------------
# ladder


@dataclass(frozen=True, slots=True)
class LadderVertex:
    col: int
    row: int
    level: int
    a: int = 0
    b: int = 0
    external: bool = False

    @property
    def var(self) -> VarId:
        return VarId.ladder(self.col, self.row)

    @property
    def label(self) -> str:
        if self.external:
            return f"e{self.level}"
        return f"v{self.level}_{self.a}_{self.b}"


@dataclass(frozen=True, slots=True)
class LadderDiagram:
    shape: FlagShape
    vertices: Tuple[LadderVertex, ...]
    arrows: Tuple[Tuple[LadderVertex, LadderVertex], ...]

    def internal(self) -> List[LadderVertex]:
        return [v for v in self.vertices if not v.external]

    def externals(self) -> List[LadderVertex]:
        return sorted((v for v in self.vertices if v.external), key=lambda v: v.level)

    def cross_block_arrows(self) -> List[Tuple[LadderVertex, LadderVertex]]:
        """Arrows leaving their block, into another block or into an external ``1..ρ``.

        External ``0`` sits on top of block 1 and belongs to it.
        """

        def block(v: LadderVertex) -> Optional[int]:
            if not v.external:
                return v.level
            return 1 if v.level == 0 else None

        return [(t, h) for t, h in self.arrows if block(t) is None or block(h) is None or block(t) != block(h)]


def _block_offsets(shape: FlagShape) -> List[int]:
    offsets = [0]
    for i in shape.levels:
        offsets.append(offsets[-1] + shape.r(i - 1) - shape.r(i))
    return offsets


@lru_cache(maxsize=128)
def build_ladder(shape: FlagShape) -> LadderDiagram:
    """Bottom-aligned blocks, one vertex per box, externals at the staircase corners."""

    offsets = _block_offsets(shape)
    by_pos: Dict[Tuple[int, int], LadderVertex] = {}
    for i in shape.levels:
        rows = shape.r(i)
        cols = shape.r(i - 1) - shape.r(i)
        for row in range(rows):
            for c in range(cols):
                col = offsets[i - 1] + c
                by_pos[(col, row)] = LadderVertex(col, row, i, a=rows - row, b=c + 1)
    for i in range(shape.rho + 1):
        pos = (offsets[i], shape.r(i + 1))
        by_pos[pos] = LadderVertex(pos[0], pos[1], i, external=True)

    arrows: List[Tuple[LadderVertex, LadderVertex]] = []
    for (col, row), vertex in sorted(by_pos.items(), key=lambda item: (-item[0][1], item[0][0])):
        right = by_pos.get((col + 1, row))
        if right is not None:
            arrows.append((vertex, right))
        down = by_pos.get((col, row - 1))
        if down is not None:
            arrows.append((vertex, down))
    vertices = tuple(sorted(by_pos.values(), key=lambda v: (-v.row, v.col)))
    LOGGER.debug("ladder shape=%s vertices=%d arrows=%d", shape.spec, len(vertices), len(arrows))
    return LadderDiagram(shape, vertices, tuple(arrows))


def external_values(shape: FlagShape, convention: ExternalConvention | str = ExternalConvention.CUMULATIVE) -> List[LaurentExpr]:
    convention = ExternalConvention(convention)
    values = [LaurentExpr.constant(1)]
    for i in shape.levels:
        q = LaurentExpr.var(VarId.quantum(i))
        values.append(values[-1] * q if convention is ExternalConvention.CUMULATIVE else q)
    return values


def build_WT(d: LadderDiagram, externals: Optional[Sequence[object]] = None) -> Expr:
    """``Σ z_head / z_tail`` over the arrows with the externals substituted."""

    values = list(externals) if externals is not None else external_values(d.shape)
    if len(values) != d.shape.rho + 1:
        raise LadderError(f"expected {d.shape.rho + 1} external values, got {len(values)}")
    return _arrow_sum(d, lambda v: values[v.level] if v.external else LaurentExpr.var(v.var))


def _arrow_sum(d: LadderDiagram, value_of) -> Expr:
    laurent = LaurentExpr()
    rational: Optional[RatFunc] = None
    for tail, head in d.arrows:
        top, bottom = value_of(head), value_of(tail)
        if isinstance(top, RatFunc) or isinstance(bottom, RatFunc):
            ratio = as_ratfunc(top) / as_ratfunc(bottom)
        else:
            ratio = LaurentExpr.coerce(top) / LaurentExpr.coerce(bottom)
        if isinstance(ratio, LaurentExpr):
            laurent = laurent + ratio
        else:
            rational = ratio if rational is None else rational + ratio
    if rational is None:
        return laurent
    return rational + laurent


def phi_labels(shape: FlagShape, convention: ExternalConvention | str = ExternalConvention.CUMULATIVE) -> Dict[LadderVertex, LaurentExpr]:
    """``Internal(i, a, b) ↦ scale_i · p^i_{a×b} / p^i_{(a-1)×(b-1)}``; externals get the q-values."""

    convention = ExternalConvention(convention)
    ladder = build_ladder(shape)
    ext = external_values(shape, convention)
    labels: Dict[LadderVertex, LaurentExpr] = {}
    for v in ladder.vertices:
        if v.external:
            labels[v] = ext[v.level]
            continue
        if convention is ExternalConvention.CUMULATIVE:
            scale = ext[v.level - 1]
        else:
            scale = LaurentExpr.var(VarId.quantum(v.level - 1)) if v.level > 1 else LaurentExpr.constant(1)
        top = VarId.plucker(v.level, rectangle(v.a, v.b))
        bottom = VarId.plucker(v.level, rectangle(v.a - 1, v.b - 1))
        labels[v] = scale * LaurentExpr.monomial({top: 1, bottom: -1})
    return labels


@lru_cache(maxsize=64)
def _pullback_cached(shape: FlagShape, convention: ExternalConvention) -> LaurentExpr:
    labels = phi_labels(shape, convention)
    result = _arrow_sum(build_ladder(shape), labels.__getitem__)
    assert isinstance(result, LaurentExpr)
    return result


def pullback_WT(shape: FlagShape, convention: ExternalConvention | str = ExternalConvention.CUMULATIVE) -> LaurentExpr:
    """``φ*(W_T)``: a Laurent polynomial in rectangle Plücker coordinates."""

    return _pullback_cached(shape, ExternalConvention(convention))


def reparametrize_plain(expr: Expr, shape: FlagShape) -> Expr:
    """``q_i ↦ q_i / q_{i-1}``: the plain-externals counterpart of an expression."""

    mapping: Dict[VarId, object] = {}
    for i in shape.levels:
        q = LaurentExpr.var(VarId.quantum(i))
        mapping[VarId.quantum(i)] = q if i == 1 else q * LaurentExpr.var(VarId.quantum(i - 1), -1)
    return substitute(expr, mapping)


def normalize_empty(expr: Expr, shape: FlagShape) -> Expr:
    """Set every ``p^i_∅`` to ``1``."""

    return substitute(expr, {VarId.plucker(i, EMPTY): 1 for i in shape.levels})


# ---------------------------------------------------------------------------
# rectangles chart


def _two_row_expansion(level: int, a: int, b: int, label) -> LaurentExpr:
    """``p_{(a,b)}`` for ``a > b ≥ 1`` via ``p_b p_{a,b} = p_{b-1} p_{a,b+1} + p_a p_{b,b}``."""

    def var(parts: Tuple[int, ...]) -> LaurentExpr:
        return LaurentExpr.var(VarId.plucker(level, label(Partition(parts))))

    upper = var((a, b + 1)) if b + 1 == a else _two_row_expansion(level, a, b + 1, label)
    lower = var((b - 1,)) if b > 1 else var(())
    return (lower * upper + var((a,)) * var((b, b))) * LaurentExpr.var(VarId.plucker(level, label(Partition((b,)))), -1)


def rectangle_expansion(level: int, lam: Partition, rows: int, cols: int) -> LaurentExpr:
    """``p^i_λ`` as a Laurent polynomial in the rectangle coordinates of its factor."""

    if is_rectangle(lam):
        return LaurentExpr.var(VarId.plucker(level, lam))
    if rows == 2:
        return _two_row_expansion(level, lam.part(1), lam.part(2), lambda p: p)
    if cols == 2:
        dual = transpose(lam)
        return _two_row_expansion(level, dual.part(1), dual.part(2), transpose)
    raise ChartExpansionError(f"no rectangles expansion for a {rows}x{cols} factor")


def expand_in_rectangles(shape: FlagShape) -> LaurentExpr:
    """``W_P`` in the rectangles chart, normalised to ``p^i_∅ = 1``."""

    mapping: Dict[VarId, object] = {}
    for i in shape.levels:
        rows = shape.r(i)
        cols = shape.r(i - 1) - rows
        if min(rows, cols) > 2:
            raise ChartExpansionError(f"factor {rows}x{cols} of {shape} is too large for the symbolic expansion")
        for lam in enumerate_S(shape.r(i - 1), rows):
            if not is_rectangle(lam):
                mapping[VarId.plucker(i, lam)] = rectangle_expansion(i, lam, rows, cols)
    expanded = substitute(build_WP(shape).as_laurent(), mapping)
    result = normalize_empty(expanded, shape)
    if not isinstance(result, LaurentExpr):
        raise ChartExpansionError("expansion left a non-monomial denominator")
    return result
