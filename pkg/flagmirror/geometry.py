"""Points of the mirror space as tuples of matrices, and their Plücker coordinates.

Level ``i`` of a point is an ``r_i × r_{i-1}`` matrix.  Its coordinate
``p^i_λ`` is the maximal minor on the columns ``J(λ)`` divided by the
minor on ``J(∅)``.  Exact matrices hold :class:`fractions.Fraction`
entries; numeric matrices hold ``complex``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from core.logging import get_logger

from .combinat import (
    EMPTY,
    BoxShape,
    FlagShape,
    Partition,
    columns_to_partition,
    enumerate_M,
    enumerate_S,
    is_rectangle,
    partition_to_columns,
)
from .exactalg import LaurentExpr, VarId
from .linalg import exact_det, exact_gauge, expr_det, float_det, float_gauge, select_columns

__all__ = [
    "FactorMatrix",
    "GaugeChart",
    "GaugeError",
    "PluckerVector",
    "RATIONAL_BOUND",
    "SAMPLE_RETRIES",
    "SamplingError",
    "YPoint",
    "chart_pluckers",
    "gauge_coords",
    "gauge_variables",
    "in_torus",
    "numeric_point",
    "plucker_relation_residuals",
    "pluckers",
    "point_pluckers",
    "rectangle_pluckers",
    "sample_point",
    "sample_rationals",
    "trial_generator",
    "vandermonde",
]

LOGGER = get_logger("flagmirror.geometry")

RATIONAL_BOUND = 100
SAMPLE_RETRIES = 32


class GaugeError(ValueError):
    """Raised when a factor matrix is rank deficient or its normalising minor vanishes."""


class SamplingError(RuntimeError):
    """Raised when no point of the torus was found within the retry budget."""

    def __init__(self, message: str, attempts: int) -> None:
        super().__init__(message)
        self.attempts = attempts


@dataclass(frozen=True, slots=True)
class FactorMatrix:
    level: int
    rows: Tuple[Tuple[object, ...], ...]

    @property
    def r(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def box(self) -> BoxShape:
        return BoxShape(self.r, self.n - self.r)

    def is_exact(self) -> bool:
        return all(isinstance(x, (int, Fraction)) for row in self.rows for x in row)

    def left_multiply(self, g: Sequence[Sequence[object]]) -> "FactorMatrix":
        rows = []
        for grow in g:
            rows.append(tuple(sum((grow[k] * self.rows[k][j] for k in range(self.r)), Fraction(0) if self.is_exact() else 0j) for j in range(self.n)))
        return FactorMatrix(self.level, tuple(rows))

    def to_json(self) -> List[List[str]]:
        def fmt(x: object) -> str:
            if isinstance(x, Fraction):
                return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
            return str(x)

        return [[fmt(x) for x in row] for row in self.rows]


@dataclass(frozen=True, slots=True)
class YPoint:
    factors: Tuple[FactorMatrix, ...]

    def factor(self, i: int) -> FactorMatrix:
        return self.factors[i - 1]

    def to_json(self) -> List[List[List[str]]]:
        return [f.to_json() for f in self.factors]


class PluckerVector(dict):
    """``VarId.plucker(i, λ) → value`` normalised so that ``p^i_∅ = 1``."""

    def level(self, i: int) -> Dict[Partition, object]:
        return {v.partition: value for v, value in self.items() if v.level == i}

    def to_json(self) -> Dict[str, str]:
        return {f"{v.level}:{list(v.index)}": str(value) for v, value in sorted(self.items())}


def vandermonde(xs: Sequence[object], n: int, *, level: int = 1) -> FactorMatrix:
    """Rows ``(1, x, …, x^{n-1})``; its normalised minors are ``s_λ(xs)``."""

    return FactorMatrix(level, tuple(tuple(x**k for k in range(n)) for x in xs))


def pluckers(m: FactorMatrix) -> Dict[Partition, object]:
    """Normalised maximal minors indexed by ``S(n, r)``."""

    box = m.box
    det = exact_det if m.is_exact() else float_det
    rows = [list(row) for row in m.rows]
    base = det(select_columns(rows, partition_to_columns(EMPTY, box)))
    if base == 0:
        raise GaugeError(f"level {m.level}: minor on J(∅) vanishes")
    values: Dict[Partition, object] = {}
    for lam in enumerate_S(box.n, box.rows):
        if lam.is_empty():
            values[lam] = Fraction(1) if m.is_exact() else 1 + 0j
            continue
        values[lam] = det(select_columns(rows, partition_to_columns(lam, box))) / base  # type: ignore[operator]
    return values


def point_pluckers(point: YPoint) -> PluckerVector:
    vector = PluckerVector()
    for m in point.factors:
        for lam, value in pluckers(m).items():
            vector[VarId.plucker(m.level, lam)] = value
    return vector


def rectangle_pluckers(vector: Mapping[VarId, object]) -> PluckerVector:
    return PluckerVector({v: value for v, value in vector.items() if is_rectangle(v.partition)})


def in_torus(point: YPoint, shape: FlagShape, *, rectangles: bool = False) -> bool:
    """Whether every frozen (or every rectangle) coordinate is nonzero."""

    try:
        vector = point_pluckers(point)
    except GaugeError:
        return False
    for i in shape.levels:
        watched = enumerate_M(shape.r(i - 1), shape.r(i))
        level = vector.level(i)
        keys = [lam for lam in level if is_rectangle(lam)] if rectangles else watched
        if any(level[lam] == 0 for lam in keys):
            return False
    return True


# ---------------------------------------------------------------------------
# sampling


def trial_generator(seed: int, *keys: int) -> np.random.Generator:
    """Counter-based generator for one ``(seed, keys…)`` stream."""

    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, keys)])))


def sample_rationals(rng: np.random.Generator, count: int, *, bound: int = RATIONAL_BOUND, nonzero: bool = False) -> List[Fraction]:
    values: List[Fraction] = []
    while len(values) < count:
        num = int(rng.integers(-bound, bound + 1))
        den = int(rng.integers(1, bound + 1))
        if nonzero and num == 0:
            continue
        values.append(Fraction(num, den))
    return values


def sample_point(
    shape: FlagShape,
    seed: int,
    *,
    trial: int = 0,
    rectangles: bool = False,
    bound: int = RATIONAL_BOUND,
    retries: int = SAMPLE_RETRIES,
) -> YPoint:
    """A random exact point of ``Y°`` (or of the rectangles torus)."""

    rng = trial_generator(seed, trial)
    for attempt in range(1, retries + 1):
        factors = []
        for i in shape.levels:
            rows, cols = shape.r(i), shape.r(i - 1)
            entries = sample_rationals(rng, rows * cols, bound=bound)
            factors.append(FactorMatrix(i, tuple(tuple(entries[a * cols : (a + 1) * cols]) for a in range(rows))))
        point = YPoint(tuple(factors))
        if in_torus(point, shape, rectangles=rectangles):
            if attempt > 1:
                LOGGER.debug("sample_point shape=%s seed=%d trial=%d attempts=%d", shape.spec, seed, trial, attempt)
            return point
    raise SamplingError(f"no point of the torus of {shape} after {retries} attempts (seed={seed}, trial={trial})", retries)


# ---------------------------------------------------------------------------
# gauge chart


@dataclass(frozen=True, slots=True)
class GaugeChart:
    level: int
    pivots: Tuple[int, ...]
    free: Tuple[object, ...]
    rows: int
    cols: int

    def reconstruct(self, free: Optional[Sequence[object]] = None) -> FactorMatrix:
        values = list(self.free if free is None else free)
        n = self.rows + self.cols
        others = [j for j in range(1, n + 1) if j not in self.pivots]
        exact = all(isinstance(x, (int, Fraction)) for x in values)
        zero: object = Fraction(0) if exact else 0j
        one: object = Fraction(1) if exact else 1 + 0j
        matrix = [[zero] * n for _ in range(self.rows)]
        for a, p in enumerate(self.pivots):
            matrix[a][p - 1] = one
        for a in range(self.rows):
            for b, j in enumerate(others):
                matrix[a][j - 1] = values[a * self.cols + b]
        return FactorMatrix(self.level, tuple(tuple(row) for row in matrix))


def gauge_coords(m: FactorMatrix, pivots: Optional[Sequence[int]] = None) -> GaugeChart:
    """Row-reduce ``m`` against a pivot column set; the other entries are local coordinates.

    Without ``pivots`` the first column set (lexicographically, starting
    from ``J(∅)``) with a nonzero minor is used.
    """

    n, r = m.n, m.r
    candidates: Iterable[Tuple[int, ...]] = [tuple(pivots)] if pivots is not None else itertools.combinations(range(1, n + 1), r)
    rows = [list(row) for row in m.rows]
    for pivot in candidates:
        try:
            if m.is_exact():
                reduced, _ = exact_gauge(rows, pivot)
            else:
                reduced_arr, _ = float_gauge(rows, pivot)
                reduced = reduced_arr.tolist()
        except (ZeroDivisionError, np.linalg.LinAlgError):
            continue
        others = [j for j in range(1, n + 1) if j not in pivot]
        free = tuple(reduced[a][j - 1] for a in range(r) for j in others)
        return GaugeChart(m.level, tuple(pivot), free, r, n - r)
    raise GaugeError(f"level {m.level}: matrix is rank deficient")


def chart_pluckers(shape: FlagShape) -> Dict[VarId, LaurentExpr]:
    """Every ``p^i_λ`` as a polynomial in the entries ``u^i_{a,b}`` of ``[I | U]``."""

    result: Dict[VarId, LaurentExpr] = {}
    for i in shape.levels:
        rows, n = shape.r(i), shape.r(i - 1)
        cols = n - rows
        matrix: List[List[LaurentExpr]] = []
        for a in range(1, rows + 1):
            identity = [LaurentExpr.constant(1 if a == k else 0) for k in range(1, rows + 1)]
            free = [LaurentExpr.var(VarId.gauge(i, a, b)) for b in range(1, cols + 1)]
            matrix.append(identity + free)
        box = BoxShape(rows, cols)
        for lam in enumerate_S(n, rows):
            result[VarId.plucker(i, lam)] = expr_det(select_columns(matrix, partition_to_columns(lam, box)))
    return result


def gauge_variables(shape: FlagShape) -> List[VarId]:
    return [
        VarId.gauge(i, a, b)
        for i in shape.levels
        for a in range(1, shape.r(i) + 1)
        for b in range(1, shape.r(i - 1) - shape.r(i) + 1)
    ]


# ---------------------------------------------------------------------------
# Plücker relations


def plucker_relation_residuals(values: Mapping[Partition, object], box: BoxShape) -> List[object]:
    """Residuals of every three-term relation ``p_{Sik} p_{Sjl} = p_{Sij} p_{Skl} + p_{Sil} p_{Sjk}``.

    ``values`` maps each partition of the box to its coordinate.
    """

    r, n = box.rows, box.n
    if r < 2 or n - r < 2:
        return []

    def p(columns: Iterable[int]) -> object:
        return values[columns_to_partition(columns, box)]

    residuals: List[object] = []
    for fixed in itertools.combinations(range(1, n + 1), r - 2):
        rest = [j for j in range(1, n + 1) if j not in fixed]
        for i, j, k, l in itertools.combinations(rest, 4):
            s = list(fixed)
            lhs = p(s + [i, k]) * p(s + [j, l])  # type: ignore[operator]
            rhs = p(s + [i, j]) * p(s + [k, l]) + p(s + [i, l]) * p(s + [j, k])  # type: ignore[operator]
            residuals.append(lhs - rhs)
    return residuals


def matrix_from_rows(level: int, rows: Sequence[Sequence[object]]) -> FactorMatrix:
    return FactorMatrix(level, tuple(tuple(row) for row in rows))


def numeric_point(factors: Sequence[np.ndarray]) -> YPoint:
    """A complex point from numpy arrays, levels numbered from 1."""

    return YPoint(tuple(matrix_from_rows(i, np.asarray(f, dtype=complex).tolist()) for i, f in enumerate(factors, start=1)))

