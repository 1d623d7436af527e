"""Determinants and row reduction for exact, floating and symbolic matrices."""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence, Tuple

import numpy as np
import sympy

from .exactalg import LaurentExpr, from_sympy, to_sympy

__all__ = [
    "exact_det",
    "exact_gauge",
    "expr_det",
    "float_det",
    "float_gauge",
    "select_columns",
    "to_fraction",
]


def to_fraction(value: object) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    rational = sympy.Rational(value)
    return Fraction(int(rational.p), int(rational.q))


def _to_sympy_matrix(rows: Sequence[Sequence[Fraction]]) -> sympy.Matrix:
    return sympy.Matrix([[sympy.Rational(c.numerator, c.denominator) for c in map(to_fraction, row)] for row in rows])


def select_columns(rows: Sequence[Sequence[object]], columns: Sequence[int]) -> List[List[object]]:
    """Sub-matrix on 1-based ``columns``."""

    return [[row[j - 1] for j in columns] for row in rows]


def exact_det(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    if not rows:
        return Fraction(1)
    return to_fraction(_to_sympy_matrix(rows).det(method="bareiss"))


def float_det(rows: Sequence[Sequence[complex]] | np.ndarray) -> complex:
    matrix = np.asarray(rows, dtype=complex)
    if matrix.size == 0:
        return 1.0 + 0j
    return complex(np.linalg.det(matrix))


def expr_det(rows: Sequence[Sequence[LaurentExpr]]) -> LaurentExpr:
    """Symbolic determinant by sympy's Bareiss elimination."""

    if not rows:
        return LaurentExpr.constant(1)
    matrix = sympy.Matrix([[to_sympy(entry) for entry in row] for row in rows])
    return from_sympy(matrix.det(method="bareiss"))


def exact_gauge(rows: Sequence[Sequence[Fraction]], pivots: Sequence[int]) -> Tuple[List[List[Fraction]], Fraction]:
    """Row-reduce so that the ``pivots`` columns become the identity.

    Returns the reduced rows and the pivot minor.  Raises :class:`ZeroDivisionError`
    when the pivot minor vanishes.
    """

    matrix = _to_sympy_matrix(rows)
    pivot_block = matrix.extract(list(range(matrix.rows)), [j - 1 for j in pivots])
    minor = pivot_block.det(method="bareiss")
    if minor == 0:
        raise ZeroDivisionError("pivot minor vanishes")
    reduced = pivot_block.inv() * matrix
    return [[to_fraction(reduced[a, b]) for b in range(reduced.cols)] for a in range(reduced.rows)], to_fraction(minor)


def float_gauge(rows: Sequence[Sequence[complex]] | np.ndarray, pivots: Sequence[int]) -> Tuple[np.ndarray, complex]:
    matrix = np.asarray(rows, dtype=complex)
    block = matrix[:, [j - 1 for j in pivots]]
    minor = complex(np.linalg.det(block)) if block.size else 1.0 + 0j
    if minor == 0:
        raise ZeroDivisionError("pivot minor vanishes")
    if block.size == 0:
        return matrix.copy(), minor
    return np.linalg.solve(block, matrix), minor
