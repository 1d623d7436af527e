"""Exact Laurent polynomials and rational functions over ℚ.

Coefficients are :class:`fractions.Fraction` throughout.  Floats only appear
when :func:`evaluate` is handed a complex or float value, or when an
expression is compiled with :func:`lambdify` for batched numpy evaluation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from numbers import Rational
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Sequence, Tuple, Union

import sympy

from .combinat import Partition

__all__ = [
    "EvaluationError",
    "Expr",
    "LaurentExpr",
    "Monomial",
    "RatFunc",
    "VarId",
    "VarKind",
    "as_ratfunc",
    "degree",
    "differentiate",
    "evaluate",
    "from_json",
    "from_sympy",
    "latex",
    "lambdify",
    "parse_varid",
    "substitute",
    "to_json",
    "to_sympy",
]


class EvaluationError(ArithmeticError):
    """Raised when an expression cannot be evaluated at a point."""

    def __init__(self, reason: str, variables: Iterable["VarId"], message: str | None = None) -> None:
        self.reason = reason
        self.variables = frozenset(variables)
        names = ", ".join(sorted(v.name for v in self.variables))
        if message is None:
            if reason == "unassigned":
                message = f"unassigned variables: {names}"
            else:
                message = f"denominator vanishes (variables: {names})"
        super().__init__(message)


class VarKind(IntEnum):
    PLUCKER = 0
    QUANTUM = 1
    LADDER = 2
    CHERN_ROOT = 3
    GAUGE = 4


@dataclass(frozen=True, slots=True, order=True)
class VarId:
    """A tagged variable: ``p^i_λ``, ``q_i``, ``z_v``, ``x_ij`` or a gauge entry."""

    kind: VarKind
    level: int
    index: Tuple[int, ...] = ()

    @classmethod
    def plucker(cls, level: int, lam: Partition) -> "VarId":
        return cls(VarKind.PLUCKER, level, tuple(lam.parts))

    @classmethod
    def quantum(cls, level: int) -> "VarId":
        return cls(VarKind.QUANTUM, level)

    @classmethod
    def ladder(cls, col: int, row: int) -> "VarId":
        return cls(VarKind.LADDER, 0, (col, row))

    @classmethod
    def chern_root(cls, level: int, j: int) -> "VarId":
        return cls(VarKind.CHERN_ROOT, level, (j,))

    @classmethod
    def gauge(cls, level: int, row: int, col: int) -> "VarId":
        return cls(VarKind.GAUGE, level, (row, col))

    @property
    def partition(self) -> Partition:
        if self.kind is not VarKind.PLUCKER:
            raise TypeError(f"{self.name} is not a Plücker variable")
        return Partition(self.index)

    @property
    def name(self) -> str:
        if self.kind is VarKind.PLUCKER:
            return f"p{self.level}[" + ",".join(str(p) for p in self.index) + "]"
        if self.kind is VarKind.QUANTUM:
            return f"q{self.level}"
        if self.kind is VarKind.LADDER:
            return f"z[{self.index[0]},{self.index[1]}]"
        if self.kind is VarKind.CHERN_ROOT:
            return f"x{self.level}_{self.index[0]}"
        return f"u{self.level}_{self.index[0]}_{self.index[1]}"

    def latex(self) -> str:
        if self.kind is VarKind.PLUCKER:
            sub = ",".join(str(p) for p in self.index) if self.index else r"\emptyset"
            return f"p^{{{self.level}}}_{{({sub})}}" if self.index else f"p^{{{self.level}}}_{{{sub}}}"
        if self.kind is VarKind.QUANTUM:
            return f"q_{{{self.level}}}"
        if self.kind is VarKind.LADDER:
            return f"z_{{{self.index[0]},{self.index[1]}}}"
        if self.kind is VarKind.CHERN_ROOT:
            return f"x_{{{self.level}{self.index[0]}}}"
        return f"u^{{{self.level}}}_{{{self.index[0]},{self.index[1]}}}"

    def __str__(self) -> str:
        return self.name


_VAR_PATTERNS = (
    (re.compile(r"^p(\d+)\[([\d,]*)\]$"), VarKind.PLUCKER),
    (re.compile(r"^q(\d+)$"), VarKind.QUANTUM),
    (re.compile(r"^z\[(\d+),(\d+)\]$"), VarKind.LADDER),
    (re.compile(r"^x(\d+)_(\d+)$"), VarKind.CHERN_ROOT),
    (re.compile(r"^u(\d+)_(\d+)_(\d+)$"), VarKind.GAUGE),
)


def parse_varid(name: str) -> VarId:
    """Inverse of :attr:`VarId.name`."""

    for pattern, kind in _VAR_PATTERNS:
        match = pattern.match(name)
        if not match:
            continue
        groups = match.groups()
        if kind is VarKind.PLUCKER:
            parts = tuple(int(p) for p in groups[1].split(",") if p)
            return VarId(kind, int(groups[0]), parts)
        if kind is VarKind.QUANTUM:
            return VarId(kind, int(groups[0]))
        if kind is VarKind.LADDER:
            return VarId(kind, 0, (int(groups[0]), int(groups[1])))
        if kind is VarKind.CHERN_ROOT:
            return VarId(kind, int(groups[0]), (int(groups[1]),))
        return VarId(kind, int(groups[0]), (int(groups[1]), int(groups[2])))
    raise ValueError(f"unknown variable name {name!r}")


Monomial = Tuple[Tuple[VarId, int], ...]
Scalar = Union[int, Fraction]

_ONE: Monomial = ()


def _coerce_scalar(value: object) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    raise TypeError(f"exact coefficient expected, got {type(value).__name__}")


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    merged: Dict[VarId, int] = dict(a)
    for var, exp in b:
        total = merged.get(var, 0) + exp
        if total:
            merged[var] = total
        else:
            merged.pop(var, None)
    return tuple(sorted(merged.items()))


def _mono_pow(a: Monomial, k: int) -> Monomial:
    if k == 0:
        return _ONE
    return tuple((var, exp * k) for var, exp in a)


class LaurentExpr:
    """A finite ℚ-linear combination of Laurent monomials in :class:`VarId`."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None) -> None:
        cleaned: Dict[Monomial, Fraction] = {}
        for mono, coeff in (terms or {}).items():
            c = _coerce_scalar(coeff)
            if c:
                key = tuple(sorted((v, e) for v, e in mono if e))
                cleaned[key] = cleaned.get(key, Fraction(0)) + c
                if not cleaned[key]:
                    del cleaned[key]
        self._terms = cleaned
        self._hash: int | None = None

    # -- construction ---------------------------------------------------
    @classmethod
    def _raw(cls, terms: Dict[Monomial, Fraction]) -> "LaurentExpr":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def constant(cls, value: Scalar) -> "LaurentExpr":
        c = _coerce_scalar(value)
        return cls._raw({_ONE: c} if c else {})

    @classmethod
    def var(cls, v: VarId, exp: int = 1) -> "LaurentExpr":
        return cls._raw({((v, exp),) if exp else _ONE: Fraction(1)})

    @classmethod
    def monomial(cls, exponents: Mapping[VarId, int], coeff: Scalar = 1) -> "LaurentExpr":
        return cls({tuple(exponents.items()): coeff})

    @classmethod
    def coerce(cls, value: object) -> "LaurentExpr":
        if isinstance(value, LaurentExpr):
            return value
        if isinstance(value, VarId):
            return cls.var(value)
        return cls.constant(value)  # type: ignore[arg-type]

    # -- inspection -----------------------------------------------------
    @property
    def terms(self) -> Dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self) -> List[Tuple[Monomial, Fraction]]:
        """Terms in canonical order (lexicographic on sorted VarIds)."""

        return sorted(self._terms.items(), key=lambda item: item[0])

    def is_zero(self) -> bool:
        return not self._terms

    def is_one(self) -> bool:
        return self._terms == {_ONE: Fraction(1)}

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_constant(self) -> bool:
        return not self._terms or set(self._terms) == {_ONE}

    def constant_value(self) -> Fraction:
        return self._terms.get(_ONE, Fraction(0))

    def variables(self) -> frozenset:
        return frozenset(v for mono in self._terms for v, _ in mono)

    def coefficients(self) -> List[Fraction]:
        return [c for _, c in self.items()]

    def is_polynomial(self) -> bool:
        return all(e > 0 for mono in self._terms for _, e in mono)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[Tuple[Monomial, Fraction]]:
        return iter(self.items())

    # -- arithmetic -----------------------------------------------------
    def __add__(self, other: object) -> "LaurentExpr":
        if isinstance(other, RatFunc):
            return NotImplemented
        o = LaurentExpr.coerce(other)
        result = dict(self._terms)
        for mono, coeff in o._terms.items():
            total = result.get(mono, Fraction(0)) + coeff
            if total:
                result[mono] = total
            else:
                result.pop(mono, None)
        return LaurentExpr._raw(result)

    __radd__ = __add__

    def __neg__(self) -> "LaurentExpr":
        return LaurentExpr._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other: object) -> "LaurentExpr":
        if isinstance(other, RatFunc):
            return NotImplemented
        return self + (-LaurentExpr.coerce(other))

    def __rsub__(self, other: object) -> "LaurentExpr":
        return LaurentExpr.coerce(other) - self

    def __mul__(self, other: object) -> "LaurentExpr":
        if isinstance(other, RatFunc):
            return NotImplemented
        o = LaurentExpr.coerce(other)
        result: Dict[Monomial, Fraction] = {}
        for ma, ca in self._terms.items():
            for mb, cb in o._terms.items():
                mono = _mono_mul(ma, mb)
                total = result.get(mono, Fraction(0)) + ca * cb
                if total:
                    result[mono] = total
                else:
                    result.pop(mono, None)
        return LaurentExpr._raw(result)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> "LaurentExpr | RatFunc":
        if isinstance(other, RatFunc):
            return as_ratfunc(self) / other
        o = LaurentExpr.coerce(other)
        if o.is_zero():
            raise ZeroDivisionError("division by the zero expression")
        if o.is_monomial():
            return self * o.inverse()
        return RatFunc(self, o)

    def __rtruediv__(self, other: object) -> "LaurentExpr | RatFunc":
        return LaurentExpr.coerce(other) / self

    def inverse(self) -> "LaurentExpr":
        """Inverse of a monomial."""

        if not self.is_monomial():
            raise ValueError("only monomials are invertible in the Laurent ring")
        (mono, coeff), = self._terms.items()
        return LaurentExpr._raw({_mono_pow(mono, -1): 1 / coeff})

    def __pow__(self, k: int) -> "LaurentExpr":
        if not isinstance(k, int):
            raise TypeError("integer exponents only")
        if k < 0:
            return self.inverse() ** (-k)
        if self.is_monomial():
            (mono, coeff), = self._terms.items()
            return LaurentExpr._raw({_mono_pow(mono, k): coeff**k})
        result = LaurentExpr.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c: Scalar) -> "LaurentExpr":
        c = _coerce_scalar(c)
        if not c:
            return LaurentExpr()
        return LaurentExpr._raw({m: v * c for m, v in self._terms.items()})

    # -- comparison -----------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if isinstance(other, RatFunc):
            return other == self
        if isinstance(other, (LaurentExpr, int, Fraction)):
            return self._terms == LaurentExpr.coerce(other)._terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"LaurentExpr({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for mono, coeff in self.items():
            body = "*".join(v.name if e == 1 else f"{v.name}^{e}" for v, e in mono)
            if not body:
                pieces.append(str(coeff))
            elif coeff == 1:
                pieces.append(body)
            elif coeff == -1:
                pieces.append(f"-{body}")
            else:
                pieces.append(f"{coeff}*{body}")
        return " + ".join(pieces).replace("+ -", "- ")


def _content(expr: LaurentExpr) -> Monomial:
    """Monomial gcd (minimum exponent per variable) of the terms."""

    monos = list(expr._terms)
    if not monos:
        return _ONE
    variables = {v for mono in monos for v, _ in mono}
    content: Dict[VarId, int] = {}
    for v in variables:
        low = min(dict(mono).get(v, 0) for mono in monos)
        if low:
            content[v] = low
    return tuple(sorted(content.items()))


class RatFunc:
    """A ratio of two :class:`LaurentExpr`, reduced by monomial content."""

    __slots__ = ("num", "den")

    def __init__(self, num: object, den: object = 1) -> None:
        n = LaurentExpr.coerce(num)
        d = LaurentExpr.coerce(den)
        if d.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if d.is_monomial():
            n = n * d.inverse()
            d = LaurentExpr.constant(1)
        else:
            content = _content(d)
            if content:
                shift = LaurentExpr._raw({_mono_pow(content, -1): Fraction(1)})
                n = n * shift
                d = d * shift
            lead = d.items()[0][1]
            if lead != 1:
                n = n.scale(1 / lead)
                d = d.scale(1 / lead)
        self.num = n
        self.den = d

    def is_laurent(self) -> bool:
        return self.den.is_one()

    def to_laurent(self) -> LaurentExpr:
        if not self.is_laurent():
            raise ValueError("rational function has a non-monomial denominator")
        return self.num

    def variables(self) -> frozenset:
        return self.num.variables() | self.den.variables()

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other: object) -> "RatFunc":
        o = as_ratfunc(other)
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den)

    def __sub__(self, other: object) -> "RatFunc":
        return self + (-as_ratfunc(other))

    def __rsub__(self, other: object) -> "RatFunc":
        return as_ratfunc(other) - self

    def __mul__(self, other: object) -> "RatFunc":
        o = as_ratfunc(other)
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> "RatFunc":
        o = as_ratfunc(other)
        if o.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RatFunc(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other: object) -> "RatFunc":
        return as_ratfunc(other) / self

    def __pow__(self, k: int) -> "RatFunc":
        if k < 0:
            return RatFunc(self.den**(-k), self.num**(-k))
        return RatFunc(self.num**k, self.den**k)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (RatFunc, LaurentExpr, int, Fraction)):
            o = as_ratfunc(other)
            return self.num * o.den == o.num * self.den
        return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"RatFunc({self})"

    def __str__(self) -> str:
        if self.is_laurent():
            return str(self.num)
        return f"({self.num}) / ({self.den})"


Expr = Union[LaurentExpr, RatFunc]


def as_ratfunc(value: object) -> RatFunc:
    if isinstance(value, RatFunc):
        return value
    return RatFunc(LaurentExpr.coerce(value))


# ---------------------------------------------------------------------------
# calculus and evaluation


def _diff_laurent(f: LaurentExpr, v: VarId) -> LaurentExpr:
    result: Dict[Monomial, Fraction] = {}
    for mono, coeff in f._terms.items():
        exponents = dict(mono)
        e = exponents.get(v, 0)
        if not e:
            continue
        if e == 1:
            del exponents[v]
        else:
            exponents[v] = e - 1
        key = tuple(sorted(exponents.items()))
        result[key] = result.get(key, Fraction(0)) + coeff * e
    return LaurentExpr._raw({m: c for m, c in result.items() if c})


def differentiate(f: Expr, v: VarId) -> Expr:
    """Formal partial derivative; the quotient rule is applied exactly."""

    if isinstance(f, LaurentExpr):
        return _diff_laurent(f, v)
    num_d = _diff_laurent(f.num, v)
    den_d = _diff_laurent(f.den, v)
    if den_d.is_zero():
        return RatFunc(num_d, f.den)
    return RatFunc(num_d * f.den - f.num * den_d, f.den * f.den)


def _is_exact(value: object) -> bool:
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


def _eval_laurent(f: LaurentExpr, values: Mapping[VarId, object], exact: bool) -> object:
    total: object = Fraction(0) if exact else 0j
    for mono, coeff in f._terms.items():
        term: object = coeff if exact else complex(float(coeff))
        for var, exp in mono:
            x = values[var]
            if exact:
                x = Fraction(x)
            if exp < 0 and x == 0:
                raise EvaluationError("pole", [var])
            term = term * x**exp  # type: ignore[operator]
        total = total + term  # type: ignore[operator]
    return total


def evaluate(f: Expr, assignment: Mapping[VarId, object]) -> object:
    """Evaluate ``f`` at a point.

    The result is an exact :class:`Fraction` when every assigned value used by
    ``f`` is an ``int`` or ``Fraction``; otherwise it is a Python ``complex``.
    Complex results carry double-precision rounding only; callers compare them
    with an explicit tolerance.
    """

    needed = f.variables()
    missing = [v for v in needed if v not in assignment]
    if missing:
        raise EvaluationError("unassigned", missing)
    exact = all(_is_exact(assignment[v]) for v in needed)
    if isinstance(f, LaurentExpr):
        return _eval_laurent(f, assignment, exact)
    den = _eval_laurent(f.den, assignment, exact)
    if den == 0:
        raise EvaluationError("pole", f.den.variables())
    num = _eval_laurent(f.num, assignment, exact)
    return num / den  # type: ignore[operator]


def degree(f: Expr, weights: Mapping[VarId, int] | Callable[[VarId], int]) -> set:
    """Set of weighted degrees of the monomials of ``f``.

    For a :class:`RatFunc` the degrees are those of ``num`` minus the (single)
    degree of ``den``; a non-homogeneous denominator raises :class:`ValueError`.
    """

    weight = weights if callable(weights) else (lambda v: weights[v])  # type: ignore[index]

    def _laurent(expr: LaurentExpr) -> set:
        return {sum(weight(v) * e for v, e in mono) for mono in expr._terms}

    if isinstance(f, LaurentExpr):
        return _laurent(f)
    den_degrees = _laurent(f.den)
    if len(den_degrees) != 1:
        raise ValueError("denominator is not homogeneous")
    (shift,) = den_degrees
    return {d - shift for d in _laurent(f.num)}


def substitute(f: Expr, mapping: Mapping[VarId, object]) -> Expr:
    """Replace variables by expressions or numbers.

    Returns a :class:`LaurentExpr` when the result stays in the Laurent ring
    (every replacement is Laurent and only monomials are inverted), otherwise
    a :class:`RatFunc`.
    """

    if isinstance(f, RatFunc):
        num = substitute(f.num, mapping)
        den = substitute(f.den, mapping)
        if isinstance(num, LaurentExpr) and isinstance(den, LaurentExpr) and den.is_monomial():
            return num * den.inverse()
        return as_ratfunc(num) / as_ratfunc(den)

    pairs: Dict[VarId, Tuple[LaurentExpr, LaurentExpr]] = {}
    for var in f.variables():
        value = mapping.get(var, var)
        if isinstance(value, RatFunc):
            pairs[var] = (value.num, value.den)
        else:
            pairs[var] = (LaurentExpr.coerce(value), LaurentExpr.constant(1))

    groups: Dict[LaurentExpr, LaurentExpr] = {}
    for mono, coeff in f._terms.items():
        num = LaurentExpr.constant(coeff)
        den = LaurentExpr.constant(1)
        for var, exp in mono:
            vn, vd = pairs[var]
            if exp > 0:
                num = num * vn**exp
                if not vd.is_one():
                    den = den * vd**exp
            else:
                if vn.is_monomial():
                    num = num * vn**exp
                else:
                    den = den * vn**(-exp)
                if not vd.is_one():
                    num = num * vd**(-exp)
        if den.is_monomial():
            num = num * den.inverse()
            den = LaurentExpr.constant(1)
        groups[den] = groups.get(den, LaurentExpr()) + num

    laurent = groups.pop(LaurentExpr.constant(1), LaurentExpr())
    if not groups:
        return laurent
    total = as_ratfunc(laurent)
    for den, num in groups.items():
        total = total + RatFunc(num, den)
    return total


# ---------------------------------------------------------------------------
# sympy bridge


def _symbol(v: VarId) -> sympy.Symbol:
    return sympy.Symbol(v.name)


def _laurent_to_sympy(f: LaurentExpr) -> sympy.Expr:
    summands = []
    for mono, coeff in f.items():
        factor = sympy.Rational(coeff.numerator, coeff.denominator)
        for var, exp in mono:
            factor = factor * _symbol(var) ** exp
        summands.append(factor)
    return sympy.Add(*summands)


def to_sympy(f: Expr) -> sympy.Expr:
    if isinstance(f, LaurentExpr):
        return _laurent_to_sympy(f)
    return _laurent_to_sympy(f.num) / _laurent_to_sympy(f.den)


def from_sympy(expr: sympy.Expr) -> LaurentExpr:
    """Inverse of :func:`to_sympy` for Laurent polynomials in named variables."""

    expr = sympy.expand(sympy.cancel(sympy.sympify(expr)))
    total = LaurentExpr()
    for term in sympy.Add.make_args(expr):
        coeff, factors = term.as_coeff_mul()
        if not coeff.is_Rational:
            raise ValueError(f"non-rational coefficient {coeff}")
        exponents: Dict[VarId, int] = {}
        for factor in factors:
            base, exp = factor.as_base_exp()
            if not (base.is_Symbol and exp.is_Integer):
                raise ValueError(f"not a Laurent monomial: {term}")
            v = parse_varid(base.name)
            exponents[v] = exponents.get(v, 0) + int(exp)
        total = total + LaurentExpr.monomial(exponents, Fraction(int(coeff.p), int(coeff.q)))
    return total


def lambdify(exprs: Expr | Sequence[Expr] | sympy.Expr, variables: Sequence[VarId]) -> Callable[..., object]:
    """Compile expressions into a numpy function of ``variables`` (positional)."""

    symbols = [_symbol(v) for v in variables]

    def _convert(e: object) -> sympy.Expr:
        if isinstance(e, (LaurentExpr, RatFunc)):
            return to_sympy(e)
        return sympy.sympify(e)

    if isinstance(exprs, (LaurentExpr, RatFunc, sympy.Basic)):
        body: object = _convert(exprs)
    else:
        body = [_convert(e) for e in exprs]
    return sympy.lambdify(symbols, body, modules="numpy")


# ---------------------------------------------------------------------------
# serialization


def _fraction_text(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _laurent_json(f: LaurentExpr) -> List[dict]:
    return [
        {"coeff": _fraction_text(coeff), "monomial": {v.name: e for v, e in mono}}
        for mono, coeff in f.items()
    ]


def to_json(f: Expr) -> object:
    if isinstance(f, LaurentExpr):
        return _laurent_json(f)
    return {"numerator": _laurent_json(f.num), "denominator": _laurent_json(f.den)}


def _laurent_from_json(data: Sequence[Mapping[str, object]]) -> LaurentExpr:
    terms: Dict[Monomial, Fraction] = {}
    for entry in data:
        mono = tuple((parse_varid(name), int(exp)) for name, exp in dict(entry["monomial"]).items())  # type: ignore[arg-type]
        key = tuple(sorted(mono))
        terms[key] = terms.get(key, Fraction(0)) + Fraction(str(entry["coeff"]))
    return LaurentExpr(terms)


def from_json(data: object) -> Expr:
    if isinstance(data, Mapping):
        return RatFunc(_laurent_from_json(data["numerator"]), _laurent_from_json(data["denominator"]))
    return _laurent_from_json(data)  # type: ignore[arg-type]


def _laurent_latex(f: LaurentExpr) -> str:
    if f.is_zero():
        return "0"
    pieces: List[str] = []
    for mono, coeff in f.items():
        # quantum parameters lead
        mono = tuple(sorted(mono, key=lambda ve: ve[0].kind is not VarKind.QUANTUM))
        up = [v.latex() + (f"^{{{e}}}" if e != 1 else "") for v, e in mono if e > 0]
        down = [v.latex() + (f"^{{{-e}}}" if e != -1 else "") for v, e in mono if e < 0]
        sign = "-" if coeff < 0 else "+"
        mag = abs(coeff)
        top = " ".join(up)
        if mag.denominator != 1:
            down.insert(0, str(mag.denominator))
        if mag.numerator != 1 or not top:
            top = (str(mag.numerator) + " " + top).strip()
        body = f"\\frac{{{top}}}{{{' '.join(down)}}}" if down else top
        pieces.append(f"{sign} {body}")
    text = " ".join(pieces)
    return text[2:] if text.startswith("+ ") else text


def latex(f: Expr) -> str:
    if isinstance(f, LaurentExpr):
        return _laurent_latex(f)
    if f.is_laurent():
        return _laurent_latex(f.num)
    return f"\\frac{{{_laurent_latex(f.num)}}}{{{_laurent_latex(f.den)}}}"
