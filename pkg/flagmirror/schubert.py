"""Schur calculus and the quantum Pieri rules used by the mirror builder.

Two independent routes to ``s_□ * s_λ`` are implemented:

* :func:`quantum_pieri_gr` multiplies classically (Littlewood–Richardson)
  and reduces partitions that are too wide by ``n``-rim hooks, using
  beta-numbers;
* :func:`flag_pieri` writes down the closed form for ``λ`` a maximally wide
  or maximally tall rectangle, level by level, in the flag variety.

For Grassmannians both must agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from core.logging import get_logger

from .combinat import (
    EMPTY,
    FlagShape,
    Partition,
    PartitionTuple,
    enumerate_M,
    enumerate_S,
    rectangle,
    transpose,
)
from .exactalg import LaurentExpr, VarId
from .linalg import exact_det, float_det

__all__ = [
    "AnticanonicalReport",
    "ClassExpr",
    "ClassTerm",
    "PieriError",
    "anticanonical_check",
    "cross_class",
    "flag_pieri",
    "is_cross_term",
    "lr_multiply",
    "precancellation_terms",
    "quantum_multiply_gr",
    "quantum_pieri_gr",
    "rim_hook_reduce",
    "schur_eval",
    "schur_table",
]

LOGGER = get_logger("flagmirror.schubert")

BOX = Partition((1,))


class PieriError(ValueError):
    """Raised for inputs outside the range of the Pieri rules."""


@dataclass(frozen=True, slots=True)
class ClassTerm:
    coeff: int
    q: Tuple[int, ...]
    index: PartitionTuple

    def sort_key(self) -> Tuple:
        return (sum(self.q), self.q, self.index.sort_key())

    def to_plucker(self) -> LaurentExpr:
        """``coeff · Π q_i^{e_i} · Π p^j_{μ_j}`` with ``p^j_∅`` factors dropped."""

        exponents: Dict[VarId, int] = {}
        for level, e in enumerate(self.q, start=1):
            if e:
                exponents[VarId.quantum(level)] = e
        for level in self.index.nonempty_levels():
            exponents[VarId.plucker(level, self.index.level(level))] = 1
        return LaurentExpr.monomial(exponents, self.coeff)

    def render(self) -> str:
        qtext = "*".join(f"q{i}" if e == 1 else f"q{i}^{e}" for i, e in enumerate(self.q, start=1) if e)
        levels = self.index.nonempty_levels()
        if not levels:
            body = ""
        elif len(levels) == 1:
            (i,) = levels
            body = f"s{i}[" + ",".join(str(p) for p in self.index.level(i)) + "]"
        else:
            tag = "".join(str(i) for i in levels)
            parts = ",".join("(" + ",".join(str(p) for p in self.index.level(i)) + ")" for i in levels)
            body = f"s{tag}[{parts}]"
        pieces = [p for p in (qtext, body) if p]
        text = "*".join(pieces) if pieces else "1"
        if self.coeff == 1:
            return text
        if self.coeff == -1:
            return f"-{text}"
        return f"{self.coeff}*{text}"

    def to_json(self) -> dict:
        return {"coeff": self.coeff, "q": list(self.q), "tuple": self.index.to_json()}


@dataclass(frozen=True, slots=True)
class ClassExpr:
    """A formal sum of q-weighted Schubert classes of one flag variety."""

    shape: FlagShape
    terms: Tuple[ClassTerm, ...] = field(default_factory=tuple)

    @classmethod
    def build(cls, shape: FlagShape, terms: Iterable[ClassTerm]) -> "ClassExpr":
        merged: Dict[Tuple[Tuple[int, ...], PartitionTuple], int] = {}
        for term in terms:
            term.index.validate(shape)
            if len(term.q) != shape.rho:
                raise PieriError(f"q-exponent vector {term.q} does not match rho={shape.rho}")
            key = (term.q, term.index)
            merged[key] = merged.get(key, 0) + term.coeff
        cleaned = [ClassTerm(c, q, t) for (q, t), c in merged.items() if c]
        return cls(shape, tuple(sorted(cleaned, key=ClassTerm.sort_key)))

    def __add__(self, other: "ClassExpr") -> "ClassExpr":
        if other.shape != self.shape:
            raise PieriError("cannot add classes of different flag varieties")
        return ClassExpr.build(self.shape, self.terms + other.terms)

    def scale(self, q: Sequence[int], coeff: int = 1) -> "ClassExpr":
        return ClassExpr.build(
            self.shape,
            (ClassTerm(t.coeff * coeff, tuple(a + b for a, b in zip(t.q, q)), t.index) for t in self.terms),
        )

    def without(self, index: PartitionTuple) -> "ClassExpr":
        return ClassExpr(self.shape, tuple(t for t in self.terms if not (t.index == index and not any(t.q))))

    def is_positive(self) -> bool:
        return all(t.coeff > 0 for t in self.terms)

    def to_plucker(self) -> LaurentExpr:
        total = LaurentExpr()
        for term in self.terms:
            total = total + term.to_plucker()
        return total

    def render(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(t.render() for t in self.terms).replace("+ -", "- ")

    def to_json(self) -> List[dict]:
        return [t.to_json() for t in self.terms]

    def __len__(self) -> int:
        return len(self.terms)

    def __str__(self) -> str:
        return self.render()


# ---------------------------------------------------------------------------
# Schur polynomials


def _complete_homogeneous(xs: Sequence[object], top: int, exact: bool) -> List[object]:
    zero: object = Fraction(0) if exact else 0j
    one: object = Fraction(1) if exact else 1 + 0j
    h = [one] + [zero] * top
    for x in xs:
        value = Fraction(x) if exact else complex(x)
        for k in range(1, top + 1):
            h[k] = h[k] + value * h[k - 1]  # type: ignore[operator]
    return h


def schur_eval(lam: Partition, xs: Sequence[object], *, method: str = "jacobi-trudi") -> object:
    """``s_λ(xs)``; exact when every value is an ``int`` or ``Fraction``.

    ``method`` is ``"jacobi-trudi"`` (determinant in complete homogeneous
    functions) or ``"bialternant"`` (ratio of alternants, needs distinct xs).
    """

    if lam.length > len(xs):
        raise PieriError(f"{lam} has more than {len(xs)} parts")
    exact = all(isinstance(x, (int, Fraction)) for x in xs)
    if lam.is_empty():
        return Fraction(1) if exact else 1 + 0j
    det = exact_det if exact else float_det
    if method == "jacobi-trudi":
        size = lam.length
        top = lam.width + size
        h = _complete_homogeneous(xs, top, exact)
        zero: object = Fraction(0) if exact else 0j

        def entry(a: int, b: int) -> object:
            k = lam.part(a + 1) - a + b
            if k < 0:
                return zero
            return h[k]

        return det([[entry(a, b) for b in range(size)] for a in range(size)])
    if method == "bialternant":
        count = len(xs)
        values = [Fraction(x) if exact else complex(x) for x in xs]
        numerator = det([[x ** (lam.part(j) + count - j) for j in range(1, count + 1)] for x in values])
        denominator = det([[x ** (count - j) for j in range(1, count + 1)] for x in values])
        if denominator == 0:
            raise PieriError("bialternant needs pairwise distinct values")
        return numerator / denominator  # type: ignore[operator]
    raise PieriError(f"unknown Schur method {method!r}")


# ---------------------------------------------------------------------------
# Littlewood–Richardson


def _horizontal_strips(shape: Tuple[int, ...], size: int) -> Iterable[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """Yield ``(new_shape, added_per_row)`` for horizontal strips of ``size`` boxes."""

    rows = list(shape) + [0]

    def rec(k: int, remaining: int, acc: List[int]) -> Iterable[List[int]]:
        if k == len(rows):
            if remaining == 0:
                yield acc
            return
        cap = remaining if k == 0 else min(remaining, rows[k - 1] - rows[k])
        for add in range(cap, -1, -1):
            yield from rec(k + 1, remaining - add, acc + [add])

    for added in rec(0, size, []):
        new = tuple(r + a for r, a in zip(rows, added))
        while new and new[-1] == 0:
            new = new[:-1]
        yield new, tuple(added)


def _is_lattice(fillings: Sequence[Sequence[int]]) -> bool:
    """``fillings[row][label]`` counts; read rows top-down, each right-to-left."""

    labels = max((len(f) for f in fillings), default=0)
    seen = [0] * (labels + 1)
    for row in fillings:
        for label in range(len(row) - 1, -1, -1):
            for _ in range(row[label]):
                seen[label] += 1
                if label > 0 and seen[label] > seen[label - 1]:
                    return False
    return True


@lru_cache(maxsize=4096)
def _lr_cached(lam: Tuple[int, ...], mu: Tuple[int, ...]) -> Tuple[Tuple[Tuple[int, ...], int], ...]:
    states: List[Tuple[Tuple[int, ...], List[List[int]]]] = [(lam, [])]
    labels = len(mu)
    for label, size in enumerate(mu):
        next_states = []
        for shape, fillings in states:
            for new_shape, added in _horizontal_strips(shape, size):
                rows = max(len(fillings), len(added))
                grown = [list(fillings[r]) if r < len(fillings) else [0] * labels for r in range(rows)]
                for r, a in enumerate(added):
                    grown[r][label] += a
                if not _is_lattice([row[: label + 1] for row in grown]):
                    continue
                next_states.append((new_shape, grown))
        states = next_states
    counts: Dict[Tuple[int, ...], int] = {}
    for shape, _ in states:
        counts[shape] = counts.get(shape, 0) + 1
    return tuple(sorted(counts.items()))


def lr_multiply(lam: Partition, mu: Partition) -> Dict[Partition, int]:
    """Expansion of ``s_λ · s_μ`` in the Schur basis."""

    if lam.size < mu.size:
        lam, mu = mu, lam
    return {Partition(shape): count for shape, count in _lr_cached(lam.parts, mu.parts)}


# ---------------------------------------------------------------------------
# rim hooks and Grassmannian quantum products


def rim_hook_reduce(nu: Partition, n: int, r: int) -> Optional[Tuple[int, int, Partition]]:
    """Reduce ``s_ν`` (``ν`` with at most ``r`` rows) in ``QH(Gr(n, r))``.

    Beads ``β_j = ν_j + r - j`` are lowered by ``n`` until every bead is
    below ``n``; each lowering is one ``n``-rim hook removal worth ``q`` with
    sign ``(-1)^{r - rows(hook)}``.  Returns ``(sign, q_power, μ)`` or ``None``
    when two beads collide.
    """

    if nu.length > r:
        return None
    beads = [nu.part(j) + r - j for j in range(1, r + 1)]
    sign = 1
    q_power = 0
    while beads and beads[0] >= n:
        bead = beads[0]
        target = bead - n
        if target in beads:
            return None
        jumped = sum(1 for b in beads[1:] if b > target)
        sign *= -1 if (r - 1 - jumped) % 2 else 1
        q_power += 1
        beads = sorted(beads[1:] + [target], reverse=True)
    parts = tuple(b - (r - j) for j, b in enumerate(beads, start=1))
    if q_power > 1:
        LOGGER.debug("rim_hook_reduce nu=%s n=%d r=%d removals=%d", nu, n, r, q_power)
    return sign, q_power, Partition(parts)


def _gr_expr(n: int, r: int, products: Mapping[Partition, int]) -> ClassExpr:
    shape = FlagShape.grassmannian(n, r)
    terms: List[ClassTerm] = []
    for nu, mult in products.items():
        if nu.length > r:
            continue
        reduced = rim_hook_reduce(nu, n, r)
        if reduced is None:
            continue
        sign, power, mu = reduced
        terms.append(ClassTerm(sign * mult, (power,), PartitionTuple((mu,))))
    return ClassExpr.build(shape, terms)


def _check_in_box(lam: Partition, n: int, r: int) -> None:
    if not 1 <= r < n:
        raise PieriError(f"Gr({n},{r}) needs 1 <= r < n")
    if lam.length > r or lam.width > n - r:
        raise PieriError(f"{lam} is outside the {r}x{n - r} box")


def quantum_pieri_gr(lam: Partition, n: int, r: int) -> ClassExpr:
    """``s_□ * s_λ`` in ``QH(Gr(n, r))`` by classical Pieri and rim-hook reduction."""

    _check_in_box(lam, n, r)
    return _gr_expr(n, r, lr_multiply(lam, BOX))


def quantum_multiply_gr(lam: Partition, mu: Partition, n: int, r: int) -> ClassExpr:
    """Full quantum product ``s_λ * s_μ`` in ``QH(Gr(n, r))``."""

    _check_in_box(lam, n, r)
    _check_in_box(mu, n, r)
    return _gr_expr(n, r, lr_multiply(lam, mu))


# ---------------------------------------------------------------------------
# flag Pieri


def cross_class(shape: FlagShape, i: int, lam: Partition, j: int, lam2: Partition) -> Optional[PartitionTuple]:
    """``s^{i,j}_{λ,λ'}`` as a tuple, or ``None`` when a boundary class vanishes.

    Level ``0`` and level ``ρ+1`` only carry ``∅``.
    """

    entries = [EMPTY] * shape.rho
    for level, part in ((i, lam), (j, lam2)):
        if level == 0 or level == shape.rho + 1:
            if not part.is_empty():
                return None
            continue
        entries[level - 1] = part
    return PartitionTuple(tuple(entries))


def _unit_q(shape: FlagShape, level: int) -> Tuple[int, ...]:
    return tuple(1 if k == level else 0 for k in shape.levels)


def flag_pieri(i: int, lam: Partition, shape: FlagShape) -> ClassExpr:
    """``F^i_λ = s^i_□ * s^i_λ`` for ``λ`` maximally wide or maximally tall.

    The result includes the cross terms ``s^{i-1,i}_{□,λ}``.
    """

    if not 1 <= i <= shape.rho:
        raise PieriError(f"level {i} out of range 1..{shape.rho}")
    rows = shape.r(i)
    cols = shape.r(i - 1) - shape.r(i)
    frozen = enumerate_M(shape.r(i - 1), rows)
    if lam not in frozen:
        raise PieriError(f"{lam} is not a maximally wide or tall rectangle of the {rows}x{cols} box")

    zero_q = tuple(0 for _ in shape.levels)
    terms: List[ClassTerm] = []

    # wide rectangles a^{r_i}, a < cols (∅ included)
    if lam.is_empty() or (lam.length == rows and lam.width < cols):
        a = lam.width
        lifted = Partition((a + 1,) + (a,) * (rows - 1))
        terms.append(ClassTerm(1, zero_q, PartitionTuple.single(shape.rho, i, lifted)))
        return ClassExpr.build(shape, terms)

    a = lam.length
    step = shape.r(i) - shape.r(i + 1)
    if a < rows:
        lifted = Partition((cols,) * a + (1,))
        terms.append(ClassTerm(1, zero_q, PartitionTuple.single(shape.rho, i, lifted)))
    cross = cross_class(shape, i - 1, BOX, i, lam)
    if cross is not None:
        terms.append(ClassTerm(1, zero_q, cross))
    if a >= step:
        quantum = cross_class(shape, i, rectangle(a - 1, cols - 1), i + 1, transpose(Partition((a - step,))))
        if quantum is not None:
            terms.append(ClassTerm(1, _unit_q(shape, i), quantum))
    return ClassExpr.build(shape, terms)


def is_cross_term(term: ClassTerm, i: int, lam: Partition) -> bool:
    """Whether ``term`` is the ``s^{i-1,i}_{□,λ}`` summand of ``F^i_λ``."""

    if any(term.q) or i < 2:
        return False
    levels = term.index.nonempty_levels()
    return (
        term.index.level(i - 1) == BOX
        and term.index.level(i) == lam
        and set(levels) <= {i - 1, i}
    )


def precancellation_terms(shape: FlagShape) -> Dict[Tuple[int, Partition], ClassExpr]:
    """Every ``F^i_λ`` keyed by ``(i, λ)``, cross terms included."""

    return {
        (i, lam): flag_pieri(i, lam, shape)
        for i in shape.levels
        for lam in enumerate_M(shape.r(i - 1), shape.r(i))
    }


@dataclass(slots=True)
class AnticanonicalReport:
    shape: FlagShape
    cross_counts: Dict[int, int]
    expected: Dict[int, int]
    q_degrees: Dict[int, int]

    @property
    def ok(self) -> bool:
        return self.cross_counts == self.expected


def anticanonical_check(shape: FlagShape) -> AnticanonicalReport:
    """Count the ``s^{i,i+1}_{□,·}`` cross terms against ``r_{i+1}``.

    The cross terms of level ``i+1`` each contribute ``p^i_□`` and must cancel
    the ``-r_{i+1} p^i_□`` correction exactly; ``q_degrees`` records
    ``deg q_i = r_{i-1} - r_{i+1}``, the coefficients of the anticanonical class.
    """

    counts = {i: 0 for i in shape.levels}
    for (i, lam), expr in precancellation_terms(shape).items():
        for term in expr.terms:
            if is_cross_term(term, i, lam):
                counts[i - 1] += 1
    expected = {i: shape.r(i + 1) for i in shape.levels}
    degrees = {i: shape.r(i - 1) - shape.r(i + 1) for i in shape.levels}
    return AnticanonicalReport(shape, counts, expected, degrees)


def schur_table(shape_rows: int, cols: int, xs: Sequence[object]) -> Dict[Partition, object]:
    """``s_λ(xs)`` for every ``λ`` in the ``shape_rows × cols`` box."""

    return {lam: schur_eval(lam, xs) for lam in enumerate_S(shape_rows + cols, shape_rows)}
