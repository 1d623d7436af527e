"""Partitions, boxes, flag shapes and the permutation dictionary.

Everything in this module is an immutable value.  Partitions are stored
without trailing zeros; formulas that read ``λ_k`` past the last part see an
implicit zero.  Canonical orderings are graded lexicographic: by size first,
then larger parts first.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterable, Iterator, List, Tuple

__all__ = [
    "BoxShape",
    "DescentError",
    "FlagPermutation",
    "FlagShape",
    "Partition",
    "PartitionTuple",
    "ShapeError",
    "columns_to_partition",
    "enumerate_M",
    "enumerate_S",
    "enumerate_tuples",
    "flag_permutations",
    "is_rectangle",
    "parse_shape",
    "partition_to_columns",
    "perm_to_tuple",
    "rectangle",
    "rectangles",
    "transpose",
    "tuple_to_perm",
]


class ShapeError(ValueError):
    """Raised for invalid shapes, boxes or partitions that do not fit."""

    def __init__(self, message: str, *, position: int | None = None) -> None:
        super().__init__(message)
        self.position = position


class DescentError(ValueError):
    """Raised when a permutation has a descent outside the flag ranks."""


@dataclass(frozen=True, slots=True)
class Partition:
    """A Young diagram; ``Partition(())`` is the empty diagram ∅."""

    parts: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        parts = tuple(int(p) for p in self.parts)
        while parts and parts[-1] == 0:
            parts = parts[:-1]
        if any(p <= 0 for p in parts):
            raise ShapeError(f"partition parts must be positive: {self.parts!r}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ShapeError(f"partition parts must be weakly decreasing: {self.parts!r}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def of(cls, *parts: int) -> "Partition":
        return cls(tuple(parts))

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    @property
    def width(self) -> int:
        return self.parts[0] if self.parts else 0

    def part(self, k: int) -> int:
        """Return ``λ_k`` (1-based) with implicit zeros."""

        if 1 <= k <= len(self.parts):
            return self.parts[k - 1]
        return 0

    def is_empty(self) -> bool:
        return not self.parts

    def fits(self, box: "BoxShape") -> bool:
        return self.length <= box.rows and self.width <= box.cols

    def transpose(self) -> "Partition":
        return transpose(self)

    def sort_key(self) -> Tuple[int, Tuple[int, ...]]:
        return (self.size, tuple(-p for p in self.parts))

    def to_json(self) -> List[int]:
        return list(self.parts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __str__(self) -> str:
        if not self.parts:
            return "∅"
        return "(" + ",".join(str(p) for p in self.parts) + ")"


EMPTY = Partition()


@dataclass(frozen=True, slots=True)
class BoxShape:
    """An ``rows × cols`` box of Young-diagram cells."""

    rows: int
    cols: int

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise ShapeError(f"box dimensions must be nonnegative: {self.rows}x{self.cols}")

    @property
    def n(self) -> int:
        return self.rows + self.cols


@dataclass(frozen=True, slots=True)
class FlagShape:
    """The flag ``Fl(n; r₁ > … > r_ρ)`` of quotients of ℂⁿ."""

    n: int
    ranks: Tuple[int, ...]

    def __post_init__(self) -> None:
        ranks = tuple(int(r) for r in self.ranks)
        object.__setattr__(self, "ranks", ranks)
        if self.n < 1:
            raise ShapeError(f"n must be positive: {self.n}")
        if not ranks:
            raise ShapeError("a flag needs at least one rank")
        if any(r <= 0 for r in ranks):
            raise ShapeError(f"ranks must be positive: {ranks}")
        if ranks[0] >= self.n:
            raise ShapeError(f"r1 must be smaller than n: {ranks[0]} >= {self.n}")
        if any(a <= b for a, b in zip(ranks, ranks[1:])):
            raise ShapeError(f"ranks must be strictly decreasing: {ranks}")

    @property
    def rho(self) -> int:
        return len(self.ranks)

    def r(self, i: int) -> int:
        """Return ``r_i`` with the conventions ``r₀ = n`` and ``r_{ρ+1} = 0``."""

        if i == 0:
            return self.n
        if 1 <= i <= self.rho:
            return self.ranks[i - 1]
        if i == self.rho + 1:
            return 0
        raise ShapeError(f"level {i} out of range for {self.spec}")

    def box(self, i: int) -> BoxShape:
        """Box of level ``i``: ``r_i`` rows and ``r_{i-1} - r_i`` columns."""

        if not 1 <= i <= self.rho:
            raise ShapeError(f"level {i} out of range for {self.spec}")
        return BoxShape(self.r(i), self.r(i - 1) - self.r(i))

    def boxes(self) -> List[BoxShape]:
        return [self.box(i) for i in self.levels]

    @property
    def levels(self) -> range:
        return range(1, self.rho + 1)

    @property
    def dimension(self) -> int:
        return sum(self.r(i) * (self.r(i - 1) - self.r(i)) for i in self.levels)

    @property
    def is_grassmannian(self) -> bool:
        return self.rho == 1

    @property
    def spec(self) -> str:
        return f"{self.n}:" + ",".join(str(r) for r in self.ranks)

    def to_json(self) -> dict:
        return {"n": self.n, "ranks": list(self.ranks)}

    @classmethod
    def grassmannian(cls, n: int, r: int) -> "FlagShape":
        return cls(n, (r,))

    @staticmethod
    def all_shapes(n: int) -> List["FlagShape"]:
        """Every flag shape with this ``n``, ordered by length then ranks."""

        shapes: List[FlagShape] = []
        for size in range(1, n):
            for ranks in itertools.combinations(range(n - 1, 0, -1), size):
                shapes.append(FlagShape(n, ranks))
        return shapes

    def __str__(self) -> str:
        if self.is_grassmannian:
            return f"Gr({self.n},{self.ranks[0]})"
        return f"Fl({self.n};" + ",".join(str(r) for r in self.ranks) + ")"


@dataclass(frozen=True, slots=True)
class PartitionTuple:
    """``(μ₁, …, μ_ρ)`` with ``μ_i`` in ``S(r_{i-1}, r_i)``."""

    entries: Tuple[Partition, ...]

    def __post_init__(self) -> None:
        entries = tuple(e if isinstance(e, Partition) else Partition(tuple(e)) for e in self.entries)
        object.__setattr__(self, "entries", entries)

    @classmethod
    def unit(cls, rho: int) -> "PartitionTuple":
        return cls(tuple(EMPTY for _ in range(rho)))

    @classmethod
    def single(cls, rho: int, level: int, lam: Partition) -> "PartitionTuple":
        entries = [EMPTY] * rho
        entries[level - 1] = lam
        return cls(tuple(entries))

    def level(self, i: int) -> Partition:
        return self.entries[i - 1]

    def is_unit(self) -> bool:
        return all(e.is_empty() for e in self.entries)

    def nonempty_levels(self) -> List[int]:
        return [i for i, e in enumerate(self.entries, start=1) if not e.is_empty()]

    def validate(self, shape: FlagShape) -> None:
        if len(self.entries) != shape.rho:
            raise ShapeError(f"tuple has {len(self.entries)} entries, shape {shape.spec} needs {shape.rho}")
        for i, lam in enumerate(self.entries, start=1):
            if not lam.fits(shape.box(i)):
                raise ShapeError(f"level {i} partition {lam} does not fit the {shape.box(i).rows}x{shape.box(i).cols} box")

    def sort_key(self) -> Tuple:
        return tuple(e.sort_key() for e in self.entries)

    def to_json(self) -> List[List[int]]:
        return [e.to_json() for e in self.entries]

    def __str__(self) -> str:
        return "(" + ", ".join(str(e) for e in self.entries) + ")"


@dataclass(frozen=True, slots=True)
class FlagPermutation:
    """A permutation of ``1..n`` in one-line notation."""

    word: Tuple[int, ...]

    def __post_init__(self) -> None:
        word = tuple(int(a) for a in self.word)
        if sorted(word) != list(range(1, len(word) + 1)):
            raise ShapeError(f"not a permutation of 1..{len(word)}: {self.word!r}")
        object.__setattr__(self, "word", word)

    @property
    def n(self) -> int:
        return len(self.word)

    def descents(self) -> List[int]:
        return [j for j in range(1, self.n) if self.word[j - 1] > self.word[j]]

    def __str__(self) -> str:
        return " ".join(str(a) for a in self.word)


# ---------------------------------------------------------------------------


def transpose(lam: Partition) -> Partition:
    """Return the conjugate diagram λᵗ."""

    if lam.is_empty():
        return EMPTY
    return Partition(tuple(sum(1 for p in lam.parts if p > j) for j in range(lam.width)))


def _partitions_in_box(rows: int, cols: int) -> Iterator[Tuple[int, ...]]:
    if rows == 0 or cols == 0:
        yield ()
        return
    for first in range(cols, -1, -1):
        if first == 0:
            yield ()
            continue
        for rest in _partitions_in_box(rows - 1, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _box_partitions(rows: int, cols: int) -> Tuple[Partition, ...]:
    parts = {Partition(p) for p in _partitions_in_box(rows, cols)}
    return tuple(sorted(parts, key=Partition.sort_key))


def enumerate_S(n: int, r: int) -> List[Partition]:
    """All partitions in the ``r × (n-r)`` box, graded lexicographic."""

    if r < 0 or n < 0:
        raise ShapeError(f"S({n},{r}) needs 0 <= r <= n")
    if r > n:
        raise ShapeError(f"S({n},{r}) needs r <= n")
    return list(_box_partitions(r, n - r))


def rectangle(rows: int, cols: int) -> Partition:
    """The ``rows × cols`` rectangle ``(cols, …, cols)``."""

    if rows <= 0 or cols <= 0:
        return EMPTY
    return Partition((cols,) * rows)


def is_rectangle(lam: Partition) -> bool:
    return lam.is_empty() or len(set(lam.parts)) == 1


def rectangles(box: BoxShape) -> List[Partition]:
    """All rectangles ``a × b`` fitting in ``box`` (∅ included)."""

    found = {rectangle(a, b) for a in range(box.rows + 1) for b in range(box.cols + 1)}
    return sorted(found, key=Partition.sort_key)


def enumerate_M(n: int, r: int) -> List[Partition]:
    """The frozen index set: maximally wide or maximally tall rectangles."""

    if not 1 <= r < n:
        raise ShapeError(f"M({n},{r}) needs 1 <= r < n")
    cols = n - r
    found = {rectangle(k, cols) for k in range(r + 1)}
    found |= {rectangle(r, a) for a in range(cols + 1)}
    return sorted(found, key=Partition.sort_key)


def partition_to_columns(lam: Partition, box: BoxShape) -> Tuple[int, ...]:
    """``J(λ) = {λ_{r+1-k} + k : k = 1..r}`` as a sorted tuple."""

    if not lam.fits(box):
        raise ShapeError(f"{lam} does not fit the {box.rows}x{box.cols} box")
    r = box.rows
    return tuple(lam.part(r + 1 - k) + k for k in range(1, r + 1))


def columns_to_partition(columns: Iterable[int], box: BoxShape) -> Partition:
    """Inverse of :func:`partition_to_columns`."""

    cols = sorted(columns)
    r = box.rows
    if len(cols) != r or len(set(cols)) != r or (cols and (cols[0] < 1 or cols[-1] > box.n)):
        raise ShapeError(f"{cols} is not an {r}-subset of 1..{box.n}")
    parts = [0] * r
    for k, j in enumerate(cols, start=1):
        parts[r - k] = j - k
    return Partition(tuple(parts))


def enumerate_tuples(shape: FlagShape) -> List[PartitionTuple]:
    """The index set ``S(n, r̲)`` as a product of canonical orders."""

    per_level = [enumerate_S(shape.r(i - 1), shape.r(i)) for i in shape.levels]
    return [PartitionTuple(tuple(combo)) for combo in itertools.product(*per_level)]


def _check_descents(w: FlagPermutation, shape: FlagShape) -> None:
    if w.n != shape.n:
        raise ShapeError(f"permutation of length {w.n} does not match n={shape.n}")
    allowed = set(shape.ranks)
    bad = [d for d in w.descents() if d not in allowed]
    if bad:
        raise DescentError(f"descents {bad} of {w} are not in {sorted(allowed)}")


def perm_to_tuple(w: FlagPermutation, shape: FlagShape) -> PartitionTuple:
    """Read off ``(λ₁, …, λ_ρ)`` from the nested sets ``T_i = {w(1..r_i)}``."""

    _check_descents(w, shape)
    previous = sorted(w.word)
    entries: List[Partition] = []
    for i in shape.levels:
        current = set(w.word[: shape.r(i)])
        positions = [k for k, b in enumerate(previous, start=1) if b in current]
        entries.append(columns_to_partition(positions, shape.box(i)))
        previous = sorted(current)
    return PartitionTuple(tuple(entries))


def tuple_to_perm(t: PartitionTuple, shape: FlagShape) -> FlagPermutation:
    """Inverse of :func:`perm_to_tuple`."""

    t.validate(shape)
    nested: List[List[int]] = [list(range(1, shape.n + 1))]
    for i in shape.levels:
        previous = nested[-1]
        columns = partition_to_columns(t.level(i), shape.box(i))
        nested.append([previous[k - 1] for k in columns])
    word: List[int] = sorted(nested[-1])
    for i in range(shape.rho, 0, -1):
        word.extend(sorted(set(nested[i - 1]) - set(nested[i])))
    return FlagPermutation(tuple(word))


def flag_permutations(shape: FlagShape) -> List[FlagPermutation]:
    """``Sym(r₁, …, r_ρ)``: permutations with descents in the ranks, lexicographic."""

    perms = [tuple_to_perm(t, shape) for t in enumerate_tuples(shape)]
    return sorted(perms, key=lambda w: w.word)


def parse_shape(text: str) -> FlagShape:
    """Parse a ShapeSpec such as ``"4:2,1"`` (Fl(4;2,1)) or ``"4:2"`` (Gr(4,2))."""

    raw = text.strip()
    head, sep, tail = raw.partition(":")
    if not sep:
        raise ShapeError(f"expected 'n:r1,r2,...' but found no ':' in {text!r}", position=len(raw))
    try:
        n = int(head)
    except ValueError:
        raise ShapeError(f"invalid n {head!r} in {text!r}", position=0) from None
    ranks: List[int] = []
    offset = len(head) + 1
    for chunk in tail.split(","):
        try:
            ranks.append(int(chunk))
        except ValueError:
            raise ShapeError(f"invalid rank {chunk!r} in {text!r}", position=offset) from None
        offset += len(chunk) + 1
    try:
        return FlagShape(n, tuple(ranks))
    except ShapeError as exc:
        raise ShapeError(f"{exc} (in {text!r})", position=len(head) + 1) from None


def multinomial_count(shape: FlagShape) -> int:
    """``|S(n, r̲)| = Π binomial(r_{i-1}, r_i)``."""

    total = 1
    for i in shape.levels:
        total *= comb(shape.r(i - 1), shape.r(i))
    return total


def parse_partition(text: str) -> Partition:
    """Parse ``"2,2,1"`` (or ``""`` / ``"0"`` for ∅)."""

    cleaned = text.strip().strip("()[]")
    if not cleaned or cleaned in {"0", "∅"}:
        return EMPTY
    try:
        return Partition(tuple(int(c) for c in cleaned.split(",")))
    except ValueError:
        raise ShapeError(f"invalid partition {text!r}") from None
