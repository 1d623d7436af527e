"""Critical points of the Plücker mirror.

Everything numeric here is complex double precision.  ``W_P`` is pulled back
to the gauge chart ``[I | U]`` of every factor, differentiated exactly once
and twice with :func:`flagmirror.exactalg.differentiate`, and compiled with
sympy's ``lambdify`` so that Newton runs batched over many starts in numpy.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from core.fanout import fan_out
from core.logging import get_logger, warn_once
from core.runtime import numeric_tolerance

from .combinat import EMPTY, FlagShape, Partition, enumerate_M, enumerate_S
from .exactalg import Expr, LaurentExpr, VarId, differentiate, evaluate, lambdify, substitute, to_sympy
from .geometry import (
    FactorMatrix,
    YPoint,
    chart_pluckers,
    gauge_variables,
    point_pluckers,
    trial_generator,
    vandermonde,
)
from .linalg import float_gauge
from .mirror import build_WP
from .schubert import schur_eval

__all__ = [
    "CandidateSource",
    "CriticalCandidate",
    "CriticalSearch",
    "DEFAULT_STEP",
    "DegenerateParametersError",
    "GaugeSuperpotential",
    "GradientCheck",
    "IdentityResiduals",
    "OutsideTorusError",
    "ResidualError",
    "SolverUndercountError",
    "candidate_gauge",
    "cp_points",
    "find_all_critical",
    "fl21_chern_roots",
    "gauge_superpotential",
    "grad_WP",
    "gu_sharpe_residuals",
    "gu_sharpe_system",
    "identity_checks",
    "karp_points",
    "karp_sign_report",
]

LOGGER = get_logger("flagmirror.critical")

DEFAULT_STEP = 1e-3
FROZEN_FLOOR = 1e-6
DEDUP_TOLERANCE = 1e-5
MAX_COORDINATE = 1e6
NEWTON_ITERATIONS = 120
NEWTON_CHUNK = 1000
# step lengths tried by the line search, longest first
LINE_SEARCH = (1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125)
MAX_LOG_STEP = 2.0
START_SPREAD = 0.75
MAX_SEARCH_DIMENSION = 6


class DegenerateParametersError(ValueError):
    """Raised when the quantum parameters violate a well-definedness guard."""


class OutsideTorusError(ValueError):
    """Raised when a realisation has a vanishing frozen coordinate."""


class ResidualError(ValueError):
    """Raised when a candidate does not solve its defining system closely enough."""


class SolverUndercountError(RuntimeError):
    def __init__(self, message: str, found: int, expected: int) -> None:
        super().__init__(message)
        self.found = found
        self.expected = expected


class CandidateSource(str, Enum):
    GU_SHARPE = "gu-sharpe"
    KARP = "karp"
    CP = "cp"
    NEWTON = "newton"


@dataclass(slots=True)
class CriticalCandidate:
    shape: FlagShape
    x: Dict[VarId, complex]
    q: Tuple[complex, ...]
    realization: YPoint
    source: CandidateSource
    grad_norm: Optional[float] = None
    sign: Optional[int] = None

    def to_json(self) -> dict:
        payload = {
            "source": self.source.value,
            "x": {v.name: [z.real, z.imag] for v, z in sorted(self.x.items())},
            "grad_norm": self.grad_norm,
        }
        if self.sign is not None:
            payload["sign"] = self.sign
        return payload


# ---------------------------------------------------------------------------
# Gu–Sharpe system


def gu_sharpe_system(shape: FlagShape, q: Optional[Sequence[object]] = None) -> List[LaurentExpr]:
    """``Π_k (x_ij - x_{i-1,k}) - (-1)^{r_i-1} q_i Π_k (x_{i+1,k} - x_ij)`` for every ``(i, j)``.

    ``x_{0k} = 0``.  Without ``q`` the quantum parameters stay symbolic.
    """

    def x(i: int, j: int) -> LaurentExpr:
        return LaurentExpr.var(VarId.chern_root(i, j))

    equations: List[LaurentExpr] = []
    for i in shape.levels:
        qi = LaurentExpr.var(VarId.quantum(i)) if q is None else LaurentExpr.coerce(q[i - 1])
        for j in range(1, shape.r(i) + 1):
            if i == 1:
                lhs = x(1, j) ** shape.n
            else:
                lhs = LaurentExpr.constant(1)
                for k in range(1, shape.r(i - 1) + 1):
                    lhs = lhs * (x(i, j) - x(i - 1, k))
            rhs = qi.scale(-1 if (shape.r(i) - 1) % 2 else 1)
            for k in range(1, shape.r(i + 1) + 1):
                rhs = rhs * (x(i + 1, k) - x(i, j))
            equations.append(lhs - rhs)
    return equations


def gu_sharpe_residuals(shape: FlagShape, x: Dict[VarId, complex], q: Sequence[object]) -> List[complex]:
    values: Dict[VarId, object] = dict(x)
    for i, qi in enumerate(q, start=1):
        values[VarId.quantum(i)] = complex(qi)
    return [complex(evaluate(eq, values)) for eq in gu_sharpe_system(shape)]  # type: ignore[arg-type]


# ---------------------------------------------------------------------------
# W_P in gauge coordinates


def _stack(values: object, count: int) -> np.ndarray:
    if isinstance(values, (list, tuple)):
        return np.stack([np.broadcast_to(np.asarray(v, dtype=complex), (count,)) for v in values], axis=-1)
    return np.broadcast_to(np.asarray(values, dtype=complex), (count,)).copy()


def _sum_sympy(parts: Sequence[Expr]) -> sympy.Expr:
    return sympy.Add(*[to_sympy(p) for p in parts]) if parts else sympy.Integer(0)


@dataclass(slots=True)
class GaugeSuperpotential:
    """``W_P`` as exact rational functions of the gauge coordinates, compiled for numpy."""

    shape: FlagShape
    variables: Tuple[VarId, ...]
    quantum: Tuple[VarId, ...]
    terms: Tuple[Expr, ...]
    frozen_keys: Tuple[VarId, ...]
    plucker_keys: Tuple[VarId, ...]
    _value: object = field(repr=False, default=None)
    _gradient: object = field(repr=False, default=None)
    _hessian: object = field(repr=False, default=None)
    _frozen: object = field(repr=False, default=None)
    _pluckers: object = field(repr=False, default=None)

    @property
    def dimension(self) -> int:
        return len(self.variables)

    def _args(self, U: np.ndarray, q: Sequence[complex]) -> List[np.ndarray]:
        U = np.atleast_2d(np.asarray(U, dtype=complex))
        count = U.shape[0]
        return [U[:, k] for k in range(U.shape[1])] + [np.full(count, complex(v)) for v in q]

    def value(self, U: np.ndarray, q: Sequence[complex]) -> np.ndarray:
        U = np.atleast_2d(U)
        return _stack(self._value(*self._args(U, q)), U.shape[0])  # type: ignore[misc]

    def gradient(self, U: np.ndarray, q: Sequence[complex]) -> np.ndarray:
        U = np.atleast_2d(U)
        return _stack(self._gradient(*self._args(U, q)), U.shape[0])  # type: ignore[misc]

    def hessian(self, U: np.ndarray, q: Sequence[complex]) -> np.ndarray:
        U = np.atleast_2d(U)
        d = self.dimension
        flat = _stack(self._hessian(*self._args(U, q)), U.shape[0])  # type: ignore[misc]
        H = np.empty((U.shape[0], d, d), dtype=complex)
        for idx, (j, k) in enumerate(itertools.combinations_with_replacement(range(d), 2)):
            H[:, j, k] = flat[:, idx]
            H[:, k, j] = flat[:, idx]
        return H

    def frozen(self, U: np.ndarray) -> np.ndarray:
        U = np.atleast_2d(U)
        return _stack(self._frozen(*self._args(U, ())), U.shape[0])  # type: ignore[misc]

    def pluckers(self, U: np.ndarray) -> np.ndarray:
        U = np.atleast_2d(U)
        return _stack(self._pluckers(*self._args(U, ())), U.shape[0])  # type: ignore[misc]

    def realize(self, u: np.ndarray) -> YPoint:
        """The point ``[I | U_i]`` for one gauge vector."""

        u = np.asarray(u, dtype=complex)
        factors: List[FactorMatrix] = []
        offset = 0
        for i in self.shape.levels:
            rows, cols = self.shape.r(i), self.shape.r(i - 1) - self.shape.r(i)
            block = u[offset : offset + rows * cols].reshape(rows, cols)
            offset += rows * cols
            matrix = np.hstack([np.eye(rows, dtype=complex), block])
            factors.append(FactorMatrix(i, tuple(tuple(complex(v) for v in row) for row in matrix)))
        return YPoint(tuple(factors))


@lru_cache(maxsize=32)
def gauge_superpotential(shape: FlagShape) -> GaugeSuperpotential:
    """Exact ``W_P``, gradient and Hessian in the gauge chart, compiled with ``lambdify``."""

    start = time.perf_counter()
    chart = chart_pluckers(shape)
    variables = tuple(gauge_variables(shape))
    quantum = tuple(VarId.quantum(i) for i in shape.levels)
    terms: List[Expr] = []
    for term in build_WP(shape).terms:
        numerator = substitute(term.numerator, chart)
        terms.append(numerator / chart[term.denominator])  # type: ignore[operator]
    gradient = [[differentiate(t, v) for t in terms] for v in variables]
    gradient = [[g for g in row if not g.is_zero()] for row in gradient]
    hessian: List[List[Expr]] = []
    for j, k in itertools.combinations_with_replacement(range(len(variables)), 2):
        hessian.append([h for h in (differentiate(g, variables[k]) for g in gradient[j]) if not h.is_zero()])

    frozen_keys = tuple(VarId.plucker(i, lam) for i in shape.levels for lam in enumerate_M(shape.r(i - 1), shape.r(i)))
    plucker_keys = tuple(VarId.plucker(i, lam) for i in shape.levels for lam in enumerate_S(shape.r(i - 1), shape.r(i)))
    args = list(variables) + list(quantum)
    gsp = GaugeSuperpotential(
        shape=shape,
        variables=variables,
        quantum=quantum,
        terms=tuple(terms),
        frozen_keys=frozen_keys,
        plucker_keys=plucker_keys,
        _value=lambdify(_sum_sympy(terms), args),
        _gradient=lambdify([_sum_sympy(row) for row in gradient], args),
        _hessian=lambdify([_sum_sympy(row) for row in hessian], args),
        _frozen=lambdify([chart[v] for v in frozen_keys], list(variables)),
        _pluckers=lambdify([chart[v] for v in plucker_keys], list(variables)),
    )
    LOGGER.debug(
        "gauge_superpotential shape=%s dim=%d terms=%d elapsed_s=%.3f",
        shape.spec,
        len(variables),
        len(terms),
        time.perf_counter() - start,
    )
    return gsp


def candidate_gauge(candidate: CriticalCandidate) -> np.ndarray:
    """Gauge vector of a realisation (pivot ``J(∅)`` in every factor)."""

    pieces = []
    for m in candidate.realization.factors:
        try:
            reduced, _ = float_gauge([list(row) for row in m.rows], list(range(1, m.r + 1)))
        except (ZeroDivisionError, np.linalg.LinAlgError):
            raise OutsideTorusError(f"level {m.level}: the J(∅) minor vanishes") from None
        pieces.append(reduced[:, m.r :].reshape(-1))
    return np.concatenate(pieces) if pieces else np.zeros(0, dtype=complex)


# ---------------------------------------------------------------------------
# gradients


@dataclass(slots=True)
class GradientCheck:
    """Exact-derivative gradient plus its central-difference cross-check."""

    norm: float
    fd_norm: float
    error_h: float
    error_h2: float
    step: float

    @property
    def richardson_ratio(self) -> float:
        if self.error_h2 == 0.0:
            return float("inf")
        return self.error_h / self.error_h2

    def to_json(self) -> dict:
        return {
            "grad_norm": self.norm,
            "fd_norm": self.fd_norm,
            "error_h": self.error_h,
            "error_h2": self.error_h2,
            "step": self.step,
        }


def _central_differences(gsp: GaugeSuperpotential, u: np.ndarray, q: Sequence[complex], h: float) -> np.ndarray:
    d = u.shape[0]
    shifts = np.eye(d, dtype=complex) * h
    plus = gsp.value(u[None, :] + shifts, q)
    minus = gsp.value(u[None, :] - shifts, q)
    return (plus - minus) / (2 * h)


def grad_WP(candidate: CriticalCandidate, shape: Optional[FlagShape] = None, *, step: float = DEFAULT_STEP) -> GradientCheck:
    """Gradient of ``W_P`` at a realisation, in gauge coordinates.

    ``norm`` uses the exact derivative; central differences at ``h`` and
    ``h/2`` are compared against it and Richardson-extrapolated into ``fd_norm``.
    """

    shape = shape or candidate.shape
    gsp = gauge_superpotential(shape)
    u = candidate_gauge(candidate)
    frozen = gsp.frozen(u[None, :])[0]
    if np.min(np.abs(frozen)) < FROZEN_FLOOR:
        raise OutsideTorusError(f"frozen coordinate below {FROZEN_FLOOR:g} at candidate ({candidate.source.value})")
    q = [complex(v) for v in candidate.q]
    exact = gsp.gradient(u[None, :], q)[0]
    fd_h = _central_differences(gsp, u, q, step)
    fd_h2 = _central_differences(gsp, u, q, step / 2)
    richardson = (4 * fd_h2 - fd_h) / 3
    check = GradientCheck(
        norm=float(np.max(np.abs(exact))) if exact.size else 0.0,
        fd_norm=float(np.max(np.abs(richardson))) if richardson.size else 0.0,
        error_h=float(np.max(np.abs(fd_h - exact))) if exact.size else 0.0,
        error_h2=float(np.max(np.abs(fd_h2 - exact))) if exact.size else 0.0,
        step=step,
    )
    candidate.grad_norm = check.norm
    return check


# ---------------------------------------------------------------------------
# Grassmannians


def _karp_candidates(n: int, r: int, q: complex, sign: int) -> List[CriticalCandidate]:
    shape = FlagShape.grassmannian(n, r)
    target = sign * complex(q)
    base = target ** (1.0 / n)
    roots = [base * np.exp(2j * np.pi * k / n) for k in range(n)]
    candidates = []
    for subset in itertools.combinations(roots, r):
        xs = [complex(z) for z in subset]
        x = {VarId.chern_root(1, j): z for j, z in enumerate(xs, start=1)}
        point = YPoint((vandermonde(xs, n),))
        candidates.append(CriticalCandidate(shape, x, (complex(q),), point, CandidateSource.KARP, sign=sign))
    return candidates


def karp_sign_report(n: int, r: int, q: complex) -> Dict[int, float]:
    """Worst gradient norm for both signs ``x^n = ±q``."""

    report = {}
    for sign in (1, -1):
        report[sign] = max(grad_WP(c).norm for c in _karp_candidates(n, r, q, sign))
    return report


def karp_points(n: int, r: int, q: complex, *, sign: str = "auto", tol: Optional[float] = None) -> List[CriticalCandidate]:
    """The ``C(n, r)`` Vandermonde points with ``x_j^n = σ q``.

    ``sign`` is ``"gu-sharpe"`` (``σ = (-1)^{r-1}``), ``"karp"``
    (``σ = (-1)^r``) or ``"auto"``: the sign whose points are critical.
    """

    if complex(q) == 0:
        raise DegenerateParametersError("q must be nonzero")
    tol = tol if tol is not None else numeric_tolerance()
    gu_sharpe = -1 if (r - 1) % 2 else 1
    karp = -gu_sharpe
    if sign == "gu-sharpe":
        chosen = _karp_candidates(n, r, q, gu_sharpe)
    elif sign == "karp":
        chosen = _karp_candidates(n, r, q, karp)
    elif sign == "auto":
        chosen = []
        for sigma in (gu_sharpe, karp):
            trial = _karp_candidates(n, r, q, sigma)
            if all(grad_WP(c).norm < tol for c in trial):
                chosen = trial
                break
        if not chosen:
            warn_once(LOGGER, f"karp-sign-{n}-{r}", "karp_sign n=%d r=%d resolved=none fallback=gu-sharpe", n, r)
            chosen = _karp_candidates(n, r, q, gu_sharpe)
    else:
        raise ValueError(f"unknown sign convention {sign!r}")
    for c in chosen:
        if c.grad_norm is None:
            grad_WP(c)
    LOGGER.debug("karp_points n=%d r=%d sign=%d count=%d", n, r, chosen[0].sign if chosen else 0, len(chosen))
    return chosen


# ---------------------------------------------------------------------------
# Fl(n;2,1)


def _h_in_elementary(m: int, e1: complex, e2: complex) -> List[complex]:
    """Coefficients (highest first) of ``h_m(a, b)`` as a polynomial in ``e1`` for fixed ``e2``."""

    coeffs = [0j] * (m + 1)
    for j in range(m // 2 + 1):
        coeffs[2 * j] = (-1) ** j * comb(m - j, j) * e2**j
    return coeffs


def _polish_cp(n: int, q1: complex, q2: complex, a: complex, b: complex, y: complex, steps: int = 8) -> Tuple[complex, complex, complex]:
    z = np.array([a, b, y], dtype=complex)
    for _ in range(steps):
        a, b, y = z
        F = np.array([a**n + q1 * (y - a), b**n + q1 * (y - b), (y - a) * (y - b) - q2])
        J = np.array(
            [
                [n * a ** (n - 1) - q1, 0, q1],
                [0, n * b ** (n - 1) - q1, q1],
                [-(y - b), -(y - a), 2 * y - a - b],
            ],
            dtype=complex,
        )
        try:
            z = z - np.linalg.solve(J, F)
        except np.linalg.LinAlgError:
            break
    return complex(z[0]), complex(z[1]), complex(z[2])


def cp_points(n: int, q1: complex, q2: complex) -> List[CriticalCandidate]:
    """The ``2·C(n, 2)`` points of ``C_P`` for ``Fl(n; 2, 1)``.

    With ``e1 = a + b`` and ``e2 = ab`` the system reduces to
    ``e2^n = q1² q2`` and ``h_{n-1}(a, b) = q1``; each branch is then polished
    by Newton on the original three equations.
    """

    if n < 3:
        raise DegenerateParametersError(f"Fl(n;2,1) needs n >= 3, got {n}")
    q1c, q2c = complex(q1), complex(q2)
    if q1c * q2c == 0:
        raise DegenerateParametersError("q1*q2 must be nonzero")
    if abs(q1c**2 - q2c ** (n - 1)) < 1e-12 * max(1.0, abs(q1c) ** 2):
        raise DegenerateParametersError(f"q1^2 = q2^(n-1) for n={n}: C_P is not well defined")

    shape = FlagShape(n, (2, 1))
    expected = n * (n - 1)
    found: List[Tuple[complex, complex, complex]] = []
    e2_roots = np.roots([1] + [0] * (n - 1) + [-(q1c**2) * q2c])
    for e2 in e2_roots:
        coeffs = _h_in_elementary(n - 1, 0j, complex(e2))
        coeffs[-1] = coeffs[-1] - q1c
        for e1 in np.roots(coeffs):
            a, b = np.roots([1, -e1, e2])
            a, b = complex(a), complex(b)
            if abs(a - b) < 1e-9:
                continue
            y = a - a**n / q1c
            a, b, y = _polish_cp(n, q1c, q2c, a, b, y)
            if abs(a - b) < 1e-9 or abs(y) < 1e-12:
                continue
            duplicate = any(
                min(abs(a - a2) + abs(b - b2), abs(a - b2) + abs(b - a2)) + abs(y - y2) < 1e-7
                for a2, b2, y2 in found
            )
            if not duplicate:
                found.append((a, b, y))

    candidates = []
    for a, b, y in found:
        x = {VarId.chern_root(1, 1): a, VarId.chern_root(1, 2): b, VarId.chern_root(2, 1): y}
        level2 = FactorMatrix(2, ((1 + 0j, q2c / y),))
        point = YPoint((vandermonde([a, b], n, level=1), level2))
        candidates.append(CriticalCandidate(shape, x, (q1c, q2c), point, CandidateSource.CP))
    LOGGER.debug("cp_points n=%d found=%d expected=%d", n, len(candidates), expected)
    if len(candidates) < expected:
        raise SolverUndercountError(f"cp_points n={n}: found {len(candidates)} of {expected}", len(candidates), expected)
    return candidates


# ---------------------------------------------------------------------------
# multistart search


@dataclass(slots=True)
class CriticalSearch:
    shape: FlagShape
    q: Tuple[complex, ...]
    starts: int
    converged: int
    points: List[CriticalCandidate]
    seed: int
    elapsed_s: float
    best_effort: bool = True

    @property
    def count(self) -> int:
        return len(self.points)

    def to_json(self) -> dict:
        return {
            "shape": self.shape.spec,
            "q": [[z.real, z.imag] for z in self.q],
            "starts": self.starts,
            "seed": self.seed,
            "converged": self.converged,
            "count": self.count,
            "best_effort": self.best_effort,
            "note": "multistart Newton; completeness is not guaranteed",
            "points": [p.to_json() for p in self.points],
        }


def _toric_gradient(gsp: GaugeSuperpotential, U: np.ndarray, q: Sequence[complex]) -> np.ndarray:
    """``u_k ∂W/∂u_k``: the gradient in the coordinates ``t = log u``."""

    with np.errstate(all="ignore"):
        return U * gsp.gradient(U, q)


def _merit(F: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(F, axis=1)
    return np.where(np.isfinite(norms), norms, np.inf)


def _newton_batch(gsp: GaugeSuperpotential, U: np.ndarray, q: Sequence[complex], tol: float) -> Tuple[np.ndarray, np.ndarray]:
    """Damped Newton in ``t = log u`` with a backtracking line search on ``‖u ∇W‖``.

    Every gauge entry is, up to sign, a Plücker coordinate, so critical points
    in ``Y°`` have all entries nonzero and the multiplicative update keeps
    iterates off the coordinate hyperplanes.
    """

    U = U.copy()
    count, d = U.shape
    alphas = np.asarray(LINE_SEARCH)
    alive = np.ones(count, dtype=bool)
    moving = np.ones(count, dtype=bool)
    for _ in range(NEWTON_ITERATIONS):
        idx = np.flatnonzero(alive & moving)
        if idx.size == 0:
            break
        Ua = U[idx]
        with np.errstate(all="ignore"):
            F = _toric_gradient(gsp, Ua, q)
            H = gsp.hessian(Ua, q)
            J = Ua[:, :, None] * H * Ua[:, None, :]
            J[:, np.arange(d), np.arange(d)] += F
        merit = _merit(F)
        finite = np.isfinite(merit) & np.all(np.isfinite(J.reshape(idx.size, -1)), axis=1)
        alive[idx[~finite]] = False
        idx, Ua, F, J, merit = idx[finite], Ua[finite], F[finite], J[finite], merit[finite]
        if idx.size == 0:
            break
        with np.errstate(all="ignore"):
            step = np.einsum("sij,sj->si", np.linalg.pinv(J), F)
        size = np.linalg.norm(step, axis=1)
        step = step * np.minimum(1.0, MAX_LOG_STEP / np.where(size > 0, size, 1.0))[:, None]
        size = np.linalg.norm(step, axis=1)

        with np.errstate(all="ignore"):
            trials = Ua[None, :, :] * np.exp(-alphas[:, None, None] * step[None, :, :])
            trial_merit = _merit(_toric_gradient(gsp, trials.reshape(-1, d), q)).reshape(alphas.size, idx.size)
        accepted = trial_merit <= (1.0 - 1e-4 * alphas[:, None]) * merit[None, :]
        choice = np.where(accepted.any(axis=0), np.argmax(accepted, axis=0), np.argmin(trial_merit, axis=0))
        U[idx] = trials[choice, np.arange(idx.size)]
        moving[idx] = alphas[choice] * size > 1e-13

    with np.errstate(all="ignore"):
        G = gsp.gradient(U, q)
    ok = alive & np.all(np.isfinite(U), axis=1) & np.all(np.isfinite(G), axis=1)
    ok &= np.max(np.abs(np.where(np.isfinite(G), G, np.inf)), axis=1) < tol
    ok &= np.max(np.abs(np.where(np.isfinite(U), U, np.inf)), axis=1) < MAX_COORDINATE
    if ok.any():
        idx = np.flatnonzero(ok)
        with np.errstate(all="ignore"):
            P = np.abs(gsp.pluckers(U[idx]))
        inside = np.all(np.isfinite(P), axis=1) & (np.min(P, axis=1) > FROZEN_FLOOR) & (np.max(P, axis=1) < MAX_COORDINATE)
        ok[idx[~inside]] = False
    return U, ok


def _dedupe(gsp: GaugeSuperpotential, U: np.ndarray) -> List[int]:
    if U.shape[0] == 0:
        return []
    P = gsp.pluckers(U)
    kept: List[int] = []
    for k in range(U.shape[0]):
        scale = 1.0 + np.max(np.abs(P[k]))
        if all(np.max(np.abs(P[k] - P[j])) > DEDUP_TOLERANCE * scale for j in kept):
            kept.append(k)
    return kept


def find_all_critical(
    shape: FlagShape,
    q: Sequence[complex],
    starts: int,
    *,
    seed: int = 0,
    tol: Optional[float] = None,
    max_workers: Optional[int] = None,
) -> CriticalSearch:
    """Best-effort critical set of ``W_P`` by batched multistart Newton.

    Starts are split into chunks of ``NEWTON_CHUNK``; chunk ``k`` draws from the
    stream ``(seed, k)`` so the result does not depend on the worker count.
    Converged points are deduplicated by their Plücker vectors.
    """

    if shape.dimension > MAX_SEARCH_DIMENSION:
        raise ValueError(f"{shape} has dimension {shape.dimension} > {MAX_SEARCH_DIMENSION}")
    tol = tol if tol is not None else numeric_tolerance()
    qc = tuple(complex(v) for v in q)
    gsp = gauge_superpotential(shape)
    d = gsp.dimension
    start_time = time.perf_counter()
    chunks = [min(NEWTON_CHUNK, starts - k) for k in range(0, starts, NEWTON_CHUNK)]

    def run(index: int, size: int) -> np.ndarray:
        rng = trial_generator(seed, index)
        # log-normal moduli, uniform phases: starts sit inside the torus
        U0 = np.exp(START_SPREAD * rng.standard_normal((size, d)) + 2j * np.pi * rng.random((size, d)))
        U, ok = _newton_batch(gsp, U0, qc, tol)
        return U[ok]

    stats = fan_out(run, chunks, max_workers=max_workers, label="newton", logger=LOGGER)
    converged = np.concatenate(stats.results) if stats.results else np.zeros((0, d), dtype=complex)
    kept = _dedupe(gsp, converged)
    points = []
    for k in kept:
        candidate = CriticalCandidate(shape, {}, qc, gsp.realize(converged[k]), CandidateSource.NEWTON)
        candidate.grad_norm = float(np.max(np.abs(gsp.gradient(converged[k][None, :], qc)[0]))) if d else 0.0
        points.append(candidate)
    elapsed = time.perf_counter() - start_time
    LOGGER.info(
        "newton shape=%s starts=%d converged=%d distinct=%d elapsed_s=%.3f",
        shape.spec,
        starts,
        converged.shape[0],
        len(points),
        elapsed,
    )
    return CriticalSearch(shape, qc, starts, int(converged.shape[0]), points, seed, elapsed)


# ---------------------------------------------------------------------------
# quantum cohomology identities for Fl(n;2,1)


@dataclass(slots=True)
class IdentityResiduals:
    goal: float
    square: float
    derivative: float
    gu_sharpe: float

    @property
    def max_residual(self) -> float:
        return max(self.goal, self.square, self.derivative)

    def to_json(self) -> dict:
        return {"goal": self.goal, "square": self.square, "derivative": self.derivative, "gu_sharpe": self.gu_sharpe}


def fl21_chern_roots(candidate: CriticalCandidate) -> Dict[VarId, complex]:
    """Chern roots read off a ``Fl(n; 2, 1)`` realisation.

    ``p¹_□ = x_11 + x_12``, ``p¹_(1,1) = x_11 x_12`` and ``p²_□ = q2 / x_21``.
    """

    values = point_pluckers(candidate.realization)
    e1 = complex(values[VarId.plucker(1, Partition((1,)))])  # type: ignore[arg-type]
    e2 = complex(values[VarId.plucker(1, Partition((1, 1)))])  # type: ignore[arg-type]
    p2 = complex(values[VarId.plucker(2, Partition((1,)))])  # type: ignore[arg-type]
    if p2 == 0:
        raise OutsideTorusError("p^2_(1) vanishes")
    a, b = (complex(z) for z in np.roots([1, -e1, e2]))
    return {
        VarId.chern_root(1, 1): a,
        VarId.chern_root(1, 2): b,
        VarId.chern_root(2, 1): complex(candidate.q[1]) / p2,
    }


def identity_checks(
    n: int,
    candidate: CriticalCandidate,
    *,
    strict: bool = True,
    tol: Optional[float] = None,
    step: float = DEFAULT_STEP,
) -> IdentityResiduals:
    """Residuals of the ``Fl(n; 2, 1)`` relations at a Gu–Sharpe critical point.

    Candidates without Chern roots (Newton points) get them from
    :func:`fl21_chern_roots`.

    ``goal``: ``q1 q2 S¹_(n-3) - (S²_□)² S¹_(n-2,n-2) + q2 S¹_(n-2,n-2)``;
    ``square``: ``(S²_□)² - q2 - S¹_□ S²_□ + S¹_(1,1)``;
    ``derivative``: the central-difference value of ``p²_□ ∂W_P/∂p²_□`` against
    ``q1 p¹_(n-3) p²_□ / p¹_(n-2,n-2) + p²_□ - q2 / p²_□``, scaled by the size
    of the summands.
    """

    tol = tol if tol is not None else numeric_tolerance()
    shape = FlagShape(n, (2, 1))
    q1, q2 = (complex(v) for v in candidate.q)
    x = candidate.x or fl21_chern_roots(candidate)
    a = x[VarId.chern_root(1, 1)]
    b = x[VarId.chern_root(1, 2)]
    y = x[VarId.chern_root(2, 1)]
    gs = max(abs(r) for r in gu_sharpe_residuals(shape, x, (q1, q2)))
    if strict and gs > max(tol, 1e-6) * (1 + abs(q1) + abs(q2)):
        raise ResidualError(f"candidate does not solve the Gu-Sharpe system (residual {gs:.3e})")

    def s1(*parts: int) -> complex:
        return complex(schur_eval(Partition(tuple(parts)), [a, b]))

    top = s1(n - 2, n - 2)
    goal = q1 * q2 * s1(n - 3) - y * y * top + q2 * top
    square = y * y - q2 - s1(1) * y + s1(1, 1)

    wp = build_WP(shape).as_laurent()
    values: Dict[VarId, object] = dict(point_pluckers(candidate.realization))
    values[VarId.quantum(1)] = q1
    values[VarId.quantum(2)] = q2
    target = VarId.plucker(2, Partition((1,)))
    t = complex(values[target])  # type: ignore[arg-type]

    def w_at(value: complex) -> complex:
        values[target] = value
        return complex(evaluate(wp, values))  # type: ignore[arg-type]

    h = step * abs(t) if t else step
    d1 = (w_at(t + h) - w_at(t - h)) / (2 * h)
    d2 = (w_at(t + h / 2) - w_at(t - h / 2)) / h
    derivative = (4 * d2 - d1) / 3
    values[target] = t
    p_low = complex(values[VarId.plucker(1, Partition((n - 3,)) if n > 3 else EMPTY)])  # type: ignore[arg-type]
    p_top = complex(values[VarId.plucker(1, Partition((n - 2, n - 2)))])  # type: ignore[arg-type]
    summands = [q1 * p_low * t / p_top, t, -q2 / t]
    scale = max(1.0, sum(abs(s) for s in summands))
    display = abs(t * derivative - sum(summands)) / scale
    return IdentityResiduals(goal=abs(goal), square=abs(square), derivative=float(display), gu_sharpe=float(gs))
