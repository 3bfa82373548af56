"""Sampling Lambda(mu) over a grid of t and the necessary conditions on Lambda^alg(mu).

Zero-bearing measures get the lower bound t0 = max 1/k over zero orders k;
measures on Z without zeros but with winding number w get the lattice
constraint Lambda^alg ⊆ (1/|w|) N.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .dual import char_fn, find_zeros, second_characteristic
from .errors import NoZeros, NotAdmissible
from .fractional import DEFAULT_TOLERANCES, MembershipVerdict, Tolerances, Verdict, fractional_power
from .measure import Measure

GRID_MATCH_TOL = 1e-9
LIMSUP_LADDER = tuple(2.0**-k for k in range(5, 21))


@dataclass(frozen=True)
class GridPoint:
    value: float
    label: str

    @property
    def is_integer(self) -> bool:
        return abs(self.value - round(self.value)) < GRID_MATCH_TOL


def t_grid(t_max: float, n_max: int, mesh: float | None) -> list[GridPoint]:
    """Sorted grid of every m/n (n <= n_max) up to t_max plus the multiples of ``mesh``.

    Rational points carry an exact "m/n" label; mesh points that coincide
    with a rational (to 1e-9) are merged into it.
    """
    points: dict[Fraction, GridPoint] = {}
    for n in range(1, n_max + 1):
        for m in range(1, math.floor(t_max * n + GRID_MATCH_TOL) + 1):
            q = Fraction(m, n)
            if q not in points:
                label = str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
                points[q] = GridPoint(float(q), label)
    out = sorted(points.values(), key=lambda p: p.value)
    if mesh:
        values = [p.value for p in out]
        k = 1
        while k * mesh <= t_max + GRID_MATCH_TOL:
            x = k * mesh
            i = int(np.searchsorted(values, x))
            near = [j for j in (i - 1, i) if 0 <= j < len(values) and abs(values[j] - x) < GRID_MATCH_TOL]
            if not near:
                values.insert(i, x)
                out.insert(i, GridPoint(x, repr(round(x, 12))))
            k += 1
    return out


@dataclass(frozen=True)
class StructureSummary:
    min_member: float | None
    all_member: bool
    semigroup_violations: list[tuple[float, float]]
    tail_start: float | None
    inconclusive: list[float] = field(default_factory=list)


@dataclass(frozen=True, eq=False)
class LambdaReport:
    grid: list[GridPoint]
    verdicts: list[MembershipVerdict]
    summary: StructureSummary | None = None

    @property
    def t_grid(self) -> list[float]:
        return [p.value for p in self.grid]

    def members(self) -> list[float]:
        return [p.value for p, v in zip(self.grid, self.verdicts) if v.verdict is Verdict.MEMBER]

    def verdict_at(self, t: float) -> MembershipVerdict:
        for p, v in zip(self.grid, self.verdicts):
            if abs(p.value - t) < GRID_MATCH_TOL:
                return v
        raise KeyError(t)


def _workers() -> int:
    if os.environ.get("PARTDIV_SINGLE_THREAD"):
        return 1
    return min(8, os.cpu_count() or 1)


def _evaluate(fn: Callable[[float], MembershipVerdict], grid: Sequence[GridPoint], workers: int | None):
    workers = _workers() if workers is None else workers
    if workers <= 1:
        return [fn(p.value) for p in grid]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, (p.value for p in grid)))


def lambda_scan(
    mu: Measure,
    t_max: float = 3.0,
    n_max: int = 8,
    mesh: float | None = 0.05,
    n_points: int = 1024,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    workers: int | None = None,
) -> LambdaReport:
    """Evaluate the membership test on the grid from :func:`t_grid`."""
    if t_max < 1:
        raise ValueError("t_max must be at least 1")
    if not 1 <= n_max <= 12:
        raise ValueError("n_max must lie in 1..12")
    if mesh is not None and not 1e-3 <= mesh <= 0.5:
        raise ValueError("mesh must lie in [1e-3, 0.5]")
    grid = t_grid(t_max, n_max, mesh)
    # admissibility is checked once up front so a bad input fails fast
    first = fractional_power(mu, grid[0].value, n_points, tolerances)

    def one(t):
        return fractional_power(mu, t, n_points, tolerances)

    verdicts = [first] + _evaluate(one, grid[1:], workers)
    report = LambdaReport(grid, verdicts)
    return LambdaReport(grid, verdicts, summarize(report))


def _tail_start(values, verdicts) -> float | None:
    start = None
    for x, v in zip(reversed(values), reversed(verdicts)):
        if v.verdict is not Verdict.MEMBER:
            break
        start = x
    if start is None:
        return None
    run = sum(1 for x in values if x >= start)
    # a single trailing member point is not an interval of members
    return start if run >= 2 else None


def summarize(report: LambdaReport) -> StructureSummary:
    values = np.array(report.t_grid)
    verdicts = report.verdicts
    members = [x for x, v in zip(values, verdicts) if v.verdict is Verdict.MEMBER]
    inconclusive = [float(x) for x, v in zip(values, verdicts) if v.verdict is Verdict.INCONCLUSIVE]
    all_member = len(members) == len(values)

    violations = []
    for i, s in enumerate(members):
        for t in members[i:]:
            j = int(np.searchsorted(values, s + t - GRID_MATCH_TOL))
            if j < len(values) and abs(values[j] - (s + t)) < GRID_MATCH_TOL:
                if verdicts[j].verdict is Verdict.NON_MEMBER:
                    violations.append((float(s), float(t)))
    return StructureSummary(
        min_member=float(members[0]) if members else None,
        all_member=all_member,
        semigroup_violations=violations,
        tail_start=_tail_start(values.tolist(), verdicts),
        inconclusive=inconclusive,
    )


# ------------------------------------------------------------ zero-order bound


def t0_lower_bound(mu: Measure) -> float:
    """max over zeros of 1/order; Lambda^alg(mu) lies in [t0, oo)."""
    zeros = find_zeros(mu)
    if not zeros:
        raise NoZeros(f"characteristic function of {mu} has no zeros")
    return max(1.0 / z.order for z in zeros)


@dataclass(frozen=True)
class LimsupEstimate:
    location: float
    order_estimate: float
    t0_estimate: float


def t0_limsup_diagnostic(mu: Measure, ladder: Sequence[float] = LIMSUP_LADDER) -> list[LimsupEstimate]:
    """Cross-check of :func:`t0_lower_bound` from the decay of |f| near each zero.

    |f(zero + s)| ~ c s^k, so the least-squares slope of log|f| against log s
    over the ladder estimates k, and t |-> s^{tk - 1} blows up exactly for
    t < 1/k.
    """
    zeros = find_zeros(mu)
    if not zeros:
        raise NoZeros(f"characteristic function of {mu} has no zeros")
    s = np.asarray(ladder, dtype=float)
    out = []
    for z in zeros:
        mod = np.abs(char_fn(mu, z.location + s))
        slope = np.polyfit(np.log(s), np.log(mod), 1)[0]
        out.append(LimsupEstimate(z.location, float(slope), float(1.0 / slope)))
    return out


# ---------------------------------------------------------- winding constraints


@dataclass(frozen=True)
class ConstraintSet:
    """Necessary conditions on Lambda^alg from a winding number ``w``.

    For w != 0: Lambda^alg ⊆ union over n | w of (1/n) N, ⊆ (1/|w|) N, and
    is bounded below by 1/|w|.  For w = 0 there is no obstruction.
    """

    winding: int
    divisor_union: tuple[int, ...]
    intersection_lattice: int | None
    lower_bound: float | None
    no_obstruction: bool

    def describe(self) -> str:
        if self.no_obstruction:
            return "no winding obstruction"
        w = self.intersection_lattice
        return f"Lambda^alg ⊆ (1/{w})N, bounded below by 1/{w}"


def divisors(n: int) -> tuple[int, ...]:
    n = abs(n)
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return tuple(sorted(set(small) | {n // d for d in small}))


def winding_constraints(w: int) -> ConstraintSet:
    if w == 0:
        return ConstraintSet(0, (), None, None, True)
    return ConstraintSet(w, divisors(w), abs(w), 1.0 / abs(w), False)


def rational_in_constraints(q: Fraction, c: ConstraintSet) -> bool:
    """Whether q lies in (1/|w|) N, i.e. its reduced denominator divides |w|."""
    q = Fraction(q)
    if q <= 0:
        raise ValueError("q must be positive")
    if c.no_obstruction:
        return True
    return c.intersection_lattice % q.denominator == 0


def require_admissible(mu: Measure):
    sc = second_characteristic(mu)
    if not sc.admissible:
        raise NotAdmissible(f"{mu} is not admissible ({sc.failure_reason.value})")
    return sc
