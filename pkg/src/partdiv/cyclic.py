"""Exact divisibility on Z_N, where the dual group is discrete.

On a disconnected dual every choice of branch ``psi + 2 pi i k`` (with k
vanishing at the trivial character) is an equally valid logarithm, so roots
are found by enumerating phases of the DFT values rather than by lifting.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .errors import SearchTooLarge, WrongGroup, ZeroCharacterValue
from .fractional import DEFAULT_TOLERANCES, NOISE_FLOOR, MembershipVerdict, Tolerances, _classify, _cyclic_power
from .measure import GroupKind, GroupSpec, Measure, _from_dict, convolve_power, make_measure, total_variation
from .scan import GridPoint, LambdaReport, summarize

ROOT_NEG_TOL = 1e-9
ROOT_CHECK_TOL = 1e-9
ZERO_VALUE_TOL = 1e-12
K_MAX = 6
MAX_ORDER = 8
MAX_ROOT = 6


def _require_cyclic(mu: Measure) -> int:
    if mu.group.kind is not GroupKind.CYCLIC:
        raise WrongGroup(f"expected a measure on Z_N, got one on {mu.group}")
    return mu.group.order


def _weight_vector(mu: Measure) -> np.ndarray:
    w = np.zeros(mu.group.order)
    for p, x in mu.atoms:
        w[p] = x
    return w


def cyclic_char_fn(mu: Measure) -> np.ndarray:
    """DFT values mu^(chi_j) = sum_x w_x exp(2 pi i j x / N), j = 0..N-1."""
    n = _require_cyclic(mu)
    return n * np.fft.ifft(_weight_vector(mu))


def inverse_char_fn(values: Sequence[complex]) -> np.ndarray:
    """Inverse of :func:`cyclic_char_fn`: complex weights from character values."""
    values = np.asarray(values, dtype=complex)
    return np.fft.fft(values) / len(values)


def z2_nth_root(alpha: float, n: int) -> float | None:
    """Weight beta at 0 of the n-th root of alpha*d0 + (1-alpha)*d1 on Z_2, if any.

    The root must satisfy (2 beta - 1)^n = 2 alpha - 1, which has a real
    solution unless 2 alpha - 1 < 0 and n is even.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha!r}")
    if n < 1:
        raise ValueError("n must be a positive integer")
    v = 2.0 * alpha - 1.0
    if v < 0 and n % 2 == 0:
        return None
    return (1.0 + math.copysign(abs(v) ** (1.0 / n), v)) / 2.0


@dataclass(frozen=True)
class RootSet:
    n: int
    roots: tuple[Measure, ...]
    exhaustive: bool
    candidates_tried: int = 0


def _roots_of_value(v: complex, n: int) -> list[complex]:
    if abs(v) <= ZERO_VALUE_TOL:
        return [0j]
    r = abs(v) ** (1.0 / n)
    phi = math.atan2(v.imag, v.real)
    return [r * complex(math.cos((phi + 2 * math.pi * m) / n), math.sin((phi + 2 * math.pi * m) / n)) for m in range(n)]


def _real_roots_of_value(v: float, n: int) -> list[float]:
    if abs(v) <= ZERO_VALUE_TOL:
        return [0.0]
    r = abs(v) ** (1.0 / n)
    if n % 2:
        return [math.copysign(r, v)]
    return [r, -r] if v > 0 else []


def cyclic_nth_roots(mu: Measure, n: int) -> RootSet:
    """Every n-th convolution root of ``mu`` on Z_N, by exhaustive phase search.

    Character values come in conjugate pairs (j, N-j) for a real measure, so
    only the first of each pair is enumerated; the self-conjugate character
    N/2 (N even) only admits real roots.
    """
    order = _require_cyclic(mu)
    if order > MAX_ORDER or n > MAX_ROOT or n < 1:
        raise SearchTooLarge(f"search limited to N <= {MAX_ORDER}, 1 <= n <= {MAX_ROOT}; got N={order}, n={n}")
    values = cyclic_char_fn(mu)
    paired = list(range(1, (order - 1) // 2 + 1))
    choices = [_roots_of_value(values[j], n) for j in paired]
    if order % 2 == 0:
        choices.append(_real_roots_of_value(values[order // 2].real, n))

    roots = []
    tried = 0
    for combo in itertools.product(*choices):
        tried += 1
        cand = np.zeros(order, dtype=complex)
        cand[0] = 1.0
        for j, r in zip(paired, combo):
            cand[j] = r
            cand[order - j] = np.conj(r)
        if order % 2 == 0:
            cand[order // 2] = combo[-1]
        weights = inverse_char_fn(cand).real
        if weights.min() < -ROOT_NEG_TOL:
            continue
        weights = np.where(weights < NOISE_FLOOR, 0.0, weights)
        weights /= weights.sum()
        nu = _from_dict(mu.group, dict(enumerate(weights)))
        if total_variation(convolve_power(nu, n), mu) <= ROOT_CHECK_TOL:
            roots.append(nu)
    return RootSet(n, tuple(roots), True, tried)


class Delta1Membership(NamedTuple):
    """Both membership predicates for q in Lambda^alg(delta_1) on Z_N.

    ``brute`` decides existence of nu with nu^l = delta_1^m exactly (nu must
    be a point mass delta_j with j l = m mod N); ``closed_form_rule`` is the
    closed-form condition m = l mod N.  They are returned side by side
    because they disagree, e.g. at N = 3, q = 1/2.
    """

    brute: bool
    closed_form_rule: bool
    witnesses: tuple[int, ...]

    @property
    def witness(self) -> int | None:
        return self.witnesses[0] if self.witnesses else None

    @property
    def discrepancy(self) -> bool:
        return self.brute != self.closed_form_rule


def delta1_membership(order: int, q: Fraction) -> Delta1Membership:
    q = Fraction(q)
    if order < 2 or order > 50:
        raise ValueError("N must lie in 2..50")
    if q <= 0 or q.denominator > 50:
        raise ValueError("q must be a positive rational with denominator <= 50")
    m, l = q.numerator, q.denominator
    witnesses = tuple(j for j in range(order) if (j * l - m) % order == 0)
    return Delta1Membership(bool(witnesses), (m - l) % order == 0, witnesses)


@dataclass(frozen=True)
class BranchAssignment:
    k: tuple[int, ...]
    k_max: int = K_MAX

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(int(x) for x in self.k))
        if not self.k or self.k[0] != 0:
            raise ValueError("branch assignment must vanish at the trivial character")
        if any(abs(x) > self.k_max for x in self.k):
            raise ValueError(f"branch indices are limited to |k| <= {self.k_max}")

    @classmethod
    def principal(cls, order: int) -> BranchAssignment:
        return cls((0,) * order)


def branch_log(mu: Measure, k: BranchAssignment) -> np.ndarray:
    """psi_k = principal log of the DFT values + 2 pi i k."""
    order = _require_cyclic(mu)
    if len(k.k) != order:
        raise ValueError(f"branch assignment has {len(k.k)} entries, group has {order} characters")
    values = cyclic_char_fn(mu)
    bad = np.nonzero(np.abs(values) <= ZERO_VALUE_TOL)[0]
    if len(bad):
        raise ZeroCharacterValue(f"characteristic function vanishes at characters {bad.tolist()}")
    return np.log(values) + 2j * math.pi * np.asarray(k.k)


def branch_power(mu: Measure, k: BranchAssignment, t: float, tolerances: Tolerances = DEFAULT_TOLERANCES) -> MembershipVerdict:
    psi = branch_log(mu, k)
    pts, vals, cmin, argmin, mass, imag = _cyclic_power(psi, t)
    verdict = _classify(cmin, None, mass, imag, tolerances)
    return MembershipVerdict(float(t), verdict, cmin, argmin, mass, imag, len(pts), pts, vals, mu.group, tolerances)


def lambda_k_scan(
    mu: Measure,
    k: BranchAssignment,
    t_grid: Sequence[float | Fraction | GridPoint],
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> LambdaReport:
    """Membership of exp(t psi_k) on the given grid of t."""
    branch_log(mu, k)
    grid = []
    for t in t_grid:
        if isinstance(t, GridPoint):
            grid.append(t)
        elif isinstance(t, Fraction):
            label = str(t.numerator) if t.denominator == 1 else f"{t.numerator}/{t.denominator}"
            grid.append(GridPoint(float(t), label))
        else:
            grid.append(GridPoint(float(t), repr(float(t))))
    grid.sort(key=lambda p: p.value)
    verdicts = [branch_power(mu, k, p.value, tolerances) for p in grid]
    report = LambdaReport(grid, verdicts)
    return LambdaReport(grid, verdicts, summarize(report))


def z2_measure(alpha: float) -> Measure:
    return make_measure(GroupSpec.cyclic(2), [(0, alpha), (1, 1.0 - alpha)])
