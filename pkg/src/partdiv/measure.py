"""Groups and finitely supported probability measures on them.

Three groups are modelled: the integers, the cyclic group of order N and a
lattice ``h * Z`` inside the real line.  For the lattice a support point is
stored as its integer multiplier of ``h``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    GroupMismatch,
    MassNotOne,
    NegativeWeight,
    PointOutOfRange,
    SupportOverflow,
)

MASS_TOL = 1e-9
INT64_MAX = 2**63 - 1
# above this span convolution falls back to a sparse dict product
_DENSE_SPAN_LIMIT = 1 << 22


class GroupKind(enum.Enum):
    INTEGERS = "Z"
    CYCLIC = "Z_mod"
    REAL_LATTICE = "R_lattice"


@dataclass(frozen=True)
class GroupSpec:
    kind: GroupKind
    order: int | None = None
    step: float | None = None

    def __post_init__(self):
        if self.kind is GroupKind.CYCLIC:
            if isinstance(self.order, bool) or not isinstance(self.order, int) or self.order < 2:
                raise ValueError(f"cyclic group needs an integer order >= 2, got {self.order!r}")
            if self.step is not None:
                raise ValueError("cyclic group takes no lattice step")
        elif self.kind is GroupKind.REAL_LATTICE:
            if self.step is None or not math.isfinite(self.step) or self.step <= 0:
                raise ValueError(f"lattice step must be finite and > 0, got {self.step!r}")
            if self.order is not None:
                raise ValueError("real lattice takes no order")
            object.__setattr__(self, "step", float(self.step))
        elif self.order is not None or self.step is not None:
            raise ValueError("the integers take neither order nor step")

    @classmethod
    def integers(cls) -> GroupSpec:
        return cls(GroupKind.INTEGERS)

    @classmethod
    def cyclic(cls, order: int) -> GroupSpec:
        return cls(GroupKind.CYCLIC, order=order)

    @classmethod
    def real_lattice(cls, step: float) -> GroupSpec:
        return cls(GroupKind.REAL_LATTICE, step=step)

    @property
    def is_cyclic(self) -> bool:
        return self.kind is GroupKind.CYCLIC

    @property
    def scale(self) -> float:
        """Factor turning a support point into its coordinate in the group."""
        return self.step if self.kind is GroupKind.REAL_LATTICE else 1.0

    @property
    def dual_period(self) -> float:
        """Period of every characteristic function on this group's dual."""
        return 2 * math.pi / self.scale

    def __str__(self):
        if self.kind is GroupKind.CYCLIC:
            return f"Z_{self.order}"
        if self.kind is GroupKind.REAL_LATTICE:
            return f"{self.step:g}Z in R"
        return "Z"


@dataclass(frozen=True)
class Measure:
    """Finitely supported probability measure.

    Build instances with :func:`make_measure`; the constructor itself does not
    validate.  ``atoms`` is sorted by point and holds strictly positive
    weights only.
    """

    group: GroupSpec
    atoms: tuple[tuple[int, float], ...]

    @property
    def points(self) -> np.ndarray:
        return np.array([p for p, _ in self.atoms], dtype=np.int64)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms], dtype=float)

    @property
    def support(self) -> list[int]:
        return [p for p, _ in self.atoms]

    def as_dict(self) -> dict[int, float]:
        return dict(self.atoms)

    def weight(self, point: int) -> float:
        if self.group.is_cyclic:
            point %= self.group.order
        return self.as_dict().get(point, 0.0)

    @property
    def span(self) -> int:
        """Width max(support) - min(support); the degree of the characteristic polynomial."""
        return self.atoms[-1][0] - self.atoms[0][0]

    @property
    def max_abs_point(self) -> int:
        return max(abs(p) for p, _ in self.atoms)

    def __len__(self):
        return len(self.atoms)

    def __str__(self):
        terms = " + ".join(f"{w:.6g}*d[{p}]" for p, w in self.atoms)
        return f"{terms} on {self.group}"


def _check_point(group: GroupSpec, point) -> int:
    if isinstance(point, bool) or not isinstance(point, (int, np.integer)):
        raise TypeError(f"support points must be integers, got {point!r}")
    point = int(point)
    if abs(point) > INT64_MAX:
        raise SupportOverflow(f"support point {point} does not fit in 64 bits")
    if group.is_cyclic and not 0 <= point < group.order:
        raise PointOutOfRange(f"point {point} is outside 0..{group.order - 1} for {group}")
    return point


def make_measure(group: GroupSpec, atoms: Iterable[tuple[int, float]] | Mapping[int, float]) -> Measure:
    """Validate ``atoms`` into a :class:`Measure`.

    Duplicate points are merged.  A total mass off from one by at most 1e-9
    is renormalized away; anything larger raises :class:`MassNotOne`.
    """
    if isinstance(atoms, Mapping):
        atoms = atoms.items()
    merged: dict[int, float] = {}
    count = 0
    for point, weight in atoms:
        count += 1
        point = _check_point(group, point)
        weight = float(weight)
        if not math.isfinite(weight):
            raise ValueError(f"weight at point {point} is not finite")
        if weight < 0:
            raise NegativeWeight(f"weight {weight!r} at point {point} is negative")
        merged[point] = merged.get(point, 0.0) + weight
    if count == 0:
        raise ValueError("a measure needs at least one atom")
    total = math.fsum(merged.values())
    if abs(total - 1.0) > MASS_TOL:
        raise MassNotOne(f"total mass {total!r} differs from 1 by more than {MASS_TOL:g}")
    return _from_dict(group, {p: w / total for p, w in merged.items()})


def _from_dict(group: GroupSpec, weights: Mapping[int, float]) -> Measure:
    atoms = tuple(sorted((int(p), float(w)) for p, w in weights.items() if w > 0))
    return Measure(group, atoms)


def point_mass(group: GroupSpec, point: int = 0) -> Measure:
    return make_measure(group, [(point, 1.0)])


def _same_group(a: Measure, b: Measure) -> GroupSpec:
    if a.group != b.group:
        raise GroupMismatch(f"cannot combine measures on {a.group} and {b.group}")
    return a.group


def _dense(m: Measure) -> tuple[int, np.ndarray]:
    lo = m.atoms[0][0]
    arr = np.zeros(m.span + 1)
    for p, w in m.atoms:
        arr[p - lo] = w
    return lo, arr


def convolve(a: Measure, b: Measure) -> Measure:
    """Convolution of two measures on the same group (sums taken mod N on Z_N)."""
    group = _same_group(a, b)
    lo = a.atoms[0][0] + b.atoms[0][0]
    hi = a.atoms[-1][0] + b.atoms[-1][0]
    if lo < -INT64_MAX - 1 or hi > INT64_MAX:
        raise SupportOverflow(f"convolution support [{lo}, {hi}] leaves the 64-bit range")

    if group.is_cyclic:
        n = group.order
        wa = np.zeros(n)
        wb = np.zeros(n)
        for p, w in a.atoms:
            wa[p] = w
        for p, w in b.atoms:
            wb[p] = w
        full = np.convolve(wa, wb)
        out = full[:n].copy()
        out[: len(full) - n] += full[n:]
        return _from_dict(group, dict(enumerate(out)))

    if a.span + b.span < _DENSE_SPAN_LIMIT:
        la, da = _dense(a)
        lb, db = _dense(b)
        out = np.convolve(da, db)
        return _from_dict(group, {la + lb + i: w for i, w in enumerate(out)})

    acc: dict[int, float] = {}
    for p, w in a.atoms:
        for q, v in b.atoms:
            acc[p + q] = acc.get(p + q, 0.0) + w * v
    return _from_dict(group, acc)


def convolve_power(a: Measure, n: int) -> Measure:
    """n-fold self-convolution by repeated squaring."""
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"convolution power must be a positive integer, got {n!r}")
    result = None
    base = a
    n = int(n)
    while True:
        if n & 1:
            result = base if result is None else convolve(result, base)
        n >>= 1
        if not n:
            return result
        base = convolve(base, base)


def total_variation(a: Measure, b: Measure) -> float:
    _same_group(a, b)
    da, db = a.as_dict(), b.as_dict()
    return 0.5 * math.fsum(abs(da.get(p, 0.0) - db.get(p, 0.0)) for p in set(da) | set(db))


def poisson_type(jump: Measure, rate: float, tail_tol: float = 1e-18) -> Measure:
    """Truncated exponential construction exp(rate * (jump - delta_0)).

    The series sum_k e^{-rate} rate^k / k! jump^{*k} is cut once the terms are
    decreasing and the current one is below ``tail_tol``.  With
    ``jump = delta_1`` this is the Poisson law with the given rate.
    """
    if rate <= 0 or not math.isfinite(rate):
        raise ValueError("rate must be a positive finite number")
    acc: dict[int, float] = {}
    term = point_mass(jump.group, 0)
    coeff = math.exp(-rate)
    k = 0
    while True:
        for p, w in term.atoms:
            acc[p] = acc.get(p, 0.0) + coeff * w
        k += 1
        if k > 2 * rate + 1 and coeff < tail_tol:
            break
        coeff *= rate / k
        term = convolve(term, jump)
    return make_measure(jump.group, acc)


def rational(m: int, n: int) -> Fraction:
    """Positive reduced fraction m/n."""
    if m <= 0 or n <= 0:
        raise ValueError(f"m/n needs positive integers, got {m}/{n}")
    return Fraction(m, n)
