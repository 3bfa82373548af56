"""Fractional convolution powers exp(t * psi) and the membership test for Lambda(mu).

A power is accepted when the inverse transform of ``exp(t * psi)`` is a
probability vector up to rounding.  Because the coefficients generally have
infinite support on Z, the transform grid is doubled until the smallest
coefficient is stable, and the verdict is three-way so that boundary cases
are reported instead of guessed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .dual import MAX_GRID, _circle_lift, _next_power_of_two, find_zeros, second_characteristic
from .errors import Inconclusive, NotAdmissible, NotAMember, UnsupportedGroup
from .measure import GroupKind, GroupSpec, Measure, _from_dict

NEG_TOL = 1e-9
STRICT_TOL = 1e-7
MASS_TOL = 1e-9
STABLE_TOL = 1e-11
# coefficients below this are rounding noise and are not kept as atoms of a root
NOISE_FLOOR = 1e-15


class Verdict(enum.Enum):
    MEMBER = "MEMBER"
    NON_MEMBER = "NON_MEMBER"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class Tolerances:
    neg_tol: float = NEG_TOL
    strict_tol: float = STRICT_TOL
    mass_tol: float = MASS_TOL
    stable_tol: float = STABLE_TOL

    def as_dict(self) -> dict:
        return {
            "neg_tol": self.neg_tol,
            "strict_tol": self.strict_tol,
            "mass_tol": self.mass_tol,
            "stable_tol": self.stable_tol,
        }


DEFAULT_TOLERANCES = Tolerances()


@dataclass(frozen=True, eq=False)
class MembershipVerdict:
    t: float
    verdict: Verdict
    min_coefficient: float
    min_point: int
    mass_defect: float
    imag_defect: float
    grid_used: int
    candidate_points: np.ndarray = field(repr=False)
    candidate_values: np.ndarray = field(repr=False)
    group: GroupSpec | None = field(default=None, repr=False)
    tolerances: Tolerances = field(default=DEFAULT_TOLERANCES, repr=False)

    @property
    def is_member(self) -> bool:
        return self.verdict is Verdict.MEMBER

    @property
    def candidate(self) -> dict[int, float]:
        return dict(zip(self.candidate_points.tolist(), self.candidate_values.tolist()))

    def coefficient(self, point: int) -> float:
        hit = np.nonzero(self.candidate_points == point)[0]
        return float(self.candidate_values[hit[0]]) if len(hit) else 0.0


def _classify(min_now, min_prev, mass_defect, imag_defect, tol: Tolerances) -> Verdict:
    if min_now >= -tol.neg_tol and mass_defect <= tol.mass_tol and imag_defect <= tol.neg_tol:
        return Verdict.MEMBER
    rejected_now = min_now < -tol.strict_tol or imag_defect > tol.strict_tol
    rejected_prev = min_prev is None or min_prev < -tol.strict_tol or imag_defect > tol.strict_tol
    if rejected_now and rejected_prev:
        return Verdict.NON_MEMBER
    if mass_defect > tol.strict_tol:
        return Verdict.NON_MEMBER
    return Verdict.INCONCLUSIVE


def _signed_points(n: int) -> np.ndarray:
    k = np.arange(n)
    return np.where(k < n - n // 2, k, k - n)


def _coefficients(transform: np.ndarray, points: np.ndarray):
    order = np.argsort(points)
    points = points[order]
    transform = transform[order]
    real = transform.real
    imag_defect = float(np.max(np.abs(transform.imag)))
    i = int(np.argmin(real))
    mass_defect = abs(math.fsum(real) - 1.0)
    return points, real, float(real[i]), int(points[i]), mass_defect, imag_defect


def _cyclic_power(psi: np.ndarray, t: float):
    n = len(psi)
    transform = np.fft.fft(np.exp(t * psi)) / n
    return _coefficients(transform, np.arange(n))


def _circle_power(mu: Measure, t: float, n: int):
    theta, vals, steps = _circle_lift(mu, n)
    n = len(theta)
    phase = np.concatenate(([0.0], np.cumsum(steps[:-1])))
    psi = np.log(np.abs(vals)) + 1j * phase
    transform = np.fft.fft(np.exp(t * psi)) / n
    return n, _coefficients(transform, _signed_points(n))


def _as_integer_measure(mu: Measure) -> Measure:
    return Measure(GroupSpec.integers(), mu.atoms)


def fractional_power(
    mu: Measure,
    t: float,
    n_points: int = 1024,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> MembershipVerdict:
    """Decide whether exp(t * psi) is a characteristic function and return its coefficients."""
    t = float(t)
    if not (t > 0 and math.isfinite(t)):
        raise ValueError(f"t must be positive and finite, got {t!r}")
    group = mu.group

    if group.kind is GroupKind.CYCLIC:
        sc = second_characteristic(mu)
        if not sc.admissible:
            raise NotAdmissible(f"characteristic function of {mu} has zeros")
        pts, vals, cmin, argmin, mass, imag = _cyclic_power(sc.psi, t)
        verdict = _classify(cmin, None, mass, imag, tolerances)
        return MembershipVerdict(t, verdict, cmin, argmin, mass, imag, len(pts), pts, vals, group, tolerances)

    if find_zeros(mu):
        raise NotAdmissible(f"characteristic function of {mu} has zeros")
    base = mu
    if group.kind is GroupKind.REAL_LATTICE:
        base = _as_integer_measure(mu)
        if second_characteristic(base, n_points).winding != 0:
            raise UnsupportedGroup(
                "psi is not periodic over one lattice period, so exp(t psi) is not lattice supported"
            )
    else:
        sc = second_characteristic(mu, n_points)
        if not sc.admissible:
            raise NotAdmissible(f"{mu} has winding number {sc.winding}")

    n = max(n_points, 16)
    n = _next_power_of_two(n)
    n, prev = _circle_power(base, t, n)
    while True:
        n2, cur = _circle_power(base, t, 2 * n)
        stable = abs(cur[2] - prev[2]) < tolerances.stable_tol
        n = n2
        if stable or 2 * n > MAX_GRID:
            break
        prev = cur
    pts, vals, cmin, argmin, mass, imag = cur
    verdict = _classify(cmin, prev[2], mass, imag, tolerances)
    if not stable and verdict is Verdict.MEMBER:
        verdict = Verdict.INCONCLUSIVE
    return MembershipVerdict(t, verdict, cmin, argmin, mass, imag, n, pts, vals, group, tolerances)


def is_member(mu: Measure, t: float, n_points: int = 1024, tolerances: Tolerances = DEFAULT_TOLERANCES) -> bool:
    v = fractional_power(mu, t, n_points, tolerances)
    if v.verdict is Verdict.INCONCLUSIVE:
        raise Inconclusive(
            f"t={t!r}: min coefficient {v.min_coefficient:.3e} lies between the accept and reject tolerances",
            v,
        )
    return v.is_member


@dataclass(frozen=True, eq=False)
class RootResult:
    root: Measure
    verdict: MembershipVerdict
    clipped_mass: float
    dropped_mass: float


def measure_from_candidate(v: MembershipVerdict) -> tuple[Measure, float, float]:
    """Clip a MEMBER candidate to a probability measure.

    Returns the measure, the negative mass removed by clipping and the
    positive mass below the noise floor that was dropped.
    """
    vals = v.candidate_values
    negative = float(-vals[vals < 0].sum())
    small = (vals >= 0) & (vals < NOISE_FLOOR)
    dropped = float(vals[small].sum())
    keep = vals >= NOISE_FLOOR
    total = math.fsum(vals[keep])
    weights = {int(p): float(w) / total for p, w in zip(v.candidate_points[keep], vals[keep])}
    return _from_dict(v.group, weights), negative, dropped


def nth_root(mu: Measure, n: int, n_points: int = 1024, tolerances: Tolerances = DEFAULT_TOLERANCES) -> RootResult:
    """The unique n-th convolution root with its diagnostics."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    v = fractional_power(mu, 1.0 / n, n_points, tolerances)
    if v.verdict is Verdict.INCONCLUSIVE:
        raise Inconclusive(f"membership of 1/{n} is inconclusive", v)
    if v.verdict is Verdict.NON_MEMBER:
        raise NotAMember(f"1/{n} is not in Lambda(mu): coefficient {v.min_coefficient:.3e} at {v.min_point}")
    root, clipped, dropped = measure_from_candidate(v)
    return RootResult(root, v, clipped, dropped)


def nth_root_admissible(mu: Measure, n: int, n_points: int = 1024) -> Measure:
    return nth_root(mu, n, n_points).root
