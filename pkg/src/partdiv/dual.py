"""Characteristic functions on the dual group: sampling, zeros, winding, lifting.

Dual coordinates are radians.  For the integers the dual is the circle
``[0, 2pi)``; for a step-``h`` lattice the characteristic function is
``2pi/h``-periodic in ``y`` and windows are taken symmetric around 0; for
``Z_N`` the dual is the N characters ``2pi j / N``.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BadGridSize,
    HasZeros,
    NoConvergence,
    OrderTooHigh,
    OrderUndetermined,
    WrongGroup,
)
from .measure import GroupKind, Measure

ZERO_TOL = 1e-10
ORDER_TOL = 1e-8
MAX_ORDER = 12
MAX_GRID = 1 << 20
SAFE_PHASE_STEP = math.pi / 2
TWO_PI = 2 * math.pi


class FailureReason(enum.Enum):
    HAS_ZEROS = "HasZeros"
    NONZERO_WINDING = "NonzeroWinding"


@dataclass(frozen=True, eq=False)
class DualGrid:
    group: object
    points: np.ndarray
    values: np.ndarray

    def __len__(self):
        return len(self.points)

    @property
    def trivial_index(self) -> int:
        return int(np.argmin(np.abs(self.points)))


@dataclass(frozen=True)
class ZeroPoint:
    location: float
    order: int
    leading_coefficient: float


@dataclass(frozen=True, eq=False)
class SecondCharacteristic:
    grid: DualGrid
    psi: np.ndarray | None
    winding: int
    admissible: bool
    failure_reason: FailureReason | None = None
    # Im psi gained over one full turn of the circle (integers only)
    loop_increment: float = 0.0


def _effective_points(mu: Measure) -> np.ndarray:
    return mu.points.astype(float) * mu.group.scale


def char_fn(mu: Measure, theta):
    """Characteristic function sum_x w_x exp(i x theta); vectorized over ``theta``."""
    th = np.asarray(theta, dtype=float)
    x = _effective_points(mu)
    vals = np.exp(1j * np.multiply.outer(th, x)) @ mu.weights
    return complex(vals) if vals.ndim == 0 else vals


def char_fn_derivative(mu: Measure, theta, order: int):
    """Exact ``order``-th derivative of :func:`char_fn` in the dual coordinate."""
    if order < 0:
        raise ValueError("derivative order must be non-negative")
    if order > MAX_ORDER:
        raise OrderTooHigh(f"derivative order {order} exceeds {MAX_ORDER}")
    th = np.asarray(theta, dtype=float)
    x = _effective_points(mu)
    coeff = mu.weights * (1j * x) ** order
    vals = np.exp(1j * np.multiply.outer(th, x)) @ coeff
    return complex(vals) if vals.ndim == 0 else vals


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def _next_power_of_two(n: int) -> int:
    return 1 << max(0, math.ceil(math.log2(max(n, 1))))


def sample_char_fn(mu: Measure, n_points: int = 1024, window: float | None = None) -> DualGrid:
    """Sample the characteristic function on a uniform dual grid.

    Integers: ``n_points`` (a power of two, >= 16) points on ``[0, 2pi)``.
    Lattice: ``n_points + 1`` points on ``[-window, window]`` (``n_points``
    even, so 0 is a grid point).  Cyclic: all N characters, ``n_points``
    ignored.
    """
    kind = mu.group.kind
    if (window is not None) != (kind is GroupKind.REAL_LATTICE):
        raise BadGridSize("a window is required for lattice measures and only for them")
    if kind is GroupKind.CYCLIC:
        n = mu.group.order
        points = TWO_PI * np.arange(n) / n
    elif kind is GroupKind.INTEGERS:
        if n_points < 16 or not _is_power_of_two(n_points):
            raise BadGridSize(f"grid size must be a power of two >= 16, got {n_points}")
        points = TWO_PI * np.arange(n_points) / n_points
    else:
        if n_points < 16 or n_points % 2:
            raise BadGridSize(f"grid size must be even and >= 16, got {n_points}")
        if not (window > 0 and math.isfinite(window)):
            raise BadGridSize(f"window must be positive and finite, got {window!r}")
        points = np.linspace(-window, window, n_points + 1)
        points[n_points // 2] = 0.0
    return DualGrid(mu.group, points, char_fn(mu, points))


# ---------------------------------------------------------------- zeros


def _order_at(mu: Measure, loc: float, order_tol: float) -> int:
    for j in range(1, MAX_ORDER + 1):
        if abs(char_fn_derivative(mu, loc, j)) > order_tol:
            return j
    raise OrderUndetermined(f"all derivatives up to order {MAX_ORDER} vanish at {loc!r}")


def _bisect_stationary(mu: Measure, j: int, a: float, b: float) -> float | None:
    """Minimize |f^(j)|^2 on [a, b] by bisection on the sign of its derivative."""

    def slope(t):
        return (np.conj(char_fn_derivative(mu, t, j)) * char_fn_derivative(mu, t, j + 1)).real

    sa, sb = slope(a), slope(b)
    if not (sa < 0 < sb):
        return None
    for _ in range(200):
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        sm = slope(mid)
        if sm < 0:
            a = mid
        elif sm > 0:
            b = mid
        else:
            return mid
    return 0.5 * (a + b)


def _refine_zero(mu, grid, i, zero_tol, order_tol, max_order):
    step = grid[1] - grid[0]
    # the order of a zero is the multiplicity of a root of the characteristic
    # polynomial, so the j = k-1 derivative has a simple, well-conditioned root
    for k in range(max_order, 0, -1):
        for width in (1, 2):
            loc = _bisect_stationary(mu, k - 1, grid[i] - width * step, grid[i] + width * step)
            if loc is not None:
                break
        if loc is None or abs(char_fn(mu, loc)) > zero_tol:
            continue
        if _order_at(mu, loc, order_tol) == k:
            return loc, k
    if abs(char_fn(mu, grid[i])) <= zero_tol:
        return float(grid[i]), _order_at(mu, float(grid[i]), order_tol)
    return None


def _zero_point(mu: Measure, loc: float, k: int) -> ZeroPoint:
    lead = abs(char_fn_derivative(mu, loc, k)) / math.factorial(k)
    return ZeroPoint(float(loc), k, float(lead))


def find_zeros(
    mu: Measure,
    zero_tol: float = ZERO_TOL,
    order_tol: float = ORDER_TOL,
    window: float | None = None,
) -> list[ZeroPoint]:
    """All zeros of the characteristic function over one period, with their orders.

    The period is ``[0, 2pi)`` for the integers, ``[-pi/h, pi/h)`` for a
    step-``h`` lattice (or, if ``window`` is given, every periodic copy in
    ``[-window, window]``), and the N characters for ``Z_N``.
    """
    return list(_find_zeros(mu, zero_tol, order_tol, window))


@functools.lru_cache(maxsize=256)
def _find_zeros(mu, zero_tol, order_tol, window) -> tuple[ZeroPoint, ...]:
    if not 0 < zero_tol <= 1e-4:
        raise ValueError(f"zero_tol must lie in (0, 1e-4], got {zero_tol!r}")
    group = mu.group
    if group.kind is GroupKind.CYCLIC:
        n = group.order
        found = []
        for j in range(n):
            loc = TWO_PI * j / n
            if abs(char_fn(mu, loc)) <= zero_tol:
                found.append(_zero_point(mu, loc, _order_at(mu, loc, order_tol)))
        return tuple(found)

    period = group.dual_period
    start = 0.0 if group.kind is GroupKind.INTEGERS else -period / 2
    span = mu.span
    if span == 0:
        return ()
    m = max(1024, _next_power_of_two(64 * (span + 1)))
    grid = start + period * np.arange(m) / m
    mod = np.abs(char_fn(mu, grid))
    left, right = np.roll(mod, 1), np.roll(mod, -1)
    # within half a grid step of a zero of order k, |f| <= (pi/64)^k / k!
    candidates = np.nonzero((mod <= left) & (mod < right) & (mod < 0.1))[0]

    locs: list[tuple[float, int]] = []
    for i in candidates:
        hit = _refine_zero(mu, grid, int(i), zero_tol, order_tol, min(MAX_ORDER, span))
        if hit is None:
            continue
        loc = (hit[0] - start) % period + start
        if any(abs((loc - other + period / 2) % period - period / 2) < 1e-8 for other, _ in locs):
            continue
        locs.append((loc, hit[1]))
    locs.sort()

    zeros = [_zero_point(mu, loc, k) for loc, k in locs]
    if window is None or group.kind is GroupKind.INTEGERS:
        return tuple(zeros)
    out = []
    for z in zeros:
        lo = math.ceil((-window - z.location) / period)
        hi = math.floor((window - z.location) / period)
        for shift in range(lo, hi + 1):
            out.append(ZeroPoint(z.location + shift * period, z.order, z.leading_coefficient))
    return tuple(sorted(out, key=lambda z: z.location))


# ---------------------------------------------------------------- lifting


def _min_grid(mu: Measure) -> int:
    # unwrapping needs at least 8 samples per turn of the fastest exponential
    return 8 * max(mu.max_abs_point, mu.span, 1)


@functools.lru_cache(maxsize=64)
def _circle_lift(mu: Measure, n_points: int):
    """Safe-stepped phase increments of the characteristic function around the circle.

    Returns ``(theta, values, steps)`` where ``steps[j]`` is the principal
    phase change from ``theta[j]`` to the next grid point, the last one
    closing the loop at ``2pi``.  The grid is doubled until every step is
    below pi/2.
    """
    n = max(n_points, _next_power_of_two(_min_grid(mu)))
    while n <= MAX_GRID:
        theta = TWO_PI * np.arange(n) / n
        vals = char_fn(mu, theta)
        closed = np.append(vals, vals[0])
        steps = np.angle(closed[1:] / closed[:-1])
        if np.max(np.abs(steps)) < SAFE_PHASE_STEP:
            return theta, vals, steps
        n *= 2
    raise NoConvergence(f"phase steps stayed above pi/2 up to {MAX_GRID} grid points")


def _require_integers(mu: Measure, what: str):
    if mu.group.kind is not GroupKind.INTEGERS:
        raise WrongGroup(f"{what} is defined for measures on Z, not {mu.group}")


def winding_number(mu: Measure) -> int:
    """Degree of the characteristic function as a loop in C \\ {0} (measures on Z)."""
    _require_integers(mu, "the winding number")
    zeros = find_zeros(mu)
    if zeros:
        raise HasZeros(f"characteristic function vanishes at {[z.location for z in zeros]}")
    _, _, steps = _circle_lift(mu, 256)
    total = math.fsum(steps)
    w = round(total / TWO_PI)
    if abs(total - TWO_PI * w) > 1e-6:
        raise NoConvergence(f"phase sum {total!r} is not a multiple of 2pi")
    return int(w)


def _lift_window(mu: Measure, n_points: int, window: float):
    n = max(n_points, 16)
    n += n % 2
    # grid spacing must resolve the fastest exponential over the window
    n = max(n, math.ceil(window * mu.group.scale * _min_grid(mu) / math.pi))
    n += n % 2
    while n <= MAX_GRID:
        grid = sample_char_fn(mu, n, window)
        steps = np.angle(grid.values[1:] / grid.values[:-1])
        if np.max(np.abs(steps)) < SAFE_PHASE_STEP:
            return grid, steps
        n *= 2
    raise NoConvergence(f"phase steps stayed above pi/2 up to {MAX_GRID} grid points")


def second_characteristic(
    mu: Measure, n_points: int = 1024, window: float | None = None
) -> SecondCharacteristic:
    """Continuous logarithm psi of the characteristic function with psi(0) = 0.

    On Z the measure is admissible iff there are no zeros and the winding
    number is 0.  On a real lattice there is no winding obstruction, so no
    zeros suffices.  On Z_N the principal logarithm is returned per
    character; other branches live in :mod:`partdiv.cyclic`.
    """
    group = mu.group
    if group.kind is GroupKind.REAL_LATTICE and window is None:
        window = group.dual_period / 2
    if find_zeros(mu):
        grid = sample_char_fn(mu, n_points if group.kind is not GroupKind.CYCLIC else 16, window)
        return SecondCharacteristic(grid, None, 0, False, FailureReason.HAS_ZEROS)

    if group.kind is GroupKind.CYCLIC:
        grid = sample_char_fn(mu)
        return SecondCharacteristic(grid, np.log(grid.values), 0, True)

    if group.kind is GroupKind.INTEGERS:
        theta, vals, steps = _circle_lift(mu, n_points)
        phase = np.concatenate(([0.0], np.cumsum(steps[:-1])))
        psi = np.log(np.abs(vals)) + 1j * phase
        psi[0] = 0.0
        total = math.fsum(steps)
        w = int(round(total / TWO_PI))
        grid = DualGrid(group, theta, vals)
        reason = None if w == 0 else FailureReason.NONZERO_WINDING
        return SecondCharacteristic(grid, psi, w, w == 0, reason, total)

    grid, steps = _lift_window(mu, n_points, window)
    phase = np.concatenate(([0.0], np.cumsum(steps)))
    center = len(grid) // 2
    phase -= phase[center]
    psi = np.log(np.abs(grid.values)) + 1j * phase
    psi[center] = 0.0
    return SecondCharacteristic(grid, psi, 0, True)
