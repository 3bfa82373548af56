"""Independent reference computations used to freeze expected values.

Nothing here calls into the numerical paths of partdiv: convolution is a
plain double loop, characteristic functions are summed with cmath, and
series coefficients come from mpmath at high precision.
"""

import cmath
import math

import mpmath


def direct_convolution(a: dict, b: dict, modulus=None) -> dict:
    out = {}
    for p, w in a.items():
        for q, v in b.items():
            s = p + q if modulus is None else (p + q) % modulus
            out[s] = out.get(s, 0.0) + w * v
    return out


def direct_char_fn(atoms: dict, theta: float, step: float = 1.0) -> complex:
    return sum(w * cmath.exp(1j * x * step * theta) for x, w in atoms.items())


def table_tv(a: dict, b: dict) -> float:
    keys = set(a) | set(b)
    return 0.5 * math.fsum(abs(a.get(k, 0.0) - b.get(k, 0.0)) for k in keys)


def binomial_series_coefficient(t, k: int, p0: float = 0.7, p1: float = 0.3) -> float:
    """k-th coefficient of (p0 + p1 z)^t = p0^t sum_k binom(t, k) (p1/p0)^k z^k."""
    with mpmath.workdps(40):
        t = mpmath.mpf(t)
        c = mpmath.binomial(t, k) * mpmath.mpf(p0) ** (t - k) * mpmath.mpf(p1) ** k
        return float(c)


def binomial_series_min(t, k_max: int = 60, p0: float = 0.7, p1: float = 0.3) -> tuple[float, int]:
    coeffs = [binomial_series_coefficient(t, k, p0, p1) for k in range(k_max + 1)]
    k = min(range(len(coeffs)), key=coeffs.__getitem__)
    return coeffs[k], k


def poisson_pmf(rate: float, k: int) -> float:
    with mpmath.workdps(40):
        return float(mpmath.exp(-rate) * mpmath.mpf(rate) ** k / mpmath.factorial(k))


def point_mass_lambda_alg(w: int, l_max: int = 12, j_max: int = 50, t_max: int = 3):
    """q = m/l with delta_j^{*l} = delta_w^{*m} for some |j| <= j_max.

    |g|^l = |mu^|^m = 1 forces g to be a character, i.e. a point mass, so
    point masses are the only candidate roots.
    """
    found = set()
    for l in range(1, l_max + 1):
        for m in range(1, t_max * l + 1):
            if math.gcd(m, l) != 1:
                continue
            if any(j * l == w * m for j in range(-j_max, j_max + 1)):
                found.add((m, l))
    return found
