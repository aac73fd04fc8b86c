"""Complex special functions: log-gamma, gamma, dilogarithm, Bernoulli polynomials.

All branch choices are principal unless a branch index is passed explicitly.
``log_gamma`` is the principal branch of ln Gamma, analytic on C minus (-inf, 0];
on the cut itself the limit from above is returned.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

from .errors import BranchCutError, PoleError, ZeroArgumentError

TWO_PI_I = 2j * math.pi
HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)
POLE_TOL = 1e-12

# Stirling region: |z| >= _STIRLING_R and |arg z| <= 3pi/4
_STIRLING_R = 20.0


@lru_cache(maxsize=None)
def bernoulli_number(n: int) -> Fraction:
    """Exact Bernoulli number B_n with B_1 = -1/2."""
    if n < 0:
        raise ValueError("n must be non-negative")
    table = _bernoulli_table(n)
    return table[n]


@lru_cache(maxsize=8)
def _bernoulli_table(n: int) -> tuple:
    b = [Fraction(1)]
    for m in range(1, n + 1):
        acc = Fraction(0)
        for k in range(m):
            acc += math.comb(m + 1, k) * b[k]
        b.append(-acc / (m + 1))
    return tuple(b)


def bernoulli_poly(m: int, x):
    """Bernoulli polynomial B_m(x).

    Exact (a ``Fraction``) when ``x`` is an int or Fraction, complex otherwise.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    coeffs = [math.comb(m, k) * bernoulli_number(k) for k in range(m + 1)]
    # coeffs[k] multiplies x^(m-k); Horner from the leading term
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        acc = Fraction(0)
        for c in coeffs:
            acc = acc * x + c
        return acc
    x = complex(x)
    acc = 0j
    for c in coeffs:
        acc = acc * x + float(c)
    return acc


_STIRLING_COEFFS = tuple(
    float(bernoulli_number(2 * k)) / (2 * k * (2 * k - 1)) for k in range(1, 18)
)


def _in_stirling_region(z: complex) -> bool:
    return abs(z) >= _STIRLING_R and z.real >= -abs(z.imag)


def _binet_series(z: complex) -> complex:
    inv = 1.0 / z
    inv2 = inv * inv
    term = inv
    total = 0j
    for c in _STIRLING_COEFFS:
        t = c * term
        total += t
        if abs(t) < 1e-18 * abs(total):
            break
        term *= inv2
    return total


def _shift_count(z: complex) -> int:
    if abs(z.imag) >= _STIRLING_R:
        return max(0, math.ceil(-abs(z.imag) - z.real))
    need = math.sqrt(_STIRLING_R ** 2 - z.imag ** 2)
    return max(0, math.ceil(need - z.real))


def _check_pole(z: complex) -> None:
    if z.real <= 0.5:
        n = round(-z.real)
        if n >= 0 and abs(z + n) < POLE_TOL:
            raise PoleError(f"Gamma pole at z = {-n}", index=n)


def binet(z) -> complex:
    """Remainder R(z) = ln Gamma(z) - (z - 1/2) Ln z + z - ln(2 pi)/2.

    Small for large |z| off the negative axis; used to evaluate ratios of
    Gamma-type quantities without cancellation.
    """
    z = complex(z)
    _check_pole(z)
    if _in_stirling_region(z):
        return _binet_series(z)
    n = _shift_count(z)
    w = z + n
    log_shift = 0j
    for k in range(n):
        log_shift += cmath.log(z + k)
    lg_w = _binet_series(w) + (w - 0.5) * cmath.log(w) - w + HALF_LOG_TWO_PI
    return lg_w - log_shift - (z - 0.5) * cmath.log(z) + z - HALF_LOG_TWO_PI


def log_gamma(z) -> complex:
    """Principal branch of ln Gamma(z).

    Raises PoleError within 1e-12 of a non-positive integer.
    """
    z = complex(z)
    _check_pole(z)
    if _in_stirling_region(z):
        return _binet_series(z) + (z - 0.5) * cmath.log(z) - z + HALF_LOG_TWO_PI
    n = _shift_count(z)
    w = z + n
    acc = _binet_series(w) + (w - 0.5) * cmath.log(w) - w + HALF_LOG_TWO_PI
    for k in range(n):
        acc -= cmath.log(z + k)
    return acc


def gamma(z) -> complex:
    return cmath.exp(log_gamma(z))


def log_branch(z, k: int = 0) -> complex:
    """Ln z + 2 pi i k, with Ln the principal logarithm (Im in (-pi, pi])."""
    z = complex(z)
    if z == 0:
        raise ZeroArgumentError("logarithm of zero")
    return cmath.log(z) + TWO_PI_I * k


def cpow(z, a, k: int = 0) -> complex:
    """z**a = exp(a * (Ln z + 2 pi i k))."""
    return cmath.exp(complex(a) * log_branch(z, k))


_PI2_6 = math.pi ** 2 / 6.0
_DILOG_B = tuple(float(bernoulli_number(n)) / math.factorial(n + 1) for n in range(0, 40))


def _dilog_power(z: complex) -> complex:
    # |z| <= 1/2
    total = 0j
    term = z
    k = 1
    while True:
        t = term / (k * k)
        total += t
        if abs(t) < 1e-17 * abs(total) or k > 200:
            return total
        k += 1
        term *= z


def _dilog_bernoulli(z: complex) -> complex:
    # |z| <= 1, Re z <= 1/2; u = -Ln(1-z) stays well inside |u| < 2 pi
    u = -cmath.log(1.0 - z)
    u2 = u * u
    total = u - 0.25 * u2
    p = u2 * u
    for n in range(2, 40, 2):
        t = _DILOG_B[n] * p
        total += t
        if abs(t) < 1e-17 * abs(total):
            break
        p *= u2
    return total


def _dilog_disk(z: complex) -> complex:
    if abs(z) <= 0.5:
        return _dilog_power(z)
    if z.real <= 0.5:
        return _dilog_bernoulli(z)
    w = 1.0 - z
    if w == 0:
        return complex(_PI2_6)
    inner = _dilog_power(w) if abs(w) <= 0.5 else _dilog_bernoulli(w)
    return _PI2_6 - cmath.log(z) * cmath.log(w) - inner


def dilog(z, side: int | None = None) -> complex:
    """Principal dilogarithm Li_2(z), cut along [1, inf).

    On the cut (real z > 1) pass ``side=+1`` for the limit from above or
    ``side=-1`` for the limit from below; otherwise BranchCutError.
    """
    z = complex(z)
    if z.imag == 0.0 and z.real > 1.0:
        if side is None:
            raise BranchCutError("dilog evaluated on its cut [1, inf)")
        z = complex(z.real, math.copysign(0.0, side))
    if z == 0:
        return 0j
    if z == 1:
        return complex(_PI2_6)
    if abs(z) <= 1.0:
        return _dilog_disk(z)
    # inversion; -z keeps the signed zero so the cut side is honoured
    ln_mz = cmath.log(-z)
    return -_PI2_6 - 0.5 * ln_mz * ln_mz - _dilog_disk(1.0 / z)
