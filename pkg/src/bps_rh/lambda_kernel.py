"""The modified Gamma function

    Lambda_x(y) = Gamma(x + y) e^y / (y^(x + y - 1/2) sqrt(2 pi))

and the elementary factor S(x, y) = 1 - e^x e^y.

ln y is principal by default; ``branch=k`` shifts it by 2 pi i k. ``log_lambda``
goes through the Binet remainder of ln Gamma, so for large |y| the result is
computed as a small quantity and not as a difference of two large ones.
"""
from __future__ import annotations

import cmath
import math

from .errors import DomainError, PoleError, ZeroArgumentError
from .special_functions import TWO_PI_I, bernoulli_poly, binet, log_branch

POLE_TOL = 1e-12


def s_factor(x, y) -> complex:
    return 1.0 - cmath.exp(complex(x) + complex(y))


def _ln_ratio(z: complex, y: complex, branch: int) -> complex:
    """Ln z - (Ln y + 2 pi i branch) with z = x + y, via log1p(x / y)."""
    x_over_y = (z - y) / y
    base = _log1p(x_over_y)
    n = round((cmath.log(z).imag - cmath.log(y).imag - base.imag) / (2 * math.pi))
    return base + TWO_PI_I * (n - branch)


def _log1p(w: complex) -> complex:
    if abs(w) < 1e-4:
        return w * (1 - w * (0.5 - w * (1 / 3 - w * 0.25)))
    return cmath.log(1 + w)


def log_lambda(x, y, branch: int = 0) -> complex:
    """ln Lambda_x(y), continuous in (x, y) away from the poles and the cut of ln y."""
    x, y = complex(x), complex(y)
    if y == 0:
        raise ZeroArgumentError("Lambda_x(y) needs y != 0")
    z = x + y
    n = round(-z.real)
    if n >= 0 and abs(z + n) < POLE_TOL:
        raise PoleError(f"x + y = {-n} is a pole of Gamma", index=n)
    return binet(z) + (z - 0.5) * _ln_ratio(z, y, branch) - x


def lambda_(x, y, branch: int = 0) -> complex:
    return cmath.exp(log_lambda(x, y, branch))


def lambda_direct(x, y, branch: int = 0) -> complex:
    """Straight transcription of the defining formula; reference route for tests."""
    from .special_functions import log_gamma
    x, y = complex(x), complex(y)
    ly = log_branch(y, branch)
    return cmath.exp(log_gamma(x + y) + y - (x + y - 0.5) * ly - 0.5 * math.log(2 * math.pi))


def lambda_reflection_check(x, y) -> float:
    """|Lambda_x(-y) Lambda_{1-x}(y) - 1/S(-2 pi i x, 2 pi i y)| for Im y > 0.

    For Im y < 0 the right-hand side is 1/S(2 pi i x, -2 pi i y).
    """
    x, y = complex(x), complex(y)
    if x.imag <= 0:
        raise DomainError("reflection check needs Im x > 0")
    if y.imag == 0:
        raise DomainError("reflection check needs y off the real axis")
    lhs = lambda_(x, -y) * lambda_(1 - x, y)
    if y.imag > 0:
        rhs = 1.0 / s_factor(-TWO_PI_I * x, TWO_PI_I * y)
    else:
        rhs = 1.0 / s_factor(TWO_PI_I * x, -TWO_PI_I * y)
    return abs(lhs - rhs) / abs(rhs)


def asymptotic_log_lambda(x, y, n_terms: int) -> complex:
    """Truncated expansion sum_{m=1}^N (-1)^(m+1) B_{m+1}(x) / (m (m+1)) y^(-m)."""
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    x, y = complex(x), complex(y)
    inv = 1.0 / y
    acc = 0j
    p = inv
    for m in range(1, n_terms + 1):
        acc += (-1) ** (m + 1) * bernoulli_poly(m + 1, x) / (m * (m + 1)) * p
        p *= inv
    return acc
