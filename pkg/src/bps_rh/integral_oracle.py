"""Quadrature evaluation of Xhat(theta, w).

    ln Xhat(theta, w) = -(1/2 pi i) [ I_+ - I_- ],
    I_+ = int_0^inf ln(1 - s/w) / (e^(s - theta) - 1) ds,
    I_- = int_0^inf ln(1 + u/w) / (e^(theta + u) - 1) du,

the second integral being the one along the negative real axis with s = -u.
The integrand only sees e^theta, so the formula is 2 pi i periodic in theta;
it is used on the two strips 0 < |Im theta| < 2 pi ("piecewise" reading).
Numerically, on the upper strip Xhat = Lambda_{theta/2pi i}(-w/2pi i) and on
the lower strip Xhat = Lambda_{1 + theta/2pi i}(-w/2pi i).

Only ``theorem32_residual`` touches lambda_kernel, as the side under test.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .quadrature import integrate

TWO_PI = 2.0 * math.pi
TWO_PI_I = 2j * math.pi

_SMALL = 1e-4


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    s_max: float | None = None  # None: chosen per call from the tail bound
    panels: int = 32
    singularity_pad: float = 1e-3
    max_panels: int = 4000

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.panels < 1:
            raise ValueError("panels must be >= 1")

    def halved(self) -> "QuadratureSpec":
        return QuadratureSpec(self.abs_tol / 2, self.rel_tol / 2, self.s_max,
                              self.panels, self.singularity_pad, self.max_panels)


DEFAULT_SPEC = QuadratureSpec()


@dataclass(frozen=True)
class XhatResult:
    value: complex
    log_value: complex
    error: float  # absolute, on value


def _log1p(z):
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < _SMALL
    out = np.log(1.0 + np.where(small, 0.0, z))
    zs = np.where(small, z, 0.0)
    series = zs * (1 - zs * (0.5 - zs * (1 / 3 - zs * 0.25)))
    return np.where(small, series, out)


def _expm1(z):
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < _SMALL
    out = np.exp(np.where(small, 0.0, z)) - 1.0
    zs = np.where(small, z, 0.0)
    series = zs * (1 + zs * (0.5 + zs * (1 / 6 + zs / 24)))
    return np.where(small, series, out)


def _tail_bound(shift: float, w_abs: float, s: float) -> float:
    # |1/(e^(s-theta)-1)| <= 2 e^{-(s - Re theta)} once s - Re theta >= ln 2
    return 2.0 * math.exp(-(s - shift)) * (math.log1p(s / w_abs) + math.pi + 1.0 / w_abs)


def _truncation(shift: float, w_abs: float, tol: float) -> float:
    s = max(shift, 0.0) + math.log(2.0) + 1.0
    while _tail_bound(shift, w_abs, s) > tol:
        s += 1.0
    return s


def _half_line(f, shift: float, extra_points, w_abs: float, q: QuadratureSpec):
    tail_tol = 0.1 * q.abs_tol
    if q.s_max is None:
        s_max = _truncation(shift, w_abs, tail_tol)
        tail = _tail_bound(shift, w_abs, s_max)
    else:
        s_max = q.s_max
        tail = _tail_bound(shift, w_abs, s_max) if s_max - shift >= math.log(2.0) else math.inf
    pts = list(np.linspace(0.0, s_max, q.panels + 1))
    pts.append(min(q.singularity_pad, s_max))
    pts += [p for p in extra_points if 0.0 < p < s_max]
    res = integrate(f, pts, 0.5 * q.abs_tol, 0.5 * q.rel_tol, q.max_panels)
    return res.value, res.error + tail


def _log_xhat_raw(theta: complex, w: complex, q: QuadratureSpec) -> tuple:
    inv_w = 1.0 / w

    def f_plus(s):
        return _log1p(-s * inv_w) / _expm1(s - theta)

    def f_minus(u):
        return _log1p(u * inv_w) / _expm1(theta + u)

    wa = abs(w)
    i_plus, e_plus = _half_line(f_plus, theta.real, [w.real, theta.real], wa, q)
    i_minus, e_minus = _half_line(f_minus, -theta.real, [-w.real, -theta.real], wa, q)
    log_x = -(i_plus - i_minus) / TWO_PI_I
    return log_x, (e_plus + e_minus) / TWO_PI


def _result(log_x: complex, err_log: float) -> XhatResult:
    val = cmath.exp(log_x)
    return XhatResult(val, log_x, abs(val) * err_log)


def xhat(theta, w, q: QuadratureSpec = DEFAULT_SPEC) -> XhatResult:
    """Xhat(theta, w) from the integral formula, for 0 < |Im theta| < 2 pi, Im w != 0."""
    theta, w = complex(theta), complex(w)
    if not (0.0 < abs(theta.imag) < TWO_PI):
        raise DomainError("xhat needs 0 < |Im theta| < 2 pi")
    if w.imag == 0.0:
        raise DomainError("xhat needs Im w != 0")
    return _result(*_log_xhat_raw(theta, w, q))


def xhat_theta0(w, q: QuadratureSpec = DEFAULT_SPEC) -> XhatResult:
    """Xhat(0, w) for Im w < 0; the s = 0 singularity is removable."""
    w = complex(w)
    if not w.imag < 0:
        raise DomainError("xhat_theta0 needs Im w < 0")
    return _result(*_log_xhat_raw(0j, w, q))


def xhat_extended(theta, w, q: QuadratureSpec = DEFAULT_SPEC,
                  base_strip: str = "upper") -> XhatResult:
    """Xhat beyond the base strip via Xhat(theta) = Xhat(theta - 2 pi i) (1 - theta/w).

    ``base_strip="upper"`` reduces to 0 < Im theta < 2 pi, as the recursion is
    usually stated; ``"lower"`` reduces to -2 pi < Im theta < 0 instead. Only
    the lower choice makes the recursion agree with lambda_kernel through
    ``theorem32_residual`` once Im theta exceeds 2 pi.
    """
    theta, w = complex(theta), complex(w)
    if w.imag == 0.0:
        raise DomainError("xhat_extended needs Im w != 0")
    lo = 0.0 if base_strip == "upper" else -TWO_PI
    if base_strip not in ("upper", "lower"):
        raise ValueError("base_strip must be 'upper' or 'lower'")
    factor = 1.0 + 0j
    while theta.imag >= lo + TWO_PI:
        factor *= 1.0 - theta / w
        theta -= TWO_PI_I
    while theta.imag <= lo and not (theta.imag == 0.0 and base_strip == "lower"):
        theta += TWO_PI_I
        factor /= 1.0 - theta / w
    if factor == 0:
        return XhatResult(0j, complex(-math.inf), 0.0)
    if theta.imag == 0.0:
        if theta != 0:
            raise DomainError("reduced theta is real and nonzero; integral is singular")
        base = xhat_theta0(w, q)
    else:
        base = xhat(theta, w, q)
    log_factor = cmath.log(factor)
    return XhatResult(base.value * factor, base.log_value + log_factor, base.error * abs(factor))


def theorem32_residual(theta, w, q: QuadratureSpec = DEFAULT_SPEC) -> float:
    """|Lambda_{theta/2pi i}(-w/2pi i) / Xhat(theta - 2 pi i, w) - 1| for Im theta > 0, Im w < 0.

    Xhat(theta - 2 pi i) is evaluated on the lower base strip: for
    0 < Im theta < 2 pi this is the bare integral, with no recursion.
    """
    from .lambda_kernel import log_lambda

    theta, w = complex(theta), complex(w)
    if not theta.imag > 0 or not w.imag < 0:
        raise DomainError("theorem32_residual needs Im theta > 0 and Im w < 0")
    log_lam = log_lambda(theta / TWO_PI_I, -w / TWO_PI_I)
    rhs = xhat_extended(theta - TWO_PI_I, w, q, base_strip="lower")
    return abs(cmath.exp(log_lam - rhs.log_value) - 1.0)


def _neville_at_zero(hs, vals):
    p = list(vals)
    n = len(hs)
    for k in range(1, n):
        for i in range(n - k):
            p[i] = (hs[i + k] * p[i] - hs[i] * p[i + 1]) / (hs[i + k] - hs[i])
    return p[0]


JUMP_DELTAS = (1e-2, 5e-3, 2.5e-3)


def side_limit_log(theta, w0: float, side: int, q: QuadratureSpec = DEFAULT_SPEC,
                   deltas=JUMP_DELTAS) -> complex:
    """Limit of ln Xhat(theta, w0 + i side delta) as delta -> 0+, by polynomial extrapolation."""
    vals = [xhat(theta, complex(w0, side * d), q).log_value for d in deltas]
    return _neville_at_zero(list(deltas), vals)


def jump_residual_xhat(theta, w0: float, q: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Residual of the jump of Xhat across the real w axis at w0.

    w0^- is the clockwise approach: from above for w0 > 0, from below for w0 < 0.
        w0 > 0: Xhat(w0^-) = Xhat(w0^+) S(theta, -w0)
        w0 < 0: Xhat(w0^-) = Xhat(w0^+) / S(-theta, w0)
    """
    theta = complex(theta)
    w0 = float(w0)
    if w0 == 0.0:
        raise DomainError("w0 must be nonzero")
    if not (0.0 < theta.imag < TWO_PI):
        raise DomainError("jump check needs 0 < Im theta < 2 pi")
    up = side_limit_log(theta, w0, +1, q)
    dn = side_limit_log(theta, w0, -1, q)
    if w0 > 0:
        s = 1.0 - cmath.exp(theta - w0)
        minus, plus = up, dn
        if abs(s) < 1e-12:
            raise DomainError("S vanishes at this w0; jump is ill-conditioned")
        return abs(cmath.exp(minus - plus) / s - 1.0)
    s = 1.0 - cmath.exp(-theta + w0)
    if abs(s) < 1e-12:
        raise DomainError("S vanishes at this w0; jump is ill-conditioned")
    minus, plus = dn, up
    return abs(cmath.exp(minus - plus) * s - 1.0)


def gradient_rhs(theta, w) -> complex:
    """(d_theta + d_w) ln Xhat as observed: -(theta - pi i)/(2 pi i w) on the
    upper strip, -(theta + pi i)/(2 pi i w) on the lower strip."""
    theta, w = complex(theta), complex(w)
    shift = -1j * math.pi if theta.imag > 0 else 1j * math.pi
    return -(theta + shift) / (TWO_PI_I * w)


def gradient_lhs(theta, w, h: float = 1e-5, q: QuadratureSpec | None = None) -> complex:
    """Central difference of ln Xhat along (1, 1) in (theta, w)."""
    theta, w = complex(theta), complex(w)
    if q is None:
        q = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-13)
    a = xhat(theta + h, w + h, q).log_value
    b = xhat(theta - h, w - h, q).log_value
    return (a - b) / (2 * h)


def gradient_residual(theta, w, h: float = 1e-5, q: QuadratureSpec | None = None) -> float:
    return abs(gradient_lhs(theta, w, h, q) - gradient_rhs(theta, w))
