"""Scalar Riemann-Hilbert solutions Y_{beta,r}(t) for finite uncoupled structures.

For a generic ray r and an active class delta on the clockwise side of r
(delta in Gamma_r), the solution carries the factor

    Lambda_{a(delta)}(-Z(delta) / (2 pi i t)) ** (-Omega(delta) <beta, delta>)

where a(delta) = theta(delta)/(2 pi i) if delta lies in Gamma_+ (0 < arg Z <= pi)
and a(delta) = 1 - theta(-delta)/(2 pi i) otherwise, theta reduced to
Im in [0, 2 pi). The two choices agree whenever 0 < Im theta < 2 pi; picking
the representative through Gamma_+ makes the pair {delta, -delta} use one
consistent order parameter on both sides of its active line. For doubled A1
this reproduces y_minus on rays counter-clockwise of l = R_{>0} Z(alpha) and
y_plus on rays clockwise of it.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import bps_core as bc
from .bps_core import BpsStructure, Ray, TorusPoint
from .errors import (ActiveRayError, CriticalPointError, DomainError, HypothesisError,
                     PoleError, SectorError, SFactorZeroError)
from .lambda_kernel import log_lambda

TWO_PI = 2.0 * math.pi
TWO_PI_I = 2j * math.pi
NEAR_CRITICAL = 1e-8
HALF_PLANE_TOL = 1e-12


@dataclass(frozen=True)
class CriticalPoint:
    location: complex
    gamma: tuple
    k: int
    order: int  # > 0 zero, < 0 pole


@dataclass(frozen=True)
class EpsA:
    eps: int
    a: complex


@dataclass(frozen=True)
class _Factor:
    gamma: tuple
    z: complex
    a: complex
    exponent: int  # power of Lambda_a(-z / 2 pi i t)
    theta_hat: complex


@dataclass(frozen=True)
class RhEvaluation:
    structure: BpsStructure
    xi: TorusPoint
    beta: tuple
    ray: Ray
    shift: int = 0  # theta(gamma) -> theta(gamma) + 2 pi i shift, so theta(-gamma) moves the other way

    def __post_init__(self):
        s = self.structure
        report = bc.validate(s)
        if not report.ok:
            raise DomainError("structure fails validation: " + "; ".join(report.messages))
        if not bc.classify(s).uncoupled:
            raise DomainError("closed-form solution needs an uncoupled structure")
        if len(self.beta) != s.rank:
            raise DomainError("beta has the wrong rank")
        object.__setattr__(self, "beta", tuple(int(b) for b in self.beta))
        if bc.is_active_ray(s, self.ray):
            raise ActiveRayError(f"ray at angle {self.ray.angle} is active")

    @cached_property
    def factors(self) -> tuple:
        s, xi = self.structure, self.xi
        out = []
        for d in bc.gamma_r_omega(s, self.ray):
            om = s.omega(d)
            p = om * s.pair(self.beta, d)
            if p == 0:
                continue
            a = order_parameter(s, xi, d) + (self.shift if bc.in_gamma_plus(s, d) else -self.shift)
            out.append(_Factor(d, s.Z(d), a, -p, bc.theta_hat(s, xi, d)))
        return tuple(out)


def order_parameter(s: BpsStructure, xi: TorusPoint, d) -> complex:
    """a(delta) as described in the module docstring."""
    if bc.in_gamma_plus(s, d):
        return bc.theta_hat(s, xi, d) / TWO_PI_I
    return 1.0 - bc.theta_hat(s, xi, bc.negate(d)) / TWO_PI_I


def eps_a(s: BpsStructure, xi: TorusPoint, beta, gamma) -> EpsA:
    """eps = sgn<beta, gamma>; a = theta(gamma)/2 pi i for eps = +1, 1 - theta(gamma)/2 pi i
    for eps = -1 (theta reduced to Im in [0, 2 pi)).

    This is the literal sign-selected product rule; y_solution does not use it
    because it does not satisfy the jump condition (see the test suite).
    """
    p = s.pair(beta, gamma)
    eps = (p > 0) - (p < 0)
    th = bc.theta_hat(s, xi, gamma) / TWO_PI_I
    if eps > 0:
        return EpsA(1, th)
    if eps < 0:
        return EpsA(-1, 1.0 - th)
    return EpsA(0, 0j)


def literal_product(e: RhEvaluation, t: complex) -> complex:
    """prod_{gamma in Gamma_r} Lambda_a(-eps Z(gamma)/2 pi i t)^(Omega <beta, gamma>) with eps, a from eps_a."""
    s = e.structure
    acc = 0j
    for g in bc.gamma_r_omega(s, e.ray):
        p = s.omega(g) * s.pair(e.beta, g)
        if p == 0:
            continue
        ea = eps_a(s, e.xi, e.beta, g)
        acc += p * log_lambda(ea.a, -ea.eps * s.Z(g) / (TWO_PI_I * t))
    return cmath.exp(acc)


# -- the general solution -------------------------------------------------

def _factor_points(f: _Factor, ray: Ray | None):
    """Pole locations of Lambda_a(-z/2 pi i t): t_m = z / (2 pi i (a + m)), m >= 0.

    With ``ray`` given, only those in H_r; the admissible m form an initial segment.
    """
    v = ray.direction if ray is not None else None
    pts = []
    if v is not None:
        c0 = (v * TWO_PI_I * f.a / f.z).real
        c1 = (v * TWO_PI_I / f.z).real
        if c1 >= 0:
            raise DomainError("factor class is not on the clockwise side of the ray")
        m_hi = math.floor(-c0 / c1) + 1 if c0 > 0 else -1
    else:
        m_hi = 64
    for m in range(0, max(m_hi, -1) + 1):
        den = TWO_PI_I * (f.a + m)
        if den == 0:
            continue
        t = f.z / den
        if ray is not None and not ray.in_half_plane(t, HALF_PLANE_TOL):
            continue
        k = round(((den - f.theta_hat) / TWO_PI_I).real)
        pts.append((t, m, k))
    return pts


def log_y_solution(e: RhEvaluation, t: complex) -> complex:
    """ln Y_{beta,r}(t), continuous on H_r minus critical points."""
    t = complex(t)
    if not e.ray.in_half_plane(t, HALF_PLANE_TOL):
        raise DomainError(f"t = {t} is not in the half-plane of the ray")
    acc = 0j
    for f in e.factors:
        u = -f.z / (TWO_PI_I * t)
        m = round(-(f.a + u).real)
        if m >= 0 and f.a + m != 0:
            tm = f.z / (TWO_PI_I * (f.a + m))
            if abs(t - tm) < NEAR_CRITICAL * abs(t):
                k = round(((TWO_PI_I * (f.a + m) - f.theta_hat) / TWO_PI_I).real)
                cp = CriticalPoint(tm, f.gamma, k, -f.exponent)
                raise CriticalPointError(f"t = {t} is at a critical point", cp)
        try:
            acc += f.exponent * log_lambda(f.a, u)
        except PoleError as exc:
            raise CriticalPointError(f"t = {t} is at a critical point") from exc
    return acc


def y_solution(e: RhEvaluation, t: complex) -> complex:
    if not e.factors:
        if not e.ray.in_half_plane(complex(t), HALF_PLANE_TOL):
            raise DomainError(f"t = {t} is not in the half-plane of the ray")
        return 1.0 + 0j
    return cmath.exp(log_y_solution(e, t))


def critical_points(e: RhEvaluation) -> list:
    """Zeros and poles of Y_{beta,r} in H_r, sorted by modulus then angle."""
    merged = {}
    for f in e.factors:
        for t, _m, k in _factor_points(f, e.ray):
            key = (round(t.real, 12), round(t.imag, 12))
            if key in merged:
                old = merged[key]
                merged[key] = CriticalPoint(old.location, old.gamma, old.k, old.order - f.exponent)
            else:
                merged[key] = CriticalPoint(t, f.gamma, k, -f.exponent)
    pts = [c for c in merged.values() if c.order != 0]
    pts.sort(key=lambda c: (abs(c.location), cmath.phase(c.location) % TWO_PI))
    return pts


# -- doubled A1 closed forms ----------------------------------------------

def _a1_check(z: complex, theta: complex, t: complex, cut_sign: int):
    if t == 0:
        raise DomainError("t = 0")
    # cut of y_minus on -i l, of y_plus on +i l
    q = t / (cut_sign * 1j * z)
    if q.imag == 0 and q.real > 0:
        raise DomainError("t lies on the branch cut")


def log_y_minus(z, theta, t) -> complex:
    z, theta, t = complex(z), complex(theta), complex(t)
    _a1_check(z, theta, t, -1)
    x = theta / TWO_PI_I
    u = -z / (TWO_PI_I * t)
    _near(z, theta, t, x + u, sign=+1)
    return log_lambda(x, u)


def log_y_plus(z, theta, t) -> complex:
    z, theta, t = complex(z), complex(theta), complex(t)
    _a1_check(z, theta, t, +1)
    x = 1.0 - theta / TWO_PI_I
    u = z / (TWO_PI_I * t)
    _near(z, theta, t, x + u, sign=-1)
    return -log_lambda(x, u)


def _near(z, theta, t, arg, sign):
    m = round(-arg.real)
    if m < 0:
        return
    # arg = -m  <=>  t = z / (theta + sign 2 pi i m')
    k = m if sign > 0 else m + 1
    den = theta + sign * TWO_PI_I * k
    if den != 0:
        tm = z / den
        if abs(t - tm) < NEAR_CRITICAL * abs(t):
            order = -1 if sign > 0 else 1
            raise CriticalPointError("critical point", CriticalPoint(tm, (1,), sign * k, order))


def y_minus(z, theta, t) -> complex:
    """Lambda_{theta/2 pi i}(-z / 2 pi i t), defined off -i l."""
    return cmath.exp(log_y_minus(z, theta, t))


def y_plus(z, theta, t) -> complex:
    """1 / Lambda_{1 - theta/2 pi i}(z / 2 pi i t), defined off +i l."""
    return cmath.exp(log_y_plus(z, theta, t))


def a1_critical_points(z, theta, which: str, kmax: int) -> list:
    """Critical points z/(theta + 2 pi i k), |k| <= kmax, of y_minus (poles, k >= 0)
    or y_plus (zeros, k <= -1)."""
    z, theta = complex(z), complex(theta)
    out = []
    if which == "minus":
        ks, order = range(0, kmax + 1), -1
    elif which == "plus":
        ks, order = range(-1, -kmax - 1, -1), 1
    else:
        raise ValueError("which must be 'plus' or 'minus'")
    for k in ks:
        den = theta + TWO_PI_I * k
        if den != 0:
            out.append(CriticalPoint(z / den, (1,), k, order))
    out.sort(key=lambda c: (abs(c.location), cmath.phase(c.location) % TWO_PI))
    return out


# -- Stokes factors and the RH battery --------------------------------------

def stokes_factor(s: BpsStructure, xi: TorusPoint, ell: Ray, beta, t) -> complex:
    """prod_{Z(gamma) in ell} (1 - xi(gamma) e^{-Z(gamma)/t})^(Omega(gamma) <beta, gamma>)."""
    t = complex(t)
    if t == 0:
        raise DomainError("t = 0")
    if not bc.is_active_ray(s, ell):
        raise DomainError("ell is not an active ray")
    acc = 1.0 + 0j
    for g in s.active_classes():
        if not Ray.of(s.Z(g)).same_as(ell):
            continue
        p = s.omega(g) * s.pair(beta, g)
        if p == 0:
            continue
        base = 1.0 - bc.torus_eval(s, xi, g) * cmath.exp(-s.Z(g) / t)
        if base == 0 or (abs(base) < 1e-14 and p < 0):
            raise SFactorZeroError(f"Stokes factor base vanishes at t = {t}")
        acc *= base ** p
    return acc


def _clockwise_angle(r1: Ray, r2: Ray) -> float:
    return (r1.angle - r2.angle) % TWO_PI


def sector_classes(s: BpsStructure, r1: Ray, r2: Ray) -> list:
    """Active classes with Z strictly inside the clockwise sector from r1 to r2."""
    span = _clockwise_angle(r1, r2)
    out = []
    for g in s.active_classes():
        d = (r1.angle - Ray.of(s.Z(g)).angle) % TWO_PI
        if 0 < d < span:
            out.append(g)
    return out


def jump_residual(e1: RhEvaluation, e2: RhEvaluation, t) -> float:
    t = complex(t)
    if (e1.structure != e2.structure or e1.xi != e2.xi or e1.beta != e2.beta
            or e1.shift != e2.shift):
        raise DomainError("evaluations must share structure, torus point, beta and shift")
    span = _clockwise_angle(e1.ray, e2.ray)
    if not 0 < span < math.pi:
        raise SectorError("rays do not bound a convex clockwise sector")
    s = e1.structure
    log_s = 0j
    for g in sector_classes(s, e1.ray, e2.ray):
        p = s.omega(g) * s.pair(e1.beta, g)
        if p:
            base = 1.0 - bc.torus_eval(s, e1.xi, g) * cmath.exp(-s.Z(g) / t)
            log_s += p * cmath.log(base)
    ratio = cmath.exp(log_y_solution(e1, t) - log_y_solution(e2, t) - log_s)
    return abs(ratio - 1.0)


def limit_check(e: RhEvaluation, radii) -> list:
    v = e.ray.direction
    return [abs(y_solution(e, r * v) - 1.0) for r in radii]


def growth_check(e: RhEvaluation, radii) -> float:
    """Least-squares slope of ln|Y| against ln|t| along the ray."""
    v = e.ray.direction
    lx = np.log(np.asarray(radii, dtype=float))
    ly = np.array([log_y_solution(e, r * v).real if e.factors else 0.0 for r in radii])
    slope, _ = np.polyfit(lx, ly, 1)
    return float(slope)


def winding_number(f, center: complex, radius: float, samples: int = 256) -> int:
    """Argument-principle count (zeros minus poles) of f inside the circle."""
    vals = [f(center + radius * cmath.exp(1j * TWO_PI * k / samples)) for k in range(samples)]
    total = 0.0
    for a, b in zip(vals, vals[1:] + vals[:1]):
        total += cmath.phase(b / a)
    return round(total / TWO_PI)


def isolation_radius(e: RhEvaluation, point: complex, frac: float = 0.25) -> float:
    """A radius around ``point`` that stays inside H_r and clear of other singular points."""
    d = abs((point * e.ray.direction.conjugate()).real)
    d = min(d, abs(point))
    for f in e.factors:
        for t, _m, _k in _factor_points(f, None):
            gap = abs(t - point)
            if gap > 1e-14 * abs(point):
                d = min(d, gap)
    return frac * d


@dataclass(frozen=True)
class HoloWitness:
    point: CriticalPoint
    beta: tuple
    ray: Ray
    winding: int


def holo_nonexistence_witness(s: BpsStructure, xi: TorusPoint, gamma) -> HoloWitness:
    """Locate the forced zero or pole at t0 = Z(gamma)/theta(gamma) and confirm it by winding.

    Hypothesis: theta(gamma) != 0 (theta reduced to Im in [0, 2 pi)). For real
    theta the point sits on l_gamma when theta > 0 and on -l_gamma when theta < 0.
    """
    gamma = tuple(gamma)
    th = bc.theta_hat(s, xi, gamma)
    if abs(th) < 1e-14:
        raise HypothesisError("theta(gamma) = 0")
    z = s.Z(gamma)
    t0 = z / th
    betas = [s.basis(j) for j in range(s.rank) if s.pair(s.basis(j), gamma) != 0]
    if not betas:
        raise HypothesisError("no basis class pairs nontrivially with gamma")
    act = bc.active_rays(s)
    cands = [Ray.of(t0).rotated(d) for d in (0.0, 0.05, -0.05, 0.3, -0.3, 1.0, -1.0)]
    for i, r in enumerate(act):
        nxt = act[(i + 1) % len(act)]
        gap = (nxt.angle - r.angle) % TWO_PI or TWO_PI
        cands.append(r.rotated(0.5 * gap))
        cands += [r.rotated(1e-3), r.rotated(-1e-3)]
    for r in cands:
        if bc.is_active_ray(s, r) or not r.in_half_plane(t0, 1e-9):
            continue
        for b in betas:
            e = RhEvaluation(s, xi, b, r)
            for cp in critical_points(e):
                if abs(cp.location - t0) < 1e-9 * abs(t0):
                    rad = isolation_radius(e, cp.location)
                    w = winding_number(lambda t: y_solution(e, t), cp.location, rad)
                    return HoloWitness(cp, b, r, w)
    raise HypothesisError("no minimal solution has a critical point at Z(gamma)/theta(gamma)")
