"""Finite BPS structures, rays, and points of the twisted torus.

A lattice class is a tuple of integers in the basis gamma_1..gamma_n. A point
of the twisted torus is stored through logarithmic coordinates theta_j with
Im theta_j in [0, 2 pi); the character of a class g is
    xi(g) = exp(sum_j g_j theta_j + pi i sigma(g)),
    sigma(g) = sum_{j<k} g_j g_k <gamma_j, gamma_k>  (mod 2),
which satisfies xi(a + b) = (-1)^<a,b> xi(a) xi(b).
"""
from __future__ import annotations

import cmath
import hashlib
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ActiveRayError, DomainError, ParseError

TWO_PI = 2.0 * math.pi
RAY_TOL = 1e-12
SUPPORT_TOL = 1e-12

LatticeClass = tuple  # tuple[int, ...]


def _as_class(g, rank: int) -> LatticeClass:
    g = tuple(int(c) for c in g)
    if len(g) != rank:
        raise DomainError(f"class {g} has length {len(g)}, expected {rank}")
    return g


def negate(g: Sequence[int]) -> LatticeClass:
    return tuple(-c for c in g)


@dataclass(frozen=True)
class BpsStructure:
    rank: int
    pairing: tuple  # rank x rank integer matrix, <gamma_i, gamma_j>
    central_charge: tuple  # Z(gamma_j), complex
    spectrum: tuple  # ((class, omega), ...)
    _omega: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        pairing = tuple(tuple(int(v) for v in row) for row in self.pairing)
        z = tuple(complex(v) for v in self.central_charge)
        spec = tuple((_as_class(g, self.rank), om) for g, om in self.spectrum)
        object.__setattr__(self, "pairing", pairing)
        object.__setattr__(self, "central_charge", z)
        object.__setattr__(self, "spectrum", spec)
        omega = {}
        for g, om in spec:
            omega[g] = omega.get(g, 0) + om
        object.__setattr__(self, "_omega", omega)

    def pair(self, a: Sequence[int], b: Sequence[int]) -> int:
        p = self.pairing
        return sum(a[i] * p[i][j] * b[j]
                   for i in range(self.rank) if a[i]
                   for j in range(self.rank) if b[j])

    def Z(self, g: Sequence[int]) -> complex:
        return sum((c * zc for c, zc in zip(g, self.central_charge)), 0j)

    def omega(self, g: Sequence[int]):
        return self._omega.get(tuple(g), 0)

    def active_classes(self) -> list:
        """Classes with nonzero Omega, in input order, without duplicates."""
        seen, out = set(), []
        for g, _ in self.spectrum:
            if g not in seen and self._omega[g] != 0:
                seen.add(g)
                out.append(g)
        return out

    def basis(self, j: int) -> LatticeClass:
        return tuple(1 if k == j else 0 for k in range(self.rank))

    # -- serialisation --------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "pairing": [list(r) for r in self.pairing],
            "central_charge": [[z.real, z.imag] for z in self.central_charge],
            "spectrum": [{"gamma": list(g), "omega": om} for g, om in self.spectrum],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BpsStructure":
        try:
            rank = int(d["rank"])
            pairing = d["pairing"]
            zs = [complex(float(re), float(im)) for re, im in d["central_charge"]]
            spec = [(tuple(e["gamma"]), e["omega"]) for e in d["spectrum"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed structure: {exc}") from exc
        if len(pairing) != rank or any(len(r) != rank for r in pairing):
            raise ParseError("pairing must be a rank x rank matrix")
        if len(zs) != rank:
            raise ParseError("central_charge must have rank entries")
        for g, om in spec:
            if len(g) != rank:
                raise ParseError(f"class {list(g)} has wrong length")
            if isinstance(om, bool) or not isinstance(om, (int, float)):
                raise ParseError(f"omega for {list(g)} is not a number")
        spec = [(g, int(om) if float(om).is_integer() else om) for g, om in spec]
        return cls(rank, pairing, zs, spec)

    def fingerprint(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class Ray:
    """Open ray R_{>0} e^{i angle}; angle normalised into [0, 2 pi)."""

    angle: float

    def __post_init__(self):
        a = math.fmod(float(self.angle), TWO_PI)
        if a < 0:
            a += TWO_PI
        if a >= TWO_PI:
            a = 0.0
        object.__setattr__(self, "angle", a)

    @classmethod
    def of(cls, v: complex) -> "Ray":
        if v == 0:
            raise DomainError("zero vector spans no ray")
        return cls(cmath.phase(v))

    @property
    def direction(self) -> complex:
        return cmath.exp(1j * self.angle)

    def opposite(self) -> "Ray":
        return Ray(self.angle + math.pi)

    def rotated(self, delta: float) -> "Ray":
        return Ray(self.angle + delta)

    def same_as(self, other: "Ray", tol: float = RAY_TOL) -> bool:
        d = abs(self.angle - other.angle)
        return min(d, TWO_PI - d) < tol

    def in_half_plane(self, t: complex, tol: float = RAY_TOL) -> bool:
        """t in H_r = {Re(t / v) > 0}, v on this ray."""
        return (t * self.direction.conjugate()).real > tol * abs(t)


@dataclass(frozen=True)
class TorusPoint:
    """Logarithmic coordinates theta_j with Im theta_j in [0, 2 pi)."""

    thetas: tuple

    def __post_init__(self):
        object.__setattr__(self, "thetas", tuple(_normalise(complex(t)) for t in self.thetas))

    @classmethod
    def from_thetas(cls, values: Iterable) -> tuple:
        """Build a point and report whether any coordinate was renormalised."""
        vals = [complex(v) for v in values]
        pt = cls(tuple(vals))
        moved = any(abs(a - b) > 0 for a, b in zip(vals, pt.thetas))
        return pt, moved

    def to_dict(self) -> dict:
        return {"theta": [[t.real, t.imag] for t in self.thetas]}

    @classmethod
    def from_dict(cls, d: dict, warn: bool = True) -> "TorusPoint":
        try:
            vals = [complex(float(re), float(im)) for re, im in d["theta"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed torus point: {exc}") from exc
        pt, moved = cls.from_thetas(vals)
        if moved and warn:
            warnings.warn("torus coordinates renormalised to Im theta in [0, 2pi)",
                          stacklevel=2)
        return pt


def _normalise(theta: complex) -> complex:
    n = math.floor(theta.imag / TWO_PI)
    im = theta.imag - n * TWO_PI
    if im >= TWO_PI:
        im -= TWO_PI
    if im < 0:
        im = 0.0
    return complex(theta.real, im)


normalise_theta = _normalise


@dataclass(frozen=True)
class StructureFlags:
    generic: bool
    uncoupled: bool
    integral: bool
    finite: bool


@dataclass
class ValidationReport:
    checks: dict  # name -> bool
    messages: list

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def validate(s: BpsStructure) -> ValidationReport:
    checks, msgs = {}, []
    n = s.rank
    p = s.pairing
    skew = all(p[i][j] == -p[j][i] for i in range(n) for j in range(n))
    checks["skew"] = skew
    if not skew:
        msgs.append("pairing is not skew-symmetric")
    classes = [g for g, _ in s.spectrum]
    checks["unique_entries"] = len(set(classes)) == len(classes)
    if not checks["unique_entries"]:
        msgs.append("duplicate spectrum entries")
    sym = all(s.omega(negate(g)) == s.omega(g) for g in classes)
    checks["symmetric"] = sym
    if not sym:
        msgs.append("Omega(-gamma) != Omega(gamma) for some class")
    gap = True
    for g in s.active_classes():
        if abs(s.Z(g)) <= SUPPORT_TOL:
            gap = False
            msgs.append(f"Z vanishes on active class {list(g)}")
    checks["support"] = gap
    checks["finite"] = True
    return ValidationReport(checks, msgs)


def _parallel(a: complex, b: complex) -> bool:
    return abs((a * b.conjugate()).imag) <= RAY_TOL * abs(a) * abs(b)


def classify(s: BpsStructure) -> StructureFlags:
    act = s.active_classes()
    generic = True
    uncoupled = True
    for i, a in enumerate(act):
        for b in act[i + 1:]:
            pab = s.pair(a, b)
            if pab != 0:
                uncoupled = False
                if _parallel(s.Z(a), s.Z(b)):
                    generic = False
    integral = all(float(s.omega(g)).is_integer() for g in act)
    return StructureFlags(generic, uncoupled, integral, True)


def active_rays(s: BpsStructure) -> list:
    """Distinct rays R_{>0} Z(gamma) over active classes, sorted by angle."""
    rays = sorted((Ray.of(s.Z(g)) for g in s.active_classes()), key=lambda r: r.angle)
    out = []
    for r in rays:
        if not out or not r.same_as(out[-1]):
            out.append(r)
    if len(out) > 1 and out[0].same_as(out[-1]):
        out.pop()
    return out


def is_active_ray(s: BpsStructure, r: Ray) -> bool:
    return any(r.same_as(a) for a in active_rays(s))


def in_gamma_plus(s: BpsStructure, g: Sequence[int]) -> bool:
    """0 < arg Z(g) <= pi."""
    ph = cmath.phase(s.Z(g))
    return ph > RAY_TOL or ph < -math.pi + RAY_TOL


def gamma_plus(s: BpsStructure) -> list:
    return [g for g in s.active_classes() if in_gamma_plus(s, g)]


def gamma_r_omega(s: BpsStructure, r: Ray) -> list:
    """Active classes with 0 < arg(v / Z(gamma)) < pi, v on r."""
    v = r.direction
    out = []
    for g in s.active_classes():
        d = cmath.phase(v / s.Z(g))
        if abs(d) < RAY_TOL or abs(abs(d) - math.pi) < RAY_TOL:
            raise ActiveRayError(f"ray at angle {r.angle} is active")
        if d > 0:
            out.append(g)
    return out


def double(s: BpsStructure) -> BpsStructure:
    """Double Pi + Pi^dual with <(a,u),(b,v)> = <a,b> + v(a) - u(b)."""
    n = s.rank
    m = [[0] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            m[i][j] = s.pairing[i][j]
        m[i][n + i] = 1
        m[n + i][i] = -1
    zs = list(s.central_charge) + [0j] * n
    spec = [(tuple(g) + (0,) * n, om) for g, om in s.spectrum]
    return BpsStructure(2 * n, m, zs, spec)


def dual_basis(base_rank: int, j: int) -> LatticeClass:
    """gamma_j^dual inside the doubled lattice of a rank-``base_rank`` base."""
    return tuple(1 if k == base_rank + j else 0 for k in range(2 * base_rank))


def null_lift(base: BpsStructure, g: Sequence[int], literal: bool = False) -> LatticeClass:
    """(g, nu) in the doubled lattice with nu pairing g against the base basis.

    Default nu_j = <g, gamma_j>, which pairs to zero with every (delta, 0).
    literal=True gives nu_j = <gamma_j, g>; the two agree when the base
    pairing vanishes on g.
    """
    g = _as_class(g, base.rank)
    basis = [base.basis(j) for j in range(base.rank)]
    nu = [base.pair(b, g) if literal else base.pair(g, b) for b in basis]
    return g + tuple(nu)


def sigma(s: BpsStructure, g: Sequence[int]) -> int:
    acc = 0
    n = s.rank
    for j in range(n):
        if g[j]:
            for k in range(j + 1, n):
                acc += g[j] * g[k] * s.pairing[j][k]
    return acc % 2


def theta_of(s: BpsStructure, xi: TorusPoint, g: Sequence[int]) -> complex:
    """Logarithm of xi(g); no reduction modulo 2 pi i."""
    if len(xi.thetas) != s.rank:
        raise DomainError("torus point and structure have different rank")
    th = sum((c * t for c, t in zip(g, xi.thetas)), 0j)
    return th + 1j * math.pi * sigma(s, g)


def theta_hat(s: BpsStructure, xi: TorusPoint, g: Sequence[int]) -> complex:
    """theta_of reduced to Im in [0, 2 pi)."""
    return _normalise(theta_of(s, xi, g))


def torus_eval(s: BpsStructure, xi: TorusPoint, g: Sequence[int]) -> complex:
    return cmath.exp(theta_of(s, xi, g))
