"""bps-rh command line: validate | eval | check | poles | double.

Exit codes: 0 success, 1 check failure or active ray, 2 unreadable input.
"""
from __future__ import annotations

import argparse
import cmath
import json
import math
import random
import sys
import time
import warnings

from . import bps_core as bc
from . import connection as cf
from . import integral_oracle as io_
from . import lambda_kernel as lk
from . import rh_solver as rh
from . import tolerances
from .bps_core import BpsStructure, Ray, TorusPoint
from .errors import ActiveRayError, BpsRhError, CriticalPointError, DomainError, ParseError

EXIT_OK, EXIT_FAIL, EXIT_PARSE = 0, 1, 2
SUITES = ("lemma31", "thm32", "jumps", "limits", "growth", "flatness")


class _Abort(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def fmt(x: float) -> str:
    return repr(float(x))


# -- input ----------------------------------------------------------------

def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise _Abort(EXIT_PARSE, f"cannot read {path}: {exc}")


def load_structure(path) -> BpsStructure:
    try:
        return BpsStructure.from_dict(_read_json(path))
    except (ParseError, DomainError) as exc:
        raise _Abort(EXIT_PARSE, str(exc))


def load_torus(path, rank) -> TorusPoint:
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            xi = TorusPoint.from_dict(_read_json(path))
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
    except ParseError as exc:
        raise _Abort(EXIT_PARSE, str(exc))
    if len(xi.thetas) != rank:
        raise _Abort(EXIT_PARSE, f"torus point has {len(xi.thetas)} coordinates, structure rank is {rank}")
    return xi


def parse_class(text: str, rank: int) -> tuple:
    try:
        g = tuple(int(v) for v in text.replace(";", ",").split(","))
    except ValueError:
        raise _Abort(EXIT_PARSE, f"bad lattice class {text!r}")
    if len(g) != rank:
        raise _Abort(EXIT_PARSE, f"class {text!r} does not have {rank} entries")
    return g


def parse_ray(text: str, s: BpsStructure) -> Ray:
    """Angle in radians, or 'between:G1:G2' for the bisector of the clockwise
    sector from the ray of Z(G1) to the ray of Z(G2)."""
    if text.startswith("between:"):
        parts = text.split(":")
        if len(parts) != 3:
            raise _Abort(EXIT_PARSE, f"bad ray spec {text!r}")
        r1 = Ray.of(s.Z(parse_class(parts[1], s.rank)))
        r2 = Ray.of(s.Z(parse_class(parts[2], s.rank)))
        span = (r1.angle - r2.angle) % (2 * math.pi)
        return r1.rotated(-0.5 * span)
    try:
        return Ray(float(text))
    except ValueError:
        raise _Abort(EXIT_PARSE, f"bad ray spec {text!r}")


def grid_points(args, ray: Ray) -> list:
    pts = []
    for item in args.t or []:
        try:
            re_, im_ = (float(v) for v in item.split(","))
        except ValueError:
            raise _Abort(EXIT_PARSE, f"bad t value {item!r}")
        pts.append(complex(re_, im_))
    for r in args.radii or []:
        pts.append(r * ray.direction)
    if args.annulus:
        rmin, rmax, nr, na = args.annulus
        nr, na = int(nr), int(na)
        for i in range(nr):
            rad = rmin if nr == 1 else rmin * (rmax / rmin) ** (i / (nr - 1))
            for k in range(na):
                pts.append(cmath.rect(rad, 2 * math.pi * k / na))
    if not pts:
        raise _Abort(EXIT_PARSE, "no grid points given")
    if any(p == 0 for p in pts):
        raise _Abort(EXIT_PARSE, "grid contains t = 0")
    return pts


# -- commands -------------------------------------------------------------

def _report(command, s, checks, t0, timing):
    rep = {
        "command": command,
        "fingerprint": s.fingerprint() if s is not None else None,
        "checks": checks,
        "ok": all(c["status"] != "fail" for c in checks),
    }
    if timing:
        rep["wall_time"] = time.perf_counter() - t0
    return rep


def _check(name, worst, tol, lower_is_better=True, status=None):
    if status is None:
        status = "pass" if (worst <= tol if lower_is_better else worst >= tol) else "fail"
    return {"name": name, "status": status, "max_residual": worst, "tolerance": tol}


def cmd_validate(args, out):
    t0 = time.perf_counter()
    s = load_structure(args.structure)
    rep = bc.validate(s)
    flags = bc.classify(s)
    checks = [{"name": k, "status": "pass" if v else "fail"} for k, v in rep.checks.items()]
    body = _report(["validate", args.structure], s, checks, t0, args.timing)
    body["flags"] = {"generic": flags.generic, "uncoupled": flags.uncoupled,
                     "integral": flags.integral, "finite": flags.finite}
    body["messages"] = rep.messages
    out.write(json.dumps(body, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if rep.ok else EXIT_FAIL


def _evaluation(args):
    s = load_structure(args.structure)
    xi = load_torus(args.xi, s.rank)
    beta = parse_class(args.beta, s.rank)
    ray = parse_ray(args.ray, s)
    try:
        e = rh.RhEvaluation(s, xi, beta, ray)
    except ActiveRayError as exc:
        raise _Abort(EXIT_FAIL, str(exc))
    except DomainError as exc:
        raise _Abort(EXIT_FAIL, str(exc))
    return s, e


def _write_critical(path, cps):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("t_re,t_im,gamma,k,order\n")
        for c in cps:
            g = ";".join(str(v) for v in c.gamma)
            fh.write(f"{fmt(c.location.real)},{fmt(c.location.imag)},{g},{c.k},{c.order}\n")


def cmd_eval(args, out):
    s, e = _evaluation(args)
    pts = grid_points(args, e.ray)
    out.write("t_re,t_im,Y_re,Y_im,flag\n")
    for t in pts:
        flag, y = "", complex("nan")
        try:
            y = rh.y_solution(e, t)
        except CriticalPointError:
            flag = "critical"
        except DomainError:
            flag = "outside"
        out.write(f"{fmt(t.real)},{fmt(t.imag)},{fmt(y.real)},{fmt(y.imag)},{flag}\n")
    if args.sidecar:
        _write_critical(args.sidecar, rh.critical_points(e))
    return EXIT_OK


def cmd_poles(args, out):
    _s, e = _evaluation(args)
    cps = [c for c in rh.critical_points(e) if abs(c.k) <= args.kmax]
    out.write("t_re,t_im,gamma,k,order\n")
    for c in cps:
        g = ";".join(str(v) for v in c.gamma)
        out.write(f"{fmt(c.location.real)},{fmt(c.location.imag)},{g},{c.k},{c.order}\n")
    return EXIT_OK


def cmd_double(args, out):
    s = load_structure(args.structure)
    d = bc.double(s)
    text = json.dumps(d.to_dict(), indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


# -- check suites ---------------------------------------------------------

def _mid_rays(s):
    act = bc.active_rays(s)
    if not act:
        return [Ray(0.5)]
    if len(act) == 1:
        return [act[0].rotated(0.5), act[0].rotated(-0.5)]
    out = []
    for i, r in enumerate(act):
        nxt = act[(i + 1) % len(act)]
        gap = (nxt.angle - r.angle) % (2 * math.pi)
        out.append(r.rotated(0.5 * gap))
    return out


def suite_lemma31(s, xi, tol):
    rng = random.Random(0)
    xs = [bc.theta_hat(s, xi, g) / (2j * math.pi) for g in bc.gamma_plus(s)] or [0.25 + 0.1j]
    rec = refl = big = 0.0
    for x in xs:
        for _ in range(20):
            y = cmath.rect(rng.uniform(0.5, 20), rng.uniform(-3.0, 3.0))
            lhs = lk.lambda_(x + 1, y)
            rhs = lk.lambda_(x, y) * (1 + x / y)
            rec = max(rec, abs(lhs / rhs - 1))
            if x.imag > 0:
                refl = max(refl, lk.lambda_reflection_check(x, y))
        big = max(big, abs(lk.lambda_(x, 1e3 * cmath.exp(0.25j * math.pi)) - 1))
    return [_check("lemma31.recurrence", rec, tol["lemma31.recurrence"]),
            _check("lemma31.reflection", refl, tol["lemma31.reflection"]),
            _check("lemma31.large_y", big, tol["lemma31.large_y"])]


def suite_thm32(s, xi, tol):
    q = io_.QuadratureSpec(tol["quadrature"], tol["quadrature"])
    thetas = [bc.theta_hat(s, xi, g) for g in bc.gamma_plus(s)]
    thetas = [t for t in thetas if t.imag > 0] or [1j * a for a in (math.pi / 4, math.pi / 2, math.pi, 1.5 * math.pi)]
    worst = 0.0
    for th in thetas:
        for w in (-2j, -5j, -5 - 5j, -10 - 3j, -20j):
            worst = max(worst, io_.theorem32_residual(th, w, q))
    return [_check("thm32", worst, tol["thm32"])]


def _betas(s):
    return [s.basis(j) for j in range(s.rank)]


def suite_jumps(s, xi, tol):
    if not bc.classify(s).uncoupled:
        return [_check("jumps", 0.0, tol["jumps"], status="skipped")]
    act = bc.active_rays(s)
    n = len(act)
    worst = 0.0
    pairs = []
    # sectors around one active ray, and around two neighbours when still convex
    for i in range(n):
        gap_lo = (act[i].angle - act[i - 1].angle) % (2 * math.pi) if n > 1 else math.pi
        for step in (0, 1):
            if step and n < 3:
                continue
            j = (i + step) % n
            gap_hi = (act[(j + 1) % n].angle - act[j].angle) % (2 * math.pi) if n > 1 else math.pi
            r1 = act[j].rotated(min(0.4, 0.5 * gap_hi))
            r2 = act[i].rotated(-min(0.4, 0.5 * gap_lo))
            span = (r1.angle - r2.angle) % (2 * math.pi)
            if 0 < span < math.pi:
                pairs.append((r1, r2, span))
    for beta in _betas(s):
        for r1, r2, span in pairs:
            e1 = rh.RhEvaluation(s, xi, beta, r1)
            e2 = rh.RhEvaluation(s, xi, beta, r2)
            centre = r1.rotated(-0.5 * span)
            room = 0.5 * (math.pi - span)
            for rad in (0.4, 1.0, 2.5):
                for off in (-0.6, 0.0, 0.6):
                    t = cmath.rect(rad, centre.angle + off * room)
                    try:
                        worst = max(worst, rh.jump_residual(e1, e2, t))
                    except CriticalPointError:
                        continue
    return [_check("jumps", worst, tol["jumps"])]


def suite_limits(s, xi, tol):
    if not bc.classify(s).uncoupled:
        return [_check("limits", 0.0, tol["limits.final"], status="skipped")]
    worst, monotone = 0.0, True
    for r in _mid_rays(s):
        for beta in _betas(s):
            vals = rh.limit_check(rh.RhEvaluation(s, xi, beta, r), [1e-1, 1e-2, 1e-3])
            monotone &= all(b <= a for a, b in zip(vals, vals[1:]))
            worst = max(worst, vals[-1])
    st = "pass" if monotone and worst < tol["limits.final"] else "fail"
    return [_check("limits", worst, tol["limits.final"], status=st)]


def suite_growth(s, xi, tol):
    if not bc.classify(s).uncoupled:
        return [_check("growth", 0.0, tol["growth.stability"], status="skipped")]
    worst = 0.0
    radii = [10.0 * 2 ** k for k in range(5)]
    for r in _mid_rays(s):
        for beta in _betas(s):
            e = rh.RhEvaluation(s, xi, beta, r)
            a = rh.growth_check(e, radii)
            b = rh.growth_check(e, radii + [radii[-1] * 2])
            if abs(a) > 1e-3:
                worst = max(worst, abs(b - a) / abs(a))
    return [_check("growth", worst, tol["growth.stability"])]


def _context(s, xi):
    """A DoubledContext if s is a trivially paired base or the double of one."""
    if not any(v for row in s.pairing for v in row):
        return cf.DoubledContext.build(s, xi.thetas)
    if s.rank % 2:
        return None
    m = s.rank // 2
    base = BpsStructure(m, [[0] * m for _ in range(m)], s.central_charge[:m],
                        [(g[:m], om) for g, om in s.spectrum])
    if bc.double(base) != s:
        return None
    return cf.DoubledContext(base, s, xi)


def suite_flatness(s, xi, tol):
    c = _context(s, xi)
    if c is None:
        return [_check("flatness", 0.0, tol["flatness.residual"], status="skipped")]
    worst = 0.0
    ratio_ok = True
    worst_ratio = 4.0
    for r in _mid_rays(c.doubled):
        for j in range(c.m):
            for rad in (0.7, 1.6):
                t = cmath.rect(rad, r.angle + 0.3)
                try:
                    worst = max(worst, cf.flatness_residual(c, r, j, t))
                    a = cf.flatness_residual(c, r, j, t, h=1e-2)
                    b = cf.flatness_residual(c, r, j, t, h=5e-3)
                except CriticalPointError:
                    continue
                if b > 0:
                    ratio = a / b
                    if not tol["flatness.ratio_lo"] <= ratio <= tol["flatness.ratio_hi"]:
                        ratio_ok = False
                        worst_ratio = ratio
    grad = 0.0
    g_an = cf.grad_f_omega(c)
    for j in range(c.m):
        fd = cf.fd_partial(c, cf.f_omega_closed, j)
        grad = max(grad, abs(fd - g_an[j]))
    return [_check("flatness.residual", worst, tol["flatness.residual"]),
            _check("flatness.ratio", worst_ratio, tol["flatness.ratio_lo"],
                   status="pass" if ratio_ok else "fail"),
            _check("flatness.gradient", grad, tol["flatness.gradient"])]


_SUITE_FNS = {
    "lemma31": suite_lemma31, "thm32": suite_thm32, "jumps": suite_jumps,
    "limits": suite_limits, "growth": suite_growth, "flatness": suite_flatness,
}


def cmd_check(args, out):
    t0 = time.perf_counter()
    try:
        tol = tolerances.load()
    except (OSError, ValueError, KeyError) as exc:
        raise _Abort(EXIT_PARSE, f"tolerance table: {exc}")
    s = load_structure(args.structure)
    xi = load_torus(args.xi, s.rank)
    if not bc.validate(s).ok:
        raise _Abort(EXIT_FAIL, "structure fails validation")
    names = SUITES if args.suite == "all" else (args.suite,)
    checks = []
    for name in names:
        checks += _SUITE_FNS[name](s, xi, tol)
    body = _report(["check", args.structure, args.xi, args.suite], s, checks, t0, args.timing)
    out.write(json.dumps(body, indent=2, sort_keys=True) + "\n")
    if not body["ok"]:
        bad = max((c for c in checks if c["status"] == "fail"),
                  key=lambda c: c["max_residual"] / c["tolerance"])
        print(f"worst offender: {bad['name']} residual {bad['max_residual']!r} "
              f"tolerance {bad['tolerance']!r}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# -- entry point ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bps-rh", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check structure invariants")
    v.add_argument("structure")
    v.add_argument("--timing", action="store_true")

    for name, helptext in (("eval", "evaluate Y on a grid"), ("poles", "list critical points")):
        e = sub.add_parser(name, help=helptext)
        e.add_argument("structure")
        e.add_argument("xi")
        e.add_argument("--beta", required=True, help="lattice class, e.g. 0,1")
        e.add_argument("--ray", required=True, help="angle in radians or between:G1:G2")
        if name == "eval":
            e.add_argument("--t", action="append", help="grid point 're,im' (repeatable)")
            e.add_argument("--radii", type=float, nargs="+", help="radii along the ray")
            e.add_argument("--annulus", type=float, nargs=4,
                           metavar=("RMIN", "RMAX", "NR", "NA"))
            e.add_argument("--sidecar", help="write critical points to this CSV")
        else:
            e.add_argument("--kmax", type=int, default=5)

    c = sub.add_parser("check", help="run verification suites")
    c.add_argument("structure")
    c.add_argument("xi")
    c.add_argument("--suite", choices=SUITES + ("all",), default="all")
    c.add_argument("--timing", action="store_true")

    d = sub.add_parser("double", help="write the doubled structure")
    d.add_argument("structure")
    d.add_argument("--out")
    return p


_COMMANDS = {"validate": cmd_validate, "eval": cmd_eval, "check": cmd_check,
             "poles": cmd_poles, "double": cmd_double}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        return _COMMANDS[args.command](args, out)
    except _Abort as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except BpsRhError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
