"""Polynomial root analysis and trajectory diagnostics.

Root isolation works in exact rational arithmetic: float coefficients are
converted to :class:`fractions.Fraction` without rounding, the square-free part
is taken, and a Sturm sequence counts distinct roots on each subinterval.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .dynamics import MOMENTUM_PLANES
from .manifold import cylinder_coords, torus_coords

TRIM_TOL = 1e-14
ROOT_TOL = 1e-13
CONFINEMENT_TOL = 1e-8
SIGNATURE_TOL = 1e-9


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial with coefficients in ascending degree order."""

    coeffs: tuple

    def __post_init__(self):
        c = [float(x) for x in self.coeffs]
        while len(c) > 1 and abs(c[-1]) <= TRIM_TOL:
            c.pop()
        if not c:
            c = [0.0]
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return self.degree == 0 and self.coeffs[0] == 0.0

    def __call__(self, x):
        acc = 0.0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def exact(self, x: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + Fraction(c)
        return acc

    def derivative(self) -> "Polynomial":
        if self.degree == 0:
            return Polynomial((0.0,))
        return Polynomial(tuple(k * c for k, c in enumerate(self.coeffs) if k))

    def __str__(self):
        terms = [f"{c:+.6g}*x^{k}" for k, c in enumerate(self.coeffs) if c]
        return " ".join(terms) or "0"


# exact helpers on lists of Fractions (ascending order)

def _trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _rem(a, b):
    a = _trim(a)
    b = _trim(b)
    while len(a) >= len(b) and any(a):
        f = a[-1] / b[-1]
        shift = len(a) - len(b)
        for k, c in enumerate(b):
            a[k + shift] -= f * c
        a.pop()
        a = _trim(a) if a else [Fraction(0)]
    return a or [Fraction(0)]


def _div(a, b):
    a = _trim(a)
    b = _trim(b)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and any(a):
        f = a[-1] / b[-1]
        shift = len(a) - len(b)
        q[shift] = f
        for k, c in enumerate(b):
            a[k + shift] -= f * c
        a.pop()
    return _trim(q)


def _gcd(a, b):
    a, b = _trim(a), _trim(b)
    while any(b):
        a, b = b, _trim(_rem(a, b))
    return a


def _deriv(p):
    return [k * c for k, c in enumerate(p)][1:] or [Fraction(0)]


def _eval(p, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _sign(x):
    return (x > 0) - (x < 0)


def square_free(p: Polynomial) -> list:
    """Exact square-free part ``p / gcd(p, p')`` as Fractions."""
    ex = [Fraction(c) for c in p.coeffs]
    if len(ex) <= 2:
        return ex
    g = _gcd(ex, _deriv(ex))
    return _div(ex, g) if len(g) > 1 else ex


def _sub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return _trim([x - y for x, y in zip(a, b)])


def square_free_factors(p: Polynomial) -> list:
    """Yun's factorisation: ``[(f_k, k), ...]`` with ``p = const * prod f_k**k``."""
    f = [Fraction(c) for c in p.coeffs]
    if len(f) <= 2:
        return [(f, 1)] if len(f) == 2 else []
    a = _gcd(f, _deriv(f))
    b = _div(f, a)
    c = _div(_deriv(f), a)
    d = _sub(c, _deriv(b))
    out = []
    k = 1
    while len(b) > 1:
        a = _gcd(b, d)
        if len(a) > 1:
            out.append((a, k))
        b = _div(b, a)
        c = _div(d, a)
        d = _sub(c, _deriv(b))
        k += 1
    return out


def sturm_sequence(p: list) -> list:
    seq = [p, _deriv(p)]
    while len(seq[-1]) > 1 or seq[-1][0] != 0:
        r = _rem(seq[-2], seq[-1])
        if len(r) == 1 and r[0] == 0:
            break
        seq.append([-c for c in r])
    return seq


def _variations(values):
    signs = [s for s in (_sign(v) for v in values) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def sturm_count(seq, a: Fraction, b: Fraction) -> int:
    """Distinct real roots in ``(a, b]``."""
    return _variations([_eval(p, a) for p in seq]) - _variations([_eval(p, b) for p in seq])


def descartes_positive_count(p: Polynomial) -> int:
    """Sign changes in the coefficient sequence (zeros skipped)."""
    if p.is_zero():
        raise ValueError("zero polynomial")
    return _variations(p.coeffs)


def cauchy_bound(p: Polynomial) -> float:
    lead = abs(p.coeffs[-1])
    return 1.0 + max((abs(c) / lead for c in p.coeffs[:-1]), default=0.0)


@dataclass(frozen=True)
class RootBracket:
    lo: float
    hi: float
    root: float
    multiplicity: int = 1


def isolate_real_roots(p: Polynomial, interval: Sequence[float] = (-math.inf, math.inf), tol: float = ROOT_TOL) -> list:
    """Every distinct real root of ``p`` in the open interval, bracketed and refined.

    Each bracket carries the root's multiplicity (from the square-free factorisation).

    Infinite endpoints are replaced by the Cauchy bound. An endpoint that is
    itself a root is nudged outward by 1e-12 of the interval scale.
    """
    if p.is_zero():
        raise ValueError("zero polynomial")
    if p.degree == 0:
        return []
    bound = cauchy_bound(p)
    lo, hi = (float(x) for x in interval)
    lo = max(lo, -bound)
    hi = min(hi, bound)
    if not lo < hi:
        return []
    out = []
    for factor, mult in square_free_factors(p):
        out.extend(_isolate(factor, mult, Fraction(lo), Fraction(hi), tol))
    out.sort(key=lambda r: r.root)
    return out


def _isolate(sq, mult, a, b, tol):
    seq = sturm_sequence(sq)
    nudge = Fraction(1e-12) * max(Fraction(1), abs(a), abs(b))
    if _eval(sq, a) == 0:
        a = Fraction(float(a + nudge))
    if _eval(sq, b) == 0:
        b = Fraction(float(b - nudge))
    out = []
    stack = [(a, b, sturm_count(seq, a, b))]
    while stack:
        a, b, n = stack.pop()
        if n == 0:
            continue
        if n == 1:
            out.append(_refine(sq, a, b, tol, mult))
            continue
        mid = _split_point(sq, a, b)
        left = sturm_count(seq, a, mid)
        stack.append((a, mid, left))
        stack.append((mid, b, n - left))
    return out


def _split_point(sq, a: Fraction, b: Fraction) -> Fraction:
    """A point inside ``(a, b)`` that is not a root, as close to the middle as convenient."""
    for k in range(2, 64):
        for j in range(1, k):
            mid = Fraction(float(a + (b - a) * Fraction(j, k)))
            if a < mid < b and _eval(sq, mid) != 0:
                return mid
    raise ArithmeticError("could not split interval")


def _refine(sq, a: Fraction, b: Fraction, tol: float, mult: int = 1) -> RootBracket:
    """Bisect in floats, deciding each sign exactly."""
    lo, hi = float(a), float(b)
    sa = _sign(_eval(sq, Fraction(lo)))
    x0, x1 = lo, hi
    while x1 - x0 > tol * max(1.0, abs(x0)):
        mid = 0.5 * (x0 + x1)
        if not x0 < mid < x1:
            break
        sm = _sign(_eval(sq, Fraction(mid)))
        if sm == 0:
            return RootBracket(lo, hi, mid, mult)
        if sm == sa:
            x0 = mid
        else:
            x1 = mid
    return RootBracket(lo, hi, 0.5 * (x0 + x1), mult)


def positive_root_count(p: Polynomial, with_multiplicity: bool = True) -> int:
    roots = isolate_real_roots(p, (0.0, math.inf))
    return sum(r.multiplicity for r in roots) if with_multiplicity else len(roots)


class Verdict(enum.Enum):
    AllConfined = "AllConfined"
    CrossesContinuum = "CrossesContinuum"


@dataclass(frozen=True)
class ConfinementReport:
    variation: np.ndarray
    verdict: Verdict
    worst_body: int
    tol: float = CONFINEMENT_TOL

    @property
    def max_variation(self) -> float:
        return float(np.max(self.variation))


def foliation_radii_series(positions: np.ndarray, space) -> np.ndarray:
    """Per-sample, per-body ``(r, rho)`` of the canonical foliation leaf."""
    coords = torus_coords if space.sigma == 1 else cylinder_coords
    out = np.empty(positions.shape[:2] + (2,))
    for k, P in enumerate(positions):
        for i, p in enumerate(P):
            c = coords(p)
            out[k, i] = c.r, c.rho
    return out


def confinement_report(trajectory, space=None, tol: float = CONFINEMENT_TOL) -> ConfinementReport:
    """Does each body stay on one Clifford torus (S3) or hyperbolic cylinder (H3)?"""
    space = space or trajectory.ambient_space
    radii = foliation_radii_series(trajectory.positions, space)
    variation = np.max(np.ptp(radii, axis=0), axis=1)
    worst = int(np.argmax(variation))
    verdict = Verdict.AllConfined if np.all(variation <= tol) else Verdict.CrossesContinuum
    return ConfinementReport(variation, verdict, worst, tol)


def rotation_signature(trajectory, tol: float = SIGNATURE_TOL) -> dict:
    """Plane -> whether the configuration rotates relative to it (|c_plane| > tol)."""
    table = trajectory.integral_table()
    return {plane: bool(np.nanmax(np.abs(table[:, 1 + k])) > tol) for k, plane in enumerate(MOMENTUM_PLANES)}


@dataclass(frozen=True)
class Crossing:
    t: float
    x: float


def section_crossings(times, x, v, direction: int = -1) -> list:
    """Crossings of the section ``v = 0`` in one direction (-1: v goes + to -, a maximum of x).

    Each crossing is located by inverse linear interpolation of ``v`` and ``x``
    is interpolated at the same fraction.
    """
    times, x, v = (np.asarray(a, dtype=float) for a in (times, x, v))
    out = []
    for k in range(len(times) - 1):
        v0, v1 = v[k], v[k + 1]
        hit = (v0 > 0 >= v1) if direction < 0 else (v0 < 0 <= v1)
        if not hit:
            continue
        s = v0 / (v0 - v1)
        out.append(Crossing(times[k] + s * (times[k + 1] - times[k]), x[k] + s * (x[k + 1] - x[k])))
    return out


@dataclass(frozen=True)
class ReturnMap:
    crossings: tuple
    period: float
    distance: float


def return_map(times, x, v, direction: int = -1) -> ReturnMap:
    """First-return data on ``v = 0``: period estimate and distance between successive hits.

    ``distance`` is the largest ``|x_{k+1} - x_k|`` over consecutive crossings;
    NaN when fewer than two crossings were seen.
    """
    cs = section_crossings(times, x, v, direction)
    if len(cs) < 2:
        return ReturnMap(tuple(cs), math.nan, math.nan)
    period = (cs[-1].t - cs[0].t) / (len(cs) - 1)
    dist = max(abs(b.x - a.x) for a, b in zip(cs, cs[1:]))
    return ReturnMap(tuple(cs), period, dist)
