"""Symmetric two- and three-body reductions to one degree of freedom.

Every family is a second-order scalar equation ``x'' = f(x, x')`` for a single
shape variable. The right-hand side, its energy and its fixed-point polynomial
are written once in sympy; numeric callables and the analytic Jacobian are
generated from those expressions.

=================  ====  =====  ============  ===============================
family             kind  N      parameters    shape variable
=================  ====  =====  ============  ===============================
sys-L-pe           pe    3      m, c          z (Lagrangian, y = gamma z)
2b-pee             pee   2      m, c1, c2     r (antipodal in wx)
Lagrangian-ee      pee   3      m, c1, c2     r (equilateral in both planes)
Lagr-ne            ne    3      m, h          z (energy substituted)
Lagr-ne-b          ne    3      m, b          z (momentum form)
2b-ne-simple       nh    2      m, c          x (w = zeta x)
sys-E-nh           nh    3      m, c          x (one body at the vertex)
neh-2              neh   2      m, d1, d2     r
neh-RE             neh   3      m, d1, d2     r (one body on the yz branch)
=================  ====  =====  ============  ===============================

Variables with a symmetry constant are stored rescaled so that the equation
does not depend on it: sys-L-pe and Lagr-ne use ``z_bar = z sqrt(1 + gamma^2)``
(resp. ``sqrt(1 - gamma^2)``), the nh families ``x_bar = x sqrt(1 + zeta^2)``.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from functools import lru_cache
from types import MappingProxyType

import numpy as np
import sympy as sp

from .analysis import Polynomial, isolate_real_roots
from .errors import DomainExit
from .rotopulse import SPACE_OF, Ansatz, Kind, angular_velocity
from .rotopulse import lift as lift_criterion

THIRDS = (0.0, 2 * math.pi / 3, 4 * math.pi / 3)
RESIDUAL_TOL = 1e-12

_x, _v = sp.symbols("x v", real=True)
_X = sp.Symbol("X", positive=True)
_m, _c, _c1, _c2, _b, _h, _d1, _d2 = sp.symbols("m c c1 c2 b h d1 d2", real=True)
_SYM = {"m": _m, "c": _c, "c1": _c1, "c2": _c2, "b": _b, "h": _h, "d1": _d1, "d2": _d2}


@dataclass(frozen=True)
class _Def:
    kind: Kind
    n: int
    params: tuple
    domain: tuple
    accel: sp.Expr
    energy: sp.Expr
    # fixed points solve fp_poly(X) = 0 with x = +-sqrt(X); fp_range bounds X
    fp_poly: sp.Expr
    fp_range: tuple
    symmetric: bool = False
    shape: str = ""


def _defs():
    x, v, X, m = _x, _v, _X, _m
    s3 = sp.sqrt(3)
    out = {}

    r2 = 1 - x**2
    out["sys-L-pe"] = _Def(
        Kind.PositiveElliptic, 3, ("m", "c"), (-1.0, 1.0),
        x * (8 * m / (s3 * sp.sqrt(r2) * (1 + 3 * x**2) ** sp.Rational(3, 2)) - (_c**2 / (9 * m**2) + v**2) / r2),
        3 * m * v**2 / (2 * r2) + _c**2 / (6 * m * r2) - s3 * m**2 * (3 * x**2 - 1) / (sp.sqrt(r2) * sp.sqrt(1 + 3 * x**2)),
        _c**4 * (1 + 3 * X) ** 3 - 1728 * m**6 * (1 - X), (0.0, 1.0), symmetric=True, shape="gamma")

    rho2 = 1 - x**2
    out["2b-pee"] = _Def(
        Kind.PositiveEllipticElliptic, 2, ("m", "c1", "c2"), (0.0, 1.0),
        x * rho2 * (_c1**2 / (4 * m**2 * x**4) - _c2**2 / (4 * m**2 * rho2**2)) - x * v**2 / rho2
        - m / (4 * x**2 * sp.sqrt(rho2)),
        m * v**2 / rho2 + _c1**2 / (4 * m * x**2) + _c2**2 / (4 * m * rho2)
        - m**2 * (1 - 2 * x**2) / (2 * x * sp.sqrt(rho2)),
        (_c1**2 * (1 - X) ** 2 - _c2**2 * X**2) ** 2 - m**6 * X * (1 - X), (0.0, 1.0))

    out["Lagrangian-ee"] = _Def(
        Kind.PositiveEllipticElliptic, 3, ("m", "c1", "c2"), (0.0, 1.0),
        x * rho2 * (_c1**2 / (9 * m**2 * x**4) - _c2**2 / (9 * m**2 * rho2**2)) - x * v**2 / rho2,
        3 * m * v**2 / (2 * rho2) + (_c1**2 / x**2 + _c2**2 / rho2) / (6 * m) + s3 * m**2,
        _c1**2 * (1 - X) ** 2 - _c2**2 * X**2, (0.0, 1.0))

    q2 = x**2 - 1
    pot_ne = -s3 * m**2 * (3 * x**2 - 1) / (sp.sqrt(q2) * sp.sqrt(3 * x**2 + 1))
    out["Lagr-ne"] = _Def(
        Kind.NegativeElliptic, 3, ("m", "h"), (1.0, math.inf),
        x * (2 * _h / (3 * m) - 2 * m * (5 - 9 * x**4) / (s3 * sp.sqrt(q2) * (3 * x**2 + 1) ** sp.Rational(3, 2))),
        _h + 0 * x,
        _h**2 * (X - 1) * (3 * X + 1) ** 3 - 3 * m**4 * (5 - 9 * X**2) ** 2, (1.0, math.inf), shape="gamma")
    out["Lagr-ne-b"] = _Def(
        Kind.NegativeElliptic, 3, ("m", "b"), (1.0, math.inf),
        x * (v**2 / q2 + _b**2 / (9 * m**2 * q2) - 8 * m / (s3 * sp.sqrt(q2) * (3 * x**2 + 1) ** sp.Rational(3, 2))),
        3 * m * v**2 / (2 * q2) + _b**2 / (6 * m * q2) + pot_ne,
        _b**4 * (3 * X + 1) ** 3 - 1728 * m**6 * (X - 1), (1.0, math.inf), shape="gamma")

    rho2 = 1 + x**2
    out["2b-ne-simple"] = _Def(
        Kind.NegativeHyperbolic, 2, ("m", "c"), (0.0, math.inf),
        x * (v**2 / rho2 + _c**2 / (4 * m**2 * rho2) - m / (4 * x**3 * sp.sqrt(rho2))),
        m * v**2 / rho2 + _c**2 / (4 * m * rho2) - m**2 * (2 * x**2 + 1) / (2 * x * sp.sqrt(rho2)),
        _c**4 * X**3 - m**6 * (X + 1), (0.0, math.inf), shape="zeta")

    out["sys-E-nh"] = _Def(
        Kind.NegativeHyperbolic, 3, ("m", "c"), (0.0, math.inf),
        x * (v**2 / rho2 + _c**2 * rho2 / (m**2 * (2 * x**2 + 3) ** 2) - m * (4 * x**2 + 5) / (4 * x**3 * sp.sqrt(rho2))),
        m * v**2 / rho2 + _c**2 / (2 * m * (2 * x**2 + 3)) - 2 * m**2 * sp.sqrt(rho2) / x
        - m**2 * (2 * x**2 + 1) / (2 * x * sp.sqrt(rho2)),
        16 * _c**4 * X**3 * (X + 1) ** 3 - m**6 * (4 * X + 5) ** 2 * (2 * X + 3) ** 4, (0.0, math.inf), shape="zeta")

    out["neh-2"] = _Def(
        Kind.NegativeEllipticHyperbolic, 2, ("m", "d1", "d2"), (0.0, math.inf),
        x * rho2 * (_d1**2 / (4 * m**2 * x**4) + _d2**2 / (4 * m**2 * rho2**2)) + x * v**2 / rho2
        - m / (4 * x**2 * sp.sqrt(rho2)),
        m * v**2 / rho2 + _d1**2 / (4 * m * x**2) + _d2**2 / (4 * m * rho2)
        - m**2 * (2 * x**2 + 1) / (2 * x * sp.sqrt(rho2)),
        (_d1**2 * (1 + X) ** 2 + _d2**2 * X**2) ** 2 - m**6 * X * (1 + X), (0.0, math.inf))

    out["neh-RE"] = _Def(
        Kind.NegativeEllipticHyperbolic, 3, ("m", "d1", "d2"), (0.0, math.inf),
        x * rho2 * (_d1**2 / (4 * m**2 * x**4) + _d2**2 / (m**2 * (3 + 2 * x**2) ** 2)) + x * v**2 / rho2
        - m * (5 + 4 * x**2) / (4 * x**2 * sp.sqrt(rho2)),
        m * v**2 / rho2 + _d1**2 / (4 * m * x**2) + _d2**2 / (2 * m * (3 + 2 * x**2))
        - 2 * m**2 * sp.sqrt(rho2) / x - m**2 * (2 * x**2 + 1) / (2 * x * sp.sqrt(rho2)),
        (1 + X) ** 3 * (_d1**2 * (3 + 2 * X) ** 2 + 4 * _d2**2 * X**2) ** 2
        - m**6 * (5 + 4 * X) ** 2 * (3 + 2 * X) ** 4 * X, (0.0, math.inf))
    return out


DEFS = _defs()
FAMILY_NAMES = tuple(DEFS)
# families whose reduction is only consistent at fixed points
RELATIVE_EQUILIBRIUM_ONLY = ("sys-E-nh", "neh-RE")


@dataclass(frozen=True)
class FamilySpec:
    """A named family with its parameters.

    ``shape`` is the symmetry constant folded into the rescaled variable:
    ``gamma`` (y = gamma z) for sys-L-pe and Lagr-ne, ``zeta`` (w = zeta x)
    for the nh families. It only matters when lifting. ``k`` is
    ``c_yz / 3m`` for sys-L-pe; the reduction requires it to vanish.
    """

    name: str
    params: MappingProxyType = field(default_factory=dict)
    shape: float = 0.0
    k: float = 0.0

    def __post_init__(self):
        if self.name not in DEFS:
            raise ValueError(f"unknown family {self.name!r}; known: {', '.join(FAMILY_NAMES)}")
        d = DEFS[self.name]
        params = {k: float(v) for k, v in dict(self.params).items()}
        missing = [p for p in d.params if p not in params]
        if missing:
            raise ValueError(f"family {self.name} needs parameter(s) {', '.join(missing)}")
        extra = sorted(set(params) - set(d.params))
        if extra:
            raise ValueError(f"family {self.name} does not take {', '.join(extra)}")
        if not params["m"] > 0:
            raise ValueError("m must be positive")
        for p in d.params[1:]:
            if p != "h" and params[p] == 0:
                raise ValueError(f"{p} must be nonzero")
        if self.name == "Lagr-ne" and not abs(self.shape) < 1:
            raise ValueError("Lagr-ne needs |gamma| < 1")
        if self.k != 0:
            raise ValueError("the one-variable reduction requires k = c_yz/3m = 0")
        object.__setattr__(self, "params", MappingProxyType(params))

    @property
    def definition(self) -> _Def:
        return DEFS[self.name]

    def __getitem__(self, key):
        return self.params[key]

    def values(self) -> tuple:
        return tuple(self.params[p] for p in self.definition.params)


def _diff(a: float, b: float) -> float:
    """``a - b``, with differences at rounding level snapped to zero.

    Keeps the regime boundaries (h^2 = 75 m^4, 15 m^4, 9 m^4) exact when h is
    the float nearest to the boundary value.
    """
    d = a - b
    return 0.0 if abs(d) <= 8 * sys.float_info.epsilon * max(abs(a), abs(b)) else d


def pe_energy_polynomial(m: float, h: float) -> Polynomial:
    """Polynomial in z whose roots in (0, 1) are the sys-L-pe equilibria of energy +-h."""
    m4, h2 = m**4, h * h
    return Polynomial((_diff(75 * m4, h2), 0, -8 * h2, 0, -18 * (15 * m4 + h2), 0, 0, 0, 27 * (9 * m4 + h2)))


def ne_energy_polynomial(m: float, h: float) -> Polynomial:
    """Polynomial in Z = z^2 whose roots above 1 contain the Lagr-ne equilibria of energy h."""
    m4, h2 = m**4, h * h
    return Polynomial((-h2 - 75 * m4, -8 * h2, -18 * _diff(h2, 15 * m4), 0, 27 * _diff(h2, 9 * m4)))


def pe_fixed_point_energy(m: float, z: float) -> float:
    """Energy of the sys-L-pe equilibrium at height z (with c from the equilibrium condition)."""
    Z = z * z
    return math.sqrt(3) * m * m * (5 - 9 * Z * Z) / (math.sqrt(1 - Z) * (1 + 3 * Z) ** 1.5)


def pe_fixed_point_momentum(m: float, z: float) -> float:
    """Positive c making z an equilibrium of sys-L-pe."""
    Z = z * z
    return (1728 * m**6 * (1 - Z) / (1 + 3 * Z) ** 3) ** 0.25


def family(name: str, shape: float = 0.0, **params) -> FamilySpec:
    return FamilySpec(name, params, shape=shape)


@lru_cache(maxsize=None)
def _compiled(name: str):
    d = DEFS[name]
    syms = [_SYM[p] for p in d.params]
    args = [_x, _v] + syms
    acc = sp.lambdify(args, d.accel, "math")
    energy = sp.lambdify(args, d.energy, "math")
    jx = sp.lambdify(args, sp.diff(d.accel, _x), "math")
    jv = sp.lambdify(args, sp.diff(d.accel, _v), "math")
    poly = sp.Poly(sp.expand(d.fp_poly), _X)
    coeff_fns = [sp.lambdify(syms, cf, "math") for cf in reversed(poly.all_coeffs())]
    return acc, energy, jx, jv, coeff_fns


def in_domain(spec: FamilySpec, state) -> bool:
    lo, hi = spec.definition.domain
    x = float(state[0])
    return lo < x < hi and math.isfinite(float(state[1]))


def _check(spec, state):
    if not in_domain(spec, state):
        raise DomainExit(float("nan"), f"{spec.name}: state {float(state[0])!r} outside {spec.definition.domain}")


def family_rhs(spec: FamilySpec, state) -> np.ndarray:
    """``(x', v')`` for the shape variable; extra angle entries are ignored."""
    _check(spec, state)
    acc = _compiled(spec.name)[0]
    x, v = float(state[0]), float(state[1])
    return np.array([v, acc(x, v, *spec.values())])


def jacobian(spec: FamilySpec, state) -> np.ndarray:
    _check(spec, state)
    _, _, jx, jv, _ = _compiled(spec.name)
    x, v = float(state[0]), float(state[1])
    p = spec.values()
    return np.array([[0.0, 1.0], [jx(x, v, *p), jv(x, v, *p)]])


def energy_on_family(spec: FamilySpec, state) -> float:
    """Energy integral in the family's variables.

    For the energy-substituted Lagr-ne form this is the parameter ``h`` itself;
    its conserved quantity is :func:`implied_momentum_sq`.
    """
    _check(spec, state)
    return float(_compiled(spec.name)[1](float(state[0]), float(state[1]), *spec.values()))


def implied_momentum_sq(spec: FamilySpec, state) -> float:
    """``b^2`` implied by ``(z, u, h)`` on the energy-substituted Lagr-ne form."""
    if spec.name != "Lagr-ne":
        raise ValueError("only defined for Lagr-ne")
    z, u = float(state[0]), float(state[1])
    m, h = spec["m"], spec["h"]
    r2 = z * z - 1
    pot = math.sqrt(3) * m * m * (3 * z * z - 1) / (math.sqrt(r2) * math.sqrt(3 * z * z + 1))
    return 6 * m * r2 * (h + pot) - 9 * m * m * u * u


def fixed_point_polynomial(spec: FamilySpec) -> Polynomial:
    """Polynomial in ``X = x^2`` whose admissible roots contain every fixed point."""
    coeff_fns = _compiled(spec.name)[4]
    return Polynomial(tuple(f(*spec.values()) for f in coeff_fns))


@dataclass(frozen=True)
class FixedPoint:
    state: tuple
    residual: float
    eigenvalues: tuple
    energy: float
    polynomial_root: float = math.nan

    @property
    def kind(self) -> str:
        lam = np.array(self.eigenvalues)
        if np.all(np.abs(lam.real) <= 1e-9 * max(1.0, float(np.max(np.abs(lam))))):
            return "center"
        if np.any(lam.real > 0) and np.any(lam.real < 0):
            return "saddle"
        return "other"


def _polish(spec, x):
    """Newton on ``f(x, 0)`` using the analytic derivative; keeps the better iterate."""
    acc, _, jx, _, _ = _compiled(spec.name)
    p = spec.values()
    best, best_res = x, abs(acc(x, 0.0, *p))
    lo, hi = spec.definition.domain
    for _ in range(8):
        d = jx(x, 0.0, *p)
        if d == 0 or not math.isfinite(d):
            break
        x = x - acc(x, 0.0, *p) / d
        if not lo < x < hi:
            break
        res = abs(acc(x, 0.0, *p))
        if res < best_res:
            best, best_res = x, res
    return best, best_res


def eigenvalues(spec: FamilySpec, state) -> tuple:
    lam = np.linalg.eigvals(jacobian(spec, state))
    return tuple(complex(z) for z in sorted(lam, key=lambda z: (z.real, z.imag)))


def fixed_points(spec: FamilySpec, residual_tol: float = RESIDUAL_TOL) -> list:
    """All equilibria ``(x*, 0)`` in the domain, with residual, eigenvalues and energy.

    Candidates are the roots of :func:`fixed_point_polynomial` (which may carry
    spurious roots from squaring); a candidate is kept when ``f(x*, 0)``
    vanishes to ``residual_tol`` relative to the size of its terms.
    """
    d = spec.definition
    acc = _compiled(spec.name)[0]
    poly = fixed_point_polynomial(spec)
    candidates = []
    if d.symmetric:
        candidates.append((0.0, math.nan))
    if not poly.is_zero():
        for root in isolate_real_roots(poly, d.fp_range):
            X = root.root
            if X <= 0:
                continue
            xs = [math.sqrt(X)]
            if d.symmetric:
                xs.append(-xs[0])
            candidates.extend((x, X) for x in xs)
    out = []
    for x0, X in candidates:
        if not d.domain[0] < x0 < d.domain[1]:
            continue
        scale = max(1.0, _term_scale(spec, x0))
        # roots introduced by squaring fail here by an O(1) margin
        if abs(acc(x0, 0.0, *spec.values())) > 1e-6 * scale:
            continue
        x, res = (x0, abs(acc(x0, 0.0, *spec.values()))) if x0 == 0 else _polish(spec, x0)
        if res > residual_tol * scale or any(abs(x - f.state[0]) < 1e-10 for f in out):
            continue
        st = (x, 0.0)
        out.append(FixedPoint(st, res, eigenvalues(spec, st), energy_on_family(spec, st), X))
    out.sort(key=lambda f: f.state[0])
    return out


def _term_scale(spec, x):
    """Magnitude of the individual terms of ``f(x, 0)``, for a relative residual test."""
    d = spec.definition
    terms = sp.Add.make_args(sp.expand(d.accel.subs(_v, 0)))
    subs = {_SYM[p]: spec[p] for p in d.params}
    subs[_x] = x
    return float(max(abs(complex(t.evalf(subs=subs))) for t in terms))


def jacobian_fd(spec: FamilySpec, state, eps: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian, used as an independent check."""
    y = np.array(state[:2], dtype=float)
    J = np.empty((2, 2))
    for k in range(2):
        e = np.zeros(2)
        e[k] = eps
        J[:, k] = (family_rhs(spec, y + e) - family_rhs(spec, y - e)) / (2 * eps)
    return J


# ---------------------------------------------------------------- lifting

def _angle_count(kind: Kind) -> int:
    return 2 if kind in (Kind.PositiveEllipticElliptic, Kind.NegativeEllipticHyperbolic) else 1


def ansatz_for(spec: FamilySpec, state=None) -> Ansatz:
    """The rotopulsator class and constants realised by the family."""
    d = spec.definition
    m = spec["m"]
    masses = (m,) * d.n
    name = spec.name
    if name == "sys-L-pe":
        return Ansatz(d.kind, masses, (spec["c"],), a=THIRDS)
    if name in ("2b-pee", "neh-2"):
        consts = (spec["c1"], spec["c2"]) if name == "2b-pee" else (spec["d1"], spec["d2"])
        return Ansatz(d.kind, masses, consts, a=(0.0, math.pi), b=(0.0, 0.0))
    if name == "Lagrangian-ee":
        return Ansatz(d.kind, masses, (spec["c1"], spec["c2"]), a=THIRDS, b=THIRDS)
    if name == "Lagr-ne-b":
        return Ansatz(d.kind, masses, (spec["b"],), a=THIRDS)
    if name == "Lagr-ne":
        if state is None:
            raise ValueError("Lagr-ne needs a state to recover its momentum constant")
        b2 = implied_momentum_sq(spec, state)
        if not b2 > 0:
            raise DomainExit(float("nan"), f"state is not realisable at energy h={spec['h']!r} (b^2={b2!r})")
        return Ansatz(d.kind, masses, (math.sqrt(b2),), a=THIRDS)
    if name == "2b-ne-simple":
        return Ansatz(d.kind, masses, (spec["c"],), b=(0.0, 0.0))
    if name == "sys-E-nh":
        return Ansatz(d.kind, masses, (spec["c"],), b=(0.0, 0.0, 0.0))
    if name == "neh-RE":
        return Ansatz(d.kind, masses, (spec["d1"], spec["d2"]), a=(0.0, 0.0, math.pi), b=(0.0, 0.0, 0.0))
    raise AssertionError(name)


def to_criterion(spec: FamilySpec, state, ansatz: Ansatz = None) -> np.ndarray:
    """Criterion-system state of the class for a family state ``(x, v[, angles])``."""
    d = spec.definition
    x, v = float(state[0]), float(state[1])
    angles = [float(a) for a in state[2:]] or [0.0] * _angle_count(d.kind)
    g = spec.shape
    name = spec.name
    if name == "sys-L-pe":
        k = math.sqrt(1 + g * g)
        z, u = x / k, v / k
        n = 3
        return np.array([g * z] * n + [z] * n + [g * u] * n + [u] * n + angles[:1])
    if name in ("Lagr-ne", "Lagr-ne-b"):
        k = math.sqrt(1 - g * g)
        z, u = x / k, v / k
        n = 3
        return np.array([g * z] * n + [z] * n + [g * u] * n + [u] * n + angles[:1])
    if name in ("2b-ne-simple", "sys-E-nh"):
        k = math.sqrt(1 + g * g)
        xr, s = x / k, v / k
        sign = [1.0, -1.0] if d.n == 2 else [0.0, 1.0, -1.0]
        w = [g * xr * e for e in sign]
        xx = [xr * e for e in sign]
        p = [g * s * e for e in sign]
        ss = [s * e for e in sign]
        return np.array(w + xx + p + ss + angles[:1])
    if name == "neh-RE":
        return np.array([0.0, x, x, 0.0, v, v] + angles[:2])
    return np.array([x] * d.n + [v] * d.n + angles[:2])


def lift(spec: FamilySpec, state):
    """Ambient configuration of a family state ``(x, v[, alpha][, beta])``."""
    ansatz = ansatz_for(spec, state)
    return lift_criterion(ansatz, to_criterion(spec, state, ansatz))


def angular_rates(spec: FamilySpec, state) -> tuple:
    """Angle rates of the lifted motion at a family state."""
    ansatz = ansatz_for(spec, state)
    return angular_velocity(ansatz, to_criterion(spec, state, ansatz))


class FamilySystem:
    """A family packaged for :func:`curved_nbody.integrate.simulate_reduced`.

    The state is ``(x, v)`` followed by the rotation angle(s), so trajectories
    can be lifted to the ambient space.
    """

    def __init__(self, spec: FamilySpec):
        self.spec = spec
        d = spec.definition
        self.n_angles = _angle_count(d.kind)
        self.dim = 2 + self.n_angles
        self.name = spec.name
        # Lagr-ne recovers its momentum constant from each state
        self.ansatz = None if spec.name == "Lagr-ne" else ansatz_for(spec)
        self.space = SPACE_OF[d.kind]
        self.masses = np.full(d.n, spec["m"])

    def initial_state(self, x, v, alpha=0.0, beta=0.0) -> np.ndarray:
        return np.array([x, v, alpha, beta][: self.dim], dtype=float)

    def rhs(self, y):
        head = family_rhs(self.spec, y)
        rates = angular_rates(self.spec, y)
        return np.concatenate([head, rates])

    def in_domain(self, y) -> bool:
        if not in_domain(self.spec, y):
            return False
        if self.spec.name == "Lagr-ne":
            return implied_momentum_sq(self.spec, y) > 0
        return True

    def monitors(self, y) -> dict:
        out = {"energy": energy_on_family(self.spec, y)}
        if self.spec.name == "Lagr-ne":
            out["momentum_sq"] = implied_momentum_sq(self.spec, y)
        return out

    def lift(self, y):
        return lift(self.spec, y)
