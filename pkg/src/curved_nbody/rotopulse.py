"""Rotopulsator ansatz classes, their reduced (criterion) systems, and lifts.

Each class rotates the configuration with one or two one-parameter isometry
families:

====  =====  ===========================  ==================  =================
kind  space  rotation(s)                  momentum constants  reduced state
====  =====  ===========================  ==================  =================
pe    S3     elliptic in wx               (c,)                y, z, u, v, alpha
pee   S3     elliptic in wx and yz        (c1, c2)            r, s, alpha, beta
ne    H3     elliptic in wx               (b,)                y, z, u, v, alpha
nh    H3     hyperbolic in yz             (c,)                w, x, p, s, beta
neh   H3     elliptic wx, hyperbolic yz   (d1, d2)            r, s, alpha, beta
====  =====  ===========================  ==================  =================

Per-body blocks are stored contiguously, e.g. a ``pe`` state for N bodies is
``[y_1..y_N, z_1..z_N, u_1..u_N, v_1..v_N, alpha]``. The radial variable
(``r_i`` or ``rho_i``) of the 4N+1 layouts is recomputed from the algebraic
constraint rather than integrated.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import SING_EPS, Configuration
from .errors import DegenerateRadius, DomainExit, Singular, UnsupportedClass
from .manifold import H3, S3, Space


class Kind(enum.Enum):
    PositiveElliptic = "pe"
    PositiveEllipticElliptic = "pee"
    NegativeElliptic = "ne"
    NegativeHyperbolic = "nh"
    NegativeEllipticHyperbolic = "neh"
    NegativeParabolic = "parabolic"


SPACE_OF = {
    Kind.PositiveElliptic: S3,
    Kind.PositiveEllipticElliptic: S3,
    Kind.NegativeElliptic: H3,
    Kind.NegativeHyperbolic: H3,
    Kind.NegativeEllipticHyperbolic: H3,
}
_N_CONSTANTS = {
    Kind.PositiveElliptic: 1,
    Kind.PositiveEllipticElliptic: 2,
    Kind.NegativeElliptic: 1,
    Kind.NegativeHyperbolic: 1,
    Kind.NegativeEllipticHyperbolic: 2,
}
_USES_A = {Kind.PositiveElliptic, Kind.PositiveEllipticElliptic, Kind.NegativeElliptic, Kind.NegativeEllipticHyperbolic}
_USES_B = {Kind.PositiveEllipticElliptic, Kind.NegativeHyperbolic, Kind.NegativeEllipticHyperbolic}
_COORD_LAYOUT = {Kind.PositiveElliptic, Kind.NegativeElliptic, Kind.NegativeHyperbolic}


class Verdict(enum.Enum):
    RelativeEquilibrium = "RelativeEquilibrium"
    Rotopulsator = "Rotopulsator"
    Inconclusive = "Inconclusive"


def as_kind(kind) -> Kind:
    if isinstance(kind, Kind):
        return kind
    for k in Kind:
        if kind in (k.value, k.name):
            return k
    raise ValueError(f"unknown ansatz class {kind!r}")


@dataclass(frozen=True)
class Ansatz:
    """An ansatz class with its phase and momentum constants.

    ``a`` are the phases of the wx rotation, ``b`` those of the yz rotation;
    ``constants`` holds the class's momentum constants (see module table).
    """

    kind: Kind
    masses: tuple
    constants: tuple
    a: tuple = None
    b: tuple = None

    def __post_init__(self):
        kind = as_kind(self.kind)
        if kind is Kind.NegativeParabolic:
            raise UnsupportedClass("rotopulsators of parabolic type do not exist")
        object.__setattr__(self, "kind", kind)
        m = tuple(float(x) for x in self.masses)
        n = len(m)
        if n < 1 or any(not (x > 0) for x in m):
            raise ValueError("masses must be positive")
        consts = tuple(float(x) for x in self.constants)
        if len(consts) != _N_CONSTANTS[kind]:
            raise ValueError(f"{kind.value} needs {_N_CONSTANTS[kind]} momentum constant(s), got {len(consts)}")
        if any(x == 0 for x in consts):
            raise ValueError("momentum constants must be nonzero (the rotation angles must be nonconstant)")
        a = tuple(float(x) for x in self.a) if self.a is not None else (0.0,) * n
        b = tuple(float(x) for x in self.b) if self.b is not None else (0.0,) * n
        if len(a) != n or len(b) != n:
            raise ValueError("phase tuples must have one entry per body")
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "constants", consts)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return len(self.masses)

    @property
    def space(self) -> Space:
        return SPACE_OF[self.kind]

    @property
    def dim(self) -> int:
        return 4 * self.n + 1 if self.kind in _COORD_LAYOUT else 2 * self.n + 2

    @property
    def total_mass(self) -> float:
        return math.fsum(self.masses)

    def require_space(self, space: Space):
        if space.sigma != self.space.sigma:
            raise ValueError(f"class {self.kind.value} lives on {self.space.name}, not {space.name}")


def _arr(ansatz):
    return np.array(ansatz.masses), np.array(ansatz.a), np.array(ansatz.b)


def _blocks(ansatz, state):
    n = ansatz.n
    y = np.asarray(state, dtype=float)
    if len(y) != ansatz.dim:
        raise ValueError(f"state has length {len(y)}, class {ansatz.kind.value} with N={n} needs {ansatz.dim}")
    return y, n


def radii(ansatz: Ansatz, state) -> np.ndarray:
    """The class's radial variable per body (``r_i``, or ``rho_i`` for nh)."""
    y, n = _blocks(ansatz, state)
    k = ansatz.kind
    if k is Kind.PositiveElliptic:
        r2 = 1.0 - y[:n] ** 2 - y[n : 2 * n] ** 2
    elif k is Kind.NegativeElliptic:
        r2 = y[n : 2 * n] ** 2 - y[:n] ** 2 - 1.0
    elif k is Kind.NegativeHyperbolic:
        r2 = y[:n] ** 2 + y[n : 2 * n] ** 2 + 1.0
    else:
        return np.abs(y[:n])
    if np.any(r2 <= 0):
        raise DomainExit(float("nan"), "radius squared is not positive")
    return np.sqrt(r2)


def _angular_sums(ansatz, rr):
    """Denominators of the angular-velocity laws."""
    m = np.array(ansatz.masses)
    smr2 = math.fsum((m * rr * rr).tolist())
    return smr2


def angular_velocity(ansatz: Ansatz, state) -> tuple:
    """Angular velocities required by the class: ``(alpha_dot,)``, ``(beta_dot,)`` or both."""
    y, n = _blocks(ansatz, state)
    k = ansatz.kind
    M = ansatz.total_mass
    if k is Kind.PositiveEllipticElliptic or k is Kind.NegativeEllipticHyperbolic:
        rr = y[:n]
        s = _angular_sums(ansatz, rr)
        other = M - s if k is Kind.PositiveEllipticElliptic else M + s
        if s <= 0 or other <= 0:
            raise DegenerateRadius(f"angular-velocity denominator vanishes: {s!r}, {other!r}")
        return ansatz.constants[0] / s, ansatz.constants[1] / other
    s = _angular_sums(ansatz, radii(ansatz, y))
    if s <= 0:
        raise DegenerateRadius("sum of m_j r_j^2 vanishes")
    return (ansatz.constants[0] / s,)


def pair_q(ansatz: Ansatz, state) -> np.ndarray:
    """Pairwise inner products from the class's closed forms (diagonal = sigma)."""
    y, n = _blocks(ansatz, state)
    k = ansatz.kind
    m, a, b = _arr(ansatz)
    da = a[:, None] - a[None, :]
    db = b[:, None] - b[None, :]
    if k is Kind.PositiveElliptic:
        r = radii(ansatz, y)
        Y, Z = y[:n], y[n : 2 * n]
        G = np.outer(r, r) * np.cos(da) + np.outer(Y, Y) + np.outer(Z, Z)
    elif k is Kind.NegativeElliptic:
        r = radii(ansatz, y)
        Y, Z = y[:n], y[n : 2 * n]
        G = np.outer(r, r) * np.cos(da) + np.outer(Y, Y) - np.outer(Z, Z)
    elif k is Kind.NegativeHyperbolic:
        rho = radii(ansatz, y)
        W, X = y[:n], y[n : 2 * n]
        G = np.outer(W, W) + np.outer(X, X) - np.outer(rho, rho) * np.cosh(db)
    elif k is Kind.PositiveEllipticElliptic:
        r = y[:n]
        if np.any(np.abs(r) >= 1):
            raise DomainExit(float("nan"), "r_i must lie in (-1, 1)")
        rho = np.sqrt(1 - r * r)
        G = np.outer(r, r) * np.cos(da) + np.outer(rho, rho) * np.cos(db)
    else:
        r = y[:n]
        rho = np.sqrt(1 + r * r)
        G = np.outer(r, r) * np.cos(da) - np.outer(rho, rho) * np.cosh(db)
    np.fill_diagonal(G, float(ansatz.space.sigma))
    return G


def _force_weights(ansatz, G):
    """``m_j / |1 - q_ij^2|^{3/2}`` with the diagonal zeroed; raises on singular pairs."""
    s = ansatz.space.sigma
    m = np.array(ansatz.masses)
    gap = s - s * G * G
    off = ~np.eye(len(G), dtype=bool)
    bad = off & ~(gap >= SING_EPS)
    if np.any(bad):
        i, j = (int(x) for x in np.argwhere(bad)[0])
        raise Singular(i, j, float(G[i, j]))
    gap[~off] = 1.0
    W = m[None, :] / gap**1.5
    np.fill_diagonal(W, 0.0)
    return W


def criterion_rhs(ansatz: Ansatz, state) -> np.ndarray:
    """Time derivative of the reduced state for the class's criterion system."""
    y, n = _blocks(ansatz, state)
    k = ansatz.kind
    m, a, b = _arr(ansatz)
    G = pair_q(ansatz, y)
    W = _force_weights(ansatz, G)
    out = np.empty_like(y)
    if k in _COORD_LAYOUT:
        P, R = y[:n], y[n : 2 * n]
        U, V = y[2 * n : 3 * n], y[3 * n : 4 * n]
        rad = radii(ansatz, y)
        (omega,) = angular_velocity(ansatz, y)
        cross2 = (P * V - R * U) ** 2
        if k is Kind.PositiveElliptic:
            # attraction sum_j m_j (y_j - q_ij y_i) / (1 - q_ij^2)^{3/2}
            fy = W @ P - (W * G).sum(axis=1) * P
            fz = W @ R - (W * G).sum(axis=1) * R
            coef = (U * U + V * V - cross2) / rad**2 + rad**2 * omega**2
            du, dv = fy - coef * P, fz - coef * R
        elif k is Kind.NegativeElliptic:
            fy = W @ P + (W * G).sum(axis=1) * P
            fz = W @ R + (W * G).sum(axis=1) * R
            coef = (cross2 + V * V - U * U) / rad**2 + rad**2 * omega**2
            du, dv = fy + coef * P, fz + coef * R
        else:
            fy = W @ P + (W * G).sum(axis=1) * P
            fz = W @ R + (W * G).sum(axis=1) * R
            coef = (cross2 + U * U + V * V) / rad**2 + rad**2 * omega**2
            du, dv = fy + coef * P, fz + coef * R
        out[:n], out[n : 2 * n] = U, V
        out[2 * n : 3 * n], out[3 * n : 4 * n] = du, dv
        out[4 * n] = omega
        return out
    r, s = y[:n], y[n : 2 * n]
    ad, bd = angular_velocity(ansatz, y)
    cos_a = np.cos(a[:, None] - a[None, :])
    if k is Kind.PositiveEllipticElliptic:
        rho2 = 1 - r * r
        rho = np.sqrt(rho2)
        cos_b = np.cos(b[:, None] - b[None, :])
        pull = (W * (r[None, :] * cos_a)).sum(axis=1) * rho2 - r * rho * (W * (rho[None, :] * cos_b)).sum(axis=1)
        ds = r * rho2 * (ad * ad - bd * bd) - r * s * s / rho2 + pull
    else:
        rho2 = 1 + r * r
        rho = np.sqrt(rho2)
        cosh_b = np.cosh(b[:, None] - b[None, :])
        pull = (W * (r[None, :] * cos_a)).sum(axis=1) * rho2 - r * rho * (W * (rho[None, :] * cosh_b)).sum(axis=1)
        ds = r * rho2 * (ad * ad + bd * bd) + r * s * s / rho2 + pull
    out[:n], out[n : 2 * n] = s, ds
    out[2 * n], out[2 * n + 1] = ad, bd
    return out


def angular_residuals(ansatz: Ansatz, state) -> np.ndarray:
    """Residuals of the per-body angular equations, e.g.

    ``r_i alpha'' + 2 r_i' alpha' - sum_j m_j r_j sin(a_j - a_i) / |1 - q_ij^2|^{3/2}``.

    These vanish identically for the symmetric configurations; a nonzero value
    means the candidate is not a solution of the full system.
    """
    y, n = _blocks(ansatz, state)
    k = ansatz.kind
    m, a, b = _arr(ansatz)
    G = pair_q(ansatz, y)
    W = _force_weights(ansatz, G)
    dy = criterion_rhs(ansatz, y)
    res = []
    if k in (Kind.PositiveElliptic, Kind.NegativeElliptic):
        r = radii(ansatz, y)
        P, R, U, V = y[:n], y[n : 2 * n], y[2 * n : 3 * n], y[3 * n : 4 * n]
        rdot = -(P * U + R * V) / r if k is Kind.PositiveElliptic else (R * V - P * U) / r
        (ad,) = angular_velocity(ansatz, y)
        add = -ansatz.constants[0] * math.fsum((2 * m * r * rdot).tolist()) / _angular_sums(ansatz, r) ** 2
        sin_a = np.sin(a[None, :] - a[:, None])
        res.append(r * add + 2 * rdot * ad - (W * (r[None, :] * sin_a)).sum(axis=1))
    elif k is Kind.NegativeHyperbolic:
        rho = radii(ansatz, y)
        P, R, U, V = y[:n], y[n : 2 * n], y[2 * n : 3 * n], y[3 * n : 4 * n]
        rhodot = (P * U + R * V) / rho
        (bd,) = angular_velocity(ansatz, y)
        bdd = -ansatz.constants[0] * math.fsum((2 * m * rho * rhodot).tolist()) / _angular_sums(ansatz, rho) ** 2
        sinh_b = np.sinh(b[None, :] - b[:, None])
        res.append(rho * bdd + 2 * rhodot * bd - (W * (rho[None, :] * sinh_b)).sum(axis=1))
    else:
        r, s = y[:n], y[n : 2 * n]
        M = ansatz.total_mass
        S = _angular_sums(ansatz, r)
        dS = math.fsum((2 * m * r * s).tolist())
        ad, bd = angular_velocity(ansatz, y)
        c1, c2 = ansatz.constants
        add = -c1 * dS / S**2
        sin_a = np.sin(a[None, :] - a[:, None])
        res.append(r * add + 2 * s * ad - (W * (r[None, :] * sin_a)).sum(axis=1))
        if k is Kind.PositiveEllipticElliptic:
            rho = np.sqrt(1 - r * r)
            rhodot = -r * s / rho
            bdd = c2 * dS / (M - S) ** 2
            rot = np.sin(b[None, :] - b[:, None])
        else:
            rho = np.sqrt(1 + r * r)
            rhodot = r * s / rho
            bdd = -c2 * dS / (M + S) ** 2
            rot = np.sinh(b[None, :] - b[:, None])
        res.append(rho * bdd + 2 * rhodot * bd - (W * (rho[None, :] * rot)).sum(axis=1))
    del dy
    return np.concatenate(res)


def lift(ansatz: Ansatz, state, alpha=None, beta=None) -> Configuration:
    """Ambient configuration of a reduced state. ``alpha``/``beta`` override the state's angles."""
    y, n = _blocks(ansatz, state)
    k = ansatz.kind
    m, a, b = _arr(ansatz)
    Q = np.empty((n, 4))
    Vel = np.empty((n, 4))
    if k in (Kind.PositiveElliptic, Kind.NegativeElliptic):
        al = y[4 * n] if alpha is None else float(alpha)
        P, R, U, V = y[:n], y[n : 2 * n], y[2 * n : 3 * n], y[3 * n : 4 * n]
        r = radii(ansatz, y)
        rdot = -(P * U + R * V) / r if k is Kind.PositiveElliptic else (R * V - P * U) / r
        (ad,) = angular_velocity(ansatz, y)
        ang = al + a
        Q[:, 0], Q[:, 1], Q[:, 2], Q[:, 3] = r * np.cos(ang), r * np.sin(ang), P, R
        Vel[:, 0] = rdot * np.cos(ang) - r * ad * np.sin(ang)
        Vel[:, 1] = rdot * np.sin(ang) + r * ad * np.cos(ang)
        Vel[:, 2], Vel[:, 3] = U, V
    elif k is Kind.NegativeHyperbolic:
        be = y[4 * n] if beta is None else float(beta)
        P, R, U, V = y[:n], y[n : 2 * n], y[2 * n : 3 * n], y[3 * n : 4 * n]
        rho = radii(ansatz, y)
        rhodot = (P * U + R * V) / rho
        (bd,) = angular_velocity(ansatz, y)
        ang = be + b
        Q[:, 0], Q[:, 1] = P, R
        Q[:, 2], Q[:, 3] = rho * np.sinh(ang), rho * np.cosh(ang)
        Vel[:, 0], Vel[:, 1] = U, V
        Vel[:, 2] = rhodot * np.sinh(ang) + rho * bd * np.cosh(ang)
        Vel[:, 3] = rhodot * np.cosh(ang) + rho * bd * np.sinh(ang)
    else:
        r, s = y[:n], y[n : 2 * n]
        al = y[2 * n] if alpha is None else float(alpha)
        be = y[2 * n + 1] if beta is None else float(beta)
        ad, bd = angular_velocity(ansatz, y)
        A, B = al + a, be + b
        Q[:, 0], Q[:, 1] = r * np.cos(A), r * np.sin(A)
        Vel[:, 0] = s * np.cos(A) - r * ad * np.sin(A)
        Vel[:, 1] = s * np.sin(A) + r * ad * np.cos(A)
        if k is Kind.PositiveEllipticElliptic:
            rho = np.sqrt(1 - r * r)
            rhodot = -r * s / rho
            Q[:, 2], Q[:, 3] = rho * np.cos(B), rho * np.sin(B)
            Vel[:, 2] = rhodot * np.cos(B) - rho * bd * np.sin(B)
            Vel[:, 3] = rhodot * np.sin(B) + rho * bd * np.cos(B)
        else:
            rho = np.sqrt(1 + r * r)
            rhodot = r * s / rho
            Q[:, 2], Q[:, 3] = rho * np.sinh(B), rho * np.cosh(B)
            Vel[:, 2] = rhodot * np.sinh(B) + rho * bd * np.cosh(B)
            Vel[:, 3] = rhodot * np.cosh(B) + rho * bd * np.sinh(B)
    return Configuration(ansatz.space, m, Q, Vel)


def reduced_energy(ansatz: Ansatz, state) -> float:
    """Energy integral written in the class's reduced variables."""
    y, n = _blocks(ansatz, state)
    k = ansatz.kind
    m = np.array(ansatz.masses)
    G = pair_q(ansatz, y)
    iu = np.triu_indices(n, 1)
    q = G[iu]
    mm = np.outer(m, m)[iu]
    if ansatz.space.sigma == 1:
        pot = (-mm * q / np.sqrt(1 - q * q)).tolist()
    else:
        pot = (mm * q / np.sqrt(q * q - 1)).tolist()
    if k in _COORD_LAYOUT:
        P, R, U, V = y[:n], y[n : 2 * n], y[2 * n : 3 * n], y[3 * n : 4 * n]
        rad = radii(ansatz, y)
        cross2 = (P * V - R * U) ** 2
        if k is Kind.PositiveElliptic:
            kin = U * U + V * V - cross2
        elif k is Kind.NegativeElliptic:
            kin = cross2 + V * V - U * U
        else:
            kin = cross2 + U * U + V * V
        terms = (m * kin / (2 * rad**2)).tolist()
        terms.append(ansatz.constants[0] ** 2 / (2 * _angular_sums(ansatz, rad)))
    else:
        r, s = y[:n], y[n : 2 * n]
        S = _angular_sums(ansatz, r)
        M = ansatz.total_mass
        c1, c2 = ansatz.constants
        if k is Kind.PositiveEllipticElliptic:
            terms = (m * s * s / (2 * (1 - r * r))).tolist() + [c1**2 / (2 * S), c2**2 / (2 * (M - S))]
        else:
            terms = (m * s * s / (2 * (1 + r * r))).tolist() + [c1**2 / (2 * S), c2**2 / (2 * (M + S))]
    return math.fsum(terms + pot)


def rotation_momenta(ansatz: Ansatz, state) -> dict:
    """Closed-form momenta of the class: ``c_wx`` and/or ``c_yz`` in reduced variables."""
    y, n = _blocks(ansatz, state)
    k = ansatz.kind
    m = np.array(ansatz.masses)
    out = {}
    if k in _COORD_LAYOUT:
        P, R, U, V = y[:n], y[n : 2 * n], y[2 * n : 3 * n], y[3 * n : 4 * n]
        rad = radii(ansatz, y)
        (om,) = angular_velocity(ansatz, y)
        if k is Kind.NegativeHyperbolic:
            out["c_wx"] = math.fsum((m * (P * V - U * R)).tolist())
            out["c_yz"] = -math.fsum((m * rad**2).tolist()) * om
        else:
            out["c_wx"] = math.fsum((m * rad**2).tolist()) * om
            out["c_yz"] = math.fsum((m * (P * V - U * R)).tolist())
    else:
        r = y[:n]
        ad, bd = angular_velocity(ansatz, y)
        S = _angular_sums(ansatz, r)
        M = ansatz.total_mass
        out["c_wx"] = S * ad
        out["c_yz"] = (M - S) * bd if k is Kind.PositiveEllipticElliptic else -(M + S) * bd
    return out


class CriterionSystem:
    """A criterion system packaged for :func:`curved_nbody.integrate.simulate_reduced`."""

    def __init__(self, ansatz: Ansatz):
        self.ansatz = ansatz
        self.space = ansatz.space
        self.masses = np.array(ansatz.masses)
        self.dim = ansatz.dim
        self.name = f"criterion-{ansatz.kind.value}"

    def rhs(self, y):
        try:
            return criterion_rhs(self.ansatz, y)
        except DegenerateRadius as exc:
            raise DomainExit(float("nan"), str(exc)) from exc

    def in_domain(self, y) -> bool:
        try:
            radii(self.ansatz, y)
            angular_velocity(self.ansatz, y)
            pair_q(self.ansatz, y)
        except (DomainExit, DegenerateRadius):
            return False
        if self.ansatz.kind is Kind.PositiveElliptic:
            return bool(np.all(radii(self.ansatz, y) > 0))
        return bool(np.all(np.isfinite(y)))

    def monitors(self, y) -> dict:
        out = {"energy": reduced_energy(self.ansatz, y)}
        out.update(rotation_momenta(self.ansatz, y))
        out["angular_residual"] = float(np.max(np.abs(angular_residuals(self.ansatz, y))))
        return out

    def lift(self, y) -> Configuration:
        return lift(self.ansatz, y)


def classify(trajectory, re_tol=1e-8, pulse_tol=1e-4) -> Verdict:
    """Relative equilibrium if every q_ij stays within ``re_tol`` of its initial value."""
    if len(trajectory) < 16:
        raise ValueError("classification needs at least 16 samples")
    G = trajectory.pair_grams()
    n = G.shape[1]
    if n < 2:
        return Verdict.Inconclusive
    iu = np.triu_indices(n, 1)
    dev = float(np.max(np.abs(G[:, iu[0], iu[1]] - G[0, iu[0], iu[1]])))
    if dev <= re_tol:
        return Verdict.RelativeEquilibrium
    ansatz = getattr(trajectory, "ansatz", None)
    rotating = ansatz is None or all(c != 0 for c in ansatz.constants)
    if dev > pulse_tol and rotating:
        return Verdict.Rotopulsator
    return Verdict.Inconclusive


def max_pair_variation(trajectory) -> float:
    G = trajectory.pair_grams()
    n = G.shape[1]
    iu = np.triu_indices(n, 1)
    if not len(iu[0]):
        return 0.0
    return float(np.max(np.abs(G[:, iu[0], iu[1]] - G[0, iu[0], iu[1]])))
