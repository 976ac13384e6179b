"""Ambient geometry of S^3 in R^4 and H^3 in R^{3,1}.

Points are 4-vectors ``(w, x, y, z)``. The curvature sign ``sigma`` picks the
inner product: Euclidean for +1, Lorentz (minus on ``z*z``) for -1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePoint, OffManifold

TOL_CONSTRAINT = 1e-9
DEGENERATE_RADIUS = 1e-9


@dataclass(frozen=True)
class Space:
    sigma: int

    def __post_init__(self):
        if self.sigma not in (1, -1):
            raise ValueError(f"sigma must be +1 or -1, got {self.sigma!r}")

    @property
    def metric(self) -> np.ndarray:
        return np.array([1.0, 1.0, 1.0, float(self.sigma)])

    @property
    def name(self) -> str:
        return "S3" if self.sigma == 1 else "H3"


S3 = Space(1)
H3 = Space(-1)


def as_space(space) -> Space:
    if isinstance(space, Space):
        return space
    if isinstance(space, str):
        key = space.strip().upper()
        if key in ("S3", "H3"):
            return S3 if key == "S3" else H3
        raise ValueError(f"unknown space {space!r}; use 'S3' or 'H3'")
    return Space(int(space))


@dataclass(frozen=True)
class TorusCoords:
    r: float
    theta: float
    rho: float
    phi: float


@dataclass(frozen=True)
class CylinderCoords:
    r: float
    theta: float
    rho: float
    xi: float


def inner(space, p, q):
    """Inner product of the space; broadcasts over leading axes."""
    s = as_space(space).sigma
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return p[..., 0] * q[..., 0] + p[..., 1] * q[..., 1] + p[..., 2] * q[..., 2] + s * p[..., 3] * q[..., 3]


def constraint_residuals(space, position, velocity):
    """Return ``(q.q - sigma, q.qdot)``; both vanish for admissible states."""
    s = as_space(space).sigma
    return float(inner(space, position, position) - s), float(inner(space, position, velocity))


def project(space, position, velocity):
    """Rescale the position onto the manifold and make the velocity tangent."""
    space = as_space(space)
    s = space.sigma
    q = np.array(position, dtype=float)
    v = np.array(velocity, dtype=float)
    qq = float(inner(space, q, q))
    if abs(qq) < 1e-12 or qq * s <= 0:
        raise DegeneratePoint(f"cannot normalise {q.tolist()} on {space.name}")
    if s == -1 and q[3] <= 0:
        raise DegeneratePoint(f"z <= 0 on H3: {q.tolist()}")
    q = q / math.sqrt(qq * s)
    v = v - s * float(inner(space, q, v)) * q
    return q, v


def project_many(space, positions, velocities):
    """Vectorised :func:`project` over ``(N, 4)`` arrays; returns the largest correction."""
    space = as_space(space)
    s = space.sigma
    Q = np.asarray(positions, dtype=float)
    V = np.asarray(velocities, dtype=float)
    qq = inner(space, Q, Q)
    if np.any(np.abs(qq) < 1e-12) or np.any(qq * s <= 0) or (s == -1 and np.any(Q[:, 3] <= 0)):
        raise DegeneratePoint(f"cannot normalise configuration on {space.name}")
    Qn = Q / np.sqrt(qq * s)[:, None]
    Vn = V - s * inner(space, Qn, V)[:, None] * Qn
    corr = max(float(np.max(np.abs(Qn - Q))), float(np.max(np.abs(Vn - V))))
    return Qn, Vn, corr


def _angle(a, b, radius):
    if radius < DEGENERATE_RADIUS:
        return 0.0
    return math.atan2(a, b) % (2 * math.pi)


def _check_on(space, p, tol):
    res = float(inner(space, p, p)) - space.sigma
    if abs(res) > tol * max(1.0, float(np.dot(p, p))):
        raise OffManifold(f"|q.q - sigma| = {abs(res):.3e} exceeds {tol:.1e} on {space.name}")
    if space.sigma == -1 and p[3] < 1 - tol:
        raise OffManifold(f"z = {p[3]!r} < 1 on H3")


def torus_coords(p, tol=TOL_CONSTRAINT) -> TorusCoords:
    w, x, y, z = (float(c) for c in p)
    _check_on(S3, np.array([w, x, y, z]), tol)
    r = math.hypot(w, x)
    rho = math.hypot(y, z)
    return TorusCoords(r, _angle(x, w, r), rho, _angle(z, y, rho))


def cylinder_coords(p, tol=TOL_CONSTRAINT) -> CylinderCoords:
    w, x, y, z = (float(c) for c in p)
    _check_on(H3, np.array([w, x, y, z]), tol)
    r = math.hypot(w, x)
    rho = math.sqrt(max(z * z - y * y, 0.0))
    return CylinderCoords(r, _angle(x, w, r), rho, math.atanh(y / z))


def from_torus(c: TorusCoords) -> np.ndarray:
    return np.array([c.r * math.cos(c.theta), c.r * math.sin(c.theta), c.rho * math.cos(c.phi), c.rho * math.sin(c.phi)])


def from_cylinder(c: CylinderCoords) -> np.ndarray:
    return np.array([c.r * math.cos(c.theta), c.r * math.sin(c.theta), c.rho * math.sinh(c.xi), c.rho * math.cosh(c.xi)])


def foliation_radii(space, positions):
    """Leaf radii ``(r, rho)`` for an ``(..., 4)`` array of points, without validation."""
    P = np.asarray(positions, dtype=float)
    r = np.hypot(P[..., 0], P[..., 1])
    if as_space(space).sigma == 1:
        rho = np.hypot(P[..., 2], P[..., 3])
    else:
        rho = np.sqrt(np.maximum(P[..., 3] ** 2 - P[..., 2] ** 2, 0.0))
    return r, rho
