"""Equations of motion and first integrals of the curved N-body problem.

Force function (cotangent potential, unit curvature)::

    U = sum_{i<j} sigma m_i m_j q_ij / (sigma - sigma q_ij^2)^{1/2}

and accelerations::

    qddot_i = sum_{j != i} m_j (q_j - sigma q_ij q_i) / (sigma - sigma q_ij^2)^{3/2}
              - sigma (qdot_i . qdot_i) q_i
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import Singular
from .manifold import TOL_CONSTRAINT, Space, as_space, inner

SING_EPS = 1e-12

MOMENTUM_PLANES = ("wx", "wy", "wz", "xy", "xz", "yz")
_PLANE_INDEX = {"wx": (0, 1), "wy": (0, 2), "wz": (0, 3), "xy": (1, 2), "xz": (1, 3), "yz": (2, 3)}
INTEGRAL_NAMES = ("h",) + tuple("c_" + p for p in MOMENTUM_PLANES)


@dataclass(frozen=True)
class Configuration:
    space: Space
    masses: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    tol: float = field(default=TOL_CONSTRAINT, compare=False)

    def __post_init__(self):
        space = as_space(self.space)
        m = np.array(self.masses, dtype=float).reshape(-1)
        Q = np.array(self.positions, dtype=float).reshape(-1, 4)
        V = np.array(self.velocities, dtype=float).reshape(-1, 4)
        if not (len(m) == len(Q) == len(V)) or len(m) == 0:
            raise ValueError(f"inconsistent body counts: {len(m)} masses, {len(Q)} positions, {len(V)} velocities")
        if np.any(m <= 0) or not np.all(np.isfinite(m)):
            raise ValueError("masses must be positive and finite")
        qq = inner(space, Q, Q) - space.sigma
        qv = inner(space, Q, V)
        # far out on H3 the constraint only holds to rounding of |q|^2
        nq = np.linalg.norm(Q, axis=1)
        nv = np.linalg.norm(V, axis=1)
        bad = np.flatnonzero((np.abs(qq) > self.tol * np.maximum(1.0, nq * nq))
                             | (np.abs(qv) > self.tol * np.maximum(1.0, nq * nv)))
        if bad.size:
            i = int(bad[0])
            raise ValueError(f"body {i} not admissible: residuals ({qq[i]:.3e}, {qv[i]:.3e})")
        if space.sigma == -1 and np.any(Q[:, 3] < 1 - self.tol):
            raise ValueError("H3 bodies must lie on the upper sheet (z >= 1)")
        for name, arr in (("masses", m), ("positions", Q), ("velocities", V)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "space", space)

    @property
    def n(self) -> int:
        return len(self.masses)

    def state_vector(self) -> np.ndarray:
        return np.concatenate([self.positions.ravel(), self.velocities.ravel()])

    @classmethod
    def from_state(cls, space, masses, y, tol=TOL_CONSTRAINT):
        n = len(masses)
        return cls(space, masses, y[: 4 * n].reshape(n, 4), y[4 * n :].reshape(n, 4), tol=tol)


@dataclass(frozen=True)
class Integrals:
    h: float
    c_wx: float
    c_wy: float
    c_wz: float
    c_xy: float
    c_xz: float
    c_yz: float

    def as_array(self) -> np.ndarray:
        return np.array([self.h, self.c_wx, self.c_wy, self.c_wz, self.c_xy, self.c_xz, self.c_yz])

    @property
    def momenta(self) -> dict:
        return {p: getattr(self, "c_" + p) for p in MOMENTUM_PLANES}


def gram(space, positions) -> np.ndarray:
    """Matrix of pairwise inner products ``q_ij`` with the diagonal pinned to sigma."""
    space = as_space(space)
    Q = np.asarray(positions, dtype=float)
    G = (Q * space.metric) @ Q.T
    np.fill_diagonal(G, float(space.sigma))
    return G


def pair_gram(config: Configuration) -> np.ndarray:
    return gram(config.space, config.positions)


def _pair_gaps(sigma, G):
    """``sigma - sigma q_ij^2`` off the diagonal, checked against the singularity guard."""
    gap = sigma - sigma * G * G
    n = len(G)
    off = ~np.eye(n, dtype=bool)
    bad = off & ~(gap >= SING_EPS)
    if np.any(bad):
        i, j = (int(k) for k in np.argwhere(bad)[0])
        raise Singular(i, j, float(G[i, j]))
    gap[~off] = 1.0
    return gap


def accelerations(space, masses, positions, velocities) -> np.ndarray:
    """Array form of :func:`acceleration`, used by the integrator hot loop."""
    s = as_space(space).sigma
    Q = np.asarray(positions, dtype=float)
    V = np.asarray(velocities, dtype=float)
    m = np.asarray(masses, dtype=float)
    G = gram(s, Q)
    gap = _pair_gaps(s, G)
    W = m[None, :] / gap**1.5
    np.fill_diagonal(W, 0.0)
    # sum_j W_ij (q_j - sigma q_ij q_i), evaluated row by row in a fixed order
    A = W @ Q - s * (W * G).sum(axis=1)[:, None] * Q
    vv = inner(s, V, V)
    return A - s * vv[:, None] * Q


def acceleration(config: Configuration) -> np.ndarray:
    return accelerations(config.space, config.masses, config.positions, config.velocities)


def force_function(config: Configuration) -> float:
    s = config.space.sigma
    G = pair_gram(config)
    gap = _pair_gaps(s, G)
    m = config.masses
    iu = np.triu_indices(config.n, 1)
    terms = s * np.outer(m, m)[iu] * G[iu] / np.sqrt(gap[iu])
    return math.fsum(terms.tolist())


def kinetic_energy(config: Configuration) -> float:
    s = config.space.sigma
    Q, V = config.positions, config.velocities
    terms = 0.5 * config.masses * inner(s, V, V) * (s * inner(s, Q, Q))
    return math.fsum(terms.tolist())


def angular_momentum(masses, positions, velocities) -> dict:
    m = np.asarray(masses, dtype=float)
    Q = np.asarray(positions, dtype=float)
    V = np.asarray(velocities, dtype=float)
    out = {}
    for plane, (a, b) in _PLANE_INDEX.items():
        out[plane] = math.fsum((m * Q[:, a] * V[:, b]).tolist() + (-m * V[:, a] * Q[:, b]).tolist())
    return out


def integrals(config: Configuration) -> Integrals:
    h = kinetic_energy(config) - force_function(config)
    c = angular_momentum(config.masses, config.positions, config.velocities)
    return Integrals(h, *(c[p] for p in MOMENTUM_PLANES))
