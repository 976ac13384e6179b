"""Adaptive time integration of the ambient system and of reduced systems.

The stepper is the Dormand-Prince 5(4) pair with a PI step-size controller.
Samples at requested times come from the pair's fourth-order continuous
extension. Full-system states (including samples) are projected back onto the
manifold every ``project_every`` accepted steps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .dynamics import (
    INTEGRAL_NAMES,
    Configuration,
    accelerations,
    gram,
    integrals,
)
from .errors import DomainExit, Singular, SingularityReached, StepUnderflow
from .manifold import Space, as_space, project_many

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B_LOW = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B - _B_LOW
ORDER = 5

# continuous extension of order 4 (Shampine); row s gives the theta^1..theta^4
# weights of stage s
_DENSE = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

_SAFETY = 0.9
DRIFT_ZERO = 1e-12
_PI_ALPHA = 0.7 / ORDER
_PI_BETA = 0.4 / ORDER
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


@dataclass(frozen=True)
class IntegratorSettings:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    h_init: float = 1e-3
    h_min: float = 1e-12
    h_max: float = 0.5
    project_every: int = 1
    t_end: float = 10.0
    samples: int = 1001
    max_steps: int = 10_000_000

    def __post_init__(self):
        if not (0 < self.h_min <= self.h_init <= self.h_max):
            raise ValueError("need 0 < h_min <= h_init <= h_max")
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.project_every < 0:
            raise ValueError("project_every must be >= 0 (0 disables projection)")
        if self.t_end <= 0:
            raise ValueError("t_end must be positive")
        if self.samples < 2:
            raise ValueError("need at least two samples")

    def sample_times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_end, self.samples)


@dataclass
class Trajectory:
    """Sampled solution. ``states`` has one row per sample time.

    For ambient runs ``space``/``masses`` are set and ``integrals`` holds the
    seven first integrals per sample (columns in ``INTEGRAL_NAMES`` order).
    For reduced runs ``system`` is the reduced system and ``monitors`` maps
    monitor names to per-sample arrays.
    """

    times: np.ndarray
    states: np.ndarray
    space: Optional[Space] = None
    masses: Optional[np.ndarray] = None
    system: object = None
    integrals: Optional[np.ndarray] = None
    monitors: dict = field(default_factory=dict)
    events: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    ansatz: object = None

    @property
    def is_full(self) -> bool:
        return self.system is None

    def __len__(self):
        return len(self.times)

    def _ambient(self):
        if self.is_full:
            n = len(self.masses)
            P = self.states[:, : 4 * n].reshape(-1, n, 4)
            V = self.states[:, 4 * n :].reshape(-1, n, 4)
            return P, V
        configs = [self.system.lift(y) for y in self.states]
        return np.stack([c.positions for c in configs]), np.stack([c.velocities for c in configs])

    @property
    def positions(self) -> np.ndarray:
        return self._ambient()[0]

    @property
    def velocities(self) -> np.ndarray:
        return self._ambient()[1]

    @property
    def ambient_space(self) -> Space:
        return self.space if self.is_full else self.system.space

    def configuration(self, k: int) -> Configuration:
        if self.is_full:
            return Configuration.from_state(self.space, self.masses, self.states[k])
        return self.system.lift(self.states[k])

    def pair_grams(self) -> np.ndarray:
        space = self.ambient_space
        return np.stack([gram(space, P) for P in self.positions])

    def integral_table(self) -> np.ndarray:
        if self.integrals is not None:
            return self.integrals
        return np.stack([integrals(self.configuration(k)).as_array() for k in range(len(self))])

    def drift(self) -> dict:
        """Max absolute and relative drift of each first integral from its initial value."""
        table = self.integral_table()
        out = {}
        for col, name in enumerate(INTEGRAL_NAMES):
            x0 = table[0, col]
            dev = float(np.max(np.abs(table[:, col] - x0)))
            # integrals that vanish analytically start at rounding level; measure those absolutely
            out[name] = {"initial": float(x0), "abs": dev, "rel": dev / abs(x0) if abs(x0) > DRIFT_ZERO else dev}
        return out


def _dense(y0, h, K, theta):
    powers = theta ** np.arange(1, 5)
    return y0 + h * (K.T @ (_DENSE @ powers))


def integrate_ode(
    f: Callable[[np.ndarray], np.ndarray],
    y0,
    settings: IntegratorSettings,
    sample_times=None,
    post_step: Optional[Callable[[np.ndarray], tuple]] = None,
    accept: Optional[Callable[[float, np.ndarray], None]] = None,
):
    """Integrate the autonomous system ``y' = f(y)`` from ``t = 0``.

    ``post_step(y) -> (y_projected, correction)`` runs every
    ``settings.project_every`` accepted steps. ``accept(t, y)`` is called on
    every accepted state and may raise to abort (e.g. domain exit).
    ``f`` may raise :class:`DomainExit` or :class:`Singular`; the step is then
    rejected and retried with a smaller size until ``h_min`` is reached.

    Returns ``(times, states, stats)``. On failure the raised exception carries
    ``partial = (times, states, stats)`` for the samples produced so far.
    """
    ts = settings.sample_times() if sample_times is None else np.asarray(sample_times, dtype=float)
    if ts[0] != 0.0 or np.any(np.diff(ts) <= 0):
        raise ValueError("sample times must start at 0 and be strictly increasing")
    t_end = float(ts[-1])
    y = np.array(y0, dtype=float)
    rtol, atol = settings.rel_tol, settings.abs_tol
    out = np.empty((len(ts), len(y)))
    out[0] = y
    k_out = 1
    stats = {"steps": 0, "rejected": 0, "nfev": 0, "projections": 0, "max_projection": 0.0}

    def fe(v):
        stats["nfev"] += 1
        return np.asarray(f(v), dtype=float)

    def fail(exc):
        exc.partial = (ts[:k_out].copy(), out[:k_out].copy(), stats)
        return exc

    t = 0.0
    try:
        fy = fe(y)
    except Singular as exc:
        raise fail(SingularityReached(0.0, exc.i, exc.j))
    h = min(settings.h_init, settings.h_max, t_end)
    err_prev = 1.0
    K = np.empty((7, len(y)))
    while t < t_end:
        if stats["steps"] >= settings.max_steps:
            raise fail(StepUnderflow(t, h))
        h = min(h, t_end - t)
        K[0] = fy
        try:
            for s in range(1, 7):
                ys = y + h * (np.dot(_A[s], K[:s]))
                K[s] = fe(ys)
            stage_error = None
        except (DomainExit, Singular) as exc:
            stage_error = exc
        if stage_error is not None:
            stats["rejected"] += 1
            h *= 0.25
            if h < settings.h_min:
                if isinstance(stage_error, Singular):
                    raise fail(SingularityReached(t, stage_error.i, stage_error.j))
                raise fail(DomainExit(t, "state left the admissible domain (step collapse at boundary)"))
            continue
        y_new = y + h * np.dot(_B[:6], K[:6])
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = math.sqrt(float(np.mean((h * np.dot(_E, K) / scale) ** 2)))
        if not math.isfinite(err):
            err = 1e10
        if err > 1.0:
            stats["rejected"] += 1
            h *= max(_MIN_FACTOR, _SAFETY * err ** (-1.0 / ORDER))
            if h < settings.h_min:
                raise fail(StepUnderflow(t, h))
            continue
        t_new = t + h if t + h < t_end else t_end
        f_new = K[6]
        stats["steps"] += 1
        if post_step is not None and settings.project_every and stats["steps"] % settings.project_every == 0:
            y_proj, corr = post_step(y_new)
            stats["projections"] += 1
            stats["max_projection"] = max(stats["max_projection"], corr)
            if corr != 0.0:
                y_new = y_proj
                f_new = fe(y_new)
        if accept is not None:
            try:
                accept(t_new, y_new)
            except DomainExit as exc:
                exc.t = t_new
                raise fail(exc)
        while k_out < len(ts) and ts[k_out] <= t_new:
            tk = ts[k_out]
            out[k_out] = y_new if tk == t_new else _dense(y, h, K, (tk - t) / h)
            k_out += 1
        t, y, fy = t_new, y_new, f_new
        err = max(err, 1e-10)
        fac = _SAFETY * err ** (-_PI_ALPHA) * err_prev**_PI_BETA
        h = min(settings.h_max, h * min(_MAX_FACTOR, max(_MIN_FACTOR, fac)))
        err_prev = err
    return ts, out, stats


def _full_rhs(space, masses):
    n = len(masses)
    m = np.asarray(masses, dtype=float)

    def f(y):
        Q = y[: 4 * n].reshape(n, 4)
        V = y[4 * n :].reshape(n, 4)
        return np.concatenate([y[4 * n :], accelerations(space, m, Q, V).ravel()])

    return f


def simulate_full(config: Configuration, settings: IntegratorSettings = IntegratorSettings(), sample_times=None) -> Trajectory:
    """Integrate the 6N-dimensional ambient system from an admissible configuration."""
    space = as_space(config.space)
    masses = np.array(config.masses)
    n = len(masses)
    f = _full_rhs(space, masses)

    def post(y):
        Q, V, corr = project_many(space, y[: 4 * n].reshape(n, 4), y[4 * n :].reshape(n, 4))
        return np.concatenate([Q.ravel(), V.ravel()]), corr

    def row_integrals(y):
        try:
            return integrals(Configuration.from_state(space, masses, y)).as_array()
        except Singular:
            return np.full(len(INTEGRAL_NAMES), np.nan)

    def finish(ts, states, stats, events):
        # dense-output samples lie between projected steps; put them back on the manifold
        states = np.stack([post(y)[0] for y in states]) if len(states) else states
        table = np.stack([row_integrals(y) for y in states])
        return Trajectory(ts, states, space=space, masses=masses, integrals=table, events=events, stats=stats)

    try:
        ts, states, stats = integrate_ode(f, config.state_vector(), settings, sample_times, post_step=post)
    except (StepUnderflow, DomainExit, SingularityReached) as exc:
        ts, states, stats = exc.partial
        exc.trajectory = finish(ts, states, stats, [{"t": exc.t, "event": type(exc).__name__}])
        raise
    events = [{"t": float(ts[-1]), "event": "max_projection", "value": stats["max_projection"]}]
    return finish(ts, states, stats, events)


def simulate_reduced(system, state0, settings: IntegratorSettings = IntegratorSettings(), sample_times=None) -> Trajectory:
    """Integrate a reduced system (criterion or family) with domain monitoring.

    ``system`` provides ``rhs(y)``, ``in_domain(y)`` and ``monitors(y)``.
    """
    y0 = np.array(state0, dtype=float)
    if not system.in_domain(y0):
        raise DomainExit(0.0, "initial state outside the admissible domain")

    def accept(t, y):
        if not system.in_domain(y):
            raise DomainExit(t)

    def finish(ts, states, stats, events):
        names = None
        rows = []
        for s in states:
            mon = system.monitors(s)
            names = names or list(mon)
            rows.append([mon[k] for k in names])
        monitors = {k: np.array([r[i] for r in rows]) for i, k in enumerate(names or [])}
        return Trajectory(ts, states, system=system, monitors=monitors, events=events, stats=stats,
                          ansatz=getattr(system, "ansatz", None))

    try:
        ts, states, stats = integrate_ode(system.rhs, y0, settings, sample_times, accept=accept)
    except (StepUnderflow, DomainExit, SingularityReached) as exc:
        ts, states, stats = exc.partial
        exc.trajectory = finish(ts, states, stats, [{"t": exc.t, "event": type(exc).__name__}])
        raise
    return finish(ts, states, stats, [])
