"""How fast does the equilateral pe orbit lose its symmetry in the ambient system?

Integrates the lifted triangle with our integrator and with scipy's DOP853 and
prints the spread of the three pair products q_12, q_13, q_23 over time.
"""
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from curved_nbody import IntegratorSettings, lift, simulate_full
from curved_nbody.dynamics import accelerations, gram
from curved_nbody.errors import StepUnderflow
from curved_nbody.verification import pe_lagrangian


@dataclass
class Config:
    m: float = 1.0
    c: float = 1.0
    z0: float = 0.5
    t_end: float = 40.0
    every: float = 5.0
    rel_tol: float = 1e-10
    scipy_tol: float = 1e-12


def spread(space, P):
    G = gram(space, P)
    q = G[np.triu_indices(3, 1)]
    return float(q.max() - q.min())


def main(cfg: Config = Config()):
    ansatz, state = pe_lagrangian(cfg.m, cfg.c, cfg.z0)
    c0 = lift(ansatz, state)
    space = c0.space
    times = np.arange(0.0, cfg.t_end + 1e-9, cfg.every)

    try:
        ours = simulate_full(c0, IntegratorSettings(rel_tol=cfg.rel_tol, t_end=cfg.t_end, samples=len(times)))
        t_ours, P_ours = ours.times, ours.positions
    except StepUnderflow as exc:
        print(f"our integrator stopped: {exc}")
        t_ours, P_ours = exc.trajectory.times, exc.trajectory.positions

    def f(t, y):
        Q, V = y[:12].reshape(3, 4), y[12:].reshape(3, 4)
        return np.concatenate([y[12:], accelerations(space, c0.masses, Q, V).ravel()])

    ref = solve_ivp(f, (0, cfg.t_end), c0.state_vector(), method="DOP853", t_eval=times,
                    rtol=cfg.scipy_tol, atol=cfg.scipy_tol)
    if ref.status != 0:
        print(f"DOP853 stopped: {ref.message} (t={ref.t[-1]:.2f})")

    print(f"{'t':>6} {'ours':>12} {'DOP853':>12}")
    for k, t in enumerate(times):
        a = spread(space, P_ours[k]) if k < len(t_ours) else float("nan")
        b = spread(space, ref.y[:12, k].reshape(3, 4)) if k < ref.y.shape[1] else float("nan")
        print(f"{t:6.1f} {a:12.3e} {b:12.3e}")


if __name__ == "__main__":
    main()
